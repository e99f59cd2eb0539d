#include "risfd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "risfd/kernels.hpp"

namespace risfd {

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols)
    throw DimensionError("CMatrix: entry count " + std::to_string(data_.size()) +
                         " != " + std::to_string(rows) + "x" + std::to_string(cols));
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CVector CMatrix::col(std::size_t c) const {
  CVector v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

bool CMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](const cplx& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

double CMatrix::frobenius_norm() const {
  return std::sqrt(kernels::active().cnorm2(data_.data(), data_.size()));
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionError("CMatrix +=: shape");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionError("CMatrix -=: shape");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(cplx s) {
  for (auto& z : data_) z *= s;
  return *this;
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
CMatrix operator*(CMatrix a, cplx s) { return a *= s; }

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows())
    throw DimensionError("CMatrix *: inner dimensions " + std::to_string(a.cols()) +
                         " vs " + std::to_string(b.rows()));
  CMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

CVector operator*(const CMatrix& a, std::span<const cplx> x) {
  if (a.cols() != x.size()) throw DimensionError("CMatrix * vector: dimension");
  const auto& k = kernels::active();
  CVector y(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) y[r] = k.cdotu(a.row(r).data(), x.data(), x.size());
  return y;
}

CMatrix hermitian(const CMatrix& m) {
  CMatrix h(m.cols(), m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) h(c, r) = std::conj(m(r, c));
  return h;
}

CMatrix diag_embed(std::span<const cplx> v) {
  CMatrix d(v.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i) d(i, i) = v[i];
  return d;
}

CMatrix gram(const CMatrix& m) {
  const std::size_t n = m.cols();
  CMatrix g(n, n);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    for (std::size_t i = 0; i < n; ++i) {
      const cplx ci = std::conj(row[i]);
      if (ci == cplx{}) continue;
      for (std::size_t j = 0; j < n; ++j) g(i, j) += ci * row[j];
    }
  }
  return g;
}

CMatrix row_matrix(const CMatrix& a, std::size_t r) {
  auto row = a.row(r);
  return CMatrix(1, a.cols(), std::vector<cplx>(row.begin(), row.end()));
}

bool is_hermitian(const CMatrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  double scale = 1.0;
  for (const auto& z : a.data()) scale = std::max(scale, std::abs(z));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i; j < a.cols(); ++j)
      if (std::abs(a(i, j) - std::conj(a(j, i))) > tol * scale) return false;
  return true;
}

cplx dotc(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw DimensionError("dotc: length mismatch");
  return kernels::active().cdotc(a.data(), b.data(), a.size());
}

double norm2(std::span<const cplx> x) {
  return kernels::active().cnorm2(x.data(), x.size());
}

RMatrix RMatrix::identity(std::size_t n) {
  RMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double RMatrix::frobenius_norm() const {
  return std::sqrt(kernels::active().dot(data_.data(), data_.data(), data_.size()));
}

double RMatrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

bool cholesky_factor(RMatrix& a) {
  const std::size_t n = a.rows();
  const auto& k = kernels::active();
  for (std::size_t j = 0; j < n; ++j) {
    double* lj = a.row_ptr(j);
    const double d = lj[j] - k.dot(lj, lj, j);
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    const double ljj = std::sqrt(d);
    lj[j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double* li = a.row_ptr(i);
      li[j] = (li[j] - k.dot(li, lj, j)) / ljj;
    }
  }
  return true;
}

RVector cholesky_solve(const RMatrix& l, std::span<const double> b) {
  const std::size_t n = l.rows();
  const auto& k = kernels::active();
  RVector y(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = (y[i] - k.dot(l.row_ptr(i), y.data(), i)) / l(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= l(j, ii) * y[j];
    y[ii] = s / l(ii, ii);
  }
  return y;
}

QuadraticForm QuadraticForm::zero(std::size_t n) {
  return QuadraticForm{CMatrix(n, n), CVector(n), 0.0};
}

double quad_eval(const QuadraticForm& q, std::span<const cplx> x) {
  const std::size_t n = q.b.size();
  if (x.size() != n || q.A.rows() != n || q.A.cols() != n)
    throw DimensionError("quad_eval: dimension mismatch");
  const CVector ax = q.A * x;
  // The imaginary residue of x^H A x is rounding noise for Hermitian A.
  const double xax = dotc(x, ax).real();
  return xax + 2.0 * dotc(q.b, x).real() + q.c;
}

CVector quad_gradient(const QuadraticForm& q, std::span<const cplx> x) {
  CVector g = q.A * x;
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = 2.0 * (g[i] + q.b[i]);
  return g;
}

double real_quad_eval(const RealQuadratic& q, std::span<const double> x) {
  const std::size_t n = q.q.size();
  if (x.size() != n) throw DimensionError("real_quad_eval: dimension mismatch");
  const auto& k = kernels::active();
  double v = 2.0 * k.dot(q.q.data(), x.data(), n) + q.c;
  if (!q.P.empty()) {
    RVector px(n);
    k.gemv(q.P.data().data(), n, n, x.data(), px.data());
    v += k.dot(x.data(), px.data(), n);
  }
  return v;
}

RVector real_embed(std::span<const cplx> x) {
  const std::size_t n = x.size();
  RVector r(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = x[i].real();
    r[n + i] = x[i].imag();
  }
  return r;
}

CVector complex_unembed(std::span<const double> x) {
  if (x.size() % 2 != 0) throw DimensionError("complex_unembed: odd length");
  const std::size_t n = x.size() / 2;
  CVector c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = {x[i], x[n + i]};
  return c;
}

RealQuadratic real_embed(const QuadraticForm& q) {
  const std::size_t n = q.b.size();
  if (q.A.rows() != n || q.A.cols() != n) throw DimensionError("real_embed: shape");
  RealQuadratic r;
  r.P = RMatrix(2 * n, 2 * n);
  r.q.resize(2 * n);
  r.c = q.c;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double re = q.A(i, j).real();
      const double im = q.A(i, j).imag();
      r.P(i, j) = re;
      r.P(i, n + j) = -im;
      r.P(n + i, j) = im;
      r.P(n + i, n + j) = re;
    }
    r.q[i] = q.b[i].real();
    r.q[n + i] = q.b[i].imag();
  }
  return r;
}

HermitianEigen hermitian_eigen(const CMatrix& input) {
  if (!is_hermitian(input, 1e-10))
    throw std::invalid_argument("hermitian_eigen: matrix is not Hermitian");
  const std::size_t n = input.rows();
  CMatrix a = input;
  CMatrix v = CMatrix::identity(n);
  const double scale = std::max(a.frobenius_norm(), 1e-300);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < 100 && off_norm() > 1e-15 * scale; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double mag = std::abs(a(p, q));
        if (mag <= 1e-300) continue;
        // Phase q so that a(p,q) becomes real and positive, then apply a real
        // Jacobi rotation in the (p,q) plane.
        const cplx phase = a(p, q) / mag;
        for (std::size_t i = 0; i < n; ++i) a(i, q) *= std::conj(phase);
        for (std::size_t j = 0; j < n; ++j) a(q, j) *= phase;
        for (std::size_t i = 0; i < n; ++i) v(i, q) *= std::conj(phase);

        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double apq = a(p, q).real();
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          const cplx aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
        for (std::size_t j = 0; j < n; ++j) {
          const cplx apj = a(p, j), aqj = a(q, j);
          a(p, j) = c * apj - s * aqj;
          a(q, j) = s * apj + c * aqj;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const cplx vip = v(i, p), viq = v(i, q);
          v(i, p) = c * vip - s * viq;
          v(i, q) = s * vip + c * viq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a(x, x).real() > a(y, y).real();
  });
  HermitianEigen out{RVector(n), CMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

}  // namespace risfd
