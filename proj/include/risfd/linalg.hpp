#pragma once
// Dense complex/real linear algebra used across the library.
//
// Matrices are row-major values. Sizes here are small (a few hundred at most),
// so everything is dense and allocation-per-result.

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace risfd {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;
using RVector = std::vector<double>;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols, cplx fill = {})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data);

  static CMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<const cplx> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<cplx> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  CVector col(std::size_t c) const;

  const std::vector<cplx>& data() const { return data_; }
  std::vector<cplx>& data() { return data_; }

  bool all_finite() const;
  double frobenius_norm() const;

  CMatrix& operator+=(const CMatrix& o);
  CMatrix& operator-=(const CMatrix& o);
  CMatrix& operator*=(cplx s);

  friend bool operator==(const CMatrix&, const CMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator*(CMatrix a, cplx s);
CMatrix operator*(const CMatrix& a, const CMatrix& b);
CVector operator*(const CMatrix& a, std::span<const cplx> x);

CMatrix hermitian(const CMatrix& m);
CMatrix diag_embed(std::span<const cplx> v);
// M^H M
CMatrix gram(const CMatrix& m);
// Row r of a as an (1 x cols) matrix.
CMatrix row_matrix(const CMatrix& a, std::size_t r);
// Entrywise |A - A^H| <= tol * max(1, max|A_ij|).
bool is_hermitian(const CMatrix& a, double tol = 1e-12);

// sum conj(a) b
cplx dotc(std::span<const cplx> a, std::span<const cplx> b);
double norm2(std::span<const cplx> x);

// Real row-major matrix, used by the real-variable solver.
class RMatrix {
 public:
  RMatrix() = default;
  RMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static RMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  double* row_ptr(std::size_t r) { return data_.data() + r * cols_; }
  const double* row_ptr(std::size_t r) const { return data_.data() + r * cols_; }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  double frobenius_norm() const;
  double trace() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// In-place Cholesky factorization of a symmetric positive definite matrix
// (lower triangle holds L on success). Returns false when a non-positive pivot
// is met.
bool cholesky_factor(RMatrix& a);
// Solves L L^T x = b with the factor from cholesky_factor.
RVector cholesky_solve(const RMatrix& l, std::span<const double> b);

// q(x) = x^H A x + 2 Re{b^H x} + c with A Hermitian.
struct QuadraticForm {
  CMatrix A;
  CVector b;
  double c = 0.0;

  std::size_t dim() const { return b.size(); }
  static QuadraticForm zero(std::size_t n);
};

double quad_eval(const QuadraticForm& q, std::span<const cplx> x);
// Gradient w.r.t. conj(x) scaled by 2: returns 2 (A x + b), the direction
// that drives first-order changes via Re{g^H dx}.
CVector quad_gradient(const QuadraticForm& q, std::span<const cplx> x);

// Real quadratic r(x) = x^T P x + 2 q^T x + c with P symmetric.
struct RealQuadratic {
  RMatrix P;  // empty means the zero matrix
  RVector q;
  double c = 0.0;

  std::size_t dim() const { return q.size(); }
};

double real_quad_eval(const RealQuadratic& q, std::span<const double> x);

// Complex <-> real embedding, layout (Re x; Im x).
RVector real_embed(std::span<const cplx> x);
CVector complex_unembed(std::span<const double> x);
// Hermitian A maps to [[Re A, -Im A], [Im A, Re A]], b to (Re b; Im b).
RealQuadratic real_embed(const QuadraticForm& q);

struct HermitianEigen {
  RVector values;   // descending
  CMatrix vectors;  // columns are the eigenvectors
};

// Cyclic Jacobi eigen-decomposition of a Hermitian matrix.
HermitianEigen hermitian_eigen(const CMatrix& a);

}  // namespace risfd
