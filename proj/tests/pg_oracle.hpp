#pragma once
// Projected-gradient reference for concave quadratics over intersections of
// balls, independent of the barrier solver.

#include <cmath>
#include <vector>

#include "risfd/linalg.hpp"

namespace risfd::test {

struct Ball {
  RVector center;
  double radius;
};

inline RVector project_ball(RVector x, const Ball& b) {
  double d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) d += (x[i] - b.center[i]) * (x[i] - b.center[i]);
  d = std::sqrt(d);
  if (d <= b.radius) return x;
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = b.center[i] + (x[i] - b.center[i]) * b.radius / d;
  return x;
}

// Dykstra's alternating projections onto an intersection of balls.
inline RVector project(const RVector& x, const std::vector<Ball>& balls) {
  if (balls.size() == 1) return project_ball(x, balls[0]);
  const std::size_t n = x.size();
  std::vector<RVector> inc(balls.size(), RVector(n, 0.0));
  RVector y = x;
  for (int it = 0; it < 5000; ++it) {
    double change = 0;
    for (std::size_t k = 0; k < balls.size(); ++k) {
      RVector z(n);
      for (std::size_t i = 0; i < n; ++i) z[i] = y[i] + inc[k][i];
      const RVector p = project_ball(z, balls[k]);
      for (std::size_t i = 0; i < n; ++i) {
        inc[k][i] = z[i] - p[i];
        change += std::abs(p[i] - y[i]);
      }
      y = p;
    }
    if (change < 1e-15) break;
  }
  return y;
}

// Projected gradient ascent with step 1/L on f(x) = x'Px + 2q'x + c.
inline double projected_gradient_oracle(const RealQuadratic& f, const std::vector<Ball>& balls) {
  const std::size_t n = f.dim();
  double lip = 0;
  for (double v : f.P.data()) lip += v * v;
  lip = 2.0 * std::sqrt(lip);
  RVector x = project(RVector(n, 0.0), balls);
  for (int it = 0; it < 1000000; ++it) {
    RVector g(n);
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = 2.0 * f.q[i];
      for (std::size_t j = 0; j < n; ++j) g[i] += 2.0 * f.P(i, j) * x[j];
    }
    RVector y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + g[i] / lip;
    y = project(y, balls);
    double step = 0;
    for (std::size_t i = 0; i < n; ++i) step += std::abs(y[i] - x[i]);
    x = y;
    if (step < 1e-14) break;
  }
  return real_quad_eval(f, x);
}

}  // namespace risfd::test
