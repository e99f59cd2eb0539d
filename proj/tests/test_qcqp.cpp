#include <doctest.h>

#include "risfd/qcqp.hpp"
#include "pg_oracle.hpp"
#include "support.hpp"

using namespace risfd;
using namespace risfd::test;
namespace q = risfd::qcqp;

namespace {

// maximize -|x|^2 + 2 Re{x} subject to |x|^2 <= r2 (one complex variable).
q::ConvexQcqp scalar_instance(double r2) {
  QuadraticForm obj = QuadraticForm::zero(1);
  obj.A(0, 0) = -1.0;
  obj.b[0] = 1.0;
  QuadraticForm ball = QuadraticForm::zero(1);
  ball.A(0, 0) = 1.0;
  ball.c = -r2;
  return q::ConvexQcqp::from_complex(obj, {ball});
}

}  // namespace

TEST_CASE("interior unconstrained optimum") {
  const auto p = scalar_instance(4.0);
  const auto s = q::solve(p, RVector{0.0, 0.0});
  REQUIRE(s.status == q::Status::Optimal);
  CHECK(s.x[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(s.x[1]) < 1e-6);
  CHECK(s.objective_value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(q::kkt_residual(p, RVector{1.0, 0.0}, RVector{0.0}) <= 1e-8);
}

TEST_CASE("boundary optimum") {
  const auto p = scalar_instance(0.25);
  const auto s = q::solve(p, RVector{0.0, 0.0});
  REQUIRE(s.status == q::Status::Optimal);
  CHECK(std::abs(s.x[0] - 0.5) <= 1e-6);
  CHECK(std::abs(s.objective_value - 0.75) <= 1e-6);
  // Exact dual: grad f = 2(1 - x) = mu * 2x at x = 0.5, so mu = 1.
  CHECK(s.duals[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(s.kkt_residual <= 1e-6);
}

TEST_CASE("kkt residual is positive away from the optimum") {
  const auto p = scalar_instance(0.25);
  CHECK(q::kkt_residual(p, RVector{0.1, 0.2}, RVector{0.3}) > 0.0);
  CHECK_THROWS(q::kkt_residual(p, RVector{0.1, 0.2}, RVector{-1.0}));
}

TEST_CASE("find_feasible") {
  SUBCASE("ball contains the origin") {
    QuadraticForm ball = QuadraticForm::zero(2);
    ball.A = CMatrix::identity(2);
    ball.c = -4.0;
    const auto p = q::ConvexQcqp::from_complex(QuadraticForm::zero(2), {ball});
    const auto f = q::find_feasible(p);
    CHECK(f.feasible);
    CHECK(q::max_constraint(p, f.x) < 0.0);
  }
  SUBCASE("contradictory ball") {
    QuadraticForm ball = QuadraticForm::zero(2);
    ball.A = CMatrix::identity(2);
    ball.c = 1.0;
    const auto p = q::ConvexQcqp::from_complex(QuadraticForm::zero(2), {ball});
    const auto f = q::find_feasible(p);
    CHECK_FALSE(f.feasible);
    CHECK(f.max_violation > 0.0);
    CHECK(q::solve_any(p, RVector(4, 0.0)).status == q::Status::Infeasible);
  }
  SUBCASE("planted interior point") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
      const RVector planted = random_rvec(6, rng, 3.0);
      q::ConvexQcqp p;
      p.dim = 6;
      p.objective.q.assign(6, 0.0);
      for (int c = 0; c < 5; ++c) {
        // Ball of radius 0.5..1.5 around a point within distance 0.4 of the plant.
        RVector center = planted;
        const RVector jitter = random_rvec(6, rng, 0.1);
        for (int i = 0; i < 6; ++i) center[i] += jitter[i];
        const double r = 0.5 + c * 0.25;
        RealQuadratic ball;
        ball.P = RMatrix::identity(6);
        ball.q.resize(6);
        double cc = 0;
        for (int i = 0; i < 6; ++i) {
          ball.q[i] = -center[i];
          cc += center[i] * center[i];
        }
        ball.c = cc - r * r;
        p.constraints.push_back(q::Constraint::dense(ball));
      }
      REQUIRE(q::max_constraint(p, planted) < 0.0);
      const auto f = q::find_feasible(p, RVector(6, 0.0));
      CHECK(f.feasible);
      CHECK(q::max_constraint(p, f.x) < 0.0);
    }
  }
}

TEST_CASE("solve agrees with a projected-gradient oracle") {
  std::mt19937_64 rng(29);
  double worst = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = trial % 2 == 0 ? 1 : 2;  // complex dimension
    QuadraticForm obj;
    const CMatrix g = random_cmatrix(n + 1, n, rng);
    obj.A = (gram(g) + CMatrix::identity(n) * cplx(0.1)) * cplx(-1.0);
    obj.b = random_cvec(n, rng, 2.0);
    obj.c = 0.3;

    std::vector<QuadraticForm> cons;
    std::vector<Ball> balls;
    const int nb = trial % 3 == 0 ? 2 : 1;
    for (int b = 0; b < nb; ++b) {
      const CVector center = random_cvec(n, rng, 0.4);
      const double radius = std::sqrt(norm2(center)) + 0.2 + 0.3 * b;
      QuadraticForm c = QuadraticForm::zero(n);
      c.A = CMatrix::identity(n);
      for (std::size_t i = 0; i < n; ++i) c.b[i] = -center[i];
      c.c = norm2(center) - radius * radius;
      cons.push_back(c);
      balls.push_back({real_embed(center), radius});
    }
    const auto p = q::ConvexQcqp::from_complex(obj, cons);
    const auto s = q::solve_any(p, RVector(2 * n, 0.0));
    REQUIRE(s.status == q::Status::Optimal);
    CHECK(q::max_constraint(p, s.x) <= 1e-8);
    const double oracle = projected_gradient_oracle(p.objective, balls);
    worst = std::max(worst, std::abs(s.objective_value - oracle));
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("barrier stages are monotone and iterates stay feasible") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    QuadraticForm obj;
    obj.A = (gram(random_cmatrix(3, 3, rng)) + CMatrix::identity(3) * cplx(0.01)) * cplx(-1.0);
    obj.b = random_cvec(3, rng, 3.0);
    QuadraticForm ball = QuadraticForm::zero(3);
    ball.A = CMatrix::identity(3);
    ball.c = -1.0;
    QuadraticForm second = QuadraticForm::zero(3);
    second.A = gram(random_cmatrix(2, 3, rng));
    second.c = -0.5;
    const auto p = q::ConvexQcqp::from_complex(obj, {ball, second});
    const auto s = q::solve(p, RVector(6, 0.0));
    REQUIRE(s.status == q::Status::Optimal);
    for (std::size_t i = 1; i < s.stage_objectives.size(); ++i)
      CHECK(s.stage_objectives[i] >=
            s.stage_objectives[i - 1] - 1e-12 * (1.0 + std::abs(s.stage_objectives[i])));
    CHECK(q::max_constraint(p, s.x) <= 1e-8);
    CHECK(s.kkt_residual <= 1e-4);
  }
}

TEST_CASE("sparse and affine constraints") {
  // maximize -(x0 - 2)^2 - (x1 - 2)^2 subject to x0 <= 1 (affine, index {0})
  // and x1^2 <= 0.25 (quadratic on index {1}).
  q::ConvexQcqp p;
  p.dim = 2;
  p.objective.P = RMatrix::identity(2);
  p.objective.P(0, 0) = p.objective.P(1, 1) = -1.0;
  p.objective.q = {2.0, 2.0};
  p.objective.c = -8.0;
  p.constraints.push_back(q::Constraint::affine({0}, {1.0}, -1.0));
  q::Constraint c1;
  c1.index = {1};
  c1.P = RMatrix::identity(1);
  c1.q = {0.0};
  c1.c = -0.25;
  p.constraints.push_back(c1);
  const auto s = q::solve(p, RVector{0.0, 0.0});
  REQUIRE(s.status == q::Status::Optimal);
  CHECK(std::abs(s.x[0] - 1.0) < 1e-6);
  CHECK(std::abs(s.x[1] - 0.5) < 1e-6);
  CHECK(std::abs(s.objective_value + 1.0 + 2.25) < 1e-6);
}
