#include "cvgme/errors.hpp"
#include "cvgme/sdp.hpp"

#include "doctest.h"

#include <random>
#include <sstream>

using namespace cvgme;

namespace {

// max -t s.t. [[t, 1], [1, t]] >= 0, i.e. t >= 1.
SdpProblem two_by_two() {
  SdpProblem p;
  const int b = p.add_block(2);
  p.objective.add(b, 0, 1, 1.0);
  LinearForm f;
  f.add(b, 0, 0, -1.0);
  f.add(b, 1, 1, -1.0);
  p.add_constraint(f, -1.0);
  return p;
}

// min <C, X> s.t. Tr X = 1: the smallest eigenvalue of C.
SdpProblem min_eigenvalue_problem(const Matrix& c) {
  SdpProblem p;
  const int b = p.add_block(static_cast<int>(c.rows()));
  add_symmetric(p.objective, b, c);
  LinearForm f;
  add_symmetric(f, b, Matrix::Identity(c.rows(), c.cols()));
  p.add_constraint(f, 1.0);
  return p;
}

}  // namespace

TEST_CASE("trace minimization") {
  SdpProblem p;
  const int b = p.add_block(2);
  add_symmetric(p.objective, b, Matrix::Identity(2, 2));
  LinearForm f;
  f.add(b, 0, 0, 1.0);
  p.add_constraint(f, 1.0);
  const auto s = solve(p);
  REQUIRE(s.status == SdpStatus::Optimal);
  CHECK(s.primal_objective == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(s.x[0](0, 0) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("dual variable of a 2x2 lmi") {
  const auto s = solve(two_by_two());
  REQUIRE(s.status == SdpStatus::Optimal);
  CHECK(s.dual_objective == doctest::Approx(-1.0).epsilon(1e-7));
  CHECK(s.y(0) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("weak duality and residuals on random eigenvalue problems") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  for (int t = 0; t < 20; ++t) {
    const int d = 2 + t % 6;
    Matrix c(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) c(i, j) = n(rng);
    c = (c + c.transpose()).eval();
    const auto p = min_eigenvalue_problem(c);
    const auto s = solve(p);
    REQUIRE(s.status == SdpStatus::Optimal);
    Eigen::SelfAdjointEigenSolver<Matrix> es(c);
    CHECK(s.primal_objective == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-6));
    CHECK(s.primal_objective >= s.dual_objective - 1e-7 * (1 + std::abs(s.primal_objective)));
    CHECK(min_block_eigenvalue(s.x) > -1e-9);
    CHECK(min_block_eigenvalue(s.s) > -1e-9);
    // Certificate re-verification from scratch.
    CHECK(std::abs(evaluate(p.constraints[0], s.x) - 1.0) < 1e-8);
    const auto aty = adjoint(p, s.y);
    const auto cb = dense_blocks(p, p.objective);
    CHECK(((cb[0] - aty[0]) - s.s[0]).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("primal infeasibility certificate") {
  SdpProblem p;
  const int b = p.add_block(1);
  LinearForm f;
  f.add(b, 0, 0, 1.0);
  p.add_constraint(f, -1.0);
  const auto s = solve(p);
  CHECK(s.status == SdpStatus::InfeasibleCertificate);
  CHECK(s.certificate == Certificate::PrimalInfeasible);
  // b^T y = 1 and -A^T y >= 0.
  CHECK(-s.ray_y(0) == doctest::Approx(1.0));
}

TEST_CASE("dual infeasibility certificate") {
  // min -X11 - X22 s.t. X12 = 0: unbounded below.
  SdpProblem p;
  const int b = p.add_block(2);
  p.objective.add(b, 0, 0, -1.0);
  p.objective.add(b, 1, 1, -1.0);
  LinearForm f;
  f.add(b, 0, 1, 1.0);
  p.add_constraint(f, 0.0);
  const auto s = solve(p);
  CHECK(s.status == SdpStatus::InfeasibleCertificate);
  CHECK(s.certificate == Certificate::DualInfeasible);
  REQUIRE(s.ray_x.size() == 1);
  CHECK(evaluate(p.objective, s.ray_x) == doctest::Approx(-1.0));
  CHECK(std::abs(evaluate(p.constraints[0], s.ray_x)) < 1e-6);
  CHECK(min_block_eigenvalue(s.ray_x) > -1e-9);
}

TEST_CASE("hermitian block") {
  SdpProblem p;
  const int b = p.add_block(2, BlockKind::Hermitian);
  CMatrix h(2, 2);
  h << 1.0, Complex(0, 1), Complex(0, -1), 1.0;
  add_hermitian(p.objective, b, h);
  LinearForm f;
  add_hermitian(f, b, CMatrix::Identity(2, 2));
  p.add_constraint(f, 1.0);
  const auto s = solve(p);
  REQUIRE(s.status == SdpStatus::Optimal);
  CHECK(std::abs(s.primal_objective) < 1e-7);
  const CMatrix y = hermitian_value(s.x[0]);
  CHECK(y(0, 1).imag() == doctest::Approx(-0.5).epsilon(1e-6));
  CHECK(y(1, 0).imag() == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("hermitian embedding round trip") {
  CMatrix h(2, 2);
  h << 2.0, Complex(1, -3), Complex(1, 3), 5.0;
  LinearForm f;
  add_hermitian(f, 0, h);
  SdpProblem p;
  p.add_block(2, BlockKind::Hermitian);
  const Matrix m = dense_blocks(p, f)[0];
  CHECK(hermitian_value(2.0 * m).isApprox(h));
}

TEST_CASE("validation") {
  SdpProblem p;
  p.add_block(2);
  LinearForm f;
  f.entries.push_back({0, 1, 0, 1.0});
  p.add_constraint(f, 1.0);
  CHECK_THROWS_AS(p.validate(), UsageError);
  SdpProblem q;
  q.add_block(2);
  LinearForm g;
  g.add(3, 0, 0, 1.0);
  q.add_constraint(g, 1.0);
  CHECK_THROWS_AS(q.validate(), UsageError);
  CHECK_THROWS_AS(q.add_block(0), UsageError);
}

TEST_CASE("dump and load round trip") {
  const auto p = two_by_two();
  std::stringstream ss;
  dump(p, ss);
  const auto q = load(ss);
  REQUIRE(q.blocks.size() == 1);
  REQUIRE(q.n_constraints() == 1);
  const auto a = solve(p), b = solve(q);
  CHECK(a.dual_objective == doctest::Approx(b.dual_objective));
  std::stringstream bad("blocks two");
  CHECK_THROWS_AS(load(bad), UsageError);
}

TEST_CASE("unreachable tolerances end near optimal") {
  SdpOptions o;
  o.feasibility_tol = 1e-30;
  o.gap_tol = 1e-30;
  const auto s = solve(two_by_two(), o);
  CHECK(s.status == SdpStatus::NearOptimal);
  CHECK(s.iterations < o.max_iterations);
  CHECK(s.dual_objective == doctest::Approx(-1.0).epsilon(1e-7));

  o.near_gap_tol = 1e-40;
  o.near_feasibility_tol = 1e-40;
  CHECK(solve(two_by_two(), o).status == SdpStatus::NumericalFailure);
}
