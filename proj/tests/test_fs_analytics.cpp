#include "cvgme/errors.hpp"
#include "cvgme/fs_analytics.hpp"

#include "doctest.h"

#include <cmath>

using namespace cvgme;

TEST_CASE("fs matrix elements") {
  const double l = 0.4, w = (1 - l * l) / 3;
  CHECK(fs_matrix_element(0, l, {0, 0, 0}, {0, 0, 0}) == doctest::Approx(3 * w));
  CHECK(fs_matrix_element(0, l, {1, 1, 0}, {2, 2, 0}) == doctest::Approx(w * std::pow(l, 3)));
  CHECK(fs_matrix_element(0, l, {1, 1, 0}, {1, 0, 1}) == 0.0);
  CHECK(fs_matrix_element(2, l, {2, 1, 1}, {2, 0, 0}) == doctest::Approx(w * l));
  CHECK_THROWS_AS(fs_matrix_element(0, 1.0, {0, 0, 0}, {0, 0, 0}), DomainError);
}

TEST_CASE("fs matrix elements agree with the truncated state") {
  const double l = 0.55;
  const auto rho = fs_state_density(1, l, 6);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      for (int c = 0; c < 3; ++c) {
        const Triple bra{a, b, c};
        const Triple ket{b, a, c};
        CHECK(rho.element(bra, ket).real() == doctest::Approx(fs_matrix_element(1, l, bra, ket)).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("pt block spectrum of the n = 0 state") {
  const int cutoff = 10;
  for (double l : {0.3, 0.5, 0.7}) {
    const auto rho = fs_state_density(0, l, cutoff);
    const int a[] = {0};
    const CMatrix pt = CMatrix(partial_transpose(rho, a));
    for (int m = 1; m <= 3; ++m) {
      const auto mu = pt_block_eigenvalues(l, m);
      CHECK(mu.mu_minus == doctest::Approx(-std::sqrt(2.0) / 3 * (1 - l * l) * std::pow(l, m)));
      const CVector v = pt_block_eigenvector(m, cutoff);
      CHECK(v.norm() == doctest::Approx(1.0));
      CHECK((pt * v - mu.mu_minus * v).norm() < 1e-12);
    }
  }
  CHECK_THROWS_AS(pt_block_eigenvalues(0.5, 0), UsageError);
}

TEST_CASE("two-copy gabriel closed form and generic evaluator") {
  for (double l : {0.1, 0.5, std::tanh(1.0), 0.9}) {
    const auto g = gabriel_two_copy_fs(0, l);
    CHECK(g.violated);
    CHECK(g.rhs == 0.0);
    CHECK(g.lhs == doctest::Approx((1 - l * l) * (1 - l * l) * l * l / 9));
    CHECK(std::abs(g.generic_lhs - g.lhs) < 1e-10);
    CHECK(std::abs(g.generic_rhs) < 1e-10);
  }
  CHECK(gabriel_two_copy_fs(0, std::tanh(1.0)).lhs == doctest::Approx(0.011367113911387165).epsilon(1e-13));
  CHECK(gabriel_two_copy_fs(2, 0.5).violated);
  CHECK_FALSE(gabriel_two_copy_fs(0, 0.0).violated);
  CHECK_THROWS_AS(gabriel_two_copy_fs(4, 0.5, 5), UsageError);
}

TEST_CASE("two-qubit reduction is pure and entangled") {
  const double l = 0.6;
  const auto q = fs_two_qubit_reduction(2, l, 0, 1, 10);
  CHECK(q.dim() == 4);
  CHECK(q.trace().real() == doctest::Approx(1.0));
  const CMatrix d = q.dense();
  CHECK((d * d).trace().real() == doctest::Approx(1.0).epsilon(1e-10));
  const int b[] = {1};
  const double c = l / (1 + l * l);
  CHECK(min_eigenvalue(partial_transpose(q, b)) == doctest::Approx(-c).epsilon(1e-10));
}
