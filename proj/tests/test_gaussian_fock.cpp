#include "cvgme/errors.hpp"
#include "cvgme/gaussian_fock.hpp"

#include "doctest.h"

#include <cmath>

using namespace cvgme;

namespace {
QubitTuple bits(int i) { return {i >> 2 & 1, i >> 1 & 1, i & 1}; }
}  // namespace

// Independently computed at r = 0.3.
TEST_CASE("closed form elements at r = 0.3") {
  const double r = 0.3;
  CHECK(gaussian_fock_element_closed(r, {0, 0, 0}, {0, 0, 0}) == doctest::Approx(0.8611044297790339).epsilon(1e-13));
  CHECK(gaussian_fock_element_closed(r, {0, 0, 1}, {0, 0, 1}) == doctest::Approx(0.033434769067338665).epsilon(1e-13));
  CHECK(gaussian_fock_element_closed(r, {0, 1, 1}, {0, 1, 1}) == doctest::Approx(0.009491277605934503).epsilon(1e-13));
  CHECK(gaussian_fock_element_closed(r, {1, 1, 1}, {1, 1, 1}) ==
        doctest::Approx(0.0005216818209974208).epsilon(1e-13));
  CHECK(gaussian_fock_element_closed(r, {0, 0, 0}, {0, 1, 1}) == doctest::Approx(0.08356134096484981).epsilon(1e-13));
  CHECK(gaussian_fock_element_closed(r, {0, 0, 1}, {0, 1, 0}) ==
        doctest::Approx(-0.008520546009651386).epsilon(1e-13));
  CHECK(gaussian_fock_element_closed(r, {0, 0, 1}, {1, 1, 1}) ==
        doctest::Approx(0.0015908379867817912).epsilon(1e-13));
  CHECK(gaussian_fock_element_closed(r, {0, 1, 1}, {1, 0, 1}) == doctest::Approx(0.007862246071273187).epsilon(1e-13));
  // Odd total parity difference vanishes.
  CHECK(gaussian_fock_element_closed(r, {0, 0, 0}, {0, 0, 1}) == 0.0);
}

TEST_CASE("closed form table is symmetric and vanishes at r = 0") {
  const Matrix t = closed_form_table(0.6);
  CHECK((t - t.transpose()).cwiseAbs().maxCoeff() < 1e-15);
  const Matrix v = closed_form_table(0.0);
  CHECK(v(0, 0) == doctest::Approx(1.0));
  CHECK(v.cwiseAbs().sum() == doctest::Approx(1.0));
}

TEST_CASE("oracle reproduces the closed form") {
  for (double r : {0.1, 0.3, 0.6, 1.0}) {
    const GaussianFockOracle o(fs_mixture_cm(r), 1);
    double worst = 0;
    for (int a = 0; a < 8; ++a) {
      for (int b = 0; b < 8; ++b) {
        const auto x = bits(a), y = bits(b);
        worst = std::max(worst, std::abs(o.element(x, y) - gaussian_fock_element_closed(r, x, y)));
      }
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("oracle on tmsv and vacuum") {
  const double r = 0.5, l = std::tanh(r);
  const GaussianFockOracle o(tmsv_cm(r), 3);
  const int a[] = {1, 1}, b[] = {2, 2}, c[] = {3, 3}, off[] = {1, 2};
  CHECK(o.element(a, b).real() == doctest::Approx((1 - l * l) * std::pow(l, 3)).epsilon(1e-12));
  CHECK(o.element(c, c).real() == doctest::Approx((1 - l * l) * std::pow(l, 6)).epsilon(1e-12));
  CHECK(std::abs(o.element(a, off)) < 1e-15);

  const int z[] = {0};
  CHECK(gaussian_fock_element_oracle(CovarianceMatrix::identity(1), z, z).real() == doctest::Approx(1.0));
}

TEST_CASE("oracle diagonal sums stay below one") {
  const GaussianFockOracle o(fs_mixture_cm(0.3), 5);
  double s = 0;
  for (int a = 0; a < 6; ++a) {
    for (int b = 0; b < 6; ++b) {
      for (int c = 0; c < 6; ++c) {
        const int v[] = {a, b, c};
        const double d = o.element(v, v).real();
        CHECK(d >= -1e-15);
        s += d;
      }
    }
  }
  CHECK(s <= 1.0 + 1e-12);
  CHECK(s > 0.999);
}

TEST_CASE("quadrature cross-check") {
  const GaussianFockOracle o(fs_mixture_cm(0.3), 1);
  const int b[] = {0, 0, 1}, k[] = {0, 1, 0};
  CHECK(o.element_quadrature(b, k).real() == doctest::Approx(o.element(b, k).real()).epsilon(1e-8));
}

TEST_CASE("oracle input checks") {
  const GaussianFockOracle o(fs_mixture_cm(0.3), 1);
  const int two[] = {2, 0, 0}, z[] = {0, 0, 0}, short_t[] = {0, 0};
  CHECK_THROWS_AS(o.element(two, z), UsageError);
  CHECK_THROWS_AS(o.element(short_t, z), UsageError);
  CHECK_THROWS_AS(GaussianFockOracle(fs_mixture_cm(0.3), 13), UsageError);
}

TEST_CASE("vacuum dyad polynomial") {
  const CMatrix p = dyad_wigner_polynomial(0, 0);
  CHECK(p(0, 0).real() == doctest::Approx(1.0 / M_PI));
  const CMatrix q = dyad_wigner_polynomial(1, 1);
  // (2(x^2 + p^2) - 1) / pi
  CHECK(q(0, 0).real() == doctest::Approx(-1.0 / M_PI));
  CHECK(q(2, 0).real() == doctest::Approx(2.0 / M_PI));
  CHECK(q(0, 2).real() == doctest::Approx(2.0 / M_PI));
}

TEST_CASE("wigner function normalization") {
  const WignerGaussian w(CovarianceMatrix::identity(1));
  CHECK(w(Vector::Zero(2)) == doctest::Approx(1.0 / M_PI));
  CHECK(w.determinant() == doctest::Approx(1.0));
}

TEST_CASE("gauss hermite integrates polynomials") {
  std::vector<double> x, w;
  gauss_hermite(8, x, w);
  double m0 = 0, m2 = 0, m4 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    m0 += w[i];
    m2 += w[i] * x[i] * x[i];
    m4 += w[i] * std::pow(x[i], 4);
  }
  CHECK(m0 == doctest::Approx(std::sqrt(M_PI)));
  CHECK(m2 == doctest::Approx(std::sqrt(M_PI) / 2));
  CHECK(m4 == doctest::Approx(3 * std::sqrt(M_PI) / 4));
}

TEST_CASE("qubit projection") {
  const auto q = qubit_projection(0.4);
  CHECK(q.mode_dims() == std::vector<int>{2, 2, 2});
  CHECK(q.trace().real() == doctest::Approx(1.0));
  CHECK(min_eigenvalue(q.entries()) > -1e-12);
}

TEST_CASE("moments of the fs state reproduce the gaussian cm") {
  const auto m = moments_from_density(fs_state_density(0, std::tanh(0.5), 25));
  CHECK((m.cm.matrix() - fs_mixture_cm(0.5).matrix()).cwiseAbs().maxCoeff() < 1e-10);
}
