#include "cvgme/errors.hpp"
#include "cvgme/symplectic.hpp"

#include "doctest.h"

#include <cmath>
#include <random>

using namespace cvgme;

namespace {
double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }
}  // namespace

TEST_CASE("symplectic form squares to minus identity") {
  const Matrix om = symplectic_form(3);
  CHECK(max_abs(om * om + Matrix::Identity(6, 6)) == 0.0);
  CHECK(om(0, 1) == 1.0);
  CHECK(om(1, 0) == -1.0);
}

TEST_CASE("covariance matrix construction") {
  Matrix m = Matrix::Identity(2, 2);
  m(0, 1) = 0.1;
  CHECK_THROWS_AS(CovarianceMatrix{m}, UsageError);
  CHECK_THROWS_AS(CovarianceMatrix{Matrix::Identity(3, 3)}, UsageError);
  CHECK(CovarianceMatrix::identity(2).is_physical());

  Matrix bad = 0.5 * Matrix::Identity(2, 2);
  CHECK_FALSE(CovarianceMatrix(bad).is_physical());
  CHECK_THROWS_AS(CovarianceMatrix(bad).require_physical(), InvalidCovarianceError);
}

TEST_CASE("bipartitions") {
  const auto all = all_bipartitions(3);
  REQUIRE(all.size() == 3);
  for (const auto& b : all) {
    CHECK(b.contains_a(0));
    CHECK(b.group_a().size() + b.group_b().size() == 3);
  }
  CHECK(all_bipartitions(4).size() == 7);
  CHECK_THROWS_AS(ModeBipartition({0, 1, 2}, 3), UsageError);
  CHECK_THROWS_AS(ModeBipartition({3}, 3), UsageError);

  const auto e = expand_to_modes(ModeBipartition({1}, 3), {{0, 3}, {1, 4}, {2, 5}});
  CHECK(e.group_a() == std::vector<int>{1, 4});
  CHECK(e.group_b() == std::vector<int>{0, 2, 3, 5});
}

TEST_CASE("tmsv spectrum and purity") {
  for (double r : {0.0, 0.3, 1.1}) {
    const auto t = tmsv_cm(r);
    const auto nu = symplectic_eigenvalues(t);
    CHECK(nu[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(nu[1] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(purity(t) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(ppt_min_symplectic_eigenvalue(t, ModeBipartition({0}, 2)) == doctest::Approx(std::exp(-2 * r)));
  }
}

TEST_CASE("fs mixture closed forms") {
  for (int i = 0; i <= 200; ++i) {
    const double r = 2.0 * i / 200;
    const auto g = fs_mixture_cm(r);
    CHECK(std::abs(ppt_min_symplectic_eigenvalue(g, ModeBipartition({0}, 3)) - fs_mixture_nu_minus_closed(r)) <
          1e-9);
    CHECK(g.matrix().determinant() == doctest::Approx(fs_mixture_det_closed(r)).epsilon(1e-10));
    CHECK(g.is_physical());
  }
  // Oracle: the root of nu_minus = 1.
  CHECK(fs_mixture_separability_threshold() == doctest::Approx(1.2427477467890362).epsilon(1e-12));
  CHECK(fs_mixture_nu_minus_closed(0.5) == doctest::Approx(0.76808).epsilon(1e-5));
}

TEST_CASE("ppt verdicts") {
  const auto ent = ppt_test(fs_mixture_cm(0.5), ModeBipartition({0}, 3));
  CHECK(ent.verdict == PptVerdict::Entangled);
  CHECK(ent.one_vs_rest);
  CHECK(ppt_test(fs_mixture_cm(1.5), ModeBipartition({0}, 3)).verdict == PptVerdict::Separable);
  CHECK(ppt_test(CovarianceMatrix::identity(4), ModeBipartition({0, 1}, 4)).verdict == PptVerdict::Inconclusive);
}

TEST_CASE("partial transpose flips momenta") {
  const auto t = tmsv_cm(0.4);
  const int modes[] = {1};
  const auto pt = partial_transpose_cm(t, modes);
  CHECK(pt(0, 3) == doctest::Approx(-t(0, 3)));
  CHECK(pt(3, 3) == doctest::Approx(t(3, 3)));
  CHECK(pt(0, 2) == doctest::Approx(t(0, 2)));
}

TEST_CASE("random valid covariance matrices") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 50; ++k) {
    const auto g = random_valid_cm(1 + k % 4, rng);
    CHECK(g.is_physical());
    const auto nu = symplectic_eigenvalues(g);
    CHECK(nu.front() >= 1.0 - 1e-9);
    CHECK(std::is_sorted(nu.begin(), nu.end()));
  }
}

TEST_CASE("ps mixture is physical and symmetric under a and c") {
  for (double r : {0.1, 0.7, 1.9}) {
    const auto g = ps_mixture_cm(r);
    CHECK(g.is_physical());
    CHECK(g(0, 0) == doctest::Approx(g(4, 4)));
  }
}

TEST_CASE("direct sum and embedding") {
  const auto d = direct_sum(tmsv_cm(0.3), CovarianceMatrix::identity(1));
  CHECK(d.n_modes() == 3);
  CHECK(max_abs(d.matrix() - embed_two_mode(tmsv_cm(0.3), 0, 1, 3).matrix()) < 1e-15);
}

TEST_CASE("multi-copy gap is copy invariant") {
  for (double r : {0.3, 0.8, 1.6}) {
    const auto g = fs_mixture_cm(r);
    const auto terms = fs_mixture_decomposition(r);
    const double g1 = multi_copy_gap(g, terms, 1);
    CHECK(std::abs(g1) < 1e-12);
    for (int k = 2; k <= 4; ++k) CHECK(std::abs(multi_copy_gap(g, terms, k) - g1) < 1e-12);
    CHECK(max_abs(decomposition_gap(g, terms)) < 1e-12);
    for (const auto& t : terms) CHECK(off_block_norm(t.cm.matrix(), t.bipartition) < 1e-15);
  }
}
