#include "cvgme/entanglement_sdp.hpp"
#include "cvgme/errors.hpp"
#include "cvgme/gaussian_fock.hpp"

#include "doctest.h"

#include <cmath>
#include <random>

using namespace cvgme;

namespace {

CovarianceMatrix random_biseparable(std::span<const ModeBipartition> bips, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  const int n = bips.front().size();
  Matrix g = Matrix::Zero(2 * n, 2 * n);
  std::vector<double> w;
  double total = 0;
  for (std::size_t i = 0; i < bips.size(); ++i) total += w.emplace_back(e(rng));
  for (std::size_t i = 0; i < bips.size(); ++i) {
    for (const auto* group : {&bips[i].group_a(), &bips[i].group_b()}) {
      const auto block = random_valid_cm(static_cast<int>(group->size()), rng, 0.6, 0.5);
      const auto q = quadrature_indices(*group);
      for (std::size_t a = 0; a < q.size(); ++a)
        for (std::size_t b = 0; b < q.size(); ++b) g(q[a], q[b]) += w[i] / total * block(a, b);
    }
  }
  return CovarianceMatrix(g);
}

double trace_product(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b).sum(); }

}  // namespace

TEST_CASE("vacuum is biseparable") {
  const auto bips = copies_bipartitions(1);
  const auto r = cm_bisep_feasibility(CovarianceMatrix::identity(3), bips);
  REQUIRE(std::holds_alternative<Feasible>(r));
  const auto& d = std::get<Feasible>(r).decomposition;
  double s = 0;
  for (double p : d.weights) s += p;
  CHECK(s == doctest::Approx(1.0));
  for (std::size_t i = 0; i < d.blocks.size(); ++i) {
    if (d.blocks[i]) CHECK((d.blocks[i]->matrix() - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-5);
  }
}

TEST_CASE("fs mixture is biseparable by construction") {
  const auto bips = copies_bipartitions(1);
  for (double r : {0.2, 0.5, 1.0}) {
    const auto g = fs_mixture_cm(r);
    const auto res = cm_bisep_feasibility(g, bips);
    REQUIRE(std::holds_alternative<Feasible>(res));
    const auto& d = std::get<Feasible>(res).decomposition;
    const auto c = check_decomposition(g, bips, d);
    CHECK(c.remainder_min_eig > -1e-7);
    CHECK(c.validity_min_eig > -1e-7);
    CHECK(d.total_weight >= 1.0 - 1e-6);
    CHECK(optimal_cm_witness(g, bips).value >= -1e-7);
  }
  // Frozen from the solver: the best achievable excess at r = 0.5.
  CHECK(optimal_cm_witness(fs_mixture_cm(0.5), bips).value == doctest::Approx(0.0119823).epsilon(1e-4));
}

TEST_CASE("pair compound is detected") {
  const auto bips = pair_compound_bipartitions();
  const auto g = pair_compound_cm(0.5, 0.5);
  const auto res = cm_bisep_feasibility(g, bips);
  REQUIRE(std::holds_alternative<Infeasible>(res));
  const auto& w = std::get<Infeasible>(res).witness;
  CHECK(w.value == doctest::Approx(-0.048854).epsilon(1e-4));
  CHECK(trace_product(w.matrix, g.matrix()) < 1.0 - 1e-7);

  Eigen::SelfAdjointEigenSolver<Matrix> es(w.matrix);
  CHECK(es.eigenvalues().minCoeff() > -1e-8);
  for (const auto& b : bips) CHECK(cm_witness_bound(w.matrix, b) >= 1.0 - 1e-6);

  std::mt19937_64 rng(17);
  for (int t = 0; t < 200; ++t) {
    const auto bs = random_biseparable(bips, rng);
    CHECK(trace_product(w.matrix, bs.matrix()) >= 1.0 - 1e-6);
  }
}

TEST_CASE("pair compound near the origin sits on the detection boundary") {
  const auto w = optimal_cm_witness(pair_compound_cm(1e-3, 1e-3), pair_compound_bipartitions());
  CHECK(std::abs(w.value) < 1e-5);
}

TEST_CASE("identity witness is tight") {
  const auto bips = pair_compound_bipartitions();
  const auto w = optimal_cm_witness(CovarianceMatrix::identity(6), bips);
  CHECK(w.value >= -1e-8);
  CHECK(w.value < 1e-6);
  CHECK(trace_product(w.matrix, Matrix::Identity(12, 12)) == doctest::Approx(w.matrix.trace()));
}

TEST_CASE("multi-copy blindness") {
  for (int k : {2, 3}) {
    for (double r : {0.3, 0.8}) {
      std::vector<CovarianceMatrix> stack(k, fs_mixture_cm(r));
      const auto res = cm_bisep_feasibility(direct_sum(stack), copies_bipartitions(k));
      CHECK(std::holds_alternative<Feasible>(res));
    }
  }
}

TEST_CASE("cm witness bound of the identity") {
  const ModeBipartition b({0}, 2);
  CHECK(cm_witness_bound(Matrix::Identity(4, 4), b) == doctest::Approx(4.0));
  CHECK_THROWS_AS(cm_witness_bound(Matrix::Identity(6, 6), b), UsageError);
}

TEST_CASE("pair scan records") {
  const double r1[] = {0.5}, r2[] = {0.5, 1.0};
  const auto rows = pair_activation_scan(r1, r2, 2);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].get("r2") == 0.5);
  CHECK(rows[1].get("r2") == 1.0);
  CHECK(rows[0].get("witness_value") < 0.0);
  CHECK(rows[0].get_flag("gme_detected"));
  CHECK(rows[0].status == "ok");
}

TEST_CASE("qubit partial transpose") {
  CMatrix m = CMatrix::Zero(8, 8);
  m(0, 7) = 1.0;
  const int q[] = {0};
  const CMatrix t = qubit_partial_transpose(m, 3, q);
  CHECK(std::abs(t(4, 3) - Complex(1.0)) < 1e-15);
  CHECK(std::abs(t(0, 7)) == 0.0);
  const int all[] = {0, 1, 2};
  CHECK(qubit_partial_transpose(m, 3, all).isApprox(m.transpose()));
}

TEST_CASE("fully decomposable witness") {
  CMatrix prod = CMatrix::Zero(8, 8);
  prod(0, 0) = 1.0;
  CHECK(fully_decomposable_witness(prod).optimum >= -1e-8);

  CVector v = CVector::Zero(8);
  v(0) = v(7) = std::sqrt(0.5);
  const auto g = fully_decomposable_witness(CMatrix(v * v.adjoint()));
  CHECK(g.optimum == doctest::Approx(-1.0 / 6).epsilon(1e-5));

  const auto res = fully_decomposable_witness(qubit_projection(0.4));
  CHECK(res.optimum < 0.0);
  const auto& w = res.witness;
  CHECK(std::abs(w.w.trace().real() - 1.0) < 1e-8);
  for (int c = 0; c < 3; ++c) {
    CHECK(min_eigenvalue(w.p[c]) > -1e-8);
    CHECK(min_eigenvalue(w.q[c]) > -1e-8);
    const CMatrix rebuilt = w.p[c] + qubit_partial_transpose(w.q[c], 3, w.cuts[c].group_a());
    CHECK((rebuilt - w.w).cwiseAbs().maxCoeff() < 1e-7);
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(w.w);
  CHECK(std::abs(res.optimum) <= es.eigenvalues().cwiseAbs().maxCoeff());
}

TEST_CASE("fully decomposable optimum is permutation invariant") {
  const auto rho = qubit_projection(0.5);
  const double base = fully_decomposable_witness(rho).optimum;
  const int perm[] = {2, 0, 1};
  CHECK(fully_decomposable_witness(permute_modes(rho, perm)).optimum == doctest::Approx(base).epsilon(1e-7));

  // A non-symmetric state keeps the same optimum under relabelling.
  CVector v = CVector::Zero(8);
  v(1) = 0.8;
  v(2) = 0.5;
  v(4) = std::sqrt(1 - 0.64 - 0.25);
  const auto w = pure_state_density({2, 2, 2}, v);
  CHECK(fully_decomposable_witness(permute_modes(w, perm)).optimum ==
        doctest::Approx(fully_decomposable_witness(w).optimum).epsilon(1e-6));
}

TEST_CASE("fully decomposable witness rejects bad input") {
  CHECK_THROWS_AS(fully_decomposable_witness(tmsv_density(0.3, 2)), UsageError);
  CHECK_THROWS_AS(fully_decomposable_witness(CMatrix::Zero(4, 4)), UsageError);
}
