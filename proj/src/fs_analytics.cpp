#include "cvgme/fs_analytics.hpp"

#include "cvgme/errors.hpp"
#include "cvgme/witnesses.hpp"

#include <cmath>

namespace cvgme {

double fs_matrix_element(int n, double lambda, const Triple& bra, const Triple& ket) {
  if (!(lambda >= 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in [0, 1)");
  for (int k = 0; k < 3; ++k) {
    if (bra[k] < 0 || ket[k] < 0) throw UsageError("negative Fock level");
  }
  const double w = (1.0 - lambda * lambda) / 3.0;
  const auto [a, b, c] = bra;
  const auto [ap, bp, cp] = ket;
  double total = 0.0;
  if (a == b && ap == bp && c == n && cp == n) total += w * std::pow(lambda, a + ap);
  if (a == c && ap == cp && b == n && bp == n) total += w * std::pow(lambda, a + ap);
  if (b == c && bp == cp && a == n && ap == n) total += w * std::pow(lambda, b + bp);
  return total;
}

PtBlockPair pt_block_eigenvalues(double lambda, int m) {
  if (!(lambda >= 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in [0, 1)");
  if (m < 1) throw UsageError("block index m must be >= 1");
  const double mu = std::sqrt(2.0) / 3.0 * (1.0 - lambda * lambda) * std::pow(lambda, m);
  return {mu, -mu};
}

CVector pt_block_eigenvector(int m, int cutoff) {
  if (m < 1 || m >= cutoff) throw UsageError("block index must lie in [1, cutoff)");
  const Eigen::Index d = cutoff;
  CVector v = CVector::Zero(d * d * d);
  v(m) = 0.5;                        // |00m>
  v(m * d) = 0.5;                    // |0m0>
  v(m * d * d) = -std::sqrt(0.5);    // |m00>
  return v;
}

GabrielTwoCopy gabriel_two_copy_fs(int n, double lambda, int cutoff) {
  if (!(lambda >= 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in [0, 1)");
  if (n < 0) throw UsageError("Fock level must be nonnegative");
  if (cutoff == 0) cutoff = std::max(8, n + 2);
  if (cutoff < n + 2) throw UsageError("cutoff must exceed n + 1");

  GabrielTwoCopy out;
  const double l2 = lambda * lambda;
  out.lhs = (1.0 - l2) * (1.0 - l2) * l2 / 9.0;
  out.rhs = 0.0;
  out.violated = out.lhs > out.rhs + 1e-15;

  const auto one = fs_state_density(n, lambda, cutoff);
  const auto two = tensor(one, one);
  const std::vector<int> phi1{n, 0, 0, 0, n, 0};
  const std::vector<int> phi2{n, 1, 1, 1, n, 1};
  const std::vector<std::vector<int>> parties{{0, 3}, {1, 4}, {2, 5}};
  const auto cuts = all_bipartitions(3);
  const auto g = gabriel_criterion(oracle_of(two), basis_product(phi1), basis_product(phi2), cuts, parties);
  out.generic_lhs = g.lhs;
  out.generic_rhs = g.rhs;
  if (std::abs(g.lhs - out.lhs) > 1e-10 || std::abs(g.rhs - out.rhs) > 1e-10) {
    throw NumericError("two-copy Gabriel evaluation disagrees with the closed form");
  }
  return out;
}

FockDensityMatrix fs_two_qubit_reduction(int n, double lambda, int k, int kp, int cutoff) {
  if (k == kp) throw UsageError("retained levels must differ");
  const auto rho = fs_state_density(n, lambda, cutoff);
  const int keep[2] = {0, 1};
  const auto ab = partial_trace(rho, keep);
  std::vector<int> lv{std::min(k, kp), std::max(k, kp)};
  return local_project(ab, LocalFilter{{lv, lv}});
}

}  // namespace cvgme
