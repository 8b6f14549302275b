#pragma once

// Covariance-matrix algebra for zero-mean Gaussian states.
//
// Conventions used throughout the library:
//   * quadratures are interleaved, r = (x1, p1, ..., xN, pN);
//   * vacuum variance is 1, so the vacuum covariance matrix is the identity;
//   * a matrix g is a physical covariance matrix iff g + i*Omega >= 0,
//     equivalently all symplectic eigenvalues are >= 1.

#include <Eigen/Dense>

#include <random>
#include <span>
#include <vector>

namespace cvgme {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kValidityTolerance = 1e-9;

class CovarianceMatrix {
 public:
  // Accepts any even-sized square matrix. Entries are symmetrized; an asymmetry
  // larger than 1e-8 (relative to the largest entry) is rejected.
  explicit CovarianceMatrix(Matrix entries);

  static CovarianceMatrix identity(int n_modes);

  int n_modes() const { return static_cast<int>(entries_.rows() / 2); }
  int dim() const { return static_cast<int>(entries_.rows()); }
  const Matrix& matrix() const { return entries_; }
  double operator()(int i, int j) const { return entries_(i, j); }

  // Positive definite and every symplectic eigenvalue >= 1 - tol.
  bool is_physical(double tol = kValidityTolerance) const;
  // Throws InvalidCovarianceError when is_physical(tol) is false.
  void require_physical(double tol = kValidityTolerance) const;

 private:
  Matrix entries_;
};

// Block-diagonal direct sum of [[0,1],[-1,0]] blocks.
Matrix symplectic_form(int n_modes);

// Split of the index set {0..n-1} into two nonempty groups. Used both for modes
// and, in multi-mode-party settings, for party labels.
class ModeBipartition {
 public:
  ModeBipartition(std::vector<int> group_a, int n);

  static ModeBipartition one_vs_rest(int index, int n);

  const std::vector<int>& group_a() const { return group_a_; }
  const std::vector<int>& group_b() const { return group_b_; }
  int size() const { return n_; }
  bool contains_a(int index) const;

 private:
  std::vector<int> group_a_;
  std::vector<int> group_b_;
  int n_;
};

// All 2^(n-1) - 1 unordered splits of n labels. The group containing label 0
// is group_a.
std::vector<ModeBipartition> all_bipartitions(int n);

// Expands a bipartition of parties into a bipartition of modes, given the
// modes owned by each party.
ModeBipartition expand_to_modes(const ModeBipartition& party_split,
                                const std::vector<std::vector<int>>& party_modes);

// ---- constructors -------------------------------------------------------

CovarianceMatrix tmsv_cm(double r);
CovarianceMatrix squeezed_cm(double r);
// (1/3)(TMSV_AB + I_C, TMSV_BC + I_A, TMSV_AC + I_B)
CovarianceMatrix fs_mixture_cm(double r);
// (1/2)(TMSV_ab + sq_c, TMSV_bc + sq_a)
CovarianceMatrix ps_mixture_cm(double r);

CovarianceMatrix direct_sum(std::span<const CovarianceMatrix> cms);
CovarianceMatrix direct_sum(const CovarianceMatrix& a, const CovarianceMatrix& b);

// Embeds a two-mode CM on modes (i, j) of an n-mode system padded with vacuum.
CovarianceMatrix embed_two_mode(const CovarianceMatrix& two_mode, int i, int j, int n_modes);

// Random physical CM: S diag(nu) S^T with S = exp(Omega H) for a random
// symmetric H of the given scale and nu in [1, 1 + thermal_spread].
CovarianceMatrix random_valid_cm(int n_modes, std::mt19937_64& rng, double scale = 0.5,
                                 double thermal_spread = 0.5);

// ---- spectra ------------------------------------------------------------

// The N symplectic eigenvalues in ascending order.
std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& cm);

// Flips the momentum quadrature of every listed mode.
CovarianceMatrix partial_transpose_cm(const CovarianceMatrix& cm, std::span<const int> modes);

// Smallest symplectic eigenvalue of the CM partially transposed on group_b.
double ppt_min_symplectic_eigenvalue(const CovarianceMatrix& cm, const ModeBipartition& bip);

enum class PptVerdict { Entangled, Separable, Inconclusive };

struct PptResult {
  double nu_minus = 0.0;
  // PPT is necessary and sufficient only when one side is a single mode.
  bool one_vs_rest = false;
  PptVerdict verdict = PptVerdict::Inconclusive;
};

PptResult ppt_test(const CovarianceMatrix& cm, const ModeBipartition& bip,
                   double tol = kValidityTolerance);

// Closed form of nu_minus for fs_mixture_cm(r) transposed on one mode.
double fs_mixture_nu_minus_closed(double r);
// r at which fs_mixture_cm becomes PPT: (1/2) arcosh((7 + 2 sqrt 31) / 3).
double fs_mixture_separability_threshold();
// (5 + 4 cosh 2r) ((7 + 8 cosh 2r + 3 cosh 4r) / 54)^2
double fs_mixture_det_closed(double r);

double purity(const CovarianceMatrix& cm);

// ---- multi-copy stability -------------------------------------------------

struct DecompositionTerm {
  double weight;
  ModeBipartition bipartition;
  CovarianceMatrix cm;  // block-diagonal with respect to `bipartition`
};

// Single-copy gap  g - sum_i p_i g_i.
Matrix decomposition_gap(const CovarianceMatrix& cm, std::span<const DecompositionTerm> terms);

// Minimum eigenvalue of the k-fold direct sum of the gap.
double multi_copy_gap(const CovarianceMatrix& cm, std::span<const DecompositionTerm> terms,
                      int copies);

// The defining decomposition of fs_mixture_cm(r): weights 1/3, TMSV + vacuum blocks.
std::vector<DecompositionTerm> fs_mixture_decomposition(double r);

// Largest |entry| coupling the two groups of the bipartition.
double off_block_norm(const Matrix& m, const ModeBipartition& bip);

// Quadrature indices (2m, 2m+1) of the listed modes, in order.
std::vector<int> quadrature_indices(std::span<const int> modes);

}  // namespace cvgme
