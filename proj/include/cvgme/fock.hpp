#pragma once

// Truncated multi-mode Fock-space density matrices.
//
// Flat index of a basis tuple (n_0, ..., n_{N-1}) is sum_i n_i * prod_{j>i} d_j
// (mode 0 is the most significant digit). Entries are kept sparse: the states
// built here (TMSV mixtures and their tensor powers) have a few nonzeros per
// row even when the full dimension is in the hundreds of thousands.

#include "cvgme/symplectic.hpp"

#include <Eigen/Sparse>

#include <complex>
#include <span>
#include <vector>

namespace cvgme {

using Complex = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<Complex>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

class FockDensityMatrix {
 public:
  // `deficit` is the trace weight lost to truncation, 1 - Tr of the untruncated state.
  FockDensityMatrix(std::vector<int> mode_dims, SparseMatrix entries, double deficit = 0.0);

  const std::vector<int>& mode_dims() const { return dims_; }
  int n_modes() const { return static_cast<int>(dims_.size()); }
  Eigen::Index dim() const { return entries_.rows(); }
  const SparseMatrix& entries() const { return entries_; }
  double truncation_deficit() const { return deficit_; }

  Complex trace() const;
  // <bra|rho|ket>; zero when a level lies outside the truncation.
  Complex element(std::span<const int> bra, std::span<const int> ket) const;

  Eigen::Index flat_index(std::span<const int> levels) const;
  std::vector<int> levels(Eigen::Index flat) const;

  CMatrix dense() const { return CMatrix(entries_); }

 private:
  std::vector<int> dims_;
  SparseMatrix entries_;
  double deficit_;
};

// Per-mode retained Fock levels.
struct LocalFilter {
  std::vector<std::vector<int>> levels;
};

// ---- constructors -------------------------------------------------------

FockDensityMatrix tmsv_density(double lambda, int cutoff);
FockDensityMatrix thermal_density(double lambda, int cutoff);
FockDensityMatrix number_state_density(int n, int cutoff);
// (1/3)(TMSV_AB (x) |n><n|_C + TMSV_AC (x) |n><n|_B + |n><n|_A (x) TMSV_BC)
FockDensityMatrix fs_state_density(int n, double lambda, int cutoff);

FockDensityMatrix pure_state_density(std::vector<int> mode_dims, const CVector& amplitudes);
FockDensityMatrix from_dense(std::vector<int> mode_dims, const CMatrix& m, double deficit = 0.0);

// ---- algebra --------------------------------------------------------------

FockDensityMatrix tensor(const FockDensityMatrix& a, const FockDensityMatrix& b);
// Reduced state on `keep`, in ascending mode order.
FockDensityMatrix partial_trace(const FockDensityMatrix& rho, std::span<const int> keep);
// Mode i of the result is mode perm[i] of the input.
FockDensityMatrix permute_modes(const FockDensityMatrix& rho, std::span<const int> perm);
FockDensityMatrix local_project(const FockDensityMatrix& rho, const LocalFilter& filter);

// Index swap on the listed modes. The result is Hermitian but not necessarily PSD.
SparseMatrix partial_transpose(const FockDensityMatrix& rho, std::span<const int> modes);

// ---- spectra --------------------------------------------------------------

struct EigenPair {
  double value;
  std::vector<Eigen::Index> support;  // basis indices of the connected block
  CVector vector;                     // components on `support`
};

// Full spectrum, ascending, computed block by block over the connected
// components of the sparsity graph.
std::vector<EigenPair> eigenpairs(const SparseMatrix& h);
double min_eigenvalue(const SparseMatrix& h);
double min_eigenvalue(const CMatrix& h);

double hermiticity_error(const SparseMatrix& h);

// ---- moments ----------------------------------------------------------------

struct Moments {
  Vector first;
  CovarianceMatrix cm;
  double truncation_deficit;
  bool accuracy_warning;  // deficit above 1e-6
};

// First moments and gamma_ij = <r_i r_j + r_j r_i> - 2 <r_i><r_j> with
// x = (a + a^dag)/sqrt2, p = (a - a^dag)/(i sqrt2), ladder operators truncated
// at each mode's cutoff.
Moments moments_from_density(const FockDensityMatrix& rho);

}  // namespace cvgme
