#pragma once

// CM-level biseparability test with its optimal Gaussian witness, and the fully
// decomposable three-qubit witness.

#include "cvgme/fock.hpp"
#include "cvgme/scan.hpp"
#include "cvgme/sdp.hpp"
#include "cvgme/symplectic.hpp"

#include <array>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace cvgme {

struct CmWitness {
  Matrix matrix;
  double value = 0.0;  // Tr(W gamma) - 1
  bool near_optimal = false;  // solver stopped at reduced accuracy; W is still a valid witness
};

struct CmDecomposition {
  std::vector<double> weights;                         // p_i
  std::vector<Matrix> k;                               // K_i, block diagonal
  std::vector<std::optional<CovarianceMatrix>> blocks;  // K_i / p_i, empty when p_i < 1e-9
  double total_weight = 0.0;                           // sum p_i before rescaling
  bool near_optimal = false;
};

struct Feasible {
  CmDecomposition decomposition;
};

struct Infeasible {
  CmWitness witness;
};

using BisepResult = std::variant<Feasible, Infeasible>;

inline constexpr double kUnusedWeight = 1e-9;
inline constexpr double kFeasibleMargin = 1e-6;

// Infeasible when the best achievable sum of weights stays below 1 - 1e-6.
// Feasible decompositions are re-verified (PSD to -1e-7) or NumericError.
BisepResult cm_bisep_feasibility(const CovarianceMatrix& gamma, std::span<const ModeBipartition> bipartitions,
                                 const SdpOptions& options = {});

CmWitness optimal_cm_witness(const CovarianceMatrix& gamma, std::span<const ModeBipartition> bipartitions,
                             const SdpOptions& options = {});

// min over valid block-diagonal CMs of Tr(W gamma_i): 2 sum of symplectic
// eigenvalues of each diagonal block of W.
double cm_witness_bound(const Matrix& w, const ModeBipartition& bip);

// Residuals of a decomposition: min eigenvalues of gamma - sum K_i and of each
// K_i + i p_i Omega (hermitian).
struct DecompositionCheck {
  double remainder_min_eig = 0.0;
  double validity_min_eig = 0.0;
};
DecompositionCheck check_decomposition(const CovarianceMatrix& gamma, std::span<const ModeBipartition> bipartitions,
                                       const CmDecomposition& d);

// gamma_ABC(r1) (+) gamma_abc(r2), modes (A,B,C,a,b,c), parties {A,a},{B,b},{C,c}.
CovarianceMatrix pair_compound_cm(double r1, double r2);
std::vector<ModeBipartition> pair_compound_bipartitions();

// Record per grid point: r1, r2, witness_value. Status is "ok", "near_optimal", or
// "solver_failure" with a NaN value.
std::vector<ScanRecord> pair_activation_scan(std::span<const double> r1_grid, std::span<const double> r2_grid,
                                             int jobs = 1, const SdpOptions& options = {});

// k identical copies of a 3-mode CM, party p owning modes {p, p+3, ...}.
std::vector<ModeBipartition> copies_bipartitions(int copies);

struct QubitGmeWitness {
  CMatrix w;
  std::array<CMatrix, 3> p;
  std::array<CMatrix, 3> q;
  std::array<ModeBipartition, 3> cuts;  // Q is transposed on group_a of each cut
};

struct QubitGmeResult {
  QubitGmeWitness witness;
  double optimum = 0.0;  // Tr(W rho)
  bool near_optimal = false;
};

QubitGmeResult fully_decomposable_witness(const FockDensityMatrix& rho, const SdpOptions& options = {});
QubitGmeResult fully_decomposable_witness(const CMatrix& rho8, const SdpOptions& options = {});

// Partial transpose of an operator on qubits, on the listed qubits (qubit 0 is
// the most significant bit).
CMatrix qubit_partial_transpose(const CMatrix& m, int n_qubits, std::span<const int> qubits);

}  // namespace cvgme
