#pragma once

// Closed forms for the fully symmetric (FS) family
//   rho = (1/3)(TMSV_AB |n><n|_C + TMSV_AC |n><n|_B + |n><n|_A TMSV_BC).

#include "cvgme/fock.hpp"

#include <array>

namespace cvgme {

using Triple = std::array<int, 3>;

// Exact, untruncated <bra|rho|ket>.
double fs_matrix_element(int n, double lambda, const Triple& bra, const Triple& ket);

struct PtBlockPair {
  double mu_plus;
  double mu_minus;
};

// +-(sqrt2/3)(1 - lambda^2) lambda^m: the nonzero spectrum of the
// {|00m>, |0m0>, |m00>} block of the n = 0 state transposed on mode A.
PtBlockPair pt_block_eigenvalues(double lambda, int m);

// (|00m> + |0m0> - sqrt2 |m00>)/2 as a vector of the cutoff^3 space.
CVector pt_block_eigenvector(int m, int cutoff);

struct GabrielTwoCopy {
  double lhs = 0.0;
  double rhs = 0.0;
  bool violated = false;
  double generic_lhs = 0.0;  // same quantities from the generic evaluator
  double generic_rhs = 0.0;
};

// Two copies, |phi> = |n00>|0n0> (x) |n11>|1n1>. Closed form lhs = (1/9)(1-l^2)^2 l^2,
// rhs = 0. The generic evaluator runs on the truncated two-copy state
// (cutoff 0 picks max(8, n + 2)) and must agree to 1e-10, else NumericError.
GabrielTwoCopy gabriel_two_copy_fs(int n, double lambda, int cutoff = 0);

// Trace out C, keep levels {k, k'} on A and B: the pure two-qubit state
// proportional to lambda^k |kk> + lambda^k' |k'k'> when n is not in {k, k'}.
FockDensityMatrix fs_two_qubit_reduction(int n, double lambda, int k, int kp, int cutoff);

}  // namespace cvgme
