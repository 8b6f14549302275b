#pragma once

// Small dense semidefinite programs in standard form
//
//   primal:  min <C, X>   s.t.  <A_j, X> = b_j,  X >= 0
//   dual:    max b^T y    s.t.  S = C - sum_j y_j A_j >= 0
//
// X, S, C, A_j are block diagonal. A Hermitian block of complex size n is
// carried as its real 2n x 2n embedding [[Re, -Im], [Im, Re]]; use
// add_hermitian() to enter coefficients and hermitian_value() to read results.

#include "cvgme/fock.hpp"
#include "cvgme/symplectic.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace cvgme {

enum class BlockKind { Symmetric, Hermitian };

struct BlockSpec {
  int size;  // complex size for Hermitian blocks
  BlockKind kind;
  int real_size() const { return kind == BlockKind::Hermitian ? 2 * size : size; }
};

// A symmetric coefficient matrix as upper-triangle entries (row <= col) in the
// real coordinates of each block. Duplicate entries add up.
struct SparseEntry {
  int block;
  int row;
  int col;
  double value;
};

struct LinearForm {
  std::vector<SparseEntry> entries;

  void add(int block, int row, int col, double value);
};

// Coefficient matrix M (symmetric) on a real block: <M, X>.
void add_symmetric(LinearForm& form, int block, const Matrix& m);
// Coefficient emb(H)/2 on a Hermitian block, so that <., X> = Tr(H Y).
void add_hermitian(LinearForm& form, int block, const CMatrix& h);
// Y = (X11 + X22)/2 + i (X21 - X12)/2
CMatrix hermitian_value(const Matrix& x);

struct SdpProblem {
  std::vector<BlockSpec> blocks;
  LinearForm objective;
  std::vector<LinearForm> constraints;
  std::vector<double> rhs;

  int add_block(int size, BlockKind kind = BlockKind::Symmetric);
  int add_constraint(LinearForm form, double b);
  int n_constraints() const { return static_cast<int>(constraints.size()); }
  // Throws UsageError on bad block indices or entries below the diagonal.
  void validate() const;
};

struct SdpOptions {
  double feasibility_tol = 1e-8;
  double gap_tol = 1e-7;
  int max_iterations = 200;
  double step_fraction = 0.98;
  // Stop after this many iterations without a 10% gain on the worst stopping
  // measure, returning the best iterate seen.
  int stall_iterations = 8;
  // That iterate is reported NearOptimal when it meets these looser targets.
  double near_feasibility_tol = 1e-6;
  double near_gap_tol = 1e-5;
};

enum class SdpStatus { Optimal, NearOptimal, InfeasibleCertificate, NumericalFailure };
enum class Certificate { None, PrimalInfeasible, DualInfeasible };

struct SdpSolution {
  SdpStatus status = SdpStatus::NumericalFailure;
  Certificate certificate = Certificate::None;
  std::vector<Matrix> x;  // primal blocks (real coordinates)
  std::vector<Matrix> s;  // dual slack blocks
  Vector y;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_residual = 0.0;  // ||b - A(X)|| / (1 + ||b||)
  double dual_residual = 0.0;    // ||C - A^T y - S|| / (1 + ||C||)
  int iterations = 0;
  // PrimalInfeasible: y with b^T y = 1 and -A^T y >= 0.
  // DualInfeasible: X >= 0 with A(X) = 0 and <C, X> = -1.
  Vector ray_y;
  std::vector<Matrix> ray_x;
  std::string message;
};

// Infeasible-start primal-dual path following (HKM direction, Mehrotra
// predictor-corrector).
SdpSolution solve(const SdpProblem& problem, const SdpOptions& options = {});

// <A, X> for a linear form and block matrices.
double evaluate(const LinearForm& form, const std::vector<Matrix>& x);
// sum_j y_j A_j as dense blocks.
std::vector<Matrix> adjoint(const SdpProblem& problem, const Vector& y);
std::vector<Matrix> dense_blocks(const SdpProblem& problem, const LinearForm& form);
double min_block_eigenvalue(const std::vector<Matrix>& blocks);

// Plain-text format:
//   blocks <nb>
//   <size> <S|H>            (one line per block; H sizes are complex sizes)
//   constraints <m>
//   objective
//   <each block as real_size rows, row-major>
//   constraint <b_j>        (m times, followed by its blocks)
void dump(const SdpProblem& problem, std::ostream& out);
SdpProblem load(std::istream& in);

}  // namespace cvgme
