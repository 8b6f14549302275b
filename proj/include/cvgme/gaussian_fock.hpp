#pragma once

// Fock-basis matrix elements of zero-mean Gaussian states.
//
// <bra|rho|ket> = Tr(rho |ket><bra|) = (2 pi)^N  int W_rho W_{|ket><bra|}.
// The dyad Wigner function is a polynomial times exp(-|r|^2), so the overlap is
// a moment of the Gaussian with covariance (2 (gamma^{-1} + I))^{-1}.

#include "cvgme/fock.hpp"
#include "cvgme/symplectic.hpp"

#include <array>
#include <span>
#include <vector>

namespace cvgme {

double shorthand_f(double r);
double shorthand_g(double r);

using QubitTuple = std::array<int, 3>;

// Closed-form <bra|rho|ket> of the state with CM fs_mixture_cm(r), for
// indices in {0,1}^3.
double gaussian_fock_element_closed(double r, const QubitTuple& bra, const QubitTuple& ket);
// All 64 closed-form elements, row = 4i + 2j + k of the bra.
Matrix closed_form_table(double r);

// Closed-form table restricted to {0,1}^3 and renormalized to unit trace.
FockDensityMatrix qubit_projection(double r);

class WignerGaussian {
 public:
  explicit WignerGaussian(CovarianceMatrix cm);

  const CovarianceMatrix& cm() const { return cm_; }
  int n_modes() const { return cm_.n_modes(); }
  const Matrix& inverse() const { return inverse_; }
  double determinant() const { return det_; }

  // exp(-r^T gamma^{-1} r) / (pi^N sqrt(det gamma))
  double operator()(const Vector& r) const;

 private:
  CovarianceMatrix cm_;
  Matrix inverse_;
  double det_;
};

// Coefficients of the single-mode dyad Wigner polynomial:
// W_{|m><n|}(x, p) = sum_{a,b} coeff(a, b) x^a p^b exp(-x^2 - p^2).
CMatrix dyad_wigner_polynomial(int m, int n);

class GaussianFockOracle {
 public:
  // Precomputes every Gaussian moment needed for levels <= max_level on each mode.
  GaussianFockOracle(const CovarianceMatrix& cm, int max_level);

  int max_level() const { return max_level_; }
  int n_modes() const { return n_modes_; }

  Complex element(std::span<const int> bra, std::span<const int> ket) const;

  // Same overlap on a tensor Gauss-Hermite grid (nodes per dimension).
  Complex element_quadrature(std::span<const int> bra, std::span<const int> ket, int nodes = 10) const;

 private:
  int pair_id(int a, int b) const { return pair_index_[a * (degree_ + 1) + b]; }
  void check_tuple(std::span<const int> t) const;

  int n_modes_;
  int max_level_;
  int degree_;
  int pairs_;
  std::vector<int> pair_index_;
  std::vector<double> moments_;
  std::vector<CMatrix> polys_;  // polys_[m * (max_level + 1) + n]
  double prefactor_;
  Matrix a_;      // gamma^{-1} + I
  double det_gamma_;
};

Complex gaussian_fock_element_oracle(const CovarianceMatrix& cm, std::span<const int> bra,
                                     std::span<const int> ket);

// Gauss-Hermite nodes and weights for weight exp(-x^2).
void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace cvgme
