#pragma once

#include "cvgme/fock.hpp"
#include "cvgme/symplectic.hpp"

#include <functional>
#include <random>
#include <span>
#include <vector>

namespace cvgme {

// <bra|rho|ket> for basis tuples of an N-mode state.
using ElementOracle = std::function<Complex(std::span<const int> bra, std::span<const int> ket)>;

ElementOracle oracle_of(const FockDensityMatrix& rho);

// Tensor product of per-mode vectors; local[k](n) is the amplitude of |n> on mode k.
struct ProductVector {
  std::vector<CVector> local;
};

ProductVector basis_product(std::span<const int> levels);

// <bra|rho|ket> for product vectors, summed over the local supports.
Complex product_element(const ElementOracle& rho, const ProductVector& bra, const ProductVector& ket);

struct GabrielValue {
  double lhs = 0.0;
  double rhs = 0.0;
  bool violated() const { return lhs > rhs + 1e-15; }
};

// k = 2 criterion evaluated on rho (x) rho with |phi> = |phi1>|phi2>:
//   lhs = |<phi1|rho|phi2>|
//   rhs = sum over party bipartitions of (F_a F_b)^{1/4}, where F_s is the
//         diagonal <phi|P_s^dag rho(x)rho P_s|phi> after exchanging the copies on
//         the modes of side s.
// `party_modes[p]` lists the modes owned by party p.
GabrielValue gabriel_criterion(const ElementOracle& rho, const ProductVector& phi1,
                               const ProductVector& phi2, std::span<const ModeBipartition> bipartitions,
                               const std::vector<std::vector<int>>& party_modes);

// The ten elements entering the tripartite biseparability witness.
struct ThreeQubitElements {
  Complex c011, c101, c110;  // <000|rho|011>, <000|rho|101>, <000|rho|110>
  double d000, d011, d101, d110, d001, d010, d100;
};

ThreeQubitElements three_qubit_elements(const ElementOracle& rho);
ThreeQubitElements three_qubit_elements(const CMatrix& rho8);

struct WitnessValue {
  double lhs = 0.0;
  double rhs = 0.0;
  bool violated = false;
};

inline constexpr double kWitnessTolerance = 1e-12;

WitnessValue biseparability_witness(const ThreeQubitElements& e);

// sqrt3 |<000|rho|011>|  vs  sqrt(<000|rho|000><011|rho|011>) + sqrt3 <001|rho|001>
WitnessValue symmetric_witness(double d000, double d011, double d001, double c011);
WitnessValue symmetric_witness(double r);
// Symmetric elements fed through the general form; equals sqrt3 times symmetric_witness.
ThreeQubitElements symmetric_elements(double r);

// Minimum eigenvalue of the partial transpose on group_b.
double ppt_min_eig(const FockDensityMatrix& rho, const ModeBipartition& bip);

// Haar-random pure product across the cut, convexly mixed over `terms` draws
// with Dirichlet(1, ..., 1) weights. Qubits, dims (2,2,2), returned as 8x8.
CMatrix sample_partition_separable_qubits(const ModeBipartition& cut, std::mt19937_64& rng, int terms = 10);
CVector haar_random_state(int dim, std::mt19937_64& rng);

}  // namespace cvgme
