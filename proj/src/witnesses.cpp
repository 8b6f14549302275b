#include "cvgme/witnesses.hpp"

#include "cvgme/errors.hpp"
#include "cvgme/gaussian_fock.hpp"

#include <cmath>

namespace cvgme {

namespace {

struct Support {
  std::vector<int> level;
  std::vector<Complex> amp;
};

std::vector<Support> supports(const ProductVector& v) {
  std::vector<Support> out(v.local.size());
  for (std::size_t k = 0; k < v.local.size(); ++k) {
    for (Eigen::Index n = 0; n < v.local[k].size(); ++n) {
      if (v.local[k](n) != Complex(0.0)) {
        out[k].level.push_back(static_cast<int>(n));
        out[k].amp.push_back(v.local[k](n));
      }
    }
    if (out[k].level.empty()) throw UsageError("product vector has a zero local factor");
  }
  return out;
}

double diagonal(const ElementOracle& rho, const ProductVector& v) {
  return std::max(0.0, product_element(rho, v, v).real());
}

Complex at(const CMatrix& rho8, int bra, int ket) { return rho8(bra, ket); }

}  // namespace

ElementOracle oracle_of(const FockDensityMatrix& rho) {
  return [&rho](std::span<const int> bra, std::span<const int> ket) { return rho.element(bra, ket); };
}

ProductVector basis_product(std::span<const int> levels) {
  ProductVector v;
  for (int n : levels) {
    if (n < 0) throw UsageError("negative Fock level");
    CVector e = CVector::Zero(n + 1);
    e(n) = 1.0;
    v.local.push_back(std::move(e));
  }
  return v;
}

Complex product_element(const ElementOracle& rho, const ProductVector& bra, const ProductVector& ket) {
  if (bra.local.size() != ket.local.size() || bra.local.empty()) {
    throw UsageError("product vectors have mismatched mode counts");
  }
  const auto sb = supports(bra);
  const auto sk = supports(ket);
  const std::size_t n = sb.size();
  std::vector<int> lb(n), lk(n);
  std::vector<std::size_t> pb(n, 0), pk(n, 0);
  Complex total = 0.0;
  while (true) {
    Complex w = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      lb[k] = sb[k].level[pb[k]];
      lk[k] = sk[k].level[pk[k]];
      w *= std::conj(sb[k].amp[pb[k]]) * sk[k].amp[pk[k]];
    }
    total += w * rho(lb, lk);
    // Advance the joint odometer: ket digits fastest, then bra digits.
    bool done = true;
    for (std::size_t k = n; k-- > 0;) {
      if (++pk[k] < sk[k].level.size()) {
        done = false;
        break;
      }
      pk[k] = 0;
    }
    if (!done) continue;
    for (std::size_t k = n; k-- > 0;) {
      if (++pb[k] < sb[k].level.size()) {
        done = false;
        break;
      }
      pb[k] = 0;
    }
    if (done) break;
  }
  return total;
}

GabrielValue gabriel_criterion(const ElementOracle& rho, const ProductVector& phi1,
                               const ProductVector& phi2, std::span<const ModeBipartition> bipartitions,
                               const std::vector<std::vector<int>>& party_modes) {
  if (bipartitions.empty()) throw UsageError("gabriel_criterion: no bipartitions");
  std::size_t n_modes = 0;
  for (const auto& p : party_modes) n_modes += p.size();
  if (phi1.local.size() != n_modes || phi2.local.size() != n_modes) {
    throw UsageError("gabriel_criterion: product vector does not cover every mode");
  }
  GabrielValue out;
  out.lhs = std::abs(product_element(rho, phi1, phi2));

  auto swapped_factor = [&](const std::vector<int>& parties) {
    ProductVector psi1 = phi1, psi2 = phi2;
    for (int p : parties) {
      for (int m : party_modes[p]) std::swap(psi1.local[m], psi2.local[m]);
    }
    return diagonal(rho, psi1) * diagonal(rho, psi2);
  };

  for (const auto& bip : bipartitions) {
    if (bip.size() != static_cast<int>(party_modes.size())) {
      throw UsageError("gabriel_criterion: bipartition does not match the party count");
    }
    const double fa = swapped_factor(bip.group_a());
    const double fb = swapped_factor(bip.group_b());
    out.rhs += std::pow(fa * fb, 0.25);
  }
  return out;
}

ThreeQubitElements three_qubit_elements(const ElementOracle& rho) {
  auto el = [&](int b, int k) {
    const int bra[3] = {(b >> 2) & 1, (b >> 1) & 1, b & 1};
    const int ket[3] = {(k >> 2) & 1, (k >> 1) & 1, k & 1};
    return rho(bra, ket);
  };
  ThreeQubitElements e;
  e.c011 = el(0, 3);
  e.c101 = el(0, 5);
  e.c110 = el(0, 6);
  e.d000 = el(0, 0).real();
  e.d011 = el(3, 3).real();
  e.d101 = el(5, 5).real();
  e.d110 = el(6, 6).real();
  e.d001 = el(1, 1).real();
  e.d010 = el(2, 2).real();
  e.d100 = el(4, 4).real();
  return e;
}

ThreeQubitElements three_qubit_elements(const CMatrix& rho8) {
  if (rho8.rows() != 8 || rho8.cols() != 8) throw UsageError("expected an 8x8 three-qubit matrix");
  ThreeQubitElements e;
  e.c011 = at(rho8, 0, 3);
  e.c101 = at(rho8, 0, 5);
  e.c110 = at(rho8, 0, 6);
  e.d000 = rho8(0, 0).real();
  e.d011 = rho8(3, 3).real();
  e.d101 = rho8(5, 5).real();
  e.d110 = rho8(6, 6).real();
  e.d001 = rho8(1, 1).real();
  e.d010 = rho8(2, 2).real();
  e.d100 = rho8(4, 4).real();
  return e;
}

WitnessValue biseparability_witness(const ThreeQubitElements& e) {
  for (double d : {e.d000, e.d011, e.d101, e.d110, e.d001, e.d010, e.d100}) {
    // Round-off below -1e-14 is treated as zero; anything larger is a bad input.
    if (d < -1e-14) throw UsageError("biseparability_witness: negative diagonal element");
  }
  auto pos = [](double d) { return std::max(d, 0.0); };
  WitnessValue w;
  w.lhs = std::abs(e.c011) + std::abs(e.c101) + std::abs(e.c110);
  w.rhs = std::sqrt(pos(e.d000)) * std::sqrt(pos(e.d011) + pos(e.d101) + pos(e.d110)) +
          std::sqrt(pos(e.d001) * pos(e.d010)) + std::sqrt(pos(e.d001) * pos(e.d100)) +
          std::sqrt(pos(e.d010) * pos(e.d100));
  w.violated = w.lhs > w.rhs + kWitnessTolerance;
  return w;
}

WitnessValue symmetric_witness(double d000, double d011, double d001, double c011) {
  if (d000 < 0.0 || d011 < 0.0 || d001 < 0.0) throw UsageError("symmetric_witness: negative diagonal element");
  const double s3 = std::sqrt(3.0);
  WitnessValue w;
  w.lhs = s3 * std::abs(c011);
  w.rhs = std::sqrt(d000 * d011) + s3 * d001;
  w.violated = w.lhs > w.rhs + kWitnessTolerance;
  return w;
}

ThreeQubitElements symmetric_elements(double r) {
  const QubitTuple z{0, 0, 0};
  const double d000 = gaussian_fock_element_closed(r, z, z);
  const double d011 = gaussian_fock_element_closed(r, {0, 1, 1}, {0, 1, 1});
  const double d001 = gaussian_fock_element_closed(r, {0, 0, 1}, {0, 0, 1});
  const double c = gaussian_fock_element_closed(r, z, {0, 1, 1});
  ThreeQubitElements e;
  e.c011 = e.c101 = e.c110 = c;
  e.d000 = d000;
  e.d011 = e.d101 = e.d110 = d011;
  e.d001 = e.d010 = e.d100 = d001;
  return e;
}

WitnessValue symmetric_witness(double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("symmetric_witness: r must be finite and >= 0");
  const auto e = symmetric_elements(r);
  return symmetric_witness(e.d000, e.d011, e.d001, e.c011.real());
}

double ppt_min_eig(const FockDensityMatrix& rho, const ModeBipartition& bip) {
  if (bip.size() != rho.n_modes()) throw UsageError("bipartition does not match the number of modes");
  return min_eigenvalue(partial_transpose(rho, bip.group_b()));
}

CVector haar_random_state(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CVector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = Complex(normal(rng), normal(rng));
  return v / v.norm();
}

CMatrix sample_partition_separable_qubits(const ModeBipartition& cut, std::mt19937_64& rng, int terms) {
  if (cut.size() != 3) throw UsageError("sampler expects a three-qubit bipartition");
  if (terms < 1) throw UsageError("sampler needs at least one term");
  const auto& ga = cut.group_a();
  const auto& gb = cut.group_b();
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> wts(terms);
  double total = 0.0;
  for (auto& w : wts) total += (w = expo(rng));

  CMatrix rho = CMatrix::Zero(8, 8);
  for (int t = 0; t < terms; ++t) {
    const CVector a = haar_random_state(1 << ga.size(), rng);
    const CVector b = haar_random_state(1 << gb.size(), rng);
    CVector psi(8);
    for (int idx = 0; idx < 8; ++idx) {
      const int bits[3] = {(idx >> 2) & 1, (idx >> 1) & 1, idx & 1};
      int ia = 0, ib = 0;
      for (int m : ga) ia = 2 * ia + bits[m];
      for (int m : gb) ib = 2 * ib + bits[m];
      psi(idx) = a(ia) * b(ib);
    }
    rho += (wts[t] / total) * psi * psi.adjoint();
  }
  return rho;
}

}  // namespace cvgme
