#include "cvgme/symplectic.hpp"

#include "cvgme/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace cvgme {

namespace {

void require_finite(double r, const char* what) {
  if (!std::isfinite(r)) {
    throw DomainError(std::string(what) + ": squeezing parameter must be finite");
  }
}

Matrix tmsv_block(double r) {
  const double c = std::cosh(2.0 * r);
  const double s = std::sinh(2.0 * r);
  Matrix m = Matrix::Zero(4, 4);
  m.diagonal().setConstant(c);
  m(0, 2) = m(2, 0) = s;
  m(1, 3) = m(3, 1) = -s;
  return m;
}

void place_mode_block(Matrix& target, const Matrix& block, std::span<const int> modes) {
  const auto idx = quadrature_indices(modes);
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = 0; b < idx.size(); ++b) {
      target(idx[a], idx[b]) = block(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
  }
}

std::vector<double> paired_from_squares(std::vector<double> nu_sq) {
  // Each nu^2 appears twice; keep one of each pair.
  std::sort(nu_sq.begin(), nu_sq.end());
  std::vector<double> out;
  out.reserve(nu_sq.size() / 2);
  for (std::size_t k = 0; k + 1 < nu_sq.size(); k += 2) {
    const double v = 0.5 * (nu_sq[k] + nu_sq[k + 1]);
    out.push_back(std::sqrt(std::max(v, 0.0)));
  }
  return out;
}

}  // namespace

// ---- CovarianceMatrix -------------------------------------------------------

CovarianceMatrix::CovarianceMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols() || entries_.rows() % 2 != 0) {
    throw UsageError("covariance matrix must be a nonempty even-sized square matrix");
  }
  if (!entries_.allFinite()) {
    throw DomainError("covariance matrix has non-finite entries");
  }
  const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
  const double asym = (entries_ - entries_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8 * scale) {
    throw UsageError("covariance matrix is not symmetric (asymmetry " + std::to_string(asym) + ")");
  }
  entries_ = 0.5 * (entries_ + entries_.transpose()).eval();
}

CovarianceMatrix CovarianceMatrix::identity(int n_modes) {
  if (n_modes <= 0) throw UsageError("n_modes must be positive");
  return CovarianceMatrix(Matrix::Identity(2 * n_modes, 2 * n_modes));
}

bool CovarianceMatrix::is_physical(double tol) const {
  Eigen::LLT<Matrix> llt(entries_);
  if (llt.info() != Eigen::Success) return false;
  const auto nu = symplectic_eigenvalues(*this);
  return std::all_of(nu.begin(), nu.end(), [tol](double v) { return v >= 1.0 - tol; });
}

void CovarianceMatrix::require_physical(double tol) const {
  if (!is_physical(tol)) {
    throw InvalidCovarianceError("matrix violates the uncertainty relation g + i*Omega >= 0");
  }
}

Matrix symplectic_form(int n_modes) {
  Matrix omega = Matrix::Zero(2 * n_modes, 2 * n_modes);
  for (int k = 0; k < n_modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

std::vector<int> quadrature_indices(std::span<const int> modes) {
  std::vector<int> idx;
  idx.reserve(2 * modes.size());
  for (int m : modes) {
    idx.push_back(2 * m);
    idx.push_back(2 * m + 1);
  }
  return idx;
}

// ---- ModeBipartition --------------------------------------------------------

ModeBipartition::ModeBipartition(std::vector<int> group_a, int n) : group_a_(std::move(group_a)), n_(n) {
  if (n < 2) throw UsageError("a bipartition needs at least two labels");
  std::sort(group_a_.begin(), group_a_.end());
  if (std::adjacent_find(group_a_.begin(), group_a_.end()) != group_a_.end()) {
    throw UsageError("bipartition group has repeated labels");
  }
  for (int i : group_a_) {
    if (i < 0 || i >= n) throw UsageError("bipartition label out of range");
  }
  for (int i = 0; i < n; ++i) {
    if (!std::binary_search(group_a_.begin(), group_a_.end(), i)) group_b_.push_back(i);
  }
  if (group_a_.empty() || group_b_.empty()) {
    throw UsageError("both sides of a bipartition must be nonempty");
  }
}

ModeBipartition ModeBipartition::one_vs_rest(int index, int n) { return ModeBipartition({index}, n); }

bool ModeBipartition::contains_a(int index) const {
  return std::binary_search(group_a_.begin(), group_a_.end(), index);
}

std::vector<ModeBipartition> all_bipartitions(int n) {
  std::vector<ModeBipartition> out;
  if (n < 2) throw UsageError("need at least two labels");
  // Subsets containing label 0, excluding the full set.
  const unsigned full = (1u << n) - 1u;
  for (unsigned mask = 1; mask < full; mask += 2) {
    std::vector<int> a;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) a.push_back(i);
    }
    out.emplace_back(std::move(a), n);
  }
  // Order single-label groups first so three-party splits read A|BC, B|AC, C|AB.
  std::stable_sort(out.begin(), out.end(), [](const ModeBipartition& x, const ModeBipartition& y) {
    auto key = [](const ModeBipartition& b) {
      return std::min(b.group_a().size(), b.group_b().size());
    };
    return key(x) < key(y);
  });
  return out;
}

ModeBipartition expand_to_modes(const ModeBipartition& party_split,
                                const std::vector<std::vector<int>>& party_modes) {
  if (static_cast<int>(party_modes.size()) != party_split.size()) {
    throw UsageError("party layout does not match the bipartition size");
  }
  int n_modes = 0;
  for (const auto& p : party_modes) n_modes += static_cast<int>(p.size());
  std::vector<int> a;
  for (int party : party_split.group_a()) {
    a.insert(a.end(), party_modes[party].begin(), party_modes[party].end());
  }
  return ModeBipartition(std::move(a), n_modes);
}

// ---- constructors -----------------------------------------------------------

CovarianceMatrix tmsv_cm(double r) {
  require_finite(r, "tmsv_cm");
  return CovarianceMatrix(tmsv_block(r));
}

CovarianceMatrix squeezed_cm(double r) {
  require_finite(r, "squeezed_cm");
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = std::exp(2.0 * r);
  m(1, 1) = std::exp(-2.0 * r);
  return CovarianceMatrix(m);
}

CovarianceMatrix embed_two_mode(const CovarianceMatrix& two_mode, int i, int j, int n_modes) {
  if (two_mode.n_modes() != 2 || i == j || i < 0 || j < 0 || i >= n_modes || j >= n_modes) {
    throw UsageError("embed_two_mode: bad mode placement");
  }
  Matrix m = Matrix::Identity(2 * n_modes, 2 * n_modes);
  const int modes[2] = {i, j};
  place_mode_block(m, two_mode.matrix(), modes);
  return CovarianceMatrix(m);
}

CovarianceMatrix fs_mixture_cm(double r) {
  require_finite(r, "fs_mixture_cm");
  const auto t = tmsv_cm(r);
  Matrix m = embed_two_mode(t, 0, 1, 3).matrix() + embed_two_mode(t, 1, 2, 3).matrix() +
             embed_two_mode(t, 0, 2, 3).matrix();
  return CovarianceMatrix(m / 3.0);
}

CovarianceMatrix ps_mixture_cm(double r) {
  require_finite(r, "ps_mixture_cm");
  const auto t = tmsv_cm(r);
  const auto sq = squeezed_cm(r).matrix();
  Matrix ab_c = embed_two_mode(t, 0, 1, 3).matrix();
  ab_c.block(4, 4, 2, 2) = sq;
  Matrix bc_a = embed_two_mode(t, 1, 2, 3).matrix();
  bc_a.block(0, 0, 2, 2) = sq;
  return CovarianceMatrix((ab_c + bc_a) / 2.0);
}

CovarianceMatrix direct_sum(std::span<const CovarianceMatrix> cms) {
  if (cms.empty()) throw UsageError("direct_sum of an empty list");
  int total = 0;
  for (const auto& c : cms) total += c.dim();
  Matrix m = Matrix::Zero(total, total);
  int offset = 0;
  for (const auto& c : cms) {
    m.block(offset, offset, c.dim(), c.dim()) = c.matrix();
    offset += c.dim();
  }
  return CovarianceMatrix(m);
}

CovarianceMatrix direct_sum(const CovarianceMatrix& a, const CovarianceMatrix& b) {
  const CovarianceMatrix both[2] = {a, b};
  return direct_sum(std::span<const CovarianceMatrix>(both, 2));
}

CovarianceMatrix random_valid_cm(int n_modes, std::mt19937_64& rng, double scale,
                                 double thermal_spread) {
  std::normal_distribution<double> normal(0.0, scale);
  std::uniform_real_distribution<double> uniform(0.0, thermal_spread);
  const int d = 2 * n_modes;
  Matrix h(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) h(i, j) = h(j, i) = normal(rng);
  }
  const Matrix omega = symplectic_form(n_modes);
  const Matrix s = (omega * h).exp();
  Vector nu(d);
  for (int k = 0; k < n_modes; ++k) nu(2 * k) = nu(2 * k + 1) = 1.0 + uniform(rng);
  return CovarianceMatrix(s * nu.asDiagonal() * s.transpose());
}

// ---- spectra ----------------------------------------------------------------

std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& cm) {
  const Matrix omega = symplectic_form(cm.n_modes());
  const Matrix og = omega * cm.matrix();
  const Matrix sq = og * og;

  Eigen::JacobiSVD<Matrix> svd(sq);
  const auto& sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  const double cond = smallest > 0.0 ? sv(0) / smallest : std::numeric_limits<double>::infinity();

  if (cond <= 1e12) {
    Eigen::EigenSolver<Matrix> es(sq, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw NumericError("symplectic_eigenvalues: eigensolver failed");
    std::vector<double> nu_sq;
    nu_sq.reserve(sq.rows());
    for (Eigen::Index k = 0; k < sq.rows(); ++k) nu_sq.push_back(-es.eigenvalues()(k).real());
    return paired_from_squares(std::move(nu_sq));
  }

  // Ill-conditioned square: read |Im| of the eigenvalues of Omega*g directly.
  Eigen::EigenSolver<Matrix> es(og, false);
  if (es.info() != Eigen::Success) throw NumericError("symplectic_eigenvalues: eigensolver failed");
  std::vector<double> nu_sq;
  for (Eigen::Index k = 0; k < og.rows(); ++k) {
    const double v = std::abs(es.eigenvalues()(k).imag());
    nu_sq.push_back(v * v);
  }
  return paired_from_squares(std::move(nu_sq));
}

CovarianceMatrix partial_transpose_cm(const CovarianceMatrix& cm, std::span<const int> modes) {
  Vector t = Vector::Ones(cm.dim());
  for (int m : modes) {
    if (m < 0 || m >= cm.n_modes()) throw UsageError("partial_transpose_cm: mode index out of range");
    t(2 * m + 1) = -1.0;
  }
  return CovarianceMatrix(t.asDiagonal() * cm.matrix() * t.asDiagonal());
}

double ppt_min_symplectic_eigenvalue(const CovarianceMatrix& cm, const ModeBipartition& bip) {
  if (bip.size() != cm.n_modes()) throw UsageError("bipartition does not match the number of modes");
  const auto nu = symplectic_eigenvalues(partial_transpose_cm(cm, bip.group_b()));
  return nu.front();
}

PptResult ppt_test(const CovarianceMatrix& cm, const ModeBipartition& bip, double tol) {
  PptResult out;
  out.nu_minus = ppt_min_symplectic_eigenvalue(cm, bip);
  out.one_vs_rest = bip.group_a().size() == 1 || bip.group_b().size() == 1;
  if (out.nu_minus < 1.0 - tol) {
    out.verdict = PptVerdict::Entangled;
  } else {
    out.verdict = out.one_vs_rest ? PptVerdict::Separable : PptVerdict::Inconclusive;
  }
  return out;
}

double fs_mixture_nu_minus_closed(double r) {
  const double c2 = std::cosh(2 * r), c4 = std::cosh(4 * r), s2 = std::sinh(2 * r);
  const double disc = 2.0 * s2 * s2 * (199.0 + 256.0 * c2 + 121.0 * c4);
  return std::sqrt(9.0 + 16.0 * c2 + 11.0 * c4 - std::sqrt(disc)) / 6.0;
}

double fs_mixture_separability_threshold() {
  return 0.5 * std::acosh((7.0 + 2.0 * std::sqrt(31.0)) / 3.0);
}

double fs_mixture_det_closed(double r) {
  const double c2 = std::cosh(2 * r), c4 = std::cosh(4 * r);
  const double q = (7.0 + 8.0 * c2 + 3.0 * c4) / 54.0;
  return (5.0 + 4.0 * c2) * q * q;
}

double purity(const CovarianceMatrix& cm) {
  const double det = cm.matrix().determinant();
  if (!(det > 0.0)) throw InvalidCovarianceError("purity: determinant is not positive");
  return 1.0 / std::sqrt(det);
}

// ---- multi-copy stability ---------------------------------------------------

double off_block_norm(const Matrix& m, const ModeBipartition& bip) {
  const auto ia = quadrature_indices(bip.group_a());
  const auto ib = quadrature_indices(bip.group_b());
  double worst = 0.0;
  for (int a : ia) {
    for (int b : ib) worst = std::max({worst, std::abs(m(a, b)), std::abs(m(b, a))});
  }
  return worst;
}

Matrix decomposition_gap(const CovarianceMatrix& cm, std::span<const DecompositionTerm> terms) {
  if (terms.empty()) throw UsageError("decomposition is empty");
  double total = 0.0;
  Matrix gap = cm.matrix();
  for (const auto& t : terms) {
    if (t.weight < 0.0) throw UsageError("decomposition weights must be nonnegative");
    if (t.cm.n_modes() != cm.n_modes() || t.bipartition.size() != cm.n_modes()) {
      throw UsageError("decomposition term does not match the number of modes");
    }
    const double scale = std::max(1.0, t.cm.matrix().cwiseAbs().maxCoeff());
    if (off_block_norm(t.cm.matrix(), t.bipartition) > 1e-12 * scale) {
      throw UsageError("decomposition term is not block-diagonal for its bipartition");
    }
    total += t.weight;
    gap -= t.weight * t.cm.matrix();
  }
  if (std::abs(total - 1.0) > 1e-9) throw UsageError("decomposition weights must sum to 1");
  return gap;
}

double multi_copy_gap(const CovarianceMatrix& cm, std::span<const DecompositionTerm> terms, int copies) {
  if (copies < 1) throw UsageError("copies must be >= 1");
  const Matrix gap = decomposition_gap(cm, terms);
  const Eigen::Index d = gap.rows();
  Matrix big = Matrix::Zero(d * copies, d * copies);
  for (int k = 0; k < copies; ++k) big.block(k * d, k * d, d, d) = gap;
  Eigen::SelfAdjointEigenSolver<Matrix> es(big, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("multi_copy_gap: eigensolver failed");
  return es.eigenvalues()(0);
}

std::vector<DecompositionTerm> fs_mixture_decomposition(double r) {
  const auto t = tmsv_cm(r);
  std::vector<DecompositionTerm> out;
  out.push_back({1.0 / 3.0, ModeBipartition({0, 1}, 3), embed_two_mode(t, 0, 1, 3)});
  out.push_back({1.0 / 3.0, ModeBipartition({1, 2}, 3), embed_two_mode(t, 1, 2, 3)});
  out.push_back({1.0 / 3.0, ModeBipartition({0, 2}, 3), embed_two_mode(t, 0, 2, 3)});
  return out;
}

}  // namespace cvgme
