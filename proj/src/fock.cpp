#include "cvgme/fock.hpp"

#include "cvgme/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace cvgme {

namespace {

using Triplet = Eigen::Triplet<Complex>;

Eigen::Index total_dim(const std::vector<int>& dims) {
  Eigen::Index d = 1;
  for (int k : dims) {
    if (k <= 0) throw UsageError("mode dimensions must be positive");
    d *= k;
    if (d > (Eigen::Index{1} << 30)) throw UsageError("Fock space dimension too large");
  }
  return d;
}

void decode(Eigen::Index flat, const std::vector<int>& dims, std::vector<int>& out) {
  out.resize(dims.size());
  for (std::size_t i = dims.size(); i-- > 0;) {
    out[i] = static_cast<int>(flat % dims[i]);
    flat /= dims[i];
  }
}

Eigen::Index encode(const std::vector<int>& levels, const std::vector<int>& dims) {
  Eigen::Index flat = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) flat = flat * dims[i] + levels[i];
  return flat;
}

SparseMatrix from_triplets(Eigen::Index d, const std::vector<Triplet>& t) {
  SparseMatrix m(d, d);
  m.setFromTriplets(t.begin(), t.end());
  m.prune(Complex(0.0, 0.0));
  return m;
}

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in [0, 1)");
}

void check_cutoff(int cutoff) {
  if (cutoff < 1) throw UsageError("cutoff must be positive");
}

struct UnionFind {
  explicit UnionFind(Eigen::Index n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  }
  Eigen::Index find(Eigen::Index x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(Eigen::Index a, Eigen::Index b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<Eigen::Index> parent;
};

std::vector<std::vector<Eigen::Index>> components(const SparseMatrix& h) {
  UnionFind uf(h.rows());
  for (Eigen::Index c = 0; c < h.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(h, c); it; ++it) uf.unite(it.row(), it.col());
  }
  std::vector<std::vector<Eigen::Index>> groups;
  std::vector<Eigen::Index> slot(static_cast<std::size_t>(h.rows()), -1);
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    const Eigen::Index root = uf.find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<Eigen::Index>(groups.size());
      groups.emplace_back();
    }
    groups[slot[root]].push_back(i);
  }
  return groups;
}

CMatrix gather(const SparseMatrix& h, const std::vector<Eigen::Index>& idx) {
  const auto n = static_cast<Eigen::Index>(idx.size());
  CMatrix block = CMatrix::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) block(a, b) = h.coeff(idx[a], idx[b]);
  }
  return block;
}

// Single-mode truncated quadrature matrices: index 0 -> x, 1 -> p.
std::array<CMatrix, 2> quadratures(int d) {
  CMatrix a = CMatrix::Zero(d, d);
  for (int k = 0; k + 1 < d; ++k) a(k, k + 1) = std::sqrt(static_cast<double>(k + 1));
  const CMatrix ad = a.adjoint();
  const double s = 1.0 / std::sqrt(2.0);
  return {CMatrix(s * (a + ad)), CMatrix(Complex(0.0, -s) * (a - ad))};
}

}  // namespace

// ---- FockDensityMatrix --------------------------------------------------------

FockDensityMatrix::FockDensityMatrix(std::vector<int> mode_dims, SparseMatrix entries, double deficit)
    : dims_(std::move(mode_dims)), entries_(std::move(entries)), deficit_(deficit) {
  if (dims_.empty()) throw UsageError("a Fock state needs at least one mode");
  const Eigen::Index d = total_dim(dims_);
  if (entries_.rows() != d || entries_.cols() != d) {
    throw UsageError("density matrix size does not match the mode dimensions");
  }
  if (!(deficit_ >= 0.0 && deficit_ <= 1.0)) throw UsageError("truncation deficit must lie in [0, 1]");
  entries_.makeCompressed();
  if (hermiticity_error(entries_) > 1e-10) throw UsageError("density matrix is not Hermitian");
}

Complex FockDensityMatrix::trace() const {
  Complex t = 0.0;
  for (Eigen::Index c = 0; c < entries_.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(entries_, c); it; ++it) {
      if (it.row() == it.col()) t += it.value();
    }
  }
  return t;
}

Eigen::Index FockDensityMatrix::flat_index(std::span<const int> levels) const {
  if (levels.size() != dims_.size()) throw UsageError("Fock tuple has the wrong number of modes");
  Eigen::Index flat = 0;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (levels[i] < 0 || levels[i] >= dims_[i]) throw UsageError("Fock level outside the truncation");
    flat = flat * dims_[i] + levels[i];
  }
  return flat;
}

std::vector<int> FockDensityMatrix::levels(Eigen::Index flat) const {
  if (flat < 0 || flat >= dim()) throw UsageError("flat index out of range");
  std::vector<int> out;
  decode(flat, dims_, out);
  return out;
}

Complex FockDensityMatrix::element(std::span<const int> bra, std::span<const int> ket) const {
  if (bra.size() != dims_.size() || ket.size() != dims_.size()) {
    throw UsageError("Fock tuple has the wrong number of modes");
  }
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (bra[i] < 0 || ket[i] < 0) throw UsageError("negative Fock level");
    if (bra[i] >= dims_[i] || ket[i] >= dims_[i]) return 0.0;
  }
  return entries_.coeff(flat_index(bra), flat_index(ket));
}

// ---- constructors -----------------------------------------------------------

FockDensityMatrix tmsv_density(double lambda, int cutoff) {
  check_lambda(lambda);
  check_cutoff(cutoff);
  const double norm = 1.0 - lambda * lambda;
  std::vector<Triplet> t;
  for (int m = 0; m < cutoff; ++m) {
    for (int mp = 0; mp < cutoff; ++mp) {
      const double v = norm * std::pow(lambda, m + mp);
      t.emplace_back(m * cutoff + m, mp * cutoff + mp, v);
    }
  }
  return FockDensityMatrix({cutoff, cutoff}, from_triplets(Eigen::Index{cutoff} * cutoff, t),
                           std::pow(lambda, 2 * cutoff));
}

FockDensityMatrix thermal_density(double lambda, int cutoff) {
  check_lambda(lambda);
  check_cutoff(cutoff);
  std::vector<Triplet> t;
  for (int m = 0; m < cutoff; ++m) t.emplace_back(m, m, (1.0 - lambda * lambda) * std::pow(lambda, 2 * m));
  return FockDensityMatrix({cutoff}, from_triplets(cutoff, t), std::pow(lambda, 2 * cutoff));
}

FockDensityMatrix number_state_density(int n, int cutoff) {
  check_cutoff(cutoff);
  if (n < 0 || n >= cutoff) throw UsageError("Fock level must lie below the cutoff");
  std::vector<Triplet> t{Triplet(n, n, 1.0)};
  return FockDensityMatrix({cutoff}, from_triplets(cutoff, t));
}

FockDensityMatrix fs_state_density(int n, double lambda, int cutoff) {
  check_lambda(lambda);
  check_cutoff(cutoff);
  if (n < 0 || n >= cutoff) throw UsageError("Fock level must lie below the cutoff");
  const std::vector<int> dims{cutoff, cutoff, cutoff};
  const double w = (1.0 - lambda * lambda) / 3.0;
  std::vector<Triplet> t;
  for (int m = 0; m < cutoff; ++m) {
    for (int mp = 0; mp < cutoff; ++mp) {
      const double v = w * std::pow(lambda, m + mp);
      t.emplace_back(encode({m, m, n}, dims), encode({mp, mp, n}, dims), v);
      t.emplace_back(encode({m, n, m}, dims), encode({mp, n, mp}, dims), v);
      t.emplace_back(encode({n, m, m}, dims), encode({n, mp, mp}, dims), v);
    }
  }
  return FockDensityMatrix(dims, from_triplets(total_dim(dims), t), std::pow(lambda, 2 * cutoff));
}

FockDensityMatrix pure_state_density(std::vector<int> mode_dims, const CVector& amplitudes) {
  const Eigen::Index d = total_dim(mode_dims);
  if (amplitudes.size() != d) throw UsageError("amplitude vector does not match the mode dimensions");
  const double norm = amplitudes.norm();
  if (norm == 0.0) throw UsageError("zero state vector");
  const CVector psi = amplitudes / norm;
  std::vector<Triplet> t;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (psi(i) == Complex(0.0)) continue;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (psi(j) != Complex(0.0)) t.emplace_back(i, j, psi(i) * std::conj(psi(j)));
    }
  }
  return FockDensityMatrix(std::move(mode_dims), from_triplets(d, t));
}

FockDensityMatrix from_dense(std::vector<int> mode_dims, const CMatrix& m, double deficit) {
  SparseMatrix s = m.sparseView(0.0, 0.0);
  return FockDensityMatrix(std::move(mode_dims), std::move(s), deficit);
}

// ---- algebra ------------------------------------------------------------------

FockDensityMatrix tensor(const FockDensityMatrix& a, const FockDensityMatrix& b) {
  std::vector<int> dims = a.mode_dims();
  dims.insert(dims.end(), b.mode_dims().begin(), b.mode_dims().end());
  const Eigen::Index db = b.dim();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(a.entries().nonZeros() * b.entries().nonZeros()));
  for (Eigen::Index ca = 0; ca < a.entries().outerSize(); ++ca) {
    for (SparseMatrix::InnerIterator ia(a.entries(), ca); ia; ++ia) {
      for (Eigen::Index cb = 0; cb < b.entries().outerSize(); ++cb) {
        for (SparseMatrix::InnerIterator ib(b.entries(), cb); ib; ++ib) {
          t.emplace_back(ia.row() * db + ib.row(), ia.col() * db + ib.col(), ia.value() * ib.value());
        }
      }
    }
  }
  const double deficit = 1.0 - (1.0 - a.truncation_deficit()) * (1.0 - b.truncation_deficit());
  return FockDensityMatrix(dims, from_triplets(total_dim(dims), t), deficit);
}

FockDensityMatrix partial_trace(const FockDensityMatrix& rho, std::span<const int> keep) {
  if (keep.empty()) throw UsageError("partial_trace: keep set is empty");
  std::vector<int> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  if (std::adjacent_find(kept.begin(), kept.end()) != kept.end()) {
    throw UsageError("partial_trace: repeated mode");
  }
  std::vector<bool> is_kept(rho.n_modes(), false);
  std::vector<int> dims;
  for (int m : kept) {
    if (m < 0 || m >= rho.n_modes()) throw UsageError("partial_trace: mode out of range");
    is_kept[m] = true;
    dims.push_back(rho.mode_dims()[m]);
  }
  std::vector<Triplet> t;
  std::vector<int> li, lj, ri(kept.size()), rj(kept.size());
  for (Eigen::Index c = 0; c < rho.entries().outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(rho.entries(), c); it; ++it) {
      decode(it.row(), rho.mode_dims(), li);
      decode(it.col(), rho.mode_dims(), lj);
      bool diagonal_in_traced = true;
      for (int m = 0; m < rho.n_modes() && diagonal_in_traced; ++m) {
        if (!is_kept[m] && li[m] != lj[m]) diagonal_in_traced = false;
      }
      if (!diagonal_in_traced) continue;
      for (std::size_t k = 0; k < kept.size(); ++k) {
        ri[k] = li[kept[k]];
        rj[k] = lj[kept[k]];
      }
      t.emplace_back(encode(ri, dims), encode(rj, dims), it.value());
    }
  }
  return FockDensityMatrix(dims, from_triplets(total_dim(dims), t), rho.truncation_deficit());
}

FockDensityMatrix permute_modes(const FockDensityMatrix& rho, std::span<const int> perm) {
  const int n = rho.n_modes();
  if (static_cast<int>(perm.size()) != n) throw UsageError("permutation has the wrong length");
  std::vector<int> check(perm.begin(), perm.end());
  std::sort(check.begin(), check.end());
  for (int i = 0; i < n; ++i) {
    if (check[i] != i) throw UsageError("not a permutation");
  }
  std::vector<int> dims(n);
  for (int i = 0; i < n; ++i) dims[i] = rho.mode_dims()[perm[i]];
  std::vector<Triplet> t;
  std::vector<int> li, lj, pi(n), pj(n);
  for (Eigen::Index c = 0; c < rho.entries().outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(rho.entries(), c); it; ++it) {
      decode(it.row(), rho.mode_dims(), li);
      decode(it.col(), rho.mode_dims(), lj);
      for (int i = 0; i < n; ++i) {
        pi[i] = li[perm[i]];
        pj[i] = lj[perm[i]];
      }
      t.emplace_back(encode(pi, dims), encode(pj, dims), it.value());
    }
  }
  return FockDensityMatrix(dims, from_triplets(rho.dim(), t), rho.truncation_deficit());
}

FockDensityMatrix local_project(const FockDensityMatrix& rho, const LocalFilter& filter) {
  const int n = rho.n_modes();
  if (static_cast<int>(filter.levels.size()) != n) throw UsageError("filter has the wrong number of modes");
  std::vector<std::vector<int>> slot(n);
  std::vector<int> dims(n);
  for (int m = 0; m < n; ++m) {
    const auto& lv = filter.levels[m];
    if (lv.empty()) throw UsageError("filter keeps no level on some mode");
    slot[m].assign(rho.mode_dims()[m], -1);
    for (std::size_t k = 0; k < lv.size(); ++k) {
      if (lv[k] < 0 || lv[k] >= rho.mode_dims()[m]) throw UsageError("filter level outside the cutoff");
      if (k > 0 && lv[k] <= lv[k - 1]) throw UsageError("filter levels must be strictly increasing");
      slot[m][lv[k]] = static_cast<int>(k);
    }
    dims[m] = static_cast<int>(lv.size());
  }
  std::vector<Triplet> t;
  std::vector<int> li, lj, pi(n), pj(n);
  double tr = 0.0;
  for (Eigen::Index c = 0; c < rho.entries().outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(rho.entries(), c); it; ++it) {
      decode(it.row(), rho.mode_dims(), li);
      decode(it.col(), rho.mode_dims(), lj);
      bool inside = true;
      for (int m = 0; m < n && inside; ++m) {
        pi[m] = slot[m][li[m]];
        pj[m] = slot[m][lj[m]];
        inside = pi[m] >= 0 && pj[m] >= 0;
      }
      if (!inside) continue;
      if (it.row() == it.col()) tr += it.value().real();
      t.emplace_back(encode(pi, dims), encode(pj, dims), it.value());
    }
  }
  if (!(tr > 1e-14)) throw DegenerateFilterError("local filter has zero success probability");
  for (auto& x : t) x = Triplet(x.row(), x.col(), x.value() / tr);
  return FockDensityMatrix(dims, from_triplets(total_dim(dims), t), 0.0);
}

SparseMatrix partial_transpose(const FockDensityMatrix& rho, std::span<const int> modes) {
  std::vector<bool> flip(rho.n_modes(), false);
  for (int m : modes) {
    if (m < 0 || m >= rho.n_modes()) throw UsageError("partial_transpose: mode out of range");
    flip[m] = true;
  }
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(rho.entries().nonZeros()));
  std::vector<int> li, lj;
  for (Eigen::Index c = 0; c < rho.entries().outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(rho.entries(), c); it; ++it) {
      decode(it.row(), rho.mode_dims(), li);
      decode(it.col(), rho.mode_dims(), lj);
      for (int m = 0; m < rho.n_modes(); ++m) {
        if (flip[m]) std::swap(li[m], lj[m]);
      }
      t.emplace_back(encode(li, rho.mode_dims()), encode(lj, rho.mode_dims()), it.value());
    }
  }
  return from_triplets(rho.dim(), t);
}

// ---- spectra --------------------------------------------------------------------

std::vector<EigenPair> eigenpairs(const SparseMatrix& h) {
  if (h.rows() != h.cols()) throw UsageError("eigenpairs: matrix is not square");
  std::vector<EigenPair> out;
  out.reserve(static_cast<std::size_t>(h.rows()));
  for (const auto& idx : components(h)) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(gather(h, idx));
    if (es.info() != Eigen::Success) throw NumericError("eigenpairs: eigensolver failed");
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
      out.push_back({es.eigenvalues()(k), idx, es.eigenvectors().col(k)});
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const EigenPair& a, const EigenPair& b) { return a.value < b.value; });
  return out;
}

double min_eigenvalue(const SparseMatrix& h) {
  if (h.rows() != h.cols() || h.rows() == 0) throw UsageError("min_eigenvalue: bad matrix shape");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& idx : components(h)) {
    if (idx.size() == 1) {
      best = std::min(best, h.coeff(idx[0], idx[0]).real());
      continue;
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(gather(h, idx), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("min_eigenvalue: eigensolver failed");
    best = std::min(best, es.eigenvalues()(0));
  }
  return best;
}

double min_eigenvalue(const CMatrix& h) {
  if (h.rows() != h.cols() || h.rows() == 0) throw UsageError("min_eigenvalue: bad matrix shape");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("min_eigenvalue: eigensolver failed");
  return es.eigenvalues()(0);
}

double hermiticity_error(const SparseMatrix& h) {
  const SparseMatrix diff = h - SparseMatrix(h.adjoint());
  double worst = 0.0;
  for (Eigen::Index c = 0; c < diff.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(diff, c); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

// ---- moments ------------------------------------------------------------------------

Moments moments_from_density(const FockDensityMatrix& rho) {
  const int n = rho.n_modes();
  const int nq = 2 * n;
  const auto& dims = rho.mode_dims();

  // Per-mode x, p and their pairwise products.
  std::vector<std::array<CMatrix, 2>> single(n);
  std::vector<std::array<std::array<CMatrix, 2>, 2>> pair(n);
  for (int m = 0; m < n; ++m) {
    single[m] = quadratures(dims[m]);
    for (int s = 0; s < 2; ++s) {
      for (int u = 0; u < 2; ++u) pair[m][s][u] = single[m][s] * single[m][u];
    }
  }

  CVector first = CVector::Zero(nq);
  CMatrix second = CMatrix::Zero(nq, nq);  // <r_q r_q'>
  std::vector<int> li, lj, diff;

  // Tr(rho O) = sum_{ij} rho_ij <j|O|i>
  for (Eigen::Index c = 0; c < rho.entries().outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(rho.entries(), c); it; ++it) {
      decode(it.row(), dims, li);
      decode(it.col(), dims, lj);
      diff.clear();
      for (int m = 0; m < n && diff.size() <= 2; ++m) {
        if (li[m] != lj[m]) diff.push_back(m);
      }
      if (diff.size() > 2) continue;
      const Complex v = it.value();
      auto within = [&](int m1, int m2) {
        for (int m : diff) {
          if (m != m1 && m != m2) return false;
        }
        return true;
      };
      for (int q = 0; q < nq; ++q) {
        const int mq = q / 2;
        if (within(mq, mq)) first(q) += v * single[mq][q % 2](lj[mq], li[mq]);
        for (int qq = 0; qq < nq; ++qq) {
          const int mqq = qq / 2;
          if (!within(mq, mqq)) continue;
          if (mq == mqq) {
            second(q, qq) += v * pair[mq][q % 2][qq % 2](lj[mq], li[mq]);
          } else {
            second(q, qq) +=
                v * single[mq][q % 2](lj[mq], li[mq]) * single[mqq][qq % 2](lj[mqq], li[mqq]);
          }
        }
      }
    }
  }

  Vector d = first.real();
  Matrix g(nq, nq);
  for (int q = 0; q < nq; ++q) {
    for (int qq = 0; qq < nq; ++qq) g(q, qq) = (second(q, qq) + second(qq, q)).real() - 2.0 * d(q) * d(qq);
  }
  const double deficit = rho.truncation_deficit();
  return Moments{d, CovarianceMatrix(g), deficit, deficit > 1e-6};
}

}  // namespace cvgme
