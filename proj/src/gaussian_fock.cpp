#include "cvgme/gaussian_fock.hpp"

#include "cvgme/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace cvgme {

namespace {

constexpr double kPi = std::numbers::pi;

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double double_factorial(int n) {
  double f = 1.0;
  for (int i = n; i > 1; i -= 2) f *= i;
  return f;
}

std::vector<double> hermite(int m) {
  std::vector<double> prev{1.0}, cur{1.0};
  if (m == 0) return cur;
  cur = {0.0, 2.0};
  for (int k = 1; k < m; ++k) {
    std::vector<double> next(k + 2, 0.0);
    for (int i = 0; i <= k; ++i) next[i + 1] += 2.0 * cur[i];
    for (int i = 0; i < k; ++i) next[i] -= 2.0 * k * prev[i];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

// Coefficients c(a, b) of H_m(x + s y) as a polynomial in x^a y^b.
Matrix shifted_hermite(int m, double s) {
  const auto h = hermite(m);
  Matrix c = Matrix::Zero(m + 1, m + 1);
  for (int k = 0; k <= m; ++k) {
    if (h[k] == 0.0) continue;
    for (int a = 0; a <= k; ++a) c(a, k - a) += h[k] * binomial(k, a) * std::pow(s, k - a);
  }
  return c;
}

Matrix multiply(const Matrix& u, const Matrix& v) {
  Matrix w = Matrix::Zero(u.rows() + v.rows() - 1, u.cols() + v.cols() - 1);
  for (Eigen::Index a = 0; a < u.rows(); ++a)
    for (Eigen::Index b = 0; b < u.cols(); ++b) {
      if (u(a, b) == 0.0) continue;
      for (Eigen::Index c = 0; c < v.rows(); ++c)
        for (Eigen::Index d = 0; d < v.cols(); ++d) w(a + c, b + d) += u(a, b) * v(c, d);
    }
  return w;
}

Complex evaluate(const CMatrix& q, double x, double p) {
  Complex total = 0.0;
  double xa = 1.0;
  for (Eigen::Index a = 0; a < q.rows(); ++a) {
    double pb = 1.0;
    for (Eigen::Index b = 0; b < q.cols(); ++b) {
      total += q(a, b) * (xa * pb);
      pb *= p;
    }
    xa *= x;
  }
  return total;
}

int weight(const QubitTuple& t) { return t[0] + t[1] + t[2]; }

}  // namespace

// ---- closed forms ---------------------------------------------------------------

double shorthand_f(double r) { return 2.0 / std::sqrt(5.0 + 4.0 * std::cosh(2.0 * r)); }

double shorthand_g(double r) {
  return 9.0 / (37.0 + 32.0 * std::cosh(2.0 * r) + 3.0 * std::cosh(4.0 * r));
}

double gaussian_fock_element_closed(double r, const QubitTuple& bra, const QubitTuple& ket) {
  for (int k = 0; k < 3; ++k) {
    if (bra[k] < 0 || bra[k] > 1 || ket[k] < 0 || ket[k] > 1) {
      throw UsageError("closed-form elements are defined for levels 0 and 1 only");
    }
  }
  const double f = shorthand_f(r), g = shorthand_g(r);
  auto c = [r](int k) { return std::cosh(k * r); };
  const double sh = std::sinh(r), sh2 = std::sinh(2.0 * r);
  const int wb = weight(bra), wk = weight(ket);

  if (bra == ket) {
    switch (wb) {
      case 0:
        return 12.0 * f * g;
      case 1:
        return 24.0 * f * g * (67.0 + 68.0 * c(2) + 9.0 * c(4)) * sh * sh /
               (249.0 + 314.0 * c(2) + 79.0 * c(4) + 6.0 * c(6));
      case 2:
        return std::pow(f, 5) * std::pow(g, 3) / 216.0 *
               (20558.0 + 38274.0 * c(2) + 24384.0 * c(4) + 8539.0 * c(6) + 1458.0 * c(8) +
                99.0 * c(10)) *
               sh * sh;
      default:
        return std::pow(f, 7) * std::pow(g, 4) / 7776.0 *
               (9216316.0 + 15789701.0 * c(2) + 9730682.0 * c(4) + 4155731.0 * c(6) +
                1182212.0 * c(8) + 213057.0 * c(10) + 22086.0 * c(12) + 999.0 * c(14)) *
               std::pow(sh, 4);
    }
  }
  const int lo = std::min(wb, wk), hi = std::max(wb, wk);
  if (lo == 0 && hi == 2) return std::pow(f, 3) * g * g * (19.0 + 16.0 * c(2) + c(4)) * sh2;
  if (lo == 1 && hi == 1) return -2.0 * std::pow(f, 3) * g * g * (2.0 + c(2)) * sh2 * sh2;
  if (lo == 1 && hi == 3) {
    return std::pow(f, 5) * g * g / 2.0 * (54.0 * c(1) + 17.0 * c(3) + c(5)) * std::pow(sh, 3);
  }
  if (lo == 2 && hi == 2) return std::pow(f, 5) * g * g / 4.0 * (33.0 + 22.0 * c(2) - c(4)) * sh2 * sh2;
  return 0.0;
}

Matrix closed_form_table(double r) {
  Matrix t(8, 8);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      const QubitTuple bra{(i >> 2) & 1, (i >> 1) & 1, i & 1};
      const QubitTuple ket{(j >> 2) & 1, (j >> 1) & 1, j & 1};
      t(i, j) = gaussian_fock_element_closed(r, bra, ket);
    }
  }
  return t;
}

FockDensityMatrix qubit_projection(double r) {
  if (!std::isfinite(r)) throw DomainError("qubit_projection: r must be finite");
  const Matrix t = closed_form_table(r);
  const double tr = t.trace();
  return from_dense({2, 2, 2}, (t / tr).cast<Complex>());
}

// ---- WignerGaussian ---------------------------------------------------------------

WignerGaussian::WignerGaussian(CovarianceMatrix cm) : cm_(std::move(cm)) {
  Eigen::LLT<Matrix> llt(cm_.matrix());
  if (llt.info() != Eigen::Success) throw InvalidCovarianceError("covariance matrix is not positive definite");
  inverse_ = llt.solve(Matrix::Identity(cm_.dim(), cm_.dim()));
  det_ = std::pow(llt.matrixL().toDenseMatrix().diagonal().prod(), 2);
  const double err = (cm_.matrix() * inverse_ - Matrix::Identity(cm_.dim(), cm_.dim())).cwiseAbs().maxCoeff();
  if (err > 1e-10) throw NumericError("covariance matrix inverse is inaccurate");
}

double WignerGaussian::operator()(const Vector& r) const {
  if (r.size() != cm_.dim()) throw UsageError("phase-space point has the wrong dimension");
  const double q = r.dot(inverse_ * r);
  return std::exp(-q) / (std::pow(kPi, n_modes()) * std::sqrt(det_));
}

// ---- dyad polynomials --------------------------------------------------------------

CMatrix dyad_wigner_polynomial(int m, int n) {
  if (m < 0 || n < 0) throw UsageError("negative Fock level");
  // W = (1/2pi) int psi_m(x - y/2) psi_n(x + y/2) e^{ipy} dy
  const Matrix c = multiply(shifted_hermite(m, -0.5), shifted_hermite(n, 0.5));
  const int deg = m + n;
  CMatrix q = CMatrix::Zero(deg + 1, deg + 1);
  const Complex two_i(0.0, 2.0);
  for (int a = 0; a <= deg; ++a) {
    for (int b = 0; a + b <= deg; ++b) {
      if (c(a, b) == 0.0) continue;
      for (int j = 0; j <= b; j += 2) {
        const double mj = 2.0 * std::sqrt(kPi) * std::pow(2.0, j / 2) * double_factorial(j - 1);
        q(a, b - j) += c(a, b) * binomial(b, j) * std::pow(two_i, b - j) * mj;
      }
    }
  }
  const double nm = 1.0 / std::sqrt(std::pow(2.0, m) * factorial(m) * std::sqrt(kPi));
  const double nn = 1.0 / std::sqrt(std::pow(2.0, n) * factorial(n) * std::sqrt(kPi));
  return q * (nm * nn / (2.0 * kPi));
}

// ---- oracle ---------------------------------------------------------------------------

GaussianFockOracle::GaussianFockOracle(const CovarianceMatrix& cm, int max_level)
    : n_modes_(cm.n_modes()), max_level_(max_level), degree_(2 * max_level) {
  if (max_level < 0 || max_level > 12) throw UsageError("oracle max_level must lie in [0, 12]");
  const WignerGaussian w(cm);
  det_gamma_ = w.determinant();
  const int dim = cm.dim();
  a_ = w.inverse() + Matrix::Identity(dim, dim);
  Eigen::LLT<Matrix> llt(a_);
  if (llt.info() != Eigen::Success) throw InvalidCovarianceError("combined quadratic form is not positive definite");
  const Matrix sigma = llt.solve(Matrix::Identity(dim, dim)) / 2.0;
  const double det_sum = (Matrix::Identity(dim, dim) + cm.matrix()).determinant();
  prefactor_ = std::pow(2.0 * kPi, n_modes_) / std::sqrt(det_sum);

  // Per-mode monomial x^a p^b with a + b <= degree.
  pair_index_.assign((degree_ + 1) * (degree_ + 1), -1);
  std::vector<std::array<int, 2>> pair_of;
  for (int a = 0; a <= degree_; ++a) {
    for (int b = 0; a + b <= degree_; ++b) {
      pair_index_[a * (degree_ + 1) + b] = static_cast<int>(pair_of.size());
      pair_of.push_back({a, b});
    }
  }
  pairs_ = static_cast<int>(pair_of.size());

  std::size_t total = 1;
  for (int k = 0; k < n_modes_; ++k) total *= static_cast<std::size_t>(pairs_);
  if (total > (std::size_t{1} << 26)) throw UsageError("oracle moment table too large");
  moments_.assign(total, 0.0);

  auto flat_of = [&](const std::vector<int>& kidx) {
    std::size_t f = 0;
    for (int k = 0; k < n_modes_; ++k) f = f * pairs_ + pair_id(kidx[2 * k], kidx[2 * k + 1]);
    return f;
  };

  // Bucket multi-indices by total degree, then fill with
  // E[r^{K}] = sum_i Sigma_{j i} K'_i E[r^{K' - e_i}],  K = K' + e_j.
  std::vector<std::vector<std::size_t>> by_degree(n_modes_ * degree_ + 1);
  std::vector<int> kidx(dim);
  for (std::size_t f = 0; f < total; ++f) {
    std::size_t rest = f;
    int deg = 0;
    for (int k = n_modes_ - 1; k >= 0; --k) {
      const auto& ab = pair_of[rest % pairs_];
      rest /= pairs_;
      deg += ab[0] + ab[1];
    }
    by_degree[deg].push_back(f);
  }
  moments_[0] = 1.0;
  for (std::size_t deg = 2; deg < by_degree.size(); deg += 2) {
    for (std::size_t f : by_degree[deg]) {
      std::size_t rest = f;
      for (int k = n_modes_ - 1; k >= 0; --k) {
        const auto& ab = pair_of[rest % pairs_];
        rest /= pairs_;
        kidx[2 * k] = ab[0];
        kidx[2 * k + 1] = ab[1];
      }
      int j = 0;
      while (kidx[j] == 0) ++j;
      kidx[j] -= 1;
      double acc = 0.0;
      for (int i = 0; i < dim; ++i) {
        if (kidx[i] == 0 || sigma(j, i) == 0.0) continue;
        const int ki = kidx[i];
        kidx[i] -= 1;
        acc += sigma(j, i) * ki * moments_[flat_of(kidx)];
        kidx[i] += 1;
      }
      moments_[f] = acc;
    }
  }

  polys_.reserve((max_level_ + 1) * (max_level_ + 1));
  for (int m = 0; m <= max_level_; ++m) {
    for (int n = 0; n <= max_level_; ++n) polys_.push_back(dyad_wigner_polynomial(m, n));
  }
}

void GaussianFockOracle::check_tuple(std::span<const int> t) const {
  if (static_cast<int>(t.size()) != n_modes_) throw UsageError("Fock tuple has the wrong number of modes");
  for (int v : t) {
    if (v < 0 || v > max_level_) throw UsageError("Fock level outside the oracle's range");
  }
}

Complex GaussianFockOracle::element(std::span<const int> bra, std::span<const int> ket) const {
  check_tuple(bra);
  check_tuple(ket);
  struct Term {
    std::size_t id;
    Complex c;
  };
  std::vector<std::vector<Term>> terms(n_modes_);
  for (int k = 0; k < n_modes_; ++k) {
    const CMatrix& q = polys_[ket[k] * (max_level_ + 1) + bra[k]];
    for (Eigen::Index a = 0; a < q.rows(); ++a)
      for (Eigen::Index b = 0; b < q.cols(); ++b) {
        if (q(a, b) != Complex(0.0)) {
          terms[k].push_back({static_cast<std::size_t>(pair_id(static_cast<int>(a), static_cast<int>(b))), q(a, b)});
        }
      }
  }
  Complex total = 0.0;
  // Odometer over one monomial per mode.
  std::vector<std::size_t> pos(n_modes_, 0);
  while (true) {
    std::size_t f = 0;
    Complex c = 1.0;
    for (int k = 0; k < n_modes_; ++k) {
      f = f * pairs_ + terms[k][pos[k]].id;
      c *= terms[k][pos[k]].c;
    }
    total += c * moments_[f];
    int k = n_modes_ - 1;
    while (k >= 0 && ++pos[k] == terms[k].size()) pos[k--] = 0;
    if (k < 0) break;
  }
  return prefactor_ * total;
}

Complex GaussianFockOracle::element_quadrature(std::span<const int> bra, std::span<const int> ket,
                                               int nodes) const {
  check_tuple(bra);
  check_tuple(ket);
  std::vector<double> x, w;
  gauss_hermite(nodes, x, w);
  const int dim = 2 * n_modes_;
  Eigen::LLT<Matrix> llt(a_);
  const Matrix l = llt.matrixL();
  // r = L^{-T} u maps exp(-r^T A r) onto exp(-|u|^2).
  const Matrix back = l.transpose().triangularView<Eigen::Upper>().solve(Matrix::Identity(dim, dim));
  const double jac = 1.0 / l.diagonal().prod();

  std::vector<const CMatrix*> q(n_modes_);
  for (int k = 0; k < n_modes_; ++k) q[k] = &polys_[ket[k] * (max_level_ + 1) + bra[k]];

  std::vector<int> pos(dim, 0);
  Vector u(dim);
  Complex total = 0.0;
  while (true) {
    double wt = 1.0;
    for (int i = 0; i < dim; ++i) {
      u(i) = x[pos[i]];
      wt *= w[pos[i]];
    }
    const Vector r = back * u;
    Complex v = wt;
    for (int k = 0; k < n_modes_; ++k) v *= evaluate(*q[k], r(2 * k), r(2 * k + 1));
    total += v;
    int i = dim - 1;
    while (i >= 0 && ++pos[i] == nodes) pos[i--] = 0;
    if (i < 0) break;
  }
  return std::pow(2.0, n_modes_) / std::sqrt(det_gamma_) * jac * total;
}

Complex gaussian_fock_element_oracle(const CovarianceMatrix& cm, std::span<const int> bra,
                                     std::span<const int> ket) {
  int level = 0;
  for (int v : bra) level = std::max(level, v);
  for (int v : ket) level = std::max(level, v);
  return GaussianFockOracle(cm, level).element(bra, ket);
}

void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw UsageError("Gauss-Hermite rule needs at least one node");
  Matrix jacobi = Matrix::Zero(n, n);
  for (int k = 1; k < n; ++k) jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(k / 2.0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(jacobi);
  nodes.resize(n);
  weights.resize(n);
  for (int k = 0; k < n; ++k) {
    nodes[k] = es.eigenvalues()(k);
    const double v = es.eigenvectors()(0, k);
    weights[k] = std::sqrt(kPi) * v * v;
  }
}

}  // namespace cvgme
