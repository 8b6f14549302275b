#include "cvgme/sdp.hpp"

#include "cvgme/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

namespace cvgme {

// ---- forms ------------------------------------------------------------------

void LinearForm::add(int block, int row, int col, double value) {
  if (row > col) std::swap(row, col);
  if (value != 0.0) entries.push_back({block, row, col, value});
}

void add_symmetric(LinearForm& form, int block, const Matrix& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r <= c; ++r) {
      const double v = r == c ? m(r, c) : 0.5 * (m(r, c) + m(c, r));
      form.add(block, static_cast<int>(r), static_cast<int>(c), v);
    }
  }
}

void add_hermitian(LinearForm& form, int block, const CMatrix& h) {
  const auto n = static_cast<int>(h.rows());
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r <= c; ++r) {
      const double re = 0.5 * (h(r, c).real() + h(c, r).real());
      const double im = 0.5 * (h(c, r).imag() - h(r, c).imag());  // Im of the lower entry
      // emb(H)/2: Re H on both diagonal copies, Im H (lower) in the (2,1) block.
      form.add(block, r, c, 0.5 * re);
      form.add(block, n + r, n + c, 0.5 * re);
      if (r != c) {
        // (n + c, r) holds Im H(c, r); (n + r, c) holds Im H(r, c) = -im.
        form.add(block, r, n + c, 0.5 * im);
        form.add(block, c, n + r, -0.5 * im);
      }
    }
  }
}

CMatrix hermitian_value(const Matrix& x) {
  const Eigen::Index n = x.rows() / 2;
  CMatrix y(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      y(i, j) = Complex(0.5 * (x(i, j) + x(n + i, n + j)), 0.5 * (x(n + i, j) - x(i, n + j)));
    }
  }
  return y;
}

int SdpProblem::add_block(int size, BlockKind kind) {
  if (size <= 0) throw UsageError("block size must be positive");
  blocks.push_back({size, kind});
  return static_cast<int>(blocks.size()) - 1;
}

int SdpProblem::add_constraint(LinearForm form, double b) {
  constraints.push_back(std::move(form));
  rhs.push_back(b);
  return static_cast<int>(constraints.size()) - 1;
}

void SdpProblem::validate() const {
  if (blocks.empty()) throw UsageError("SDP has no blocks");
  if (rhs.size() != constraints.size()) throw UsageError("SDP right-hand side size mismatch");
  auto check = [&](const LinearForm& f) {
    for (const auto& e : f.entries) {
      if (e.block < 0 || e.block >= static_cast<int>(blocks.size())) throw UsageError("SDP entry block out of range");
      const int n = blocks[e.block].real_size();
      if (e.row < 0 || e.col >= n || e.row > e.col) throw UsageError("SDP entry index out of range");
      if (!std::isfinite(e.value)) throw UsageError("SDP entry is not finite");
    }
  };
  check(objective);
  for (const auto& c : constraints) check(c);
  for (double b : rhs) {
    if (!std::isfinite(b)) throw UsageError("SDP right-hand side is not finite");
  }
}

// ---- helpers -------------------------------------------------------------------

namespace {

struct Coeff {
  int row;
  int col;
  double value;
};
using BlockCoeffs = std::vector<Coeff>;

struct Data {
  std::vector<int> n;
  std::vector<BlockCoeffs> c;               // c[block]
  std::vector<std::vector<BlockCoeffs>> a;  // a[j][block]
  std::vector<std::vector<int>> touching;   // touching[block] -> constraints
  Vector b;
};

Data prepare(const SdpProblem& p) {
  Data d;
  const int nb = static_cast<int>(p.blocks.size());
  for (const auto& bs : p.blocks) d.n.push_back(bs.real_size());
  d.c.assign(nb, {});
  for (const auto& e : p.objective.entries) d.c[e.block].push_back({e.row, e.col, e.value});
  const int m = p.n_constraints();
  d.a.assign(m, std::vector<BlockCoeffs>(nb));
  d.touching.assign(nb, {});
  for (int j = 0; j < m; ++j) {
    for (const auto& e : p.constraints[j].entries) d.a[j][e.block].push_back({e.row, e.col, e.value});
    for (int b = 0; b < nb; ++b) {
      if (!d.a[j][b].empty()) d.touching[b].push_back(j);
    }
  }
  d.b = Eigen::Map<const Vector>(p.rhs.data(), m);
  return d;
}

double inner(const BlockCoeffs& a, const Matrix& x) {
  double s = 0.0;
  for (const auto& e : a) s += e.row == e.col ? e.value * x(e.row, e.col) : e.value * (x(e.row, e.col) + x(e.col, e.row));
  return s;
}

void accumulate(Matrix& m, const BlockCoeffs& a, double scale) {
  for (const auto& e : a) {
    m(e.row, e.col) += scale * e.value;
    if (e.row != e.col) m(e.col, e.row) += scale * e.value;
  }
}

double frob(const BlockCoeffs& a) {
  double s = 0.0;
  for (const auto& e : a) s += (e.row == e.col ? 1.0 : 2.0) * e.value * e.value;
  return std::sqrt(s);
}

using Blocks = std::vector<Matrix>;

double dot(const Blocks& x, const Blocks& s) {
  double t = 0.0;
  for (std::size_t b = 0; b < x.size(); ++b) t += x[b].cwiseProduct(s[b]).sum();
  return t;
}

double norm(const Blocks& x) { return std::sqrt(dot(x, x)); }

Vector apply_forms(const Data& d, const Blocks& x) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(d.a.size()));
  for (std::size_t j = 0; j < d.a.size(); ++j) {
    for (std::size_t b = 0; b < x.size(); ++b) v(j) += inner(d.a[j][b], x[b]);
  }
  return v;
}

Blocks apply_adjoint(const Data& d, const Vector& y) {
  Blocks out;
  for (int nb : d.n) out.push_back(Matrix::Zero(nb, nb));
  for (std::size_t j = 0; j < d.a.size(); ++j) {
    if (y(j) == 0.0) continue;
    for (std::size_t b = 0; b < out.size(); ++b) accumulate(out[b], d.a[j][b], y(j));
  }
  return out;
}

double objective_value(const Data& d, const Blocks& x) {
  double t = 0.0;
  for (std::size_t b = 0; b < x.size(); ++b) t += inner(d.c[b], x[b]);
  return t;
}

// Largest alpha in (0, inf] keeping X + alpha dX PSD; X must be positive definite.
double max_step(const Matrix& x, const Matrix& dx) {
  Eigen::LLT<Matrix> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  const Matrix l = llt.matrixL();
  const Matrix li = l.triangularView<Eigen::Lower>().solve(Matrix::Identity(x.rows(), x.cols()));
  Matrix w = li * dx * li.transpose();
  w = 0.5 * (w + w.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(w, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues()(0);
  return lo >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lo;
}

Matrix sym(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

double evaluate(const LinearForm& form, const std::vector<Matrix>& x) {
  double s = 0.0;
  for (const auto& e : form.entries) {
    s += e.row == e.col ? e.value * x[e.block](e.row, e.col)
                        : e.value * (x[e.block](e.row, e.col) + x[e.block](e.col, e.row));
  }
  return s;
}

std::vector<Matrix> dense_blocks(const SdpProblem& problem, const LinearForm& form) {
  std::vector<Matrix> out;
  for (const auto& bs : problem.blocks) out.push_back(Matrix::Zero(bs.real_size(), bs.real_size()));
  for (const auto& e : form.entries) {
    out[e.block](e.row, e.col) += e.value;
    if (e.row != e.col) out[e.block](e.col, e.row) += e.value;
  }
  return out;
}

std::vector<Matrix> adjoint(const SdpProblem& problem, const Vector& y) {
  if (y.size() != problem.n_constraints()) throw UsageError("adjoint: multiplier size mismatch");
  return apply_adjoint(prepare(problem), y);
}

double min_block_eigenvalue(const std::vector<Matrix>& blocks) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& m : blocks) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym(m), Eigen::EigenvaluesOnly);
    lo = std::min(lo, es.eigenvalues()(0));
  }
  return lo;
}

// ---- solver ----------------------------------------------------------------------

SdpSolution solve(const SdpProblem& problem, const SdpOptions& opt) {
  problem.validate();
  const Data d = prepare(problem);
  const int nb = static_cast<int>(d.n.size());
  const int m = static_cast<int>(d.a.size());
  int n_total = 0;
  for (int n : d.n) n_total += n;

  Blocks c_dense;
  for (int b = 0; b < nb; ++b) {
    Matrix cb = Matrix::Zero(d.n[b], d.n[b]);
    accumulate(cb, d.c[b], 1.0);
    c_dense.push_back(cb);
  }
  const double norm_b = d.b.norm();
  const double norm_c = norm(c_dense);

  // Starting point scaled to the data.
  Blocks x(nb), s(nb);
  for (int b = 0; b < nb; ++b) {
    const double n = d.n[b];
    double xi = std::max(10.0, std::sqrt(n));
    double eta = std::max({10.0, std::sqrt(n), c_dense[b].norm()});
    for (int j : d.touching[b]) {
      const double fa = frob(d.a[j][b]);
      xi = std::max(xi, n * (1.0 + std::abs(d.b(j))) / (1.0 + fa));
      eta = std::max(eta, fa);
    }
    x[b] = xi * Matrix::Identity(d.n[b], d.n[b]);
    s[b] = eta * Matrix::Identity(d.n[b], d.n[b]);
  }
  Vector y = Vector::Zero(m);

  SdpSolution sol;
  auto finish = [&](SdpStatus st, std::string msg) {
    sol.status = st;
    sol.x = x;
    sol.s = s;
    sol.y = y;
    sol.primal_objective = objective_value(d, x);
    sol.dual_objective = d.b.dot(y);
    sol.message = std::move(msg);
    return sol;
  };

  // Best iterate by the worst of the three scaled stopping measures.
  struct Best {
    double merit = std::numeric_limits<double>::infinity();
    Blocks x, s;
    Vector y;
    double rp = 0, rd = 0, gap = 0;
    int since = 0;
  } best;
  auto give_up = [&](const char* why) {
    x = best.x;
    s = best.s;
    y = best.y;
    sol.primal_residual = best.rp;
    sol.dual_residual = best.rd;
    if (best.rp < opt.near_feasibility_tol && best.rd < opt.near_feasibility_tol && best.gap < opt.near_gap_tol) {
      return finish(SdpStatus::NearOptimal, std::string("reduced accuracy: ") + why);
    }
    return finish(SdpStatus::NumericalFailure, why);
  };

  int stalled = 0;
  for (int it = 0; it < opt.max_iterations; ++it) {
    sol.iterations = it;
    const Vector rp = d.b - apply_forms(d, x);
    Blocks aty = apply_adjoint(d, y);
    Blocks rd(nb);
    for (int b = 0; b < nb; ++b) rd[b] = c_dense[b] - aty[b] - s[b];

    const double pobj = objective_value(d, x);
    const double dobj = d.b.dot(y);
    const double mu = dot(x, s) / n_total;
    sol.primal_residual = rp.norm() / (1.0 + norm_b);
    sol.dual_residual = norm(rd) / (1.0 + norm_c);
    const double gap = std::abs(pobj - dobj);

    if (!std::isfinite(pobj) || !std::isfinite(dobj) || !std::isfinite(mu)) {
      return give_up("non-finite iterate");
    }
    if (sol.primal_residual < opt.feasibility_tol && sol.dual_residual < opt.feasibility_tol &&
        gap < opt.gap_tol * (1.0 + std::abs(pobj)) && dot(x, s) < opt.gap_tol * (1.0 + std::abs(pobj))) {
      return finish(SdpStatus::Optimal, "converged");
    }

    // Improving rays.
    if (dobj > 1e8 * (1.0 + norm_c)) {
      const Vector yr = y / dobj;
      Blocks z = apply_adjoint(d, yr);
      for (auto& zb : z) zb = -zb;
      if (min_block_eigenvalue(z) > -1e-8 * (1.0 + norm(z))) {
        sol.certificate = Certificate::PrimalInfeasible;
        sol.ray_y = yr;
        return finish(SdpStatus::InfeasibleCertificate, "primal infeasible: dual improving ray");
      }
    }
    if (pobj < -1e8 * (1.0 + norm_b)) {
      Blocks xr = x;
      for (auto& xb : xr) xb /= -pobj;
      if (apply_forms(d, xr).norm() < 1e-8 * (1.0 + norm(xr))) {
        sol.certificate = Certificate::DualInfeasible;
        sol.ray_x = xr;
        return finish(SdpStatus::InfeasibleCertificate, "dual infeasible: primal improving ray");
      }
    }

    {
      const double rel_gap = std::max(gap, dot(x, s)) / (1.0 + std::abs(pobj));
      const double merit = std::max({sol.primal_residual / opt.feasibility_tol, sol.dual_residual / opt.feasibility_tol,
                                     rel_gap / opt.gap_tol});
      if (merit < 0.9 * best.merit) {
        best = {merit, x, s, y, sol.primal_residual, sol.dual_residual, rel_gap, 0};
      } else if (sol.primal_residual < opt.near_feasibility_tol && sol.dual_residual < opt.near_feasibility_tol &&
                 ++best.since >= opt.stall_iterations) {
        return give_up("no progress");
      }
    }

    Blocks sinv(nb);
    for (int b = 0; b < nb; ++b) {
      Eigen::LLT<Matrix> llt(s[b]);
      if (llt.info() != Eigen::Success) return give_up("slack lost definiteness");
      sinv[b] = sym(llt.solve(Matrix::Identity(d.n[b], d.n[b])));
    }

    // Schur complement M_ij = Tr(A_i X A_j S^{-1}).
    Matrix schur = Matrix::Zero(m, m);
    for (int b = 0; b < nb; ++b) {
      const auto& tj = d.touching[b];
      for (std::size_t q = 0; q < tj.size(); ++q) {
        const int j = tj[q];
        Matrix xa = Matrix::Zero(d.n[b], d.n[b]);
        for (const auto& e : d.a[j][b]) {
          xa.col(e.col) += e.value * x[b].col(e.row);
          if (e.row != e.col) xa.col(e.row) += e.value * x[b].col(e.col);
        }
        const Matrix g = xa * sinv[b];
        for (std::size_t p = q; p < tj.size(); ++p) schur(tj[p], j) += inner(d.a[tj[p]][b], g);
      }
    }
    schur = schur.selfadjointView<Eigen::Lower>();

    Eigen::LLT<Matrix> chol(schur);
    Eigen::LDLT<Matrix> ldlt;
    const bool use_llt = chol.info() == Eigen::Success;
    if (!use_llt) {
      const double reg = 1e-14 * std::max(1.0, schur.diagonal().cwiseAbs().maxCoeff());
      ldlt.compute(schur + reg * Matrix::Identity(m, m));
      if (ldlt.info() != Eigen::Success) return give_up("Schur complement is singular");
    }

    Blocks xrs(nb);
    for (int b = 0; b < nb; ++b) xrs[b] = x[b] * rd[b] * sinv[b];

    auto direction = [&](const Blocks& t, Blocks& dx, Vector& dy, Blocks& ds) {
      Vector rhs = rp;
      for (int j = 0; j < m; ++j) {
        for (int b = 0; b < nb; ++b) {
          if (!d.a[j][b].empty()) rhs(j) -= inner(d.a[j][b], t[b] - xrs[b]);
        }
      }
      dy = use_llt ? Vector(chol.solve(rhs)) : Vector(ldlt.solve(rhs));
      const Blocks ady = apply_adjoint(d, dy);
      dx.resize(nb);
      ds.resize(nb);
      for (int b = 0; b < nb; ++b) {
        ds[b] = rd[b] - ady[b];
        dx[b] = sym(t[b] - x[b] * ds[b] * sinv[b]);
      }
    };
    auto steps = [&](const Blocks& dx, const Blocks& ds, double& ap, double& ad) {
      ap = ad = std::numeric_limits<double>::infinity();
      for (int b = 0; b < nb; ++b) {
        ap = std::min(ap, max_step(x[b], dx[b]));
        ad = std::min(ad, max_step(s[b], ds[b]));
      }
    };

    // Predictor.
    Blocks t(nb);
    for (int b = 0; b < nb; ++b) t[b] = -x[b];
    Blocks dxa, dsa;
    Vector dya;
    direction(t, dxa, dya, dsa);
    double ap, ad;
    steps(dxa, dsa, ap, ad);
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    double mu_aff = 0.0;
    for (int b = 0; b < nb; ++b) mu_aff += (x[b] + ap * dxa[b]).cwiseProduct(s[b] + ad * dsa[b]).sum();
    mu_aff /= n_total;
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    // Corrector.
    for (int b = 0; b < nb; ++b) t[b] = sigma * mu * sinv[b] - x[b] - dxa[b] * dsa[b] * sinv[b];
    Blocks dx, ds;
    Vector dy;
    direction(t, dx, dy, ds);
    steps(dx, ds, ap, ad);
    ap = std::min(1.0, opt.step_fraction * ap);
    ad = std::min(1.0, opt.step_fraction * ad);

    if (ap < 1e-10 && ad < 1e-10) {
      if (++stalled > 3) return give_up("step length collapsed");
    } else {
      stalled = 0;
    }
    for (int b = 0; b < nb; ++b) {
      x[b] = sym(x[b] + ap * dx[b]);
      s[b] = sym(s[b] + ad * ds[b]);
    }
    y += ad * dy;
  }
  sol.iterations = opt.max_iterations;
  if (best.merit < std::numeric_limits<double>::infinity()) return give_up("iteration cap reached");
  return finish(SdpStatus::NumericalFailure, "iteration cap reached");
}

// ---- text format --------------------------------------------------------------------

void dump(const SdpProblem& problem, std::ostream& out) {
  problem.validate();
  out.precision(17);
  out << "blocks " << problem.blocks.size() << '\n';
  for (const auto& b : problem.blocks) out << b.size << ' ' << (b.kind == BlockKind::Hermitian ? 'H' : 'S') << '\n';
  out << "constraints " << problem.constraints.size() << '\n';
  auto write = [&](const LinearForm& f) {
    for (const auto& m : dense_blocks(problem, f)) {
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? " " : "") << m(r, c);
        out << '\n';
      }
    }
  };
  out << "objective\n";
  write(problem.objective);
  for (std::size_t j = 0; j < problem.constraints.size(); ++j) {
    out << "constraint " << problem.rhs[j] << '\n';
    write(problem.constraints[j]);
  }
}

SdpProblem load(std::istream& in) {
  auto expect = [&](const char* word) {
    std::string w;
    if (!(in >> w) || w != word) throw UsageError(std::string("SDP text: expected '") + word + "'");
  };
  SdpProblem p;
  std::size_t nb = 0, m = 0;
  expect("blocks");
  if (!(in >> nb)) throw UsageError("SDP text: bad block count");
  for (std::size_t b = 0; b < nb; ++b) {
    int size;
    char kind;
    if (!(in >> size >> kind) || (kind != 'S' && kind != 'H')) throw UsageError("SDP text: bad block line");
    p.add_block(size, kind == 'H' ? BlockKind::Hermitian : BlockKind::Symmetric);
  }
  expect("constraints");
  if (!(in >> m)) throw UsageError("SDP text: bad constraint count");
  auto read = [&]() {
    LinearForm f;
    for (std::size_t b = 0; b < nb; ++b) {
      const int n = p.blocks[b].real_size();
      Matrix mat(n, n);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
          if (!(in >> mat(r, c))) throw UsageError("SDP text: truncated matrix");
      add_symmetric(f, static_cast<int>(b), mat);
    }
    return f;
  };
  expect("objective");
  p.objective = read();
  for (std::size_t j = 0; j < m; ++j) {
    expect("constraint");
    double b;
    if (!(in >> b)) throw UsageError("SDP text: bad right-hand side");
    p.add_constraint(read(), b);
  }
  p.validate();
  return p;
}

}  // namespace cvgme
