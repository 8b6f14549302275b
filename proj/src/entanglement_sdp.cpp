#include "cvgme/entanglement_sdp.hpp"

#include "cvgme/errors.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace cvgme {

namespace {

// Quadrature indices of both sides of each bipartition.
struct CutLayout {
  std::array<std::vector<int>, 2> quads;
};

std::vector<CutLayout> layouts(int n_modes, std::span<const ModeBipartition> bips) {
  if (bips.empty()) throw UsageError("at least one bipartition is required");
  std::vector<CutLayout> out;
  for (const auto& b : bips) {
    if (b.size() != n_modes) throw UsageError("bipartition does not match the number of modes");
    out.push_back({{quadrature_indices(b.group_a()), quadrature_indices(b.group_b())}});
  }
  return out;
}

Matrix sub_block(const Matrix& m, const std::vector<int>& idx) {
  const auto n = static_cast<Eigen::Index>(idx.size());
  Matrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = m(idx[i], idx[j]);
  }
  return out;
}

// Local symplectic form on an interleaved quadrature list (pairs of one mode).
Matrix local_omega(std::size_t n_quads) { return symplectic_form(static_cast<int>(n_quads / 2)); }

std::string describe(const SdpSolution& s) {
  char buf[200];
  std::snprintf(buf, sizeof buf, "solver failed after %d iterations (pobj %.6g, dobj %.6g, res %.2e/%.2e): %s",
                s.iterations, s.primal_objective, s.dual_objective, s.primal_residual, s.dual_residual,
                s.message.c_str());
  return buf;
}

bool accepted(const SdpSolution& s) { return s.status == SdpStatus::Optimal || s.status == SdpStatus::NearOptimal; }

struct BisepSdp {
  SdpProblem problem;
  int w_block = 0;
  std::vector<std::array<int, 2>> side_blocks;
  std::vector<int> scalar_blocks;
};

// Dual (LMI) side: y = (W upper triangle column by column, J_{i,side} entries);
//   W >= 0,  W_side + i J_{i,side} >= 0,  sum_side Tr(J Omega) - 1 >= 0,
//   maximize -Tr(W gamma).
// The primal variables are then K_{i,side} + i p_i Omega and p_i, with X_W + sum K = gamma.
BisepSdp build_bisep(const CovarianceMatrix& gamma, const std::vector<CutLayout>& cuts) {
  BisepSdp s;
  const int d = gamma.dim();
  auto& pr = s.problem;
  s.w_block = pr.add_block(d);
  for (const auto& c : cuts) {
    s.side_blocks.push_back({pr.add_block(static_cast<int>(c.quads[0].size()), BlockKind::Hermitian),
                             pr.add_block(static_cast<int>(c.quads[1].size()), BlockKind::Hermitian)});
  }
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    s.scalar_blocks.push_back(pr.add_block(1));
    pr.objective.add(s.scalar_blocks.back(), 0, 0, -1.0);
  }

  const Matrix& g = gamma.matrix();
  for (int l = 0; l < d; ++l) {
    for (int k = 0; k <= l; ++k) {
      LinearForm f;
      f.add(s.w_block, k, l, -1.0);
      for (std::size_t i = 0; i < cuts.size(); ++i) {
        for (int side = 0; side < 2; ++side) {
          const auto& q = cuts[i].quads[side];
          const auto a = std::find(q.begin(), q.end(), k);
          const auto b = std::find(q.begin(), q.end(), l);
          if (a == q.end() || b == q.end()) continue;
          const auto la = a - q.begin();
          const auto lb = b - q.begin();
          CMatrix h = CMatrix::Zero(static_cast<Eigen::Index>(q.size()), static_cast<Eigen::Index>(q.size()));
          h(la, lb) = -1.0;
          h(lb, la) = -1.0;
          add_hermitian(f, s.side_blocks[i][side], h);
        }
      }
      pr.add_constraint(std::move(f), k == l ? -g(k, k) : -2.0 * g(k, l));
    }
  }

  for (std::size_t i = 0; i < cuts.size(); ++i) {
    for (int side = 0; side < 2; ++side) {
      const auto& q = cuts[i].quads[side];
      const auto n = static_cast<Eigen::Index>(q.size());
      const Matrix om = local_omega(q.size());
      for (Eigen::Index l = 0; l < n; ++l) {
        for (Eigen::Index k = 0; k < l; ++k) {
          LinearForm f;
          CMatrix h = CMatrix::Zero(n, n);
          h(k, l) = Complex(0.0, -1.0);
          h(l, k) = Complex(0.0, 1.0);
          add_hermitian(f, s.side_blocks[i][side], h);
          if (om(k, l) != 0.0) f.add(s.scalar_blocks[i], 0, 0, 2.0 * om(k, l));
          pr.add_constraint(std::move(f), 0.0);
        }
      }
    }
  }
  return s;
}

Matrix witness_from_y(const Vector& y, int d) {
  Matrix w(d, d);
  int j = 0;
  for (int l = 0; l < d; ++l) {
    for (int k = 0; k <= l; ++k, ++j) {
      w(k, l) = y(j);
      w(l, k) = y(j);
    }
  }
  return w;
}

double witness_normalization(const Matrix& w, std::span<const ModeBipartition> bips) {
  double bound = std::numeric_limits<double>::infinity();
  for (const auto& b : bips) bound = std::min(bound, cm_witness_bound(w, b));
  return bound;
}

struct BisepSolve {
  SdpSolution solution;
  BisepSdp sdp;
};

BisepSolve run_bisep(const CovarianceMatrix& gamma, const std::vector<CutLayout>& cuts, const SdpOptions& options) {
  BisepSolve out{{}, build_bisep(gamma, cuts)};
  out.solution = solve(out.sdp.problem, options);
  if (!accepted(out.solution)) throw NumericError("cm biseparability SDP: " + describe(out.solution));
  return out;
}

CmWitness witness_of(const CovarianceMatrix& gamma, std::span<const ModeBipartition> bips, const BisepSolve& r) {
  Matrix w = witness_from_y(r.solution.y, gamma.dim());
  Eigen::SelfAdjointEigenSolver<Matrix> es(w, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-8) {
    throw NumericError("cm witness is not positive semidefinite");
  }
  const double bound = witness_normalization(w, bips);
  if (!(bound > 0.0)) throw NumericError("cm witness has a vanishing separable bound");
  w /= bound;
  return {w, (w.cwiseProduct(gamma.matrix())).sum() - 1.0, r.solution.status == SdpStatus::NearOptimal};
}

}  // namespace

double cm_witness_bound(const Matrix& w, const ModeBipartition& bip) {
  if (w.rows() != 2 * bip.size() || w.cols() != w.rows()) throw UsageError("witness size does not match the bipartition");
  double total = 0.0;
  for (const auto* group : {&bip.group_a(), &bip.group_b()}) {
    const Matrix blk = sub_block(w, quadrature_indices(*group));
    for (double nu : symplectic_eigenvalues(CovarianceMatrix(blk))) total += 2.0 * nu;
  }
  return total;
}

DecompositionCheck check_decomposition(const CovarianceMatrix& gamma, std::span<const ModeBipartition> bipartitions,
                                       const CmDecomposition& d) {
  const auto cuts = layouts(gamma.n_modes(), bipartitions);
  if (d.k.size() != cuts.size() || d.weights.size() != cuts.size()) throw UsageError("decomposition size mismatch");
  DecompositionCheck out;
  Matrix rest = gamma.matrix();
  const Matrix om = symplectic_form(gamma.n_modes());
  out.validity_min_eig = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    rest -= d.k[i];
    const CMatrix h = d.k[i].cast<Complex>() + Complex(0.0, d.weights[i]) * om.cast<Complex>();
    out.validity_min_eig = std::min(out.validity_min_eig, min_eigenvalue(h));
    if (d.weights[i] < -1e-12) out.validity_min_eig = std::min(out.validity_min_eig, d.weights[i]);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(rest, Eigen::EigenvaluesOnly);
  out.remainder_min_eig = es.eigenvalues().minCoeff();
  return out;
}

BisepResult cm_bisep_feasibility(const CovarianceMatrix& gamma, std::span<const ModeBipartition> bipartitions,
                                 const SdpOptions& options) {
  const auto cuts = layouts(gamma.n_modes(), bipartitions);
  const auto r = run_bisep(gamma, cuts, options);
  const auto& sol = r.solution;

  double total = 0.0;
  for (int b : r.sdp.scalar_blocks) total += sol.x[b](0, 0);
  const double achieved = 0.5 * (total - sol.dual_objective);
  if (achieved < 1.0 - kFeasibleMargin) return Infeasible{witness_of(gamma, bipartitions, r)};

  CmDecomposition dec;
  dec.total_weight = achieved;
  dec.near_optimal = sol.status == SdpStatus::NearOptimal;
  const int d = gamma.dim();
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    const double p = sol.x[r.sdp.scalar_blocks[i]](0, 0) / total;
    Matrix k = Matrix::Zero(d, d);
    for (int side = 0; side < 2; ++side) {
      const Matrix re = hermitian_value(sol.x[r.sdp.side_blocks[i][side]]).real();
      const auto& q = cuts[i].quads[side];
      for (std::size_t a = 0; a < q.size(); ++a) {
        for (std::size_t b = 0; b < q.size(); ++b) k(q[a], q[b]) = re(a, b) / total;
      }
    }
    dec.weights.push_back(p);
    if (p > kUnusedWeight) {
      dec.blocks.emplace_back(CovarianceMatrix(k / p));
    } else {
      dec.blocks.emplace_back(std::nullopt);
    }
    dec.k.push_back(std::move(k));
  }

  const auto check = check_decomposition(gamma, bipartitions, dec);
  if (check.remainder_min_eig < -1e-7 || check.validity_min_eig < -1e-7) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "decomposition fails re-verification (remainder %.3g, validity %.3g)",
                  check.remainder_min_eig, check.validity_min_eig);
    throw NumericError(buf);
  }
  return Feasible{std::move(dec)};
}

CmWitness optimal_cm_witness(const CovarianceMatrix& gamma, std::span<const ModeBipartition> bipartitions,
                             const SdpOptions& options) {
  const auto cuts = layouts(gamma.n_modes(), bipartitions);
  return witness_of(gamma, bipartitions, run_bisep(gamma, cuts, options));
}

CovarianceMatrix pair_compound_cm(double r1, double r2) { return direct_sum(fs_mixture_cm(r1), ps_mixture_cm(r2)); }

std::vector<ModeBipartition> pair_compound_bipartitions() { return copies_bipartitions(2); }

std::vector<ModeBipartition> copies_bipartitions(int copies) {
  if (copies < 1) throw UsageError("need at least one copy");
  std::vector<std::vector<int>> parties(3);
  for (int c = 0; c < copies; ++c) {
    for (int p = 0; p < 3; ++p) parties[p].push_back(3 * c + p);
  }
  std::vector<ModeBipartition> out;
  for (const auto& b : all_bipartitions(3)) out.push_back(expand_to_modes(b, parties));
  return out;
}

std::vector<ScanRecord> pair_activation_scan(std::span<const double> r1_grid, std::span<const double> r2_grid,
                                             int jobs, const SdpOptions& options) {
  const auto bips = pair_compound_bipartitions();
  const std::size_t n2 = r2_grid.size();
  return parallel_map(r1_grid.size() * n2, jobs, [&](std::size_t idx) {
    const double r1 = r1_grid[idx / n2];
    const double r2 = r2_grid[idx % n2];
    ScanRecord rec;
    rec.parameter("r1", r1).parameter("r2", r2);
    try {
      const auto w = optimal_cm_witness(pair_compound_cm(r1, r2), bips, options);
      rec.value("witness_value", w.value);
      rec.flag("gme_detected", w.value < -1e-7);
      if (w.near_optimal) rec.status = "near_optimal";
    } catch (const NumericError&) {
      rec.value("witness_value", std::numeric_limits<double>::quiet_NaN());
      rec.flag("gme_detected", false);
      rec.status = "solver_failure";
    }
    return rec;
  });
}

// ---- three qubits ---------------------------------------------------------------

CMatrix qubit_partial_transpose(const CMatrix& m, int n_qubits, std::span<const int> qubits) {
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  if (m.rows() != dim || m.cols() != dim) throw UsageError("operator size does not match the qubit count");
  int mask = 0;
  for (int q : qubits) {
    if (q < 0 || q >= n_qubits) throw UsageError("qubit index out of range");
    mask |= 1 << (n_qubits - 1 - q);
  }
  CMatrix out(dim, dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    for (Eigen::Index b = 0; b < dim; ++b) {
      const Eigen::Index a2 = (a & ~mask) | (b & mask);
      const Eigen::Index b2 = (b & ~mask) | (a & mask);
      out(a2, b2) = m(a, b);
    }
  }
  return out;
}

QubitGmeResult fully_decomposable_witness(const FockDensityMatrix& rho, const SdpOptions& options) {
  if (rho.mode_dims() != std::vector<int>{2, 2, 2}) throw UsageError("fully_decomposable_witness needs dims (2,2,2)");
  return fully_decomposable_witness(rho.dense(), options);
}

QubitGmeResult fully_decomposable_witness(const CMatrix& rho, const SdpOptions& options) {
  if (rho.rows() != 8 || rho.cols() != 8) throw UsageError("fully_decomposable_witness needs an 8x8 state");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw UsageError("state is not hermitian");

  QubitGmeResult out{{CMatrix(), {}, {}, {ModeBipartition::one_vs_rest(0, 3), ModeBipartition::one_vs_rest(1, 3),
                                          ModeBipartition::one_vs_rest(2, 3)}},
                     0.0};
  auto& wit = out.witness;
  auto pt = [&](const CMatrix& m, int cut) { return qubit_partial_transpose(m, 3, wit.cuts[cut].group_a()); };

  SdpProblem pr;
  std::array<int, 3> pb{}, qb{};
  for (int c = 0; c < 3; ++c) {
    pb[c] = pr.add_block(8, BlockKind::Hermitian);
    qb[c] = pr.add_block(8, BlockKind::Hermitian);
  }
  add_hermitian(pr.objective, pb[0], rho);
  add_hermitian(pr.objective, qb[0], pt(rho, 0));

  // Real coordinates of a hermitian 8x8: Re and Im of the upper triangle.
  std::vector<CMatrix> basis;
  for (int a = 0; a < 8; ++a) {
    for (int b = a; b < 8; ++b) {
      CMatrix h = CMatrix::Zero(8, 8);
      if (a == b) {
        h(a, a) = 1.0;
        basis.push_back(h);
        continue;
      }
      h(a, b) = h(b, a) = 0.5;
      basis.push_back(h);
      h(a, b) = Complex(0.0, 0.5);
      h(b, a) = Complex(0.0, -0.5);
      basis.push_back(h);
    }
  }
  for (int c = 1; c < 3; ++c) {
    for (const auto& h : basis) {
      LinearForm f;
      add_hermitian(f, pb[0], h);
      add_hermitian(f, qb[0], pt(h, 0));
      add_hermitian(f, pb[c], -h);
      add_hermitian(f, qb[c], -pt(h, c));
      pr.add_constraint(std::move(f), 0.0);
    }
  }
  {
    LinearForm f;
    const CMatrix id = CMatrix::Identity(8, 8);
    add_hermitian(f, pb[0], id);
    add_hermitian(f, qb[0], id);
    pr.add_constraint(std::move(f), 1.0);
  }

  const auto sol = solve(pr, options);
  if (!accepted(sol)) throw NumericError("fully decomposable witness SDP: " + describe(sol));
  out.near_optimal = sol.status == SdpStatus::NearOptimal;

  for (int c = 0; c < 3; ++c) {
    wit.p[c] = hermitian_value(sol.x[pb[c]]);
    wit.q[c] = hermitian_value(sol.x[qb[c]]);
  }
  wit.w = wit.p[0] + pt(wit.q[0], 0);
  wit.w = 0.5 * (wit.w + wit.w.adjoint()).eval();
  out.optimum = (wit.w * rho).trace().real();
  return out;
}

}  // namespace cvgme
