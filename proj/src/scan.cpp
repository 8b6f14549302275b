#include "cvgme/scan.hpp"

#include "cvgme/entanglement_sdp.hpp"
#include "cvgme/errors.hpp"
#include "cvgme/fs_analytics.hpp"
#include "cvgme/gaussian_fock.hpp"
#include "cvgme/witnesses.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace cvgme {

namespace {

template <class T>
void put_unique(std::vector<std::pair<std::string, T>>& v, const std::string& name, T x) {
  for (const auto& [k, _] : v) {
    if (k == name) throw UsageError("duplicate record field: " + name);
  }
  v.emplace_back(name, x);
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0' || !std::isfinite(x)) throw UsageError("config: bad number for " + key);
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::floor(x)) throw UsageError("config: " + key + " must be an integer");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw UsageError("config: bad boolean for " + key);
}

nlohmann::ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

}  // namespace

ScanRecord& ScanRecord::parameter(const std::string& name, double v) {
  put_unique(parameters, name, v);
  return *this;
}

ScanRecord& ScanRecord::value(const std::string& name, double v) {
  put_unique(values, name, v);
  return *this;
}

ScanRecord& ScanRecord::flag(const std::string& name, bool v) {
  put_unique(flags, name, v);
  return *this;
}

double ScanRecord::get(const std::string& name) const {
  for (const auto* group : {&parameters, &values}) {
    for (const auto& [k, v] : *group) {
      if (k == name) return v;
    }
  }
  throw UsageError("no such record field: " + name);
}

bool ScanRecord::get_flag(const std::string& name) const {
  for (const auto& [k, v] : flags) {
    if (k == name) return v;
  }
  throw UsageError("no such record flag: " + name);
}

ThresholdResult find_threshold(const std::string& name, const std::function<double(double)>& criterion, double lo,
                               double hi, double tol, int max_iterations) {
  if (!(lo < hi) || !(tol > 0.0)) throw UsageError("find_threshold: need lo < hi and tol > 0");
  double flo = criterion(lo);
  const double fhi = criterion(hi);
  if (!(flo * fhi < 0.0)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: no sign change on [%.6g, %.6g] (f = %.3g, %.3g)", name.c_str(), lo, hi, flo,
                  fhi);
    throw BracketError(buf);
  }
  ThresholdResult out{name, lo, hi, 0.0, tol, 0};
  while (out.hi - out.lo >= tol && out.iterations < max_iterations) {
    const double mid = 0.5 * (out.lo + out.hi);
    const double fm = criterion(mid);
    ++out.iterations;
    if (fm == 0.0) {
      out.lo = out.hi = mid;
      break;
    }
    if ((fm < 0.0) == (flo < 0.0)) {
      out.lo = mid;
      flo = fm;
    } else {
      out.hi = mid;
    }
  }
  out.root = 0.5 * (out.lo + out.hi);
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_csv(std::ostream& out, std::span<const ScanRecord> rows) {
  if (rows.empty()) return;
  const auto& h = rows.front();
  bool first = true;
  auto sep = [&] {
    if (!first) out << ',';
    first = false;
  };
  for (const auto& [k, _] : h.parameters) sep(), out << k;
  for (const auto& [k, _] : h.values) sep(), out << k;
  for (const auto& [k, _] : h.flags) sep(), out << k;
  sep(), out << "status\n";
  for (const auto& row : rows) {
    if (row.parameters.size() != h.parameters.size() || row.values.size() != h.values.size() ||
        row.flags.size() != h.flags.size()) {
      throw UsageError("write_csv: records do not share columns");
    }
    first = true;
    for (const auto& [_, v] : row.parameters) sep(), out << format_number(v);
    for (const auto& [_, v] : row.values) sep(), out << format_number(v);
    for (const auto& [_, v] : row.flags) sep(), out << (v ? "true" : "false");
    sep(), out << row.status << '\n';
  }
}

std::string to_json(const ScanRecord& row) {
  nlohmann::ordered_json j;
  for (const auto& [k, v] : row.parameters) j[k] = number(v);
  for (const auto& [k, v] : row.values) j[k] = number(v);
  for (const auto& [k, v] : row.flags) j[k] = v;
  j["status"] = row.status;
  return j.dump(2);
}

std::string to_json(std::span<const ThresholdResult> thresholds) {
  nlohmann::ordered_json j;
  for (const auto& t : thresholds) {
    j[t.name] = t.root;
    j[t.name + "_bracket"] = {t.lo, t.hi};
    j[t.name + "_tolerance"] = t.tolerance;
    j[t.name + "_iterations"] = t.iterations;
  }
  return j.dump(2);
}

Config parse_config(std::istream& in) {
  Config c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    if (key == "fock_cutoff") {
      c.fock_cutoff = to_int(key, v);
    } else if (key == "gabriel_cutoff") {
      c.gabriel_cutoff = to_int(key, v);
    } else if (key == "sdp_feasibility_tol") {
      c.sdp_feasibility_tol = to_double(key, v);
    } else if (key == "sdp_gap_tol") {
      c.sdp_gap_tol = to_double(key, v);
    } else if (key == "sdp_max_iterations") {
      c.sdp_max_iterations = to_int(key, v);
    } else if (key == "bisection_tol") {
      c.bisection_tol = to_double(key, v);
    } else if (key == "quadrature_cross_check") {
      c.quadrature_cross_check = to_bool(key, v);
    } else if (key == "jobs") {
      c.jobs = to_int(key, v);
    } else {
      throw UsageError("config: unknown key " + key);
    }
  }
  if (c.fock_cutoff < 2 || c.gabriel_cutoff < 2) throw UsageError("config: cutoffs must be >= 2");
  if (c.sdp_feasibility_tol <= 0 || c.sdp_gap_tol <= 0 || c.bisection_tol <= 0) {
    throw UsageError("config: tolerances must be positive");
  }
  if (c.sdp_max_iterations < 1 || c.jobs < 1) throw UsageError("config: iteration cap and jobs must be >= 1");
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  return parse_config(in);
}

Config config_from_environment() {
  const char* p = std::getenv("GME_ACTIVATE_CONFIG");
  if (p == nullptr || *p == '\0') return {};
  return load_config(p);
}

std::vector<double> linspace(double lo, double hi, int steps) {
  if (steps < 1) throw UsageError("steps must be >= 1");
  if (!(lo <= hi)) throw UsageError("range must satisfy min <= max");
  if (steps == 1) return {lo};
  std::vector<double> out(steps);
  for (int i = 0; i < steps; ++i) out[i] = lo + (hi - lo) * i / (steps - 1);
  return out;
}

// ---- thresholds -----------------------------------------------------------------

ThresholdResult threshold_r1(double tol) {
  return find_threshold("r1", [](double r) { return fs_mixture_nu_minus_closed(r) - 1.0; }, 1.0, 1.5, tol);
}

ThresholdResult threshold_r0_prime(double tol) {
  return find_threshold(
      "r0_prime",
      [](double r) {
        const auto w = symmetric_witness(r);
        return w.lhs - w.rhs;
      },
      0.05, 0.5, tol);
}

ThresholdResult threshold_r0(double tol, const SdpOptions& options) {
  return find_threshold(
      "r0", [&](double r) { return fully_decomposable_witness(qubit_projection(r), options).optimum; }, 0.3, 0.9,
      tol);
}

// ---- records --------------------------------------------------------------------

ScanRecord witness_record(double r) {
  if (!(r >= 0.0)) throw UsageError("r must be nonnegative");
  ScanRecord rec;
  rec.parameter("r", r);
  const auto w = symmetric_witness(r);
  const double closed = fs_mixture_nu_minus_closed(r);
  const double numeric = ppt_min_symplectic_eigenvalue(fs_mixture_cm(r), ModeBipartition::one_vs_rest(0, 3));
  rec.value("witness_lhs", w.lhs).value("witness_rhs", w.rhs);
  rec.value("nu_minus", numeric).value("nu_minus_closed", closed);
  rec.flag("witness_violated", w.violated).flag("ppt_entangled", numeric < 1.0 - 1e-12);
  return rec;
}

ScanRecord gabriel_record(double lambda, int cutoff) {
  ScanRecord rec;
  rec.parameter("lambda", lambda);
  const auto g = gabriel_two_copy_fs(0, lambda, cutoff);
  rec.value("lhs", g.lhs).value("rhs", g.rhs).value("generic_lhs", g.generic_lhs).value("generic_rhs", g.generic_rhs);
  rec.flag("violated", g.violated);
  return rec;
}

std::vector<ScanRecord> element_records(double r, bool quadrature_cross_check) {
  if (!(r >= 0.0)) throw UsageError("r must be nonnegative");
  const Matrix closed = closed_form_table(r);
  const GaussianFockOracle oracle(fs_mixture_cm(r), 1);
  std::vector<ScanRecord> out;
  for (int a = 0; a < 8; ++a) {
    for (int b = 0; b < 8; ++b) {
      const int bra[3] = {a >> 2 & 1, a >> 1 & 1, a & 1};
      const int ket[3] = {b >> 2 & 1, b >> 1 & 1, b & 1};
      const Complex o = oracle.element(bra, ket);
      ScanRecord rec;
      rec.parameter("r", r).parameter("row", a).parameter("col", b);
      rec.value("closed_form", closed(a, b)).value("oracle", o.real());
      rec.value("deviation", std::abs(o - closed(a, b)));
      if (quadrature_cross_check) rec.value("quadrature", oracle.element_quadrature(bra, ket).real());
      out.push_back(std::move(rec));
    }
  }
  return out;
}

ScanRecord qubit_gme_record(double r, const SdpOptions& options) {
  if (!(r >= 0.0)) throw UsageError("r must be nonnegative");
  const auto rho = qubit_projection(r);
  const auto res = fully_decomposable_witness(rho, options);
  ScanRecord rec;
  rec.parameter("r", r);
  rec.value("witness_optimum", res.optimum);
  static const char* names[3] = {"ppt_min_eig_A", "ppt_min_eig_B", "ppt_min_eig_C"};
  double worst = 0.0;
  for (int k = 0; k < 3; ++k) {
    const int m[1] = {k};
    const double e = min_eigenvalue(partial_transpose(rho, m));
    worst = std::min(worst, e);
    rec.value(names[k], e);
  }
  rec.flag("gme_detected", res.optimum < 0.0).flag("npt", worst < -1e-12);
  return rec;
}

ScanRecord multicopy_record(double r, int copies, const SdpOptions& options) {
  if (!(r >= 0.0)) throw UsageError("r must be nonnegative");
  if (copies < 1) throw UsageError("copies must be >= 1");
  const auto terms = fs_mixture_decomposition(r);
  const auto one = fs_mixture_cm(r);
  std::vector<CovarianceMatrix> stack(copies, one);
  const auto gamma = direct_sum(stack);
  const auto bips = copies_bipartitions(copies);

  ScanRecord rec;
  rec.parameter("r", r).parameter("copies", copies);
  const double g1 = multi_copy_gap(one, terms, 1);
  const double gk = multi_copy_gap(one, terms, copies);
  rec.value("gap_single", g1).value("gap_copies", gk).value("gap_difference", std::abs(gk - g1));
  const auto res = cm_bisep_feasibility(gamma, bips, options);
  if (const auto* f = std::get_if<Feasible>(&res)) {
    rec.value("total_weight", f->decomposition.total_weight).value("witness_value", 0.0);
    rec.flag("biseparable", true);
  } else {
    const auto& w = std::get<Infeasible>(res).witness;
    rec.value("total_weight", w.value + 1.0).value("witness_value", w.value);
    rec.flag("biseparable", false);
  }
  rec.flag("gap_invariant", std::abs(gk - g1) < 1e-12);
  return rec;
}

}  // namespace cvgme
