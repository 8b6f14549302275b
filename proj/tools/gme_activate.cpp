// gme_activate: thresholds, sweeps and checks for GME activation of CV states.
//
// Exit status: 0 success, 2 usage error, 3 numerical failure.

#include "cvgme/entanglement_sdp.hpp"
#include "cvgme/errors.hpp"
#include "cvgme/scan.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>

using namespace cvgme;

namespace {

struct Output {
  std::unique_ptr<std::ofstream> file;
  std::ostream& stream() { return file ? *file : std::cout; }
};

Output open_output(const std::string& path) {
  Output out;
  if (!path.empty()) {
    out.file = std::make_unique<std::ofstream>(path);
    if (!*out.file) throw UsageError("cannot write " + path);
  }
  return out;
}

SdpOptions sdp_options(const Config& c) {
  SdpOptions o;
  o.feasibility_tol = c.sdp_feasibility_tol;
  o.gap_tol = c.sdp_gap_tol;
  o.max_iterations = c.sdp_max_iterations;
  return o;
}

void require(bool ok, const char* what) {
  if (!ok) throw UsageError(what);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GME activation toolkit for continuous-variable states"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_path, config_path;
  int jobs = 0;
  app.add_option("--out", out_path, "write output here instead of stdout");
  app.add_option("--jobs", jobs, "worker threads for grid scans")->check(CLI::PositiveNumber);
  app.add_option("--config", config_path, "key = value config file (default: $GME_ACTIVATE_CONFIG)");

  double tol = 0.0;
  auto* thresholds = app.add_subcommand("thresholds", "r0', r0 and r1 by bisection, as JSON");
  thresholds->add_option("--tol", tol, "bisection tolerance (default from config)");

  double r_min = 0.0, r_max = 1.5;
  int steps = 31;
  auto* scan = app.add_subcommand("scan", "one-parameter sweeps");
  scan->require_subcommand(1);
  scan->fallthrough();
  auto* scan_witness = scan->add_subcommand("witness", "symmetric witness and PPT per r, as CSV");
  scan_witness->add_option("--r-min", r_min);
  scan_witness->add_option("--r-max", r_max);
  scan_witness->add_option("--steps", steps);

  int lambda_grid = 99;
  std::vector<double> lambdas;
  int cutoff = 0;
  auto* gabriel = app.add_subcommand("gabriel", "two-copy Gabriel criterion on the FS state, as CSV");
  gabriel->add_option("--lambda-grid", lambda_grid, "interior points i/(n+1) of (0, 1)");
  gabriel->add_option("--lambda", lambdas, "extra lambda values appended after the grid");
  gabriel->add_option("--cutoff", cutoff, "Fock cutoff (default from config)");

  double r1_min = 0.031, r1_max = 1.209, r2_min = 0.05, r2_max = 1.95;
  int pair_steps = 20;
  auto* pair = app.add_subcommand("pair-scan", "optimal CM witness on the compound Aa|Bb|Cc state, as CSV");
  pair->add_option("--r1-min", r1_min);
  pair->add_option("--r1-max", r1_max);
  pair->add_option("--r2-min", r2_min);
  pair->add_option("--r2-max", r2_max);
  pair->add_option("--steps", pair_steps, "points per axis");

  double r = 0.3;
  bool quadrature = false;
  auto* elements = app.add_subcommand("elements", "8x8 qubit-subspace table, closed form and oracle, as CSV");
  elements->add_option("--r", r)->required();
  elements->add_flag("--quadrature", quadrature, "add the Gauss-Hermite cross-check column");

  auto* qubit = app.add_subcommand("qubit-gme", "fully decomposable witness and PPT of the qubit projection, as JSON");
  qubit->add_option("--r", r)->required();

  int copies = 2;
  auto* multicopy = app.add_subcommand("multicopy-check", "CM biseparability of identical copies, as JSON");
  multicopy->add_option("--r", r)->required();
  multicopy->add_option("--copies", copies);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    Config cfg = config_path.empty() ? config_from_environment() : load_config(config_path);
    if (jobs > 0) cfg.jobs = jobs;
    if (tol > 0.0) cfg.bisection_tol = tol;
    if (cutoff > 0) cfg.gabriel_cutoff = cutoff;
    if (quadrature) cfg.quadrature_cross_check = true;
    const SdpOptions opts = sdp_options(cfg);

    auto out = open_output(out_path);
    auto& os = out.stream();

    if (*thresholds) {
      require(!(tol < 0.0), "--tol must be positive");
      const std::vector<ThresholdResult> t{threshold_r0_prime(cfg.bisection_tol),
                                           threshold_r0(std::max(cfg.bisection_tol, 1e-5), opts),
                                           threshold_r1(cfg.bisection_tol)};
      os << to_json(t) << '\n';
    } else if (*scan_witness) {
      require(r_min >= 0.0 && r_min <= r_max, "need 0 <= --r-min <= --r-max");
      require(steps >= 1, "--steps must be >= 1");
      const auto grid = linspace(r_min, r_max, steps);
      const auto rows = parallel_map(grid.size(), cfg.jobs, [&](std::size_t i) { return witness_record(grid[i]); });
      write_csv(os, rows);
    } else if (*gabriel) {
      require(lambda_grid >= 0, "--lambda-grid must be >= 0");
      std::vector<double> grid;
      for (int i = 1; i <= lambda_grid; ++i) grid.push_back(static_cast<double>(i) / (lambda_grid + 1));
      for (double l : lambdas) {
        require(l > 0.0 && l < 1.0, "--lambda must lie in (0, 1)");
        grid.push_back(l);
      }
      require(!grid.empty(), "no lambda values requested");
      const auto rows = parallel_map(grid.size(), cfg.jobs,
                                     [&](std::size_t i) { return gabriel_record(grid[i], cfg.gabriel_cutoff); });
      write_csv(os, rows);
    } else if (*pair) {
      require(r1_min > 0.0 && r1_min <= r1_max, "need 0 < --r1-min <= --r1-max");
      require(r2_min > 0.0 && r2_min <= r2_max, "need 0 < --r2-min <= --r2-max");
      require(pair_steps >= 1, "--steps must be >= 1");
      const auto g1 = linspace(r1_min, r1_max, pair_steps);
      const auto g2 = linspace(r2_min, r2_max, pair_steps);
      write_csv(os, pair_activation_scan(g1, g2, cfg.jobs, opts));
    } else if (*elements) {
      require(r >= 0.0, "--r must be nonnegative");
      write_csv(os, element_records(r, cfg.quadrature_cross_check));
    } else if (*qubit) {
      require(r >= 0.0, "--r must be nonnegative");
      os << to_json(qubit_gme_record(r, opts)) << '\n';
    } else if (*multicopy) {
      require(r >= 0.0, "--r must be nonnegative");
      require(copies >= 1 && copies <= 4, "--copies must lie in [1, 4]");
      os << to_json(multicopy_record(r, copies, opts)) << '\n';
    }
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
}
