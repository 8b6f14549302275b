#pragma once

// Parameter sweeps, bisection and CSV/JSON emission.

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace cvgme {

struct ScanRecord {
  std::vector<std::pair<std::string, double>> parameters;
  std::vector<std::pair<std::string, double>> values;  // NaN marks a failed value
  std::vector<std::pair<std::string, bool>> flags;
  std::string status = "ok";

  // Each throws UsageError on a duplicate name within its group.
  ScanRecord& parameter(const std::string& name, double v);
  ScanRecord& value(const std::string& name, double v);
  ScanRecord& flag(const std::string& name, bool v);

  double get(const std::string& name) const;  // parameter or value
  bool get_flag(const std::string& name) const;
};

struct ThresholdResult {
  std::string name;
  double lo = 0.0;  // final bracket
  double hi = 0.0;
  double root = 0.0;
  double tolerance = 0.0;
  int iterations = 0;
};

// Bisection on a sign change until hi - lo < tol, at most max_iterations halvings.
ThresholdResult find_threshold(const std::string& name, const std::function<double(double)>& criterion,
                               double lo, double hi, double tol, int max_iterations = 60);

// %.12g, with "nan"/"inf" spelled out.
std::string format_number(double v);

// Header from the first record; all records must share its columns.
void write_csv(std::ostream& out, std::span<const ScanRecord> rows);
std::string to_json(const ScanRecord& row);
std::string to_json(std::span<const ThresholdResult> thresholds);

// key = value lines; '#' starts a comment.
struct Config {
  int fock_cutoff = 10;
  int gabriel_cutoff = 8;
  double sdp_feasibility_tol = 1e-8;
  double sdp_gap_tol = 1e-7;
  int sdp_max_iterations = 200;
  double bisection_tol = 1e-6;
  bool quadrature_cross_check = false;
  int jobs = 1;
};

Config parse_config(std::istream& in);
Config load_config(const std::string& path);
// Reads GME_ACTIVATE_CONFIG when set, else defaults.
Config config_from_environment();

// Evaluates fn(0..n-1) on `jobs` threads; results keep index order.
template <class Fn>
auto parallel_map(std::size_t n, int jobs, Fn fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using R = decltype(fn(std::size_t{}));
  std::vector<R> out(n);
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, jobs > 0 ? jobs : 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < n; i = next++) out[i] = fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
        next = n;
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

// ---- named quantities as records

struct SdpOptions;

ThresholdResult threshold_r1(double tol);
ThresholdResult threshold_r0_prime(double tol);
ThresholdResult threshold_r0(double tol, const SdpOptions& options);

ScanRecord witness_record(double r);
ScanRecord gabriel_record(double lambda, int cutoff);
std::vector<ScanRecord> element_records(double r, bool quadrature_cross_check);
ScanRecord qubit_gme_record(double r, const SdpOptions& options);
ScanRecord multicopy_record(double r, int copies, const SdpOptions& options);

std::vector<double> linspace(double lo, double hi, int steps);

}  // namespace cvgme
