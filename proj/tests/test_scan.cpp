#include "cvgme/errors.hpp"
#include "cvgme/scan.hpp"
#include "cvgme/sdp.hpp"

#include "doctest.h"
#include "json.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace cvgme;

TEST_CASE("bisection finds a root") {
  const auto t = find_threshold("sqrt2", [](double x) { return x * x - 2; }, 0.0, 2.0, 1e-10);
  CHECK(t.root == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
  CHECK(t.hi - t.lo < 1e-10);
  CHECK(t.lo <= t.root);
  CHECK(t.root <= t.hi);
  CHECK(t.iterations <= 60);
}

TEST_CASE("bisection caps its iterations") {
  const auto t = find_threshold("x", [](double x) { return x < 0.3 ? -1.0 : 1.0; }, 0.0, 1.0, 1e-300);
  CHECK(t.iterations == 60);
}

TEST_CASE("bisection needs a sign change") {
  CHECK_THROWS_AS(find_threshold("x", [](double x) { return x * x + 1; }, -1.0, 1.0, 1e-6), BracketError);
  CHECK_THROWS_AS(find_threshold("x", [](double x) { return x; }, 1.0, -1.0, 1e-6), UsageError);
}

TEST_CASE("known thresholds") {
  CHECK(threshold_r1(1e-9).root == doctest::Approx(1.2427477467890362).epsilon(1e-8));
  CHECK(threshold_r0_prime(1e-9).root == doctest::Approx(0.2848385541514722).epsilon(1e-8));
}

TEST_CASE("record fields") {
  ScanRecord r;
  r.parameter("r", 0.5).value("v", 1.25).flag("ok", true);
  CHECK(r.get("r") == 0.5);
  CHECK(r.get("v") == 1.25);
  CHECK(r.get_flag("ok"));
  CHECK_THROWS_AS(r.parameter("r", 1.0), UsageError);
  CHECK_THROWS_AS(r.get("missing"), UsageError);
}

TEST_CASE("csv output") {
  std::vector<ScanRecord> rows(2);
  rows[0].parameter("r", 0.1).value("v", 1.0 / 3).flag("f", false);
  rows[1].parameter("r", 0.2).value("v", NAN).flag("f", true);
  rows[1].status = "solver_failure";
  std::ostringstream os;
  write_csv(os, rows);
  CHECK(os.str() == "r,v,f,status\n0.1,0.333333333333,false,ok\n0.2,nan,true,solver_failure\n");

  rows[1].value("extra", 1.0);
  std::ostringstream bad;
  CHECK_THROWS_AS(write_csv(bad, rows), UsageError);
}

TEST_CASE("json output") {
  ScanRecord r;
  r.parameter("r", 0.5).value("v", -1.5).flag("f", true);
  const auto j = nlohmann::json::parse(to_json(r));
  CHECK(j["r"] == 0.5);
  CHECK(j["v"] == -1.5);
  CHECK(j["f"] == true);
  CHECK(j["status"] == "ok");

  const std::vector<ThresholdResult> t{{"r1", 1.0, 1.5, 1.25, 1e-3, 9}};
  const auto k = nlohmann::json::parse(to_json(t));
  CHECK(k["r1"] == 1.25);
  CHECK(k["r1_iterations"] == 9);
}

TEST_CASE("config parsing") {
  std::istringstream in("# comment\nfock_cutoff = 12\n\nsdp_gap_tol=1e-6  # trailing\nquadrature_cross_check = true\n");
  const auto c = parse_config(in);
  CHECK(c.fock_cutoff == 12);
  CHECK(c.sdp_gap_tol == 1e-6);
  CHECK(c.quadrature_cross_check);
  CHECK(c.jobs == 1);

  std::istringstream unknown("nope = 1\n");
  CHECK_THROWS_AS(parse_config(unknown), UsageError);
  std::istringstream badnum("jobs = many\n");
  CHECK_THROWS_AS(parse_config(badnum), UsageError);
  std::istringstream noeq("jobs 2\n");
  CHECK_THROWS_AS(parse_config(noeq), UsageError);
}

TEST_CASE("config from the environment") {
  const std::string path = "test_scan_config.txt";
  std::ofstream(path) << "jobs = 3\n";
  setenv("GME_ACTIVATE_CONFIG", path.c_str(), 1);
  CHECK(config_from_environment().jobs == 3);
  unsetenv("GME_ACTIVATE_CONFIG");
  CHECK(config_from_environment().jobs == 1);
  std::remove(path.c_str());
}

TEST_CASE("parallel map keeps order") {
  const auto a = parallel_map(50, 4, [](std::size_t i) { return static_cast<int>(i * i); });
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == static_cast<int>(i * i));
  CHECK_THROWS_AS(parallel_map(10, 3,
                               [](std::size_t i) {
                                 if (i == 7) throw NumericError("boom");
                                 return 0;
                               }),
                  NumericError);
}

TEST_CASE("linspace") {
  const auto g = linspace(0.0, 1.0, 5);
  REQUIRE(g.size() == 5);
  CHECK(g[4] == 1.0);
  CHECK(linspace(0.3, 0.3, 1) == std::vector<double>{0.3});
  CHECK_THROWS_AS(linspace(1.0, 0.0, 3), UsageError);
}

TEST_CASE("witness record at the vacuum") {
  const auto r = witness_record(0.0);
  CHECK_FALSE(r.get_flag("witness_violated"));
  CHECK_FALSE(r.get_flag("ppt_entangled"));
  CHECK(witness_record(0.2).get_flag("witness_violated"));
}

TEST_CASE("element records") {
  const auto rows = element_records(0.3, true);
  REQUIRE(rows.size() == 64);
  for (const auto& row : rows) {
    CHECK(row.get("deviation") < 1e-12);
    CHECK(std::abs(row.get("quadrature") - row.get("oracle")) < 1e-8);
  }
}

TEST_CASE("qubit gme and multicopy records") {
  const auto q = qubit_gme_record(0.4, SdpOptions{});
  CHECK(q.get_flag("gme_detected"));
  CHECK(q.get("ppt_min_eig_A") < 0.0);
  const auto m = multicopy_record(0.5, 2, SdpOptions{});
  CHECK(m.get_flag("biseparable"));
  CHECK(m.get_flag("gap_invariant"));
}
