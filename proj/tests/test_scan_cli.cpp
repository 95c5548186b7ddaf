#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "wzm/scan.hpp"

using namespace wzm;
using Catch::Approx;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("wzm_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("scan produces the documented CSV") {
  TempDir dir;
  ScanConfig cfg;
  cfg.out_csv = dir.file("scan.csv");
  cfg.t_grid.count = 21;

  const ScanSummary summary = run_scan(cfg);
  REQUIRE(summary.rows.size() == 5 * 21);
  CHECK(summary.flagged == 0);
  CHECK(summary.max_delta < 1e-12);

  const auto lines = lines_of(slurp(cfg.out_csv));
  REQUIRE(lines.size() == 1 + 5 * 21);
  CHECK(lines[0] == "nbar1,t,g1,g1_route_moments,g1_route_closed,delta");

  for (const ScanRow& row : summary.rows) {
    CHECK(row.g1 >= 0.0);
    CHECK(row.g1 <= 1.0 + 1e-15);
    CHECK(row.delta < 1e-12);
  }

  SECTION("endpoint identities") {
    for (const ScanRow& row : summary.rows) {
      if (row.t == 0.0) CHECK(row.g1 == 0.0);
      if (row.t == 1.0) CHECK(row.g1 == 1.0);
    }
  }

  SECTION("low-photon curve hugs the diagonal") {
    for (const ScanRow& row : summary.rows)
      if (row.nbar1 == 1e-2) CHECK(std::abs(row.g1 - row.t) < 1e-2);
  }
}

TEST_CASE("scan output is deterministic") {
  TempDir dir;
  ScanConfig cfg;
  cfg.t_grid.count = 11;
  cfg.nbar1 = {0.5, 2.0};

  cfg.out_csv = dir.file("a.csv");
  run_scan(cfg);
  cfg.out_csv = dir.file("b.csv");
  run_scan(cfg);
  CHECK(slurp(dir.file("a.csv")) == slurp(dir.file("b.csv")));
}

TEST_CASE("scan reference row") {
  TempDir dir;
  ScanConfig cfg;
  cfg.out_csv = dir.file("scan.csv");
  cfg.t_grid = {0.0, 1.0, 3};  // contains t = 0.5
  cfg.nbar1 = {1.0};

  const ScanSummary summary = run_scan(cfg);
  REQUIRE(summary.rows.size() == 3);
  const ScanRow& mid = summary.rows[1];
  CHECK(mid.t == 0.5);
  CHECK(mid.g1 == Approx(0.6324555320336759).margin(1e-13));
  CHECK(mid.g1_route_moments == Approx(mid.g1).margin(1e-12));
  CHECK(mid.g1_route_closed == Approx(mid.g1).margin(1e-12));
}

TEST_CASE("scan handles the two-point endpoint grid") {
  TempDir dir;
  ScanConfig cfg;
  cfg.out_csv = dir.file("scan.csv");
  cfg.t_grid = {0.0, 1.0, 2};

  const ScanSummary summary = run_scan(cfg);
  for (const ScanRow& row : summary.rows) {
    if (row.t == 0.0) CHECK(row.g1 == 0.0);
    if (row.t == 1.0) CHECK(row.g1 == 1.0);
  }
}

TEST_CASE("scan reports the undefined moment route at nbar1 = 0") {
  TempDir dir;
  ScanConfig cfg;
  cfg.out_csv = dir.file("scan.csv");
  cfg.t_grid = {0.0, 1.0, 5};
  cfg.nbar1 = {0.0};

  const ScanSummary summary = run_scan(cfg);
  CHECK(summary.undefined_moment_rows == 5);
  CHECK(summary.flagged == 0);  // closed forms still agree
  for (const ScanRow& row : summary.rows) {
    CHECK_FALSE(row.moments_defined);
    CHECK(row.g1 == Approx(row.t).margin(1e-15));  // analytic continuation
  }
  const auto lines = lines_of(slurp(cfg.out_csv));
  CHECK(lines[1].find("nan") != std::string::npos);
}

TEST_CASE("svg chart emission") {
  TempDir dir;
  ScanConfig cfg;
  cfg.out_csv = dir.file("scan.csv");
  cfg.out_svg = dir.file("scan.svg");
  cfg.t_grid.count = 11;

  run_scan(cfg);
  const std::string svg = slurp(cfg.out_svg);
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("version=\"1.1\"") != std::string::npos);
  CHECK(svg.find("<script") == std::string::npos);

  std::size_t polylines = 0;
  for (std::size_t pos = 0; (pos = svg.find("<polyline", pos)) != std::string::npos;
       ++pos)
    ++polylines;
  CHECK(polylines == 5);

  for (double nbar : {1e-2, 1.0, 10.0, 100.0, 1e4}) {
    char label[48];
    std::snprintf(label, sizeof(label), "nbar1 = %g", nbar);
    CHECK(svg.find(label) != std::string::npos);
  }
}

TEST_CASE("config validation names the offending field") {
  TempDir dir;
  ScanConfig cfg;
  cfg.out_csv = dir.file("scan.csv");

  SECTION("grid count") {
    cfg.t_grid.count = 1;
    REQUIRE_THROWS_WITH(run_scan(cfg), Catch::Matchers::ContainsSubstring("t.count"));
  }
  SECTION("grid range") {
    cfg.t_grid.stop = 1.5;
    REQUIRE_THROWS_WITH(run_scan(cfg), Catch::Matchers::ContainsSubstring("t.stop"));
  }
  SECTION("negative nbar1") {
    cfg.nbar1 = {-1.0};
    REQUIRE_THROWS_WITH(run_scan(cfg), Catch::Matchers::ContainsSubstring("nbar1"));
  }
  SECTION("unwritable output path") {
    cfg.out_csv = "/nonexistent-dir/scan.csv";
    try {
      run_scan(cfg);
      FAIL("expected io_error");
    } catch (const io_error& e) {
      CHECK(std::string(e.what()).find("/nonexistent-dir/scan.csv") !=
            std::string::npos);
    }
  }
}

TEST_CASE("json config round trip with unknown-key rejection") {
  TempDir dir;
  const std::string path = dir.file("cfg.json");
  {
    std::ofstream out(path);
    out << R"({"t": {"start": 0.0, "stop": 1.0, "count": 7},
               "nbar1": [0.5, 5.0],
               "out": "from_json.csv",
               "tol": 1e-10,
               "fringe_params": {"nbar1": 2.0, "t": 0.25, "phi_count": 64, "balance": false}})";
  }
  const ScanConfig cfg = load_scan_config(path);
  CHECK(cfg.t_grid.count == 7);
  CHECK(cfg.nbar1 == std::vector<double>{0.5, 5.0});
  CHECK(cfg.out_csv == "from_json.csv");
  CHECK(cfg.route_tol == 1e-10);
  CHECK(cfg.fringe_params.nbar1 == 2.0);
  CHECK(cfg.fringe_params.phi_count == 64);
  CHECK_FALSE(cfg.fringe_params.balance);

  {
    std::ofstream out(path);
    out << R"({"tgrid": 3})";
  }
  REQUIRE_THROWS_WITH(load_scan_config(path),
                      Catch::Matchers::ContainsSubstring("unknown config key: tgrid"));

  REQUIRE_THROWS_AS(load_scan_config(dir.file("missing.json")), io_error);

  {
    std::ofstream out(path);
    out << "{not json";
  }
  REQUIRE_THROWS_AS(load_scan_config(path), config_error);
}

TEST_CASE("fringe scan CSV") {
  TempDir dir;
  ScanConfig cfg;
  cfg.fringe_out = dir.file("fringe.csv");

  SECTION("reference point") {
    const FringeSummary summary = run_fringe(cfg);
    CHECK(summary.v_raw == Approx(0.6285393610547089).margin(1e-12));
    CHECK(summary.v_balanced == Approx(0.6324555320336759).margin(1e-9));
    CHECK(summary.g1 == Approx(0.6324555320336759).margin(1e-12));
    CHECK(std::abs(summary.v_balanced - summary.g1) < 1e-9);

    const auto lines = lines_of(slurp(cfg.fringe_out));
    REQUIRE(lines.size() == 1 + 256 + 1);
    CHECK(lines[0] == "phi,I_plus,I_minus");

    double v_raw = 0.0, v_bal = 0.0, g1 = 0.0;
    REQUIRE(std::sscanf(lines.back().c_str(), "# V_raw=%lf V_balanced=%lf g1=%lf",
                        &v_raw, &v_bal, &g1) == 3);
    CHECK(v_raw == Approx(summary.v_raw).margin(1e-15));
    CHECK(v_bal == Approx(summary.v_balanced).margin(1e-15));
    CHECK(g1 == Approx(summary.g1).margin(1e-15));
  }

  SECTION("t = 0 gives constant columns") {
    cfg.fringe_params.t = 0.0;
    const FringeSummary summary = run_fringe(cfg);
    CHECK(summary.v_raw == 0.0);
    CHECK(summary.v_balanced == 0.0);
    for (std::size_t i = 0; i < summary.scan.phi.size(); ++i)
      CHECK(summary.scan.intensity_plus[i] ==
            Approx(summary.scan.intensity_plus[0]).margin(1e-14));
  }

  SECTION("t = 1 reaches unit balanced visibility") {
    cfg.fringe_params.t = 1.0;
    const FringeSummary summary = run_fringe(cfg);
    CHECK(summary.v_balanced == Approx(1.0).margin(1e-12));
  }

  SECTION("nbar1 = 0 is a config error citing the undefined coherence") {
    cfg.fringe_params.nbar1 = 0.0;
    REQUIRE_THROWS_WITH(run_fringe(cfg),
                        Catch::Matchers::ContainsSubstring("undefined"));
  }
}

TEST_CASE("verify cross-checks the oracle where feasible") {
  ScanConfig cfg;
  cfg.t_grid = {0.0, 1.0, 3};
  cfg.nbar1 = {0.01, 1e4};

  const VerifySummary summary = run_verify(cfg);
  REQUIRE(summary.points.size() == 3);  // only nbar1 = 0.01 is feasible
  REQUIRE(summary.skipped.size() == 1);
  CHECK(summary.skipped[0].find("out of range") != std::string::npos);
  CHECK(summary.failures == 0);
  CHECK(summary.all_passed);
  for (const VerifyPoint& p : summary.points) {
    CHECK(p.converged);
    CHECK(p.pass);
    CHECK(p.deviation < 1e-8);
    CHECK(p.cutoff < kDefaultCutoffCap);
  }

  std::ostringstream report;
  write_verify_report(summary, report);
  CHECK(report.str().find("PASS nbar1=0.01") != std::string::npos);
  CHECK(report.str().find("SKIP nbar1=10000") != std::string::npos);
  CHECK(report.str().find("all points passed") != std::string::npos);
}

TEST_CASE("verify with an empty feasible set warns and passes") {
  ScanConfig cfg;
  cfg.t_grid = {0.0, 1.0, 3};
  cfg.nbar1 = {100.0, 1e4};

  const VerifySummary summary = run_verify(cfg);
  CHECK(summary.points.empty());
  CHECK(summary.skipped.size() == 2);
  CHECK(summary.all_passed);

  std::ostringstream report;
  write_verify_report(summary, report);
  CHECK(report.str().find("no verifiable points") != std::string::npos);
}
