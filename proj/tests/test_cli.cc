// Apache License, Version 2.0, refer to LICENSE.txt

#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nggp/cli.hh"

using namespace nggp;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("nggp_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("CSV parsing") {
  SUBCASE("header and two columns") {
    std::istringstream in("x,y\n1,2\n3.5,-4e1\n");
    Dataset d = parse_csv(in);
    CHECK(d.size() == 2);
    CHECK(d.dim() == 2);
    CHECK(d(1, 1) == -40.0);
  }
  SUBCASE("no header, CRLF and blank trailing lines") {
    std::istringstream in("1.5\r\n2.5\r\n\r\n");
    Dataset d = parse_csv(in);
    CHECK(d.size() == 2);
    CHECK(d(0, 0) == 1.5);
  }
  SUBCASE("ragged rows name the line") {
    std::istringstream in("a,b\n1,2\n3\n");
    try {
      parse_csv(in);
      FAIL("expected an error");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }
  SUBCASE("bad number") {
    std::istringstream in("1\n2\nabc\n");
    CHECK_THROWS_AS(parse_csv(in), std::runtime_error);
  }
  SUBCASE("empty") {
    std::istringstream in("");
    CHECK_THROWS_AS(parse_csv(in), std::runtime_error);
  }
  CHECK_THROWS_AS(load_csv("/nonexistent/file.csv"), std::runtime_error);
}

TEST_CASE("format_double round trips") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17}) {
    CHECK(std::stod(format_double(x)) == x);
  }
}

TEST_CASE("run configuration validation") {
  RunConfig c;
  c.data_path = "x.csv";
  c.sampler = SamplerKind::kNeal8;
  c.C = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.C = 2;
  CHECK_NOTHROW(c.validate());
  c.sampler = SamplerKind::kMarginalConjugate;
  c.model = ModelKind::kNonconjugate;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.model = ModelKind::kConjugate1d;
  CHECK_NOTHROW(c.validate());
  c.thin = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK(parse_model("nonconjugate-2d") == ModelKind::kNonconjugate);
  CHECK_THROWS_AS(parse_model("poisson"), std::invalid_argument);
}

TEST_CASE("run: outputs exist and a fixed seed reproduces them") {
  const std::string data = std::string(NGGP_TEST_DATA_DIR) + "/galaxy.csv";
  RunConfig c;
  c.data_path = data;
  c.sampler = SamplerKind::kReuse;
  c.C = 2;
  c.iters = 200;
  c.burnin = 50;
  c.thin = 5;
  c.seed = 17;
  c.grid_points = 50;
  c.out_dir = scratch("run_a").string();
  REQUIRE(run_command(c) == 0);
  RunConfig c2 = c;
  c2.out_dir = scratch("run_b").string();
  REQUIRE(run_command(c2) == 0);
  for (const char* f : {"samples.csv", "labels.csv", "coclust.csv", "density_grid.csv", "summary.json"}) {
    CHECK(fs::exists(fs::path(c.out_dir) / f));
  }
  for (const char* f : {"samples.csv", "labels.csv", "coclust.csv", "density_grid.csv"}) {
    CHECK(slurp(fs::path(c.out_dir) / f) == slurp(fs::path(c2.out_dir) / f));
  }
  auto j = nlohmann::json::parse(slurp(fs::path(c.out_dir) / "summary.json"));
  CHECK(j.contains("runtime_seconds"));
  CHECK(j.contains("ess_num_clusters"));
  std::istringstream samples(slurp(fs::path(c.out_dir) / "samples.csv"));
  std::string line;
  std::size_t rows = 0;
  while (std::getline(samples, line)) ++rows;
  CHECK(rows == 1 + 200 / 5);
}

TEST_CASE("run: missing data file fails with a nonzero status") {
  RunConfig c;
  c.data_path = "/nonexistent/data.csv";
  c.out_dir = scratch("missing").string();
  c.iters = 10;
  c.burnin = 0;
  c.thin = 1;
  CHECK(run_command(c) != 0);
}

TEST_CASE("prior-sim summary") {
  PriorSimConfig c;
  c.params = NggpParams(1.0, 0.5, 1.0);
  c.ns = {10, 100};
  c.replicates = 20;
  auto s = prior_sim(c);
  REQUIRE(s.counts.size() == 2);
  REQUIRE(s.counts[0].size() == 20);
  auto m = s.means();
  CHECK(m[0] <= m[1]);
  CHECK(std::isfinite(s.power_law_slope()));
}
