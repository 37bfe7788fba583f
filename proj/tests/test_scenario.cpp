#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "kgeo/scenario.hpp"

using namespace kgeo;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("kgeo_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("config: unknown keys are rejected by name with exit 3") {
  const auto r = run_scenario(R"({"problem":"ivp","surface":{"resolutionn":64}})", "",
                              fresh_dir("badkey").string(), 1, 1.0);
  CHECK(r.exit_code == 3);
  CHECK(r.report_text.find("surface.resolutionn") != std::string::npos);
}

TEST_CASE("config: malformed JSON and type errors give exit 3") {
  CHECK(run_scenario("{not json", "", fresh_dir("badjson").string(), 1, 1.0).exit_code == 3);
  CHECK(run_scenario(R"({"problem":"ivp","surface":{"resolution":"many"}})", "",
                     fresh_dir("badtype").string(), 1, 1.0)
            .exit_code == 3);
  CHECK(run_scenario(R"({"problem":"frobnicate"})", "", fresh_dir("badprob").string(), 1, 1.0)
            .exit_code == 3);
}

TEST_CASE("config: problem override must agree with the config") {
  const auto r =
      run_scenario(R"({"problem":"ivp"})", "divisor", fresh_dir("mismatch").string(), 1, 1.0);
  CHECK(r.exit_code == 3);
  CHECK(r.report_text.find("does not match") != std::string::npos);
}

TEST_CASE("ivp scenario: outputs, fitted slope, determinism of reruns") {
  const fs::path dir_a = fresh_dir("ivp_a");
  const fs::path dir_b = fresh_dir("ivp_b");
  const std::string cfg = R"({
    "problem": "ivp",
    "surface": {"kind": "torus", "resolution": 64},
    "ivp": {"psi0": {"preset": "cosine", "amplitude": 0.1, "mode": 1}, "order": 6}
  })";
  const auto ra = run_scenario(cfg, "", dir_a.string(), 1, 1.0);
  REQUIRE(ra.exit_code == 0);
  CHECK(fs::exists(dir_a / "series.csv"));
  CHECK(fs::exists(dir_a / "residuals.csv"));
  CHECK(fs::exists(dir_a / "summary.json"));

  // Spec'd headline number: fitted slope >= 4.8 for K = 6.
  const std::string summary = slurp(dir_a / "summary.json");
  const auto pos = summary.find("\"residual_order_fit\": ");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(summary.substr(pos + 22)) >= 4.8);

  const std::string series = slurp(dir_a / "series.csv");
  CHECK(series.rfind("k,sup_norm,mean\n", 0) == 0);
  CHECK(slurp(dir_a / "residuals.csv").rfind("t,hcma,geodesic,wzw\n", 0) == 0);

  const auto rb = run_scenario(cfg, "ivp", dir_b.string(), 1, 1.0);
  REQUIRE(rb.exit_code == 0);
  CHECK(slurp(dir_a / "series.csv") == slurp(dir_b / "series.csv"));
  CHECK(slurp(dir_a / "residuals.csv") == slurp(dir_b / "residuals.csv"));
  CHECK(slurp(dir_a / "summary.json") == slurp(dir_b / "summary.json"));
  CHECK(ra.report_text == rb.report_text);
}

TEST_CASE("divisor scenario: headline numbers in the report table") {
  const fs::path dir = fresh_dir("divisor");
  const auto r = run_scenario(R"({
    "problem": "divisor",
    "surface": {"kind": "torus", "resolution": 64},
    "divisor": {"h": {"preset": "cosine", "amplitude": 0.3, "mode": 1}, "order": 4}
  })",
                              "", dir.string(), 1, 1.0);
  REQUIRE(r.exit_code == 0);
  CHECK(r.report_text.find("max residual mod S^k") != std::string::npos);
  CHECK(r.report_text.find("equivariance defect") != std::string::npos);
  CHECK(fs::exists(dir / "series.csv"));
}

TEST_CASE("ray scenario: zero divisor data gives the zero-length table") {
  const fs::path dir = fresh_dir("ray_zero");
  const auto r = run_scenario(R"({
    "problem": "ray",
    "surface": {"kind": "torus", "resolution": 64},
    "ray": {"source": "divisor", "h": {"preset": "constant", "amplitude": 0.0},
            "order": 4, "x0": 1.0, "x1": 5.0, "samples": 9}
  })",
                              "", dir.string(), 1, 1.0);
  REQUIRE(r.exit_code == 0);
  CHECK(r.report_text.find("length") != std::string::npos);
  const std::string ray_csv = slurp(dir / "ray.csv");
  CHECK(ray_csv.rfind("x,energy,c0,cumulative_length\n", 0) == 0);
  // every row ends with zero cumulative length
  std::istringstream lines(ray_csv);
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line)) {
    CHECK(line.substr(line.rfind(',') + 1) == "0");
  }
}

TEST_CASE("rotation ray scenario reports tiny speed drift") {
  const fs::path dir = fresh_dir("ray_rot");
  const auto r = run_scenario(R"({
    "problem": "ray",
    "surface": {"kind": "cp1", "resolution": 256, "radial_cutoff": 50.0},
    "ray": {"source": "rotation", "x0": 0.0, "x1": 1.0, "samples": 9}
  })",
                              "", dir.string(), 1, 1.0);
  REQUIRE(r.exit_code == 0);
  const std::string summary = slurp(dir / "summary.json");
  const auto pos = summary.find("\"speed_drift\": ");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(summary.substr(pos + 15)) < 1e-6);
}
