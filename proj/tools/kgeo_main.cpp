// Command-line front end; all work happens behind the shared-library C API.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "kgeo.h"

namespace {

int run_problem(const std::string& problem, const std::string& config_path,
                const std::string& out_dir, std::uint64_t seed, double tolerance_scale) {
  std::string config_text = "{}";
  if (!config_path.empty()) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
      std::fprintf(stderr, "config error: cannot read '%s'\n", config_path.c_str());
      return 3;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    config_text = ss.str();
  }

  int exit_code = 0;
  char* report = nullptr;
  const kgeo_status st = kgeo_run_scenario(config_text.c_str(), problem.c_str(), out_dir.c_str(),
                                           seed, tolerance_scale, &exit_code, &report);
  if (st != KGEO_OK) {
    std::fprintf(stderr, "error: %s\n", kgeo_last_error());
    return 3;
  }
  if (report != nullptr) {
    std::fputs(report, stdout);
    kgeo_string_free(report);
  }
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kgeo — geodesic and geodesic-ray construction in the space of Kahler "
               "potentials, with residual diagnostics"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 12345;
  double tolerance_scale = 1.0;

  const auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", config_path, "scenario config (JSON)");
    if (config_required) opt->required();
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--seed", seed, "seed for randomized property checks");
    sub->add_option("--tolerance-scale", tolerance_scale, "multiplier applied to tolerances");
  };

  add_common(app.add_subcommand("ivp", "solve the initial-value series and report residuals"),
             true);
  add_common(app.add_subcommand("divisor", "solve the bidegree series near the central fibre"),
             true);
  add_common(app.add_subcommand("ray", "extract a geodesic ray and its diagnostics"), true);
  add_common(app.add_subcommand("validate", "run the full invariant battery"), false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 3;  // usage errors are config errors
  }

  const std::string problem = app.get_subcommands().front()->get_name();
  return run_problem(problem, config_path, out_dir, seed, tolerance_scale);
}
