#pragma once

#include <cstdint>
#include <string>

namespace kgeo {

struct ScenarioResult {
  int exit_code = 0;  ///< 0 success, 2 validation failure, 3 config error
  std::string report_text;
  std::string summary_json;
};

/// Parse, validate and execute one scenario, writing deterministic outputs
/// (series.csv / residuals.csv / ray.csv / validate.csv / summary.json as
/// applicable) under out_dir. `problem_override` (empty = none) must agree
/// with the config's "problem" when both are given. Never throws: failures
/// are reported through exit_code and report_text.
ScenarioResult run_scenario(const std::string& config_json, const std::string& problem_override,
                            const std::string& out_dir, std::uint64_t seed,
                            double tolerance_scale);

}  // namespace kgeo
