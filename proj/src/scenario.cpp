#include "kgeo/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "kgeo/conventions.hpp"
#include "kgeo/divisor.hpp"
#include "kgeo/errors.hpp"
#include "kgeo/ivp.hpp"
#include "kgeo/numerics.hpp"
#include "kgeo/oracle.hpp"
#include "kgeo/ray.hpp"

namespace kgeo {
namespace {

using json = nlohmann::ordered_json;
constexpr double kPi = 3.141592653589793238462643383279502884;

// ---------------------------------------------------------------------------
// config schema

struct FieldSpec {
  std::string preset = "cosine";
  double amplitude = 0.1;
  int mode = 1;
};

struct ScenarioConfig {
  std::string problem;

  std::string surface_kind = "torus";
  int resolution = 64;
  double radial_cutoff = 4.0;
  bool surface_given = false;

  std::string metric_preset = "default";
  double metric_amplitude = 0.0;
  int metric_mode = 1;

  FieldSpec psi0{"cosine", 0.1, 1};
  int ivp_order = 6;
  double t_min = 1e-3;
  double t_max = 0.1;
  int t_samples = 9;

  FieldSpec h{"cosine", 0.3, 1};
  int divisor_order = 4;
  int phases = 8;

  std::string ray_source = "rotation";
  double x0 = 0.25;
  double x1 = 4.0;
  int ray_samples = 32;
  bool ray_range_given = false;

  double tol_oracle = 1e-8;
  double tol_residual = 1e-10;
  double tol_equivariance = 1e-10;
  double tol_ray = 1e-8;

  std::string out_dir_from_config;
};

void check_keys(const json& node, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!node.is_object()) throw ConfigError("'" + where + "' must be an object");
  for (const auto& [key, value] : node.items()) {
    (void)value;
    bool ok = false;
    for (const char* a : allowed) {
      if (key == a) ok = true;
    }
    if (!ok) {
      throw ConfigError("unknown key '" + (where.empty() ? key : where + "." + key) + "'");
    }
  }
}

double get_number(const json& node, const std::string& where) {
  if (!node.is_number()) throw ConfigError("'" + where + "' must be a number");
  return node.get<double>();
}

int get_int(const json& node, const std::string& where) {
  if (!node.is_number_integer()) throw ConfigError("'" + where + "' must be an integer");
  return node.get<int>();
}

std::string get_string(const json& node, const std::string& where) {
  if (!node.is_string()) throw ConfigError("'" + where + "' must be a string");
  return node.get<std::string>();
}

FieldSpec parse_field_spec(const json& node, const std::string& where, FieldSpec defaults) {
  check_keys(node, where, {"preset", "amplitude", "mode"});
  FieldSpec out = defaults;
  if (node.contains("preset")) out.preset = get_string(node["preset"], where + ".preset");
  if (node.contains("amplitude")) out.amplitude = get_number(node["amplitude"], where + ".amplitude");
  if (node.contains("mode")) out.mode = get_int(node["mode"], where + ".mode");
  return out;
}

ScenarioConfig parse_config(const std::string& text, const std::string& problem_override) {
  json root;
  try {
    root = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(root, "", {"problem", "surface", "metric", "ivp", "divisor", "ray", "tolerances",
                        "output"});
  ScenarioConfig cfg;

  if (root.contains("problem")) cfg.problem = get_string(root["problem"], "problem");
  if (!problem_override.empty()) {
    if (!cfg.problem.empty() && cfg.problem != problem_override) {
      throw ConfigError("config problem '" + cfg.problem + "' does not match subcommand '" +
                        problem_override + "'");
    }
    cfg.problem = problem_override;
  }
  if (cfg.problem.empty()) throw ConfigError("missing 'problem' (ivp|divisor|ray|validate)");
  if (cfg.problem != "ivp" && cfg.problem != "divisor" && cfg.problem != "ray" &&
      cfg.problem != "validate") {
    throw ConfigError("unknown problem '" + cfg.problem + "'");
  }

  // Problem-dependent surface defaults; the ray proxy wants the large radial
  // grid.
  if (cfg.problem == "ray") {
    // Rotation potentials develop an e^{-2x}-wide layer near the origin, so
    // the proxy defaults to the finer radial grid.
    cfg.surface_kind = "cp1";
    cfg.resolution = 512;
    cfg.radial_cutoff = 50.0;
  }

  if (root.contains("surface")) {
    cfg.surface_given = true;
    const json& s = root["surface"];
    check_keys(s, "surface", {"kind", "resolution", "radial_cutoff"});
    if (s.contains("kind")) {
      cfg.surface_kind = get_string(s["kind"], "surface.kind");
      if (cfg.surface_kind != "torus" && cfg.surface_kind != "cp1") {
        throw ConfigError("surface.kind must be 'torus' or 'cp1'");
      }
    }
    if (s.contains("resolution")) cfg.resolution = get_int(s["resolution"], "surface.resolution");
    if (s.contains("radial_cutoff")) {
      cfg.radial_cutoff = get_number(s["radial_cutoff"], "surface.radial_cutoff");
    }
  }

  if (root.contains("metric")) {
    const json& m = root["metric"];
    check_keys(m, "metric", {"preset", "amplitude", "mode"});
    if (m.contains("preset")) cfg.metric_preset = get_string(m["preset"], "metric.preset");
    if (m.contains("amplitude")) {
      cfg.metric_amplitude = get_number(m["amplitude"], "metric.amplitude");
    }
    if (m.contains("mode")) cfg.metric_mode = get_int(m["mode"], "metric.mode");
  }

  if (root.contains("ivp")) {
    const json& n = root["ivp"];
    check_keys(n, "ivp", {"psi0", "order", "t_min", "t_max", "t_samples"});
    if (cfg.surface_kind == "cp1") cfg.psi0 = {"rotation", 1.0, 1};
    if (n.contains("psi0")) cfg.psi0 = parse_field_spec(n["psi0"], "ivp.psi0", cfg.psi0);
    if (n.contains("order")) cfg.ivp_order = get_int(n["order"], "ivp.order");
    if (n.contains("t_min")) cfg.t_min = get_number(n["t_min"], "ivp.t_min");
    if (n.contains("t_max")) cfg.t_max = get_number(n["t_max"], "ivp.t_max");
    if (n.contains("t_samples")) cfg.t_samples = get_int(n["t_samples"], "ivp.t_samples");
    if (cfg.ivp_order < 2) throw ConfigError("ivp.order must be >= 2");
    if (!(cfg.t_min > 0.0) || !(cfg.t_max > cfg.t_min)) {
      throw ConfigError("need 0 < ivp.t_min < ivp.t_max");
    }
    if (cfg.t_samples < 2) throw ConfigError("ivp.t_samples must be >= 2");
  } else if (cfg.surface_kind == "cp1") {
    cfg.psi0 = {"rotation", 1.0, 1};
  }

  if (root.contains("divisor")) {
    const json& n = root["divisor"];
    check_keys(n, "divisor", {"h", "order", "phases"});
    if (n.contains("h")) cfg.h = parse_field_spec(n["h"], "divisor.h", cfg.h);
    if (n.contains("order")) cfg.divisor_order = get_int(n["order"], "divisor.order");
    if (n.contains("phases")) cfg.phases = get_int(n["phases"], "divisor.phases");
    if (cfg.divisor_order < 1) throw ConfigError("divisor.order must be >= 1");
    if (cfg.phases < 4) throw ConfigError("divisor.phases must be >= 4");
  }

  if (root.contains("ray")) {
    const json& n = root["ray"];
    check_keys(n, "ray", {"source", "x0", "x1", "samples", "h", "order"});
    if (n.contains("source")) {
      cfg.ray_source = get_string(n["source"], "ray.source");
      if (cfg.ray_source != "rotation" && cfg.ray_source != "divisor") {
        throw ConfigError("ray.source must be 'rotation' or 'divisor'");
      }
    }
    if (cfg.ray_source == "divisor" && !cfg.surface_given) {
      cfg.surface_kind = "torus";
      cfg.resolution = 64;
    }
    if (n.contains("x0")) {
      cfg.x0 = get_number(n["x0"], "ray.x0");
      cfg.ray_range_given = true;
    }
    if (n.contains("x1")) {
      cfg.x1 = get_number(n["x1"], "ray.x1");
      cfg.ray_range_given = true;
    }
    if (n.contains("samples")) cfg.ray_samples = get_int(n["samples"], "ray.samples");
    if (n.contains("h")) cfg.h = parse_field_spec(n["h"], "ray.h", {"constant", 0.01, 1});
    else if (cfg.ray_source == "divisor") cfg.h = {"constant", 0.01, 1};
    if (n.contains("order")) cfg.divisor_order = get_int(n["order"], "ray.order");
    if (!(cfg.x0 < cfg.x1)) throw ConfigError("need ray.x0 < ray.x1");
    if (cfg.ray_samples < 5) throw ConfigError("ray.samples must be >= 5");
  }

  if (root.contains("tolerances")) {
    const json& n = root["tolerances"];
    check_keys(n, "tolerances", {"oracle", "residual", "equivariance", "ray"});
    if (n.contains("oracle")) cfg.tol_oracle = get_number(n["oracle"], "tolerances.oracle");
    if (n.contains("residual")) cfg.tol_residual = get_number(n["residual"], "tolerances.residual");
    if (n.contains("equivariance")) {
      cfg.tol_equivariance = get_number(n["equivariance"], "tolerances.equivariance");
    }
    if (n.contains("ray")) cfg.tol_ray = get_number(n["ray"], "tolerances.ray");
  }

  if (root.contains("output")) {
    const json& n = root["output"];
    check_keys(n, "output", {"dir"});
    if (n.contains("dir")) cfg.out_dir_from_config = get_string(n["dir"], "output.dir");
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// construction helpers

ModelSurface make_surface(const ScenarioConfig& cfg) {
  return cfg.surface_kind == "torus" ? ModelSurface::unit_torus(cfg.resolution)
                                     : ModelSurface::radial_cp1(cfg.resolution, cfg.radial_cutoff);
}

ScalarField make_field(const ModelSurface& surface, const FieldSpec& spec,
                       const std::string& where) {
  const double a = spec.amplitude;
  const int m = spec.mode;
  if (spec.preset == "constant") return ScalarField::constant(surface, a);
  if (surface.kind() == SurfaceKind::UnitTorus) {
    if (spec.preset == "cosine") {
      return ScalarField::sample_xy(
          surface, [a, m](double x, double) { return a * std::cos(2.0 * kPi * m * x); });
    }
    if (spec.preset == "cosine_xy") {
      return ScalarField::sample_xy(surface, [a, m](double x, double y) {
        return a * std::cos(2.0 * kPi * m * x) * std::cos(2.0 * kPi * m * y);
      });
    }
  } else {
    if (spec.preset == "rotation") {
      return ScalarField::sample_radial(surface,
                                        [a](double u) { return a * 2.0 * u / (1.0 + u); });
    }
    if (spec.preset == "bump") {
      return ScalarField::sample_radial(surface, [a](double u) {
        const double s = u / (1.0 + u);
        return a * s * (1.0 - s);
      });
    }
  }
  throw ConfigError("unknown field preset '" + spec.preset + "' in '" + where +
                    "' for this surface kind");
}

KahlerMetric make_metric(const ModelSurface& surface, const ScenarioConfig& cfg) {
  const std::string& p = cfg.metric_preset;
  if (p == "default") return KahlerMetric::default_for(surface);
  if (p == "flat") return KahlerMetric::flat(surface);
  if (p == "fubini_study") return KahlerMetric::fubini_study(surface);
  if (p == "cosine") {
    if (surface.kind() != SurfaceKind::UnitTorus) {
      throw ConfigError("metric preset 'cosine' is torus-only");
    }
    const double a = cfg.metric_amplitude;
    const int m = cfg.metric_mode;
    if (!(std::abs(a) < 1.0)) throw ConfigError("metric.amplitude must satisfy |a| < 1");
    return KahlerMetric::from_coefficient(ScalarField::sample_xy(
        surface, [a, m](double x, double) { return 1.0 + a * std::cos(2.0 * kPi * m * x); }));
  }
  throw ConfigError("unknown metric preset '" + p + "'");
}

// ---------------------------------------------------------------------------
// deterministic writers

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file(const std::string& dir, const std::string& name, const std::string& text) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::ofstream out(fs::path(dir) / name, std::ios::binary);
  if (!out) throw ConfigError("cannot write output file '" + name + "' under '" + dir + "'");
  out << text;
}

// Hand-rolled JSON printing with fixed key order and %.17g numbers, so the
// byte stream is reproducible.
void dump_json(const json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
  if (j.is_object()) {
    out += "{";
    bool first = true;
    for (const auto& [k, v] : j.items()) {
      out += first ? "\n" : ",\n";
      first = false;
      out += pad_in + "\"" + k + "\": ";
      dump_json(v, out, indent + 1);
    }
    out += first ? "}" : "\n" + pad + "}";
  } else if (j.is_array()) {
    out += "[";
    bool first = true;
    for (const auto& v : j) {
      out += first ? "\n" : ",\n";
      first = false;
      out += pad_in;
      dump_json(v, out, indent + 1);
    }
    out += first ? "]" : "\n" + pad + "]";
  } else if (j.is_string()) {
    out += j.dump();
  } else if (j.is_boolean()) {
    out += j.get<bool>() ? "true" : "false";
  } else if (j.is_null()) {
    out += "null";
  } else if (j.is_number_integer()) {
    out += std::to_string(j.get<long long>());
  } else {
    out += fmt(j.get<double>());
  }
}

std::string dump_summary(const json& j) {
  std::string out;
  dump_json(j, out, 0);
  out += "\n";
  return out;
}

json surface_json(const ScenarioConfig& cfg) {
  json s;
  s["kind"] = cfg.surface_kind;
  s["resolution"] = cfg.resolution;
  if (cfg.surface_kind == "cp1") s["radial_cutoff"] = cfg.radial_cutoff;
  return s;
}

json field_json(const FieldSpec& f) {
  json s;
  s["preset"] = f.preset;
  s["amplitude"] = f.amplitude;
  s["mode"] = f.mode;
  return s;
}

struct ReportTable {
  std::ostringstream os;
  void row(const std::string& label, const std::string& value) {
    os << label;
    for (std::size_t i = label.size(); i < 40; ++i) os << ' ';
    os << value << "\n";
  }
  void row(const std::string& label, double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%14.6e", value);
    row(label, buf);
  }
};

// ---------------------------------------------------------------------------
// shared measurements

double consistency_discrepancy(const GeodesicSeries& series, double t) {
  const auto hr = hcma_residual(series, t);
  if (!std::holds_alternative<ResidualReport>(hr)) return std::nan("");
  const auto gr = geodesic_residual(PathInH::from_series(series), t);
  if (!std::holds_alternative<ResidualReport>(gr)) return std::nan("");
  const MetricOrFailure m = metric_from_potential(series.base(), evaluate(series, t));
  const ScalarField from_hcma =
      pointwise_divide(std::get<ResidualReport>(hr).field * 4.0, std::get<KahlerMetric>(m).g());
  return (from_hcma - std::get<ResidualReport>(gr).field).sup_norm();
}

double wzw_per_time(const GeodesicSeries& series, double t) {
  const auto hr = hcma_residual(series, t);
  if (!std::holds_alternative<ResidualReport>(hr)) return std::nan("");
  // First-variation density against δF ≡ 1 at fixed t.
  return 0.5 * conventions::kCylinderCircumference *
         flat_integral(std::get<ResidualReport>(hr).field * 8.0);
}

// ---------------------------------------------------------------------------
// problem runners

int run_ivp(const ScenarioConfig& cfg, std::uint64_t seed, double tol_scale,
            const std::string& out_dir, ScenarioResult& result) {
  const ModelSurface surface = make_surface(cfg);
  const KahlerMetric base = make_metric(surface, cfg);
  const ScalarField psi0 = make_field(surface, cfg.psi0, "ivp.psi0");
  const GeodesicSeries series = solve_ivp(base, psi0, cfg.ivp_order);

  std::string series_csv = "k,sup_norm,mean\n";
  for (int k = 1; k <= series.order(); ++k) {
    series_csv += std::to_string(k) + "," + fmt(series.theta(k).sup_norm()) + "," +
                  fmt(series.theta(k).mean()) + "\n";
  }
  write_file(out_dir, "series.csv", series_csv);

  const PathInH path = PathInH::from_series(series);
  std::string residuals_csv = "t,hcma,geodesic,wzw\n";
  std::vector<double> log_t, log_r;
  double hcma_max = 0.0, consistency_max = 0.0;
  for (int i = 0; i < cfg.t_samples; ++i) {
    const double t =
        cfg.t_min * std::pow(cfg.t_max / cfg.t_min,
                             static_cast<double>(i) / (cfg.t_samples - 1));
    const auto hr = hcma_residual(series, t);
    const auto gr = geodesic_residual(path, t);
    if (!std::holds_alternative<ResidualReport>(hr) ||
        !std::holds_alternative<ResidualReport>(gr)) {
      residuals_csv += fmt(t) + ",nan,nan,nan\n";
      continue;
    }
    const double h = std::get<ResidualReport>(hr).sup_norm;
    const double g = std::get<ResidualReport>(gr).sup_norm;
    const double w = wzw_per_time(series, t);
    residuals_csv += fmt(t) + "," + fmt(h) + "," + fmt(g) + "," + fmt(w) + "\n";
    hcma_max = std::max(hcma_max, h);
    consistency_max = std::max(consistency_max, consistency_discrepancy(series, t));
    if (h > 0.0) {
      log_t.push_back(std::log(t));
      log_r.push_back(std::log(h));
    }
  }
  write_file(out_dir, "residuals.csv", residuals_csv);

  const double slope = (log_t.size() >= 2) ? fitted_slope(log_t, log_r) : 0.0;
  const RadiusEstimate ratio = radius_estimate(series, RadiusMethod::RatioTest);
  const RadiusEstimate root = radius_estimate(series, RadiusMethod::RootTest);
  const auto horizon = positivity_horizon(series, cfg.t_max, 64);

  json summary;
  summary["problem"] = "ivp";
  summary["seed"] = seed;
  summary["tolerance_scale"] = tol_scale;
  summary["surface"] = surface_json(cfg);
  summary["psi0"] = field_json(cfg.psi0);
  summary["order"] = series.order();
  summary["radius_ratio"] = std::isinf(ratio.radius) ? json(nullptr) : json(ratio.radius);
  summary["radius_root"] = std::isinf(root.radius) ? json(nullptr) : json(root.radius);
  // Evaluation beyond the estimated radius is allowed but flagged.
  summary["t_max_within_radius_estimate"] = cfg.t_max <= ratio.radius;
  summary["residual_order_fit"] = slope;
  summary["hcma_sup_max"] = hcma_max;
  summary["consistency_max_discrepancy"] = consistency_max;
  summary["positivity_horizon"] = horizon ? json(*horizon) : json(nullptr);
  result.summary_json = dump_summary(summary);
  write_file(out_dir, "summary.json", result.summary_json);

  ReportTable table;
  table.row("problem", "ivp");
  table.row("series order", static_cast<double>(series.order()));
  table.row("radius estimate (ratio test)", ratio.radius);
  table.row("residual order fit", slope);
  table.row("max hcma residual", hcma_max);
  table.row("consistency (eq1 vs eq3)", consistency_max);
  result.report_text = table.os.str();
  return 0;
}

int run_divisor(const ScenarioConfig& cfg, std::uint64_t seed, double tol_scale,
                const std::string& out_dir, ScenarioResult& result) {
  const ModelSurface surface = make_surface(cfg);
  const KahlerMetric base = make_metric(surface, cfg);
  const ScalarField h = make_field(surface, cfg.h, "divisor.h");
  const ExtensionForm ext{base, h, true};
  const BidegreeSeries series = solve_order(ext, cfg.divisor_order);

  double max_res = 0.0;
  for (const auto& r : residual_mod_sk(series, cfg.divisor_order)) {
    max_res = std::max(max_res, r.sup_norm);
  }
  const double defect = equivariance_check(series, cfg.phases);

  std::string series_csv = "k,sup_norm,mean\n";
  int stored_nonzero = 0;
  for (int m = 2; m <= cfg.divisor_order + 1; ++m) {
    double sup = 0.0;
    ScalarField c = ScalarField::constant(surface, 0.0);
    for (const auto& [key, entry] : series.thetas()) {
      if (key.first + key.second != m) continue;
      sup = std::max(sup, entry.field.sup_norm());
      c += entry.field.real_part();
      if (entry.field.sup_norm() > 1e-14) ++stored_nonzero;
    }
    series_csv += std::to_string(m) + "," + fmt(sup) + "," + fmt(c.mean()) + "\n";
  }
  write_file(out_dir, "series.csv", series_csv);

  json summary;
  summary["problem"] = "divisor";
  summary["seed"] = seed;
  summary["tolerance_scale"] = tol_scale;
  summary["surface"] = surface_json(cfg);
  summary["h"] = field_json(cfg.h);
  summary["order"] = cfg.divisor_order;
  summary["max_residual_mod_sk"] = max_res;
  summary["equivariance_defect"] = defect;
  summary["theta11_sup"] = series.theta(1, 1).sup_norm();
  summary["stored_nonzero"] = stored_nonzero;
  result.summary_json = dump_summary(summary);
  write_file(out_dir, "summary.json", result.summary_json);

  ReportTable table;
  table.row("problem", "divisor");
  table.row("order", static_cast<double>(cfg.divisor_order));
  table.row("max residual mod S^k", max_res);
  table.row("equivariance defect", defect);
  table.row("theta_11 sup-norm", series.theta(1, 1).sup_norm());
  result.report_text = table.os.str();
  return 0;
}

int run_ray(const ScenarioConfig& cfg, std::uint64_t seed, double tol_scale,
            const std::string& out_dir, ScenarioResult& result) {
  const ModelSurface surface = make_surface(cfg);
  const KahlerMetric base = make_metric(surface, cfg);

  double x0 = cfg.x0, x1 = cfg.x1;
  double trust_x_min = 0.0;
  PathInH path = [&] {
    if (cfg.ray_source == "rotation") {
      if (surface.kind() != SurfaceKind::RadialCP1) {
        throw ConfigError("ray.source 'rotation' needs a cp1 surface");
      }
      RotationRay rot(surface);
      return PathInH::from_closures(
          base, [rot](double t) { return rot.value(t); },
          [rot](double t) { return rot.dt(t); }, [rot](double t) { return rot.dtt(t); });
    }
    const ScalarField h = make_field(surface, cfg.h, "ray.h");
    const BidegreeSeries series = solve_order(ExtensionForm{base, h, true}, cfg.divisor_order);
    DivisorRay probe = to_geodesic_ray(series, cfg.x0, cfg.x1, 2, cfg.tol_ray * tol_scale);
    if (!cfg.ray_range_given && std::isfinite(probe.trust_x_min)) {
      x0 = probe.trust_x_min;
      x1 = x0 + 4.0;
    }
    DivisorRay ray = to_geodesic_ray(series, x0, x1, cfg.ray_samples, cfg.tol_ray * tol_scale);
    trust_x_min = ray.trust_x_min;
    return ray.to_path();
  }();

  std::vector<double> times(static_cast<std::size_t>(cfg.ray_samples));
  for (int i = 0; i < cfg.ray_samples; ++i) {
    times[static_cast<std::size_t>(i)] = x0 + (x1 - x0) * i / (cfg.ray_samples - 1);
  }
  const RayDiagnostics diag = diagnostics(path, times);

  std::string ray_csv = "x,energy,c0,cumulative_length\n";
  double cumulative = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0) cumulative += length(path, times[i - 1], times[i]);
    ray_csv += fmt(times[i]) + "," + fmt(diag.energy[i]) + "," + fmt(diag.c0[i]) + "," +
               fmt(cumulative) + "\n";
  }
  write_file(out_dir, "ray.csv", ray_csv);

  double residual_max = 0.0;
  for (std::size_t i = 2; i + 2 < times.size(); i += std::max<std::size_t>(1, times.size() / 8)) {
    const auto r = geodesic_residual(path, times[i]);
    if (std::holds_alternative<ResidualReport>(r)) {
      residual_max = std::max(residual_max, std::get<ResidualReport>(r).sup_norm);
    }
  }

  json summary;
  summary["problem"] = "ray";
  summary["seed"] = seed;
  summary["tolerance_scale"] = tol_scale;
  summary["surface"] = surface_json(cfg);
  summary["source"] = cfg.ray_source;
  summary["x0"] = x0;
  summary["x1"] = x1;
  summary["samples"] = cfg.ray_samples;
  summary["length"] = diag.length;
  summary["speed_drift"] = diag.speed_drift;
  summary["c0_initial"] = diag.c0.front();
  summary["c0_final"] = diag.c0.back();
  summary["c0_strictly_increasing"] = diag.c0_strictly_increasing;
  summary["max_geodesic_residual"] = residual_max;
  summary["trust_x_min"] =
      cfg.ray_source == "divisor" ? json(trust_x_min) : json(nullptr);
  result.summary_json = dump_summary(summary);
  write_file(out_dir, "summary.json", result.summary_json);

  ReportTable table;
  table.row("problem", "ray (" + cfg.ray_source + ")");
  table.row("length", diag.length);
  table.row("speed drift", diag.speed_drift);
  table.row("c0 final / initial",
            diag.c0.front() > 0.0 ? diag.c0.back() / diag.c0.front() : 0.0);
  table.row("max geodesic residual", residual_max);
  result.report_text = table.os.str();
  return 0;
}

// ---------------------------------------------------------------------------
// validate battery

struct Check {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool upper_bound = true;  // pass iff measured <= threshold (else >=)
  bool pass() const { return upper_bound ? measured <= threshold : measured >= threshold; }
};

int run_validate(const ScenarioConfig& cfg, std::uint64_t seed, double ts,
                 const std::string& out_dir, ScenarioResult& result) {
  std::vector<Check> checks;
  const auto le = [&](const std::string& name, double measured, double threshold) {
    checks.push_back({name, measured, threshold, true});
  };
  const auto ge = [&](const std::string& name, double measured, double threshold) {
    checks.push_back({name, measured, threshold, false});
  };

  const ModelSurface torus = ModelSurface::unit_torus(64);
  const KahlerMetric flat = KahlerMetric::flat(torus);
  const ModelSurface cp1 = ModelSurface::radial_cp1(64, 4.0);
  const KahlerMetric fs = KahlerMetric::fubini_study(cp1);

  // --- calculus substrate ---
  le("calculus.torus_volume",
     std::abs(integrate(ScalarField::constant(torus, 1.0), flat) - 2.0), 1e-14 * ts);
  const ScalarField cosx =
      ScalarField::sample_xy(torus, [](double x, double) { return std::cos(2.0 * kPi * x); });
  le("calculus.mean_zero_mode", std::abs(integrate(cosx, flat)), 1e-14 * ts);
  le("calculus.divergence_theorem",
     std::abs(integrate(differentiate(cosx, DiffMode::DzDzbar).real_part(), flat)), 1e-12 * ts);

  {
    // Spectral vs 4th-order finite differences across a resolution sweep.
    std::vector<double> log_h, log_e;
    for (int n : {16, 32, 64, 128}) {
      const ModelSurface t = ModelSurface::unit_torus(n);
      const ScalarField f = ScalarField::sample_xy(
          t, [](double x, double y) { return std::cos(2.0 * kPi * (3.0 * x + 2.0 * y)); });
      const ComplexField spectral = differentiate(f, DiffMode::Dz);
      const double h = 1.0 / n;
      double err = 0.0;
      for (std::size_t node = 0; node < t.node_count(); ++node) {
        const std::size_t ix = node % static_cast<std::size_t>(n);
        const std::size_t iy = node / static_cast<std::size_t>(n);
        const auto at = [&](std::ptrdiff_t dx, std::ptrdiff_t dy) {
          const std::size_t jx = (ix + static_cast<std::size_t>(dx + n)) % n;
          const std::size_t jy = (iy + static_cast<std::size_t>(dy + n)) % n;
          return f.values()[jy * static_cast<std::size_t>(n) + jx];
        };
        const double fx =
            (-at(2, 0) + 8 * at(1, 0) - 8 * at(-1, 0) + at(-2, 0)) / (12 * h);
        const double fy =
            (-at(0, 2) + 8 * at(0, 1) - 8 * at(0, -1) + at(0, -2)) / (12 * h);
        const std::complex<double> fd{0.5 * fx, -0.5 * fy};
        err = std::max(err, std::abs(spectral.values()[node] - fd));
      }
      log_h.push_back(std::log(h));
      log_e.push_back(std::log(err));
    }
    ge("calculus.fd_convergence_order", fitted_slope(log_h, log_e), 3.5);
  }

  {
    const ComplexField dz = differentiate(cosx, DiffMode::Dz);
    const ComplexField dzbar = differentiate(cosx, DiffMode::Dzbar);
    le("calculus.conjugate_pair", (dz - dzbar.conj()).sup_norm(), 1e-13 * ts);
  }

  {
    const auto m = metric_from_potential(flat, ScalarField::constant(torus, 0.0));
    le("calculus.metric_identity",
       (std::get<KahlerMetric>(m).g() - flat.g()).sup_norm(), 1e-15 * ts);
    const double eps = 2.0 / (kPi * kPi);
    const auto bad = metric_from_potential(
        flat, ScalarField::sample_xy(
                  torus, [eps](double x, double) { return eps * std::cos(2.0 * kPi * x); }));
    ge("calculus.positivity_detected", positive(bad) ? 0.0 : 1.0, 1.0);
  }

  {
    const Integral vol = integrate_detailed(ScalarField::constant(cp1, 1.0), fs);
    le("calculus.cp1_volume_in_tail_bound", std::abs(vol.value - 2.0 * kPi),
       std::max(vol.tail_bound, 1e-12));
  }

  // --- ivp: oracle equivalence, residual order, consistency, symmetries ---
  const ScalarField psi_t =
      ScalarField::sample_xy(torus, [](double x, double) { return 0.1 * std::cos(2.0 * kPi * x); });
  const GeodesicSeries s_torus = solve_ivp(flat, psi_t, 6);
  {
    const auto oracle = taylor_from_evolution(flat, psi_t, 6);
    double worst = 0.0;
    for (int k = 2; k <= 6; ++k) {
      worst = std::max(worst,
                       (s_torus.theta(k) - oracle[k - 1]).sup_norm() / oracle[k - 1].sup_norm());
    }
    le("ivp.oracle_match_torus", worst, cfg.tol_oracle * ts);

    const ScalarField psi_r = RotationRay(cp1).initial_velocity();
    const GeodesicSeries s_cp1 = solve_ivp(fs, psi_r, 6);
    const auto oracle_r = taylor_from_evolution(fs, psi_r, 6);
    worst = 0.0;
    for (int k = 2; k <= 6; ++k) {
      worst = std::max(
          worst, (s_cp1.theta(k) - oracle_r[k - 1]).sup_norm() / oracle_r[k - 1].sup_norm());
    }
    le("ivp.oracle_match_cp1", worst, cfg.tol_oracle * ts);
  }

  for (int order : {4, 6}) {
    const ScalarField psi = ScalarField::sample_xy(
        torus, [](double x, double) { return 0.2 * std::cos(2.0 * kPi * x); });
    const GeodesicSeries s = solve_ivp(flat, psi, order);
    std::vector<double> lt, lr;
    for (int i = 0; i < 9; ++i) {
      const double t = 1e-3 * std::pow(100.0, i / 8.0);
      const auto r = hcma_residual(s, t);
      const double sup = std::get<ResidualReport>(r).sup_norm;
      if (sup > 0.0) {
        lt.push_back(std::log(t));
        lr.push_back(std::log(sup));
      }
    }
    ge("ivp.residual_order_fit_k" + std::to_string(order), fitted_slope(lt, lr),
       order - 1.2);
  }

  {
    double worst = 0.0;
    for (double t : {0.01, 0.05, 0.1}) worst = std::max(worst, consistency_discrepancy(s_torus, t));
    le("ivp.consistency_hcma_geodesic", worst, 1e-10 * ts);
  }

  {
    const GeodesicSeries s_neg = solve_ivp(flat, -psi_t, 6);
    double worst = 0.0;
    for (int k = 2; k <= 6; ++k) {
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      worst = std::max(worst, (s_neg.theta(k) - sign * s_torus.theta(k)).sup_norm());
    }
    le("ivp.time_reversal", worst, 1e-13 * ts);

    const GeodesicSeries s_shift =
        solve_ivp(flat, psi_t + ScalarField::constant(torus, 0.37), 6);
    worst = 0.0;
    for (int k = 2; k <= 6; ++k) {
      worst = std::max(worst, (s_shift.theta(k) - s_torus.theta(k)).sup_norm());
    }
    le("ivp.constant_shift", worst, 1e-13 * ts);
  }

  {
    const double c = 0.4;
    std::vector<ScalarField> synthetic;
    for (int k = 1; k <= 8; ++k) {
      synthetic.push_back(ScalarField::constant(torus, std::pow(c, k)));
    }
    const RadiusEstimate est =
        radius_estimate(GeodesicSeries::from_thetas(flat, synthetic), RadiusMethod::RatioTest);
    le("ivp.radius_synthetic_ratio", std::abs(est.radius * c - 1.0), 0.05);

    double prev = std::numeric_limits<double>::infinity();
    bool monotone = true;
    for (double eps : {0.05, 0.1, 0.2}) {
      const ScalarField p = ScalarField::sample_xy(
          torus, [eps](double x, double) { return eps * std::cos(2.0 * kPi * x); });
      const double r = radius_estimate(solve_ivp(flat, p, 8)).radius;
      if (!(r > 0.0) || r > prev * 1.0001) monotone = false;
      prev = r;
    }
    ge("ivp.radius_monotone_in_amplitude", monotone ? 1.0 : 0.0, 1.0);
  }

  {
    const ScalarField big = ScalarField::sample_xy(
        torus, [](double x, double) { return 1.5 * std::cos(2.0 * kPi * x); });
    const auto horizon = positivity_horizon(solve_ivp(flat, big, 4), 2.0, 64);
    ge("ivp.positivity_horizon_finite", horizon ? 1.0 : 0.0, 1.0);
    const auto none =
        positivity_horizon(solve_ivp(flat, ScalarField::constant(torus, 0.7), 4), 2.0, 16);
    ge("ivp.positivity_horizon_none_for_constant", none ? 0.0 : 1.0, 1.0);
  }

  // --- rotation family on the large radial grid ---
  const ModelSurface big = ModelSurface::radial_cp1(256, 50.0);
  const KahlerMetric fs_big = KahlerMetric::fubini_study(big);
  const RotationRay rot(big);
  const PathInH rot_path = PathInH::from_closures(
      fs_big, [rot](double t) { return rot.value(t); }, [rot](double t) { return rot.dt(t); },
      [rot](double t) { return rot.dtt(t); });
  {
    double worst = 0.0;
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      worst = std::max(worst,
                       std::get<ResidualReport>(geodesic_residual(rot_path, t)).sup_norm);
    }
    le("rotation.geodesic_residual", worst, cfg.tol_ray * ts);

    const double e0 = energy(rot_path, 0.0);
    double drift = 0.0;
    for (double t : {0.25, 0.5, 0.75, 1.0}) {
      drift = std::max(drift, std::abs(energy(rot_path, t) - e0) / e0);
    }
    le("rotation.energy_drift", drift, 1e-6 * ts);

    const ModelSurface fine = ModelSurface::radial_cp1(512, 50.0);
    const RotationRay rot_fine(fine);
    const PathInH fine_path = PathInH::from_closures(
        KahlerMetric::fubini_study(fine), [rot_fine](double t) { return rot_fine.value(t); },
        [rot_fine](double t) { return rot_fine.dt(t); },
        [rot_fine](double t) { return rot_fine.dtt(t); });
    const double l1 = length(fine_path, 0.0, 1.0);
    double linearity = 0.0;
    for (double x : {2.0, 4.0}) {
      linearity = std::max(linearity, std::abs(length(fine_path, 0.0, x) / x - l1) / l1);
    }
    le("rotation.length_linearity", linearity, 1e-6 * ts);

    std::vector<double> times;
    for (int i = 0; i < 32; ++i) times.push_back(0.25 + (8.0 - 0.25) * i / 31.0);
    const C0Profile prof = c0_profile(rot_path, times);
    ge("rotation.c0_growth_ratio", prof.norms.back() / prof.norms.front(), 10.0);
    ge("rotation.c0_strictly_increasing", prof.strictly_increasing ? 1.0 : 0.0, 1.0);
  }

  // --- first variation ---
  {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    const GeodesicSeries s8 = solve_ivp(flat, psi_t, 8);
    const PathInH torus_path = PathInH::from_series(s8);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const bool on_rot = trial < 5;
      const PathInH& path = on_rot ? rot_path : torus_path;
      const double t1 = on_rot ? 1.0 : 0.05;
      const double a0 = coef(rng), a1 = coef(rng), a2 = coef(rng);
      const int mode = 1 + (trial % 2);
      PathInH::FieldFn delta_f;
      if (on_rot) {
        delta_f = [&, a0, a1, a2, t1](double t) {
          const double env = std::sin(kPi * t / t1) * (a0 + a1 * t + a2 * t * t);
          return ScalarField::sample_radial(big, [env](double u) {
            const double s = u / (1.0 + u);
            return env * (1.0 + s * (1.0 - s));
          });
        };
      } else {
        delta_f = [&, a0, a1, a2, mode, t1](double t) {
          const double env = std::sin(kPi * t / t1) * (a0 + a1 * t + a2 * t * t);
          return ScalarField::sample_xy(torus, [env, mode](double x, double y) {
            return env * std::cos(2.0 * kPi * mode * x) * std::cos(2.0 * kPi * y);
          });
        };
      }
      double norm = 0.0;
      for (int i = 0; i <= 8; ++i) norm = std::max(norm, delta_f(t1 * i / 8.0).sup_norm());
      if (norm == 0.0) continue;
      worst = std::max(worst, std::abs(wzw_first_variation(path, delta_f, 0.0, t1)) / norm);
    }
    le("wzw.geodesic_bound", worst, 1e-8 * ts);

    // Documented non-geodesic path: φ(t) = 0.04 (t + t²) cos(2πx); the
    // amplitude keeps ω_φ positive through t = 1.
    const PathInH bad = PathInH::from_closures(
        flat, [&](double t) { return 0.04 * (t + t * t) * cosx; },
        [&](double t) { return 0.04 * (1.0 + 2.0 * t) * cosx; },
        [&](double) { return 0.08 * cosx; });
    const double di = wzw_first_variation(
        bad,
        [&](double t) {
          return ScalarField::sample_xy(torus, [t](double x, double) {
            return std::sin(kPi * t) * std::cos(2.0 * kPi * x);
          });
        },
        0.0, 1.0);
    ge("wzw.nongeodesic_detects", std::abs(di), 1e-3);
  }

  // --- divisor construction ---
  {
    const ExtensionForm trivial{flat, ScalarField::constant(torus, 0.0), true};
    const BidegreeSeries zero = solve_order(trivial, 4);
    double worst = 0.0;
    for (const auto& [key, entry] : zero.thetas()) {
      (void)key;
      worst = std::max(worst, entry.field.sup_norm());
    }
    le("divisor.trivial_extension_zero", worst, 1e-15 * ts);

    for (const char* kind : {"constant", "cosine"}) {
      const FieldSpec spec{kind, 0.3, 1};
      const BidegreeSeries s = solve_order(
          ExtensionForm{flat, make_field(torus, spec, "divisor.h"), true}, 4);
      double res = 0.0;
      for (const auto& r : residual_mod_sk(s, 4)) res = std::max(res, r.sup_norm);
      le(std::string("divisor.residual_") + kind, res, cfg.tol_residual * ts);
      if (std::string(kind) == "cosine") {
        le("divisor.equivariance", equivariance_check(s, std::max(8, cfg.phases)),
           cfg.tol_equivariance * ts);

        // Linearity of the defect in an injected weight-violating amplitude.
        std::vector<double> per_amp;
        for (double amp : {1e-3, 2e-3, 4e-3}) {
          const BidegreeSeries broken = s.with_theta(
              2, 1, ComplexField(ScalarField::constant(torus, amp)), 0);
          per_amp.push_back(equivariance_check(broken, 8) / amp);
        }
        double spread = 0.0;
        for (double v : per_amp) {
          spread = std::max(spread, std::abs(v - per_amp[0]) / std::abs(per_amp[0]));
        }
        ge("divisor.violation_detected", per_amp[0], 1e-6);
        le("divisor.violation_linearity", spread, 0.05);

        // Residual engine sensitivity to a perturbed coefficient.
        const BidegreeSeries bumped = s.with_theta(
            1, 1, s.theta(1, 1) + ComplexField(ScalarField::constant(torus, 1e-3)), 0);
        double bumped_res = 0.0;
        for (const auto& r : residual_mod_sk(bumped, 1)) bumped_res = std::max(bumped_res, r.sup_norm);
        ge("divisor.perturbation_response", bumped_res / 1e-3, 0.5);
      }
    }

    const ExtensionForm ez{flat, ScalarField::constant(torus, 0.01), true};
    const DivisorRay ray = to_geodesic_ray(solve_order(ez, 4), 8.0, 12.0, 41,
                                           cfg.tol_ray * ts);
    const PathInH rp = ray.to_path();
    double worst_ray = 0.0;
    for (std::size_t i = 2; i + 2 < ray.x.size(); i += 9) {
      if (ray.x[i] < ray.trust_x_min) continue;
      worst_ray = std::max(worst_ray,
                           std::get<ResidualReport>(geodesic_residual(rp, ray.x[i])).sup_norm);
    }
    le("divisor.ray_residual_in_trust_region", worst_ray, cfg.tol_ray * ts);
  }

  // --- emit ---
  bool all = true;
  std::string csv = "name,measured,threshold,pass\n";
  json jchecks = json::array();
  ReportTable table;
  for (const auto& c : checks) {
    all = all && c.pass();
    csv += c.name + "," + fmt(c.measured) + "," + fmt(c.threshold) + "," +
           (c.pass() ? "1" : "0") + "\n";
    json jc;
    jc["name"] = c.name;
    jc["measured"] = c.measured;
    jc["threshold"] = c.threshold;
    jc["direction"] = c.upper_bound ? "le" : "ge";
    jc["pass"] = c.pass();
    jchecks.push_back(jc);
    char line[64];
    std::snprintf(line, sizeof(line), "%13.6e %s %11.4e  %s", c.measured,
                  c.upper_bound ? "<=" : ">=", c.threshold, c.pass() ? "pass" : "FAIL");
    table.row(c.name, line);
  }
  write_file(out_dir, "validate.csv", csv);

  json summary;
  summary["problem"] = "validate";
  summary["seed"] = seed;
  summary["tolerance_scale"] = ts;
  summary["all_passed"] = all;
  summary["checks"] = jchecks;
  result.summary_json = dump_summary(summary);
  write_file(out_dir, "summary.json", result.summary_json);
  result.report_text = table.os.str();
  return all ? 0 : 2;
}

}  // namespace

ScenarioResult run_scenario(const std::string& config_json, const std::string& problem_override,
                            const std::string& out_dir, std::uint64_t seed,
                            double tolerance_scale) {
  ScenarioResult result;
  try {
    const ScenarioConfig cfg = parse_config(config_json, problem_override);
    std::string dir = out_dir.empty() ? cfg.out_dir_from_config : out_dir;
    if (dir.empty()) dir = "kgeo_out";
    if (!(tolerance_scale > 0.0)) throw ConfigError("tolerance scale must be positive");

    if (cfg.problem == "ivp") {
      result.exit_code = run_ivp(cfg, seed, tolerance_scale, dir, result);
    } else if (cfg.problem == "divisor") {
      result.exit_code = run_divisor(cfg, seed, tolerance_scale, dir, result);
    } else if (cfg.problem == "ray") {
      result.exit_code = run_ray(cfg, seed, tolerance_scale, dir, result);
    } else {
      result.exit_code = run_validate(cfg, seed, tolerance_scale, dir, result);
    }
  } catch (const ConfigError& e) {
    result.exit_code = 3;
    result.report_text = std::string("config error: ") + e.what() + "\n";
  } catch (const std::exception& e) {
    result.exit_code = 2;
    result.report_text = std::string("error: ") + e.what() + "\n";
  }
  return result;
}

}  // namespace kgeo
