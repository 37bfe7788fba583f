#include "kgeo.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>

#include "kgeo/divisor.hpp"
#include "kgeo/errors.hpp"
#include "kgeo/ivp.hpp"
#include "kgeo/oracle.hpp"
#include "kgeo/ray.hpp"
#include "kgeo/scenario.hpp"

using namespace kgeo;

extern "C" {

struct kgeo_surface {
  ModelSurface rep;
};
struct kgeo_field {
  ScalarField rep;
};
struct kgeo_metric {
  KahlerMetric rep;
};
struct kgeo_series {
  GeodesicSeries rep;
};
struct kgeo_bidegree {
  BidegreeSeries rep;
};
struct kgeo_path {
  PathInH rep;
};

}  // extern "C"

namespace {

thread_local std::string g_last_error;

kgeo_status fail(kgeo_status code, const char* what) {
  g_last_error = what;
  return code;
}

template <typename Fn>
kgeo_status guarded(Fn&& fn) {
  try {
    fn();
    return KGEO_OK;
  } catch (const InvalidArgument& e) {
    return fail(KGEO_ERR_INVALID_ARGUMENT, e.what());
  } catch (const AliasingError& e) {
    return fail(KGEO_ERR_ALIASING, e.what());
  } catch (const PositivityError& e) {
    return fail(KGEO_ERR_POSITIVITY, e.what());
  } catch (const NotInvariantError& e) {
    return fail(KGEO_ERR_NOT_INVARIANT, e.what());
  } catch (const ConfigError& e) {
    return fail(KGEO_ERR_CONFIG, e.what());
  } catch (const std::exception& e) {
    return fail(KGEO_ERR_INTERNAL, e.what());
  }
}

kgeo_status require(bool ok, const char* what) {
  return ok ? KGEO_OK : fail(KGEO_ERR_INVALID_ARGUMENT, what);
}

ScalarField preset_field(const ModelSurface& surface, const std::string& preset, double amplitude,
                         int mode) {
  constexpr double pi = 3.141592653589793238462643383279502884;
  if (preset == "constant") return ScalarField::constant(surface, amplitude);
  if (surface.kind() == SurfaceKind::UnitTorus) {
    if (preset == "cosine") {
      return ScalarField::sample_xy(surface, [=](double x, double) {
        return amplitude * std::cos(2.0 * pi * mode * x);
      });
    }
    if (preset == "cosine_xy") {
      return ScalarField::sample_xy(surface, [=](double x, double y) {
        return amplitude * std::cos(2.0 * pi * mode * x) * std::cos(2.0 * pi * mode * y);
      });
    }
  } else {
    if (preset == "rotation") {
      return ScalarField::sample_radial(
          surface, [=](double u) { return amplitude * 2.0 * u / (1.0 + u); });
    }
    if (preset == "bump") {
      return ScalarField::sample_radial(surface, [=](double u) {
        const double s = u / (1.0 + u);
        return amplitude * s * (1.0 - s);
      });
    }
  }
  throw InvalidArgument("unknown field preset '" + preset + "' for this surface kind");
}

}  // namespace

extern "C" {

const char* kgeo_last_error(void) { return g_last_error.c_str(); }

kgeo_status kgeo_surface_create_torus(int resolution, kgeo_surface** out) {
  if (auto st = require(out != nullptr, "out pointer is null")) return st;
  return guarded([&] { *out = new kgeo_surface{ModelSurface::unit_torus(resolution)}; });
}

kgeo_status kgeo_surface_create_radial_cp1(int resolution, double radial_cutoff,
                                           kgeo_surface** out) {
  if (auto st = require(out != nullptr, "out pointer is null")) return st;
  return guarded(
      [&] { *out = new kgeo_surface{ModelSurface::radial_cp1(resolution, radial_cutoff)}; });
}

void kgeo_surface_destroy(kgeo_surface* s) { delete s; }

size_t kgeo_surface_node_count(const kgeo_surface* s) {
  return s == nullptr ? 0 : s->rep.node_count();
}

kgeo_status kgeo_field_constant(const kgeo_surface* s, double value, kgeo_field** out) {
  if (auto st = require(s != nullptr && out != nullptr, "null argument")) return st;
  return guarded([&] { *out = new kgeo_field{ScalarField::constant(s->rep, value)}; });
}

kgeo_status kgeo_field_preset(const kgeo_surface* s, const char* preset, double amplitude,
                              int mode, kgeo_field** out) {
  if (auto st = require(s != nullptr && preset != nullptr && out != nullptr, "null argument")) {
    return st;
  }
  return guarded([&] { *out = new kgeo_field{preset_field(s->rep, preset, amplitude, mode)}; });
}

kgeo_status kgeo_field_values(const kgeo_field* f, double* buffer, size_t buffer_len) {
  if (auto st = require(f != nullptr && buffer != nullptr, "null argument")) return st;
  if (auto st = require(buffer_len >= f->rep.values().size(), "buffer too small")) return st;
  std::memcpy(buffer, f->rep.values().data(), f->rep.values().size() * sizeof(double));
  return KGEO_OK;
}

double kgeo_field_sup_norm(const kgeo_field* f) { return f == nullptr ? 0.0 : f->rep.sup_norm(); }

void kgeo_field_destroy(kgeo_field* f) { delete f; }

kgeo_status kgeo_metric_default(const kgeo_surface* s, kgeo_metric** out) {
  if (auto st = require(s != nullptr && out != nullptr, "null argument")) return st;
  return guarded([&] { *out = new kgeo_metric{KahlerMetric::default_for(s->rep)}; });
}

kgeo_status kgeo_metric_flat(const kgeo_surface* s, kgeo_metric** out) {
  if (auto st = require(s != nullptr && out != nullptr, "null argument")) return st;
  return guarded([&] { *out = new kgeo_metric{KahlerMetric::flat(s->rep)}; });
}

kgeo_status kgeo_metric_fubini_study(const kgeo_surface* s, kgeo_metric** out) {
  if (auto st = require(s != nullptr && out != nullptr, "null argument")) return st;
  return guarded([&] { *out = new kgeo_metric{KahlerMetric::fubini_study(s->rep)}; });
}

kgeo_status kgeo_metric_from_potential(const kgeo_metric* base, const kgeo_field* phi,
                                       kgeo_metric** out) {
  if (auto st = require(base != nullptr && phi != nullptr && out != nullptr, "null argument")) {
    return st;
  }
  return guarded([&] {
    MetricOrFailure m = metric_from_potential(base->rep, phi->rep);
    if (!positive(m)) {
      throw PositivityError(
          std::get<PositivityFailure>(m).describe(base->rep.surface()));
    }
    *out = new kgeo_metric{std::get<KahlerMetric>(std::move(m))};
  });
}

void kgeo_metric_destroy(kgeo_metric* m) { delete m; }

kgeo_status kgeo_integrate(const kgeo_field* f, const kgeo_metric* m, double* out) {
  if (auto st = require(f != nullptr && m != nullptr && out != nullptr, "null argument")) {
    return st;
  }
  return guarded([&] { *out = integrate(f->rep, m->rep); });
}

kgeo_status kgeo_series_solve(const kgeo_metric* base, const kgeo_field* psi0, int order,
                              kgeo_series** out) {
  if (auto st = require(base != nullptr && psi0 != nullptr && out != nullptr, "null argument")) {
    return st;
  }
  return guarded([&] { *out = new kgeo_series{solve_ivp(base->rep, psi0->rep, order)}; });
}

int kgeo_series_order(const kgeo_series* s) { return s == nullptr ? 0 : s->rep.order(); }

kgeo_status kgeo_series_theta(const kgeo_series* s, int k, kgeo_field** out) {
  if (auto st = require(s != nullptr && out != nullptr, "null argument")) return st;
  return guarded([&] { *out = new kgeo_field{s->rep.theta(k)}; });
}

kgeo_status kgeo_series_evaluate(const kgeo_series* s, double t, int deriv, kgeo_field** out) {
  if (auto st = require(s != nullptr && out != nullptr, "null argument")) return st;
  if (auto st = require(deriv >= 0 && deriv <= 2, "deriv must be 0, 1 or 2")) return st;
  return guarded([&] {
    const EvalOrder ord = deriv == 0 ? EvalOrder::Value : deriv == 1 ? EvalOrder::Dt
                                                                     : EvalOrder::Dtt;
    *out = new kgeo_field{evaluate(s->rep, t, ord)};
  });
}

kgeo_status kgeo_series_hcma_residual(const kgeo_series* s, double t, double* sup_norm) {
  if (auto st = require(s != nullptr && sup_norm != nullptr, "null argument")) return st;
  return guarded([&] {
    auto r = hcma_residual(s->rep, t);
    if (!std::holds_alternative<ResidualReport>(r)) {
      throw PositivityError(
          std::get<PositivityFailure>(r).describe(s->rep.base().surface()));
    }
    *sup_norm = std::get<ResidualReport>(r).sup_norm;
  });
}

kgeo_status kgeo_series_radius(const kgeo_series* s, int method, double* out) {
  if (auto st = require(s != nullptr && out != nullptr, "null argument")) return st;
  if (auto st = require(method == 0 || method == 1, "method must be 0 or 1")) return st;
  return guarded([&] {
    *out = radius_estimate(s->rep, method == 0 ? RadiusMethod::RatioTest : RadiusMethod::RootTest)
               .radius;
  });
}

kgeo_status kgeo_series_positivity_horizon(const kgeo_series* s, double t_max, int steps,
                                           double* t_fail, int* found) {
  if (auto st = require(s != nullptr && t_fail != nullptr && found != nullptr, "null argument")) {
    return st;
  }
  return guarded([&] {
    const auto t = positivity_horizon(s->rep, t_max, steps);
    *found = t.has_value() ? 1 : 0;
    if (t) *t_fail = *t;
  });
}

void kgeo_series_destroy(kgeo_series* s) { delete s; }

kgeo_status kgeo_bidegree_solve(const kgeo_metric* base, const kgeo_field* h, int order,
                                kgeo_bidegree** out) {
  if (auto st = require(base != nullptr && h != nullptr && out != nullptr, "null argument")) {
    return st;
  }
  return guarded([&] {
    *out = new kgeo_bidegree{solve_order(ExtensionForm{base->rep, h->rep, true}, order)};
  });
}

kgeo_status kgeo_bidegree_residual(const kgeo_bidegree* b, int k, double* out) {
  if (auto st = require(b != nullptr && out != nullptr, "null argument")) return st;
  return guarded([&] {
    double worst = 0.0;
    for (const auto& r : residual_mod_sk(b->rep, k)) worst = std::max(worst, r.sup_norm);
    *out = worst;
  });
}

kgeo_status kgeo_bidegree_equivariance(const kgeo_bidegree* b, int phases, double* out) {
  if (auto st = require(b != nullptr && out != nullptr, "null argument")) return st;
  return guarded([&] { *out = equivariance_check(b->rep, phases); });
}

kgeo_status kgeo_bidegree_theta(const kgeo_bidegree* b, int i, int j, kgeo_field** re,
                                kgeo_field** im) {
  if (auto st = require(b != nullptr && re != nullptr && im != nullptr, "null argument")) {
    return st;
  }
  return guarded([&] {
    const ComplexField theta = b->rep.theta(i, j);
    *re = new kgeo_field{theta.real_part()};
    *im = new kgeo_field{theta.imag_part()};
  });
}

kgeo_status kgeo_bidegree_ray(const kgeo_bidegree* b, double x0, double x1, int samples,
                              kgeo_path** out, double* trust_x_min) {
  if (auto st = require(b != nullptr && out != nullptr, "null argument")) return st;
  return guarded([&] {
    DivisorRay ray = to_geodesic_ray(b->rep, x0, x1, samples);
    if (trust_x_min != nullptr) *trust_x_min = ray.trust_x_min;
    *out = new kgeo_path{ray.to_path()};
  });
}

void kgeo_bidegree_destroy(kgeo_bidegree* b) { delete b; }

kgeo_status kgeo_path_from_series(const kgeo_series* s, kgeo_path** out) {
  if (auto st = require(s != nullptr && out != nullptr, "null argument")) return st;
  return guarded([&] { *out = new kgeo_path{PathInH::from_series(s->rep)}; });
}

kgeo_status kgeo_path_rotation_ray(const kgeo_surface* cp1, kgeo_path** out) {
  if (auto st = require(cp1 != nullptr && out != nullptr, "null argument")) return st;
  return guarded([&] {
    const RotationRay rot(cp1->rep);
    *out = new kgeo_path{PathInH::from_closures(
        KahlerMetric::fubini_study(cp1->rep), [rot](double t) { return rot.value(t); },
        [rot](double t) { return rot.dt(t); }, [rot](double t) { return rot.dtt(t); })};
  });
}

kgeo_status kgeo_path_energy(const kgeo_path* p, double t, double* out) {
  if (auto st = require(p != nullptr && out != nullptr, "null argument")) return st;
  return guarded([&] { *out = energy(p->rep, t); });
}

kgeo_status kgeo_path_length(const kgeo_path* p, double t0, double t1, double* out) {
  if (auto st = require(p != nullptr && out != nullptr, "null argument")) return st;
  return guarded([&] { *out = length(p->rep, t0, t1); });
}

kgeo_status kgeo_path_geodesic_residual(const kgeo_path* p, double t, double* sup_norm) {
  if (auto st = require(p != nullptr && sup_norm != nullptr, "null argument")) return st;
  return guarded([&] {
    auto r = geodesic_residual(p->rep, t);
    if (!std::holds_alternative<ResidualReport>(r)) {
      throw PositivityError(
          std::get<PositivityFailure>(r).describe(p->rep.base().surface()));
    }
    *sup_norm = std::get<ResidualReport>(r).sup_norm;
  });
}

kgeo_status kgeo_path_c0(const kgeo_path* p, double t, double* out) {
  if (auto st = require(p != nullptr && out != nullptr, "null argument")) return st;
  return guarded([&] { *out = p->rep.value(t).sup_norm(); });
}

void kgeo_path_destroy(kgeo_path* p) { delete p; }

kgeo_status kgeo_run_scenario(const char* config_json, const char* problem_override,
                              const char* out_dir, uint64_t seed, double tolerance_scale,
                              int* exit_code, char** report) {
  if (auto st = require(config_json != nullptr && exit_code != nullptr, "null argument")) {
    return st;
  }
  return guarded([&] {
    const ScenarioResult r =
        run_scenario(config_json, problem_override == nullptr ? "" : problem_override,
                     out_dir == nullptr ? "" : out_dir, seed, tolerance_scale);
    *exit_code = r.exit_code;
    if (report != nullptr) {
      *report = static_cast<char*>(std::malloc(r.report_text.size() + 1));
      if (*report != nullptr) {
        std::memcpy(*report, r.report_text.c_str(), r.report_text.size() + 1);
      }
    }
  });
}

void kgeo_string_free(char* s) { std::free(s); }

}  // extern "C"
