#include "kgeo/ray.hpp"

#include <algorithm>
#include <cmath>

#include "kgeo/conventions.hpp"
#include "kgeo/errors.hpp"
#include "kgeo/numerics.hpp"

namespace kgeo {
namespace {

// Determinant-residual density ¼(g_φ φ_tt − |∂_z φ_t|²) of a path at time t,
// or the positivity failure.
std::variant<ScalarField, PositivityFailure> hcma_density(const PathInH& path, double t) {
  MetricOrFailure m = metric_from_potential(path.base(), path.value(t));
  if (!positive(m)) return std::get<PositivityFailure>(m);
  const ScalarField phi_tt = path.dtt(t);
  const ComplexField d = differentiate(path.dt(t), DiffMode::Dz);
  const ScalarField grad2 = (d * d.conj()).real_part();
  return (std::get<KahlerMetric>(m).g() * phi_tt - grad2) * conventions::kTimeFactor;
}

}  // namespace

PathInH PathInH::from_series(const GeodesicSeries& series) {
  PathInH p(series.base());
  p.value_ = [series](double t) { return evaluate(series, t, EvalOrder::Value); };
  p.dt_ = [series](double t) { return evaluate(series, t, EvalOrder::Dt); };
  p.dtt_ = [series](double t) { return evaluate(series, t, EvalOrder::Dtt); };
  return p;
}

PathInH PathInH::from_closures(KahlerMetric base, FieldFn value, FieldFn dt, FieldFn dtt) {
  PathInH p(std::move(base));
  p.value_ = std::move(value);
  p.dt_ = std::move(dt);
  p.dtt_ = std::move(dtt);
  return p;
}

PathInH PathInH::from_samples(KahlerMetric base, std::vector<double> times,
                              std::vector<ScalarField> phis) {
  if (times.size() != phis.size()) throw InvalidArgument("sampled path: size mismatch");
  if (times.size() < 5) throw InvalidArgument("sampled path needs >= 5 samples");
  const double h = times[1] - times[0];
  if (!(h > 0.0)) throw InvalidArgument("sampled path times must increase");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (std::abs(times[i] - times[i - 1] - h) > 1e-9 * std::abs(h)) {
      throw InvalidArgument("sampled path needs a uniform time grid");
    }
  }
  for (const auto& f : phis) {
    if (!f.surface().same_grid(base.surface())) {
      throw InvalidArgument("sampled path field on a different grid than the base metric");
    }
  }
  PathInH p(std::move(base));
  p.times_ = std::move(times);
  p.phis_ = std::move(phis);
  return p;
}

std::size_t PathInH::sample_index(double t) const {
  const double h = times_[1] - times_[0];
  const double pos = (t - times_[0]) / h;
  const auto i = static_cast<std::ptrdiff_t>(std::llround(pos));
  if (i < 0 || i >= static_cast<std::ptrdiff_t>(times_.size()) ||
      std::abs(pos - static_cast<double>(i)) > 1e-6) {
    throw InvalidArgument("sampled path evaluated off its time grid");
  }
  return static_cast<std::size_t>(i);
}

ScalarField PathInH::fd_derivative(double t, int order) const {
  const std::size_t i = sample_index(t);
  const std::size_t n = times_.size();
  // 4th-order stencils: centered in the interior, shifted at the ends.
  const std::size_t width = std::min<std::size_t>(n, order == 1 ? 5 : 6);
  std::size_t lo = (i >= width / 2) ? i - width / 2 : 0;
  lo = std::min(lo, n - width);
  std::vector<double> nodes(times_.begin() + lo, times_.begin() + lo + width);
  const std::vector<double> w = fd_weights(t, nodes, order);
  ScalarField acc = ScalarField::constant(base_.surface(), 0.0);
  for (std::size_t j = 0; j < width; ++j) acc += w[j] * phis_[lo + j];
  return acc;
}

ScalarField PathInH::value(double t) const {
  if (!sampled()) return value_(t);
  return phis_[sample_index(t)];
}

ScalarField PathInH::dt(double t) const {
  if (!sampled()) return dt_(t);
  return fd_derivative(t, 1);
}

ScalarField PathInH::dtt(double t) const {
  if (!sampled()) return dtt_(t);
  return fd_derivative(t, 2);
}

double mabuchi_inner(const ScalarField& psi, const ScalarField& chi, const ScalarField& phi,
                     const KahlerMetric& base) {
  MetricOrFailure m = metric_from_potential(base, phi);
  if (!positive(m)) {
    throw PositivityError(std::get<PositivityFailure>(m).describe(base.surface()));
  }
  return integrate(psi * chi, std::get<KahlerMetric>(m));
}

ResidualOrFailure geodesic_residual(const PathInH& path, double t) {
  MetricOrFailure m = metric_from_potential(path.base(), path.value(t));
  if (!positive(m)) return std::get<PositivityFailure>(m);
  const KahlerMetric& g_phi = std::get<KahlerMetric>(m);
  const ScalarField phi_tt = path.dtt(t);
  const ComplexField d = differentiate(path.dt(t), DiffMode::Dz);
  const ScalarField grad2 = (d * d.conj()).real_part();
  ScalarField res = phi_tt - pointwise_divide(grad2, g_phi.g());
  const double sup = res.sup_norm();
  return ResidualReport{std::move(res), sup};
}

ScalarField covariant_derivative(const PathInH& path, const PathInH::FieldFn& psi, double t,
                                 const std::optional<PathInH::FieldFn>& dpsi_dt) {
  MetricOrFailure m = metric_from_potential(path.base(), path.value(t));
  if (!positive(m)) {
    throw PositivityError(std::get<PositivityFailure>(m).describe(path.base().surface()));
  }
  ScalarField dpsi = [&] {
    if (dpsi_dt) return (*dpsi_dt)(t);
    // 5-point centered differences of the supplied closure.
    const double h = 1e-2 * (1.0 + std::abs(t));
    std::vector<double> nodes = {t - 2 * h, t - h, t, t + h, t + 2 * h};
    const std::vector<double> w = fd_weights(t, nodes, 1);
    ScalarField acc = ScalarField::constant(path.base().surface(), 0.0);
    for (std::size_t j = 0; j < nodes.size(); ++j) acc += w[j] * psi(nodes[j]);
    return acc;
  }();
  const ComplexField dz_psi = differentiate(psi(t), DiffMode::Dz);
  const ComplexField dz_phit = differentiate(path.dt(t), DiffMode::Dz);
  const ScalarField pairing = (dz_psi * dz_phit.conj()).real_part();
  return dpsi - pointwise_divide(pairing, std::get<KahlerMetric>(m).g());
}

double wzw_first_variation(const PathInH& path, const PathInH::FieldFn& delta_f, double t0,
                           double t1) {
  const auto integrand = [&](double t) {
    auto density = hcma_density(path, t);
    if (std::holds_alternative<PositivityFailure>(density)) {
      throw PositivityError(
          std::get<PositivityFailure>(density).describe(path.base().surface()));
    }
    // Ω² = 8 · density · dx∧dy∧dt∧ds for s-independent data. On geodesics the
    // density is noise-level, so pair by direct quadrature.
    return 8.0 * flat_inner(delta_f(t), std::get<ScalarField>(density));
  };
  const double t_int = simpson_adaptive(integrand, t0, t1, 1e-12);
  return 0.5 * conventions::kCylinderCircumference * t_int;
}

double energy(const PathInH& path, double t) {
  MetricOrFailure m = metric_from_potential(path.base(), path.value(t));
  if (!positive(m)) {
    throw PositivityError(std::get<PositivityFailure>(m).describe(path.base().surface()));
  }
  const ScalarField v = path.dt(t);
  return integrate(v * v, std::get<KahlerMetric>(m));
}

double length(const PathInH& path, double t0, double t1) {
  if (!(t0 < t1)) {
    if (t0 == t1) return 0.0;
    throw InvalidArgument("length requires t0 < t1");
  }
  if (!path.sampled()) {
    return simpson_adaptive([&](double t) { return std::sqrt(std::max(0.0, energy(path, t))); },
                            t0, t1, 1e-10);
  }
  // Sampled paths can only be evaluated on their grid: composite quadrature
  // over the stored nodes inside [t0, t1].
  const auto& ts = path.sample_times();
  const double h = ts[1] - ts[0];
  std::vector<double> speeds;
  std::vector<double> nodes;
  for (double t : ts) {
    if (t >= t0 - 1e-9 * h && t <= t1 + 1e-9 * h) {
      nodes.push_back(t);
      speeds.push_back(std::sqrt(std::max(0.0, energy(path, t))));
    }
  }
  if (nodes.size() < 2 || std::abs(nodes.front() - t0) > 1e-6 * h ||
      std::abs(nodes.back() - t1) > 1e-6 * h) {
    throw InvalidArgument("length over a sampled path needs grid-aligned endpoints");
  }
  // Simpson over an odd count; a trapezoid closes an even tail.
  double acc = 0.0;
  std::size_t n = nodes.size();
  std::size_t simpson_end = (n % 2 == 1) ? n : n - 1;
  for (std::size_t i = 0; i + 2 < simpson_end + 1; i += 2) {
    acc += (h / 3.0) * (speeds[i] + 4.0 * speeds[i + 1] + speeds[i + 2]);
  }
  if (n % 2 == 0) acc += 0.5 * h * (speeds[n - 2] + speeds[n - 1]);
  return acc;
}

C0Profile c0_profile(const PathInH& path, const std::vector<double>& times) {
  C0Profile out;
  out.times = times;
  out.norms.reserve(times.size());
  for (double t : times) out.norms.push_back(path.value(t).sup_norm());
  out.strictly_increasing = times.size() > 1;
  for (std::size_t i = 1; i < out.norms.size(); ++i) {
    if (!(out.norms[i] > out.norms[i - 1])) out.strictly_increasing = false;
  }
  return out;
}

C0Profile c0_profile(const PathInH& path) {
  if (!path.sampled()) {
    throw InvalidArgument("c0_profile without explicit times needs a sampled path");
  }
  return c0_profile(path, path.sample_times());
}

RayDiagnostics diagnostics(const PathInH& path, const std::vector<double>& times) {
  if (times.size() < 2) throw InvalidArgument("diagnostics needs at least two times");
  RayDiagnostics d;
  d.times = times;
  d.energy.reserve(times.size());
  for (double t : times) d.energy.push_back(energy(path, t));
  const C0Profile prof = c0_profile(path, times);
  d.c0 = prof.norms;
  d.c0_strictly_increasing = prof.strictly_increasing;
  d.length = length(path, times.front(), times.back());
  const double e0 = d.energy.front();
  double drift = 0.0;
  for (double e : d.energy) drift = std::max(drift, std::abs(e - e0));
  d.speed_drift = (e0 > 0.0) ? drift / e0 : 0.0;
  return d;
}

}  // namespace kgeo
