#include "kgeo/ivp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kgeo/conventions.hpp"
#include "kgeo/errors.hpp"

namespace kgeo {

GeodesicSeries::GeodesicSeries(KahlerMetric base, std::vector<ScalarField> thetas)
    : base_(std::move(base)), thetas_(std::move(thetas)) {}

GeodesicSeries GeodesicSeries::initial(const KahlerMetric& base, const ScalarField& psi0) {
  if (!base.surface().same_grid(psi0.surface())) {
    throw InvalidArgument("initial velocity lives on a different grid than the base metric");
  }
  std::vector<ScalarField> thetas;
  thetas.push_back(psi0);
  thetas.push_back(compute_theta2(base, psi0));
  return {base, std::move(thetas)};
}

GeodesicSeries GeodesicSeries::from_thetas(const KahlerMetric& base,
                                           std::vector<ScalarField> thetas) {
  if (thetas.size() < 2) throw InvalidArgument("a series needs order >= 2");
  for (const auto& t : thetas) {
    if (!t.surface().same_grid(base.surface())) {
      throw InvalidArgument("series coefficient on a different grid than the base metric");
    }
  }
  return {base, std::move(thetas)};
}

const ScalarField& GeodesicSeries::theta(int k) const {
  if (k < 1 || k > order()) throw InvalidArgument("theta index out of range");
  return thetas_[static_cast<std::size_t>(k) - 1];
}

ScalarField compute_theta2(const KahlerMetric& base, const ScalarField& psi0) {
  const ComplexField dz = differentiate(psi0, DiffMode::Dz);
  const ScalarField grad2 = (dz * dz.conj()).real_part();
  return denoise(pointwise_divide(grad2 * 0.5, base.g()));
}

GeodesicSeries extend_series(const GeodesicSeries& series, int target_order) {
  if (target_order <= series.order()) {
    throw InvalidArgument("target order must exceed the current order");
  }
  std::vector<ScalarField> thetas = series.thetas();
  const KahlerMetric& base = series.base();

  // Cache first derivatives and Laplacians of the coefficients as they appear.
  std::vector<ComplexField> dz(thetas.size());
  std::vector<ScalarField> lap(thetas.size());
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    dz[i] = differentiate(thetas[i], DiffMode::Dz);
    lap[i] = differentiate(thetas[i], DiffMode::DzDzbar).real_part();
  }

  for (int k = series.order() + 1; k <= target_order; ++k) {
    try {
      ScalarField num = ScalarField::constant(base.surface(), 0.0);
      for (int m = 1; m <= k - 1; ++m) {
        const int j = k - m;
        num += static_cast<double>(m * j) * (dz[m - 1] * dz[j - 1].conj()).real_part();
      }
      for (int j = 1; j <= k - 2; ++j) {
        const int m = k - j;
        num -= static_cast<double>(m * (m - 1)) * (thetas[m - 1] * lap[j - 1]);
      }
      ScalarField theta_k = denoise(
          pointwise_divide(num * (1.0 / (static_cast<double>(k) * (k - 1))), base.g()));
      dz.push_back(differentiate(theta_k, DiffMode::Dz));
      lap.push_back(differentiate(theta_k, DiffMode::DzDzbar).real_part());
      thetas.push_back(std::move(theta_k));
    } catch (const AliasingError& e) {
      throw AliasingError(std::string(e.what()) + " while assembling theta_" + std::to_string(k));
    }
  }
  return GeodesicSeries::from_thetas(base, std::move(thetas));
}

GeodesicSeries solve_ivp(const KahlerMetric& base, const ScalarField& psi0, int order) {
  GeodesicSeries s = GeodesicSeries::initial(base, psi0);
  return order > 2 ? extend_series(s, order) : s;
}

ScalarField evaluate(const GeodesicSeries& series, double t, EvalOrder order) {
  const int k_max = series.order();
  ScalarField acc = ScalarField::constant(series.base().surface(), 0.0);
  switch (order) {
    case EvalOrder::Value:
      for (int k = k_max; k >= 1; --k) acc = acc * t + series.theta(k);
      acc *= t;
      break;
    case EvalOrder::Dt:
      for (int k = k_max; k >= 1; --k) acc = acc * t + static_cast<double>(k) * series.theta(k);
      break;
    case EvalOrder::Dtt:
      for (int k = k_max; k >= 2; --k) {
        acc = acc * t + static_cast<double>(k * (k - 1)) * series.theta(k);
      }
      break;
  }
  return acc;
}

ResidualOrFailure hcma_residual(const GeodesicSeries& series, double t) {
  const ScalarField phi = evaluate(series, t, EvalOrder::Value);
  const ScalarField phi_t = evaluate(series, t, EvalOrder::Dt);
  const ScalarField phi_tt = evaluate(series, t, EvalOrder::Dtt);
  MetricOrFailure m = metric_from_potential(series.base(), phi);
  if (!positive(m)) return std::get<PositivityFailure>(m);
  const KahlerMetric& g_phi = std::get<KahlerMetric>(m);

  const ComplexField dphi_t = differentiate(phi_t, DiffMode::Dz);
  const ScalarField grad2 = (dphi_t * dphi_t.conj()).real_part();
  ScalarField res = (g_phi.g() * phi_tt - grad2) * conventions::kTimeFactor;
  const double sup = res.sup_norm();
  return ResidualReport{std::move(res), sup};
}

std::optional<double> positivity_horizon(const GeodesicSeries& series, double t_max, int steps) {
  if (steps < 2) throw InvalidArgument("positivity_horizon needs steps >= 2");
  for (int i = 1; i <= steps; ++i) {
    const double t = t_max * i / steps;
    if (!positive(metric_from_potential(series.base(), evaluate(series, t)))) return t;
  }
  return std::nullopt;
}

RadiusEstimate radius_estimate(const GeodesicSeries& series, RadiusMethod method) {
  const int k_max = series.order();
  if (k_max < 4) throw InvalidArgument("radius_estimate needs order >= 4");
  RadiusEstimate est;
  est.method = method;
  est.coefficient_norms.reserve(k_max);
  for (int k = 1; k <= k_max; ++k) est.coefficient_norms.push_back(series.theta(k).sup_norm());

  const double scale = std::max(1.0, est.coefficient_norms[0]);
  bool tail_vanishes = true;
  for (int k = 2; k <= k_max; ++k) {
    if (est.coefficient_norms[k - 1] > 1e-13 * scale) tail_vanishes = false;
  }
  if (tail_vanishes) {
    est.radius = std::numeric_limits<double>::infinity();
    return est;
  }

  if (method == RadiusMethod::RatioTest) {
    // Median of the last few consecutive-norm ratios.
    std::vector<double> ratios;
    for (int k = k_max; k >= 3 && ratios.size() < 3; --k) {
      const double a = est.coefficient_norms[k - 2];
      const double b = est.coefficient_norms[k - 1];
      if (a > 0.0 && b > 0.0) ratios.push_back(a / b);
    }
    if (ratios.empty()) {
      est.radius = std::numeric_limits<double>::infinity();
      return est;
    }
    std::sort(ratios.begin(), ratios.end());
    est.radius = ratios[ratios.size() / 2];
  } else {
    // Least-squares fit of log ||theta_k|| ~ a - k log(radius) over the upper
    // half of the available orders.
    std::vector<double> ks, logs;
    for (int k = std::max(2, k_max / 2); k <= k_max; ++k) {
      const double nk = est.coefficient_norms[k - 1];
      if (nk > 0.0) {
        ks.push_back(k);
        logs.push_back(std::log(nk));
      }
    }
    if (ks.size() < 2) {
      est.radius = std::numeric_limits<double>::infinity();
      return est;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      sx += ks[i];
      sy += logs[i];
      sxx += ks[i] * ks[i];
      sxy += ks[i] * logs[i];
    }
    const double n = static_cast<double>(ks.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    est.radius = std::exp(-slope);
  }
  if (!(est.radius > 0.0)) est.radius = std::numeric_limits<double>::min();
  return est;
}

}  // namespace kgeo
