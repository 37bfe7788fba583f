#include "kgeo/metric.hpp"

#include <cmath>
#include <sstream>

#include "kgeo/errors.hpp"

namespace kgeo {

std::string PositivityFailure::describe(const ModelSurface& surface) const {
  std::ostringstream os;
  os << "metric coefficient not positive: min g = " << min_value << " at ";
  if (surface.kind() == SurfaceKind::UnitTorus) {
    os << "(x, y) = (" << surface.x(node) << ", " << surface.y(node) << ")";
  } else {
    os << "r = " << surface.r(node);
  }
  return os.str();
}

KahlerMetric::KahlerMetric(ScalarField g, std::optional<ScalarField> tag)
    : g_(std::move(g)), potential_tag_(std::move(tag)) {}

KahlerMetric KahlerMetric::flat(const ModelSurface& surface) {
  return KahlerMetric(ScalarField::constant(surface, 1.0), std::nullopt);
}

KahlerMetric KahlerMetric::fubini_study(const ModelSurface& surface) {
  if (surface.kind() != SurfaceKind::RadialCP1) {
    throw InvalidArgument("the Fubini-Study preset is defined on RadialCP1 only");
  }
  // g = (1+u)^{-2} = (1-s)^2, exact in the compactified coordinate.
  std::vector<double> v(surface.node_count());
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double w = 1.0 - surface.s(j);
    v[j] = w * w;
  }
  return KahlerMetric(ScalarField::from_values(surface, std::move(v)), std::nullopt);
}

KahlerMetric KahlerMetric::default_for(const ModelSurface& surface) {
  return surface.kind() == SurfaceKind::UnitTorus ? flat(surface) : fubini_study(surface);
}

KahlerMetric KahlerMetric::from_coefficient(ScalarField g, std::optional<ScalarField> tag) {
  double min_v = g.values().empty() ? 0.0 : g.values()[0];
  for (double v : g.values()) min_v = std::min(min_v, v);
  if (!(min_v > 0.0)) {
    throw InvalidArgument("metric coefficient must be strictly positive (min g = " +
                          std::to_string(min_v) + ")");
  }
  return KahlerMetric(std::move(g), std::move(tag));
}

double KahlerMetric::min_g() const {
  double min_v = g_.values()[0];
  for (double v : g_.values()) min_v = std::min(min_v, v);
  return min_v;
}

MetricOrFailure metric_from_potential(const KahlerMetric& base, const ScalarField& phi) {
  if (!base.surface().same_grid(phi.surface())) {
    throw InvalidArgument("potential lives on a different grid than the base metric");
  }
  const ScalarField lap = differentiate(phi, DiffMode::DzDzbar).real_part();
  ScalarField g = base.g() + lap;
  double min_v = g.values()[0];
  std::size_t arg = 0;
  for (std::size_t i = 0; i < g.values().size(); ++i) {
    if (g.values()[i] < min_v) {
      min_v = g.values()[i];
      arg = i;
    }
  }
  if (!(min_v > 0.0)) {
    return PositivityFailure{min_v, arg};
  }
  return KahlerMetric::from_coefficient(std::move(g), phi);
}

}  // namespace kgeo
