#pragma once

#include <optional>
#include <string>
#include <variant>

#include "kgeo/field.hpp"
#include "kgeo/surface.hpp"

namespace kgeo {

/// Location and value of a positivity violation.
struct PositivityFailure {
  double min_value = 0.0;
  std::size_t node = 0;
  std::string describe(const ModelSurface& surface) const;
};

/// Background metric coefficient g in ω = i·g·dz∧dz̄, strictly positive at
/// every node. Defaults: g ≡ 1 on the torus, Fubini–Study g = (1+r²)^(-2) on
/// the radial grid.
class KahlerMetric {
 public:
  static KahlerMetric flat(const ModelSurface& surface);         ///< g ≡ 1
  static KahlerMetric fubini_study(const ModelSurface& surface); ///< RadialCP1 only
  static KahlerMetric default_for(const ModelSurface& surface);
  /// Throws InvalidArgument if min g <= 0.
  static KahlerMetric from_coefficient(ScalarField g,
                                       std::optional<ScalarField> potential_tag = std::nullopt);

  const ModelSurface& surface() const { return g_.surface(); }
  const ScalarField& g() const { return g_; }
  const std::optional<ScalarField>& potential_tag() const { return potential_tag_; }
  double min_g() const;

 private:
  explicit KahlerMetric(ScalarField g, std::optional<ScalarField> tag);
  ScalarField g_;
  std::optional<ScalarField> potential_tag_;
};

using MetricOrFailure = std::variant<KahlerMetric, PositivityFailure>;

/// ω_φ = ω_base + i∂∂̄φ, i.e. g_φ = g + ∂_z∂_z̄ φ. Positivity failure is a
/// value, not an exception.
MetricOrFailure metric_from_potential(const KahlerMetric& base, const ScalarField& phi);

inline bool positive(const MetricOrFailure& m) {
  return std::holds_alternative<KahlerMetric>(m);
}

}  // namespace kgeo
