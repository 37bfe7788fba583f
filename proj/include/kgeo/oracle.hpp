#pragma once

#include <vector>

#include "kgeo/metric.hpp"

namespace kgeo {

/// Truncated power series in t with field coefficients (a field-valued jet).
/// Used by the independent Taylor oracle; shares no recursion code with
/// extend_series.
class Jet {
 public:
  Jet() = default;
  explicit Jet(std::vector<ComplexField> coefficients);

  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  const ComplexField& coeff(int k) const;
  std::vector<ComplexField>& coeffs() { return coeffs_; }
  const std::vector<ComplexField>& coeffs() const { return coeffs_; }

 private:
  std::vector<ComplexField> coeffs_;
};

/// Cauchy product truncated at `order`.
Jet jet_mul(const Jet& a, const Jet& b, int order);
/// Long division truncated at `order`; the divisor's leading coefficient must
/// be a real field bounded away from zero.
Jet jet_div(const Jet& num, const Jet& den, int order);
/// Coefficient-wise spatial derivative.
Jet jet_differentiate(const Jet& a, DiffMode mode);

/// Independent ground truth for the Cauchy problem: solves
/// φ_tt = |∂_z φ_t|² / g_φ order by order with jet arithmetic and returns
/// θ_1..θ_K. K is capped at 10.
std::vector<ScalarField> taylor_from_evolution(const KahlerMetric& base, const ScalarField& psi0,
                                               int order);

/// The closed-form rotation family on RadialCP1:
///   φ_t(u) = log(1 + e^{2t} u) − log(1 + u),
/// an exact solution with exact t-derivatives.
struct RotationRay {
  ScalarField value(double t) const;
  ScalarField dt(double t) const;
  ScalarField dtt(double t) const;
  /// φ'(0) = 2u/(1+u), the natural initial velocity for cross-checks.
  ScalarField initial_velocity() const;

  explicit RotationRay(ModelSurface surface);
  ModelSurface surface;
};

}  // namespace kgeo
