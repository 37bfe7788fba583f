#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "kgeo/metric.hpp"

namespace kgeo {

/// Truncated power-series solution φ(x,t) = Σ_{k≥1} θ_k(x) t^k of the Cauchy
/// problem:  θ_1 is the initial velocity, φ(·,0) = 0 by construction, and
/// each higher θ_k is determined by annihilating the t^(k-2) coefficient of
/// the determinant residual.
class GeodesicSeries {
 public:
  /// Order-2 series from the initial velocity: (ψ0, θ_2).
  static GeodesicSeries initial(const KahlerMetric& base, const ScalarField& psi0);
  /// Assemble from explicit coefficients (synthetic/testing entry point).
  static GeodesicSeries from_thetas(const KahlerMetric& base, std::vector<ScalarField> thetas);

  int order() const { return static_cast<int>(thetas_.size()); }
  const KahlerMetric& base() const { return base_; }
  /// θ_k, 1-based.
  const ScalarField& theta(int k) const;
  const std::vector<ScalarField>& thetas() const { return thetas_; }

 private:
  GeodesicSeries(KahlerMetric base, std::vector<ScalarField> thetas);
  KahlerMetric base_;
  std::vector<ScalarField> thetas_;
};

/// θ_2 = |∂_z ψ0|² / (2 g).
ScalarField compute_theta2(const KahlerMetric& base, const ScalarField& psi0);

/// Extend to the target order via the quadratic recursion
///   k(k-1) g θ_k = Σ_{m+j=k} m j ∂_zθ_m ∂_z̄θ_j − Σ_{m+j=k, m≥2} m(m-1) θ_m ∂_z∂_z̄θ_j.
/// Throws AliasingError naming the first order whose assembly would overflow
/// the alias-safe band.
GeodesicSeries extend_series(const GeodesicSeries& series, int target_order);

/// Convenience: initial(base, psi0) extended to `order`.
GeodesicSeries solve_ivp(const KahlerMetric& base, const ScalarField& psi0, int order);

enum class EvalOrder { Value, Dt, Dtt };

/// Horner evaluation of the truncated series (or its first/second
/// t-derivative) at time t.
ScalarField evaluate(const GeodesicSeries& series, double t, EvalOrder order = EvalOrder::Value);

struct ResidualReport {
  ScalarField field;
  double sup_norm = 0.0;
};
using ResidualOrFailure = std::variant<ResidualReport, PositivityFailure>;

/// Determinant residual R(t) = ¼ (g_φ φ_tt − |∂_z φ_t|²) of the truncated
/// series; O(t^{K-1}) for an order-K series.
ResidualOrFailure hcma_residual(const GeodesicSeries& series, double t);

/// First sampled t in (0, t_max] where ω_φ positivity fails, or nullopt.
std::optional<double> positivity_horizon(const GeodesicSeries& series, double t_max, int steps);

enum class RadiusMethod { RatioTest, RootTest };

struct RadiusEstimate {
  double radius = 0.0;  ///< +inf when the tail vanishes
  RadiusMethod method = RadiusMethod::RatioTest;
  std::vector<double> coefficient_norms;  ///< sup-norms of θ_1..θ_K
};

/// Convergence-radius estimate from the coefficient sup-norms. Requires
/// order >= 4.
RadiusEstimate radius_estimate(const GeodesicSeries& series,
                               RadiusMethod method = RadiusMethod::RatioTest);

}  // namespace kgeo
