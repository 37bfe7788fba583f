#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "kgeo/ivp.hpp"
#include "kgeo/metric.hpp"

namespace kgeo {

/// A path t ↦ φ(t) in the space of potentials over a fixed base metric.
/// Backed by a truncated series (exact t-derivatives), analytic closures, or
/// a uniformly sampled list (4th-order finite differences in t, one-sided at
/// the ends; needs >= 5 samples).
class PathInH {
 public:
  using FieldFn = std::function<ScalarField(double)>;

  static PathInH from_series(const GeodesicSeries& series);
  static PathInH from_closures(KahlerMetric base, FieldFn value, FieldFn dt, FieldFn dtt);
  static PathInH from_samples(KahlerMetric base, std::vector<double> times,
                              std::vector<ScalarField> phis);

  const KahlerMetric& base() const { return base_; }
  ScalarField value(double t) const;
  ScalarField dt(double t) const;
  ScalarField dtt(double t) const;

  bool sampled() const { return !times_.empty(); }
  const std::vector<double>& sample_times() const { return times_; }

 private:
  PathInH(KahlerMetric base) : base_(std::move(base)) {}
  std::size_t sample_index(double t) const;
  ScalarField fd_derivative(double t, int order) const;

  KahlerMetric base_;
  FieldFn value_, dt_, dtt_;
  std::vector<double> times_;
  std::vector<ScalarField> phis_;
};

/// (ψ, χ)_φ = ∫_M ψ χ dVol_φ. Throws PositivityError when ω_φ fails to be a
/// metric.
double mabuchi_inner(const ScalarField& psi, const ScalarField& chi, const ScalarField& phi,
                     const KahlerMetric& base);

/// φ'' − g_φ^{-1} ∂_z φ' ∂_z̄ φ'  (the ½‖∇φ'‖² term realized with
/// ‖∇ψ‖² = 2 g^{zz̄} |∂_z ψ|²). Equals 4/g_φ times the determinant residual.
ResidualOrFailure geodesic_residual(const PathInH& path, double t);

/// D_t ψ = ∂ψ/∂t − g_φ^{zz̄} Re(∂_z ψ ∂_z̄ φ').  dpsi_dt, when absent, is
/// taken by 4th-order finite differences of `psi`.
ScalarField covariant_derivative(const PathInH& path, const PathInH::FieldFn& psi, double t,
                                 const std::optional<PathInH::FieldFn>& dpsi_dt = std::nullopt);

/// First variation of the cylinder functional against δF (must vanish at the
/// interval ends): (1/2) ∫ δF Ω² over M × [t0,t1] × S¹ with the pinned
/// cylinder circumference. Vanishes for all admissible δF exactly on
/// solutions of the degenerate equation.
double wzw_first_variation(const PathInH& path, const PathInH::FieldFn& delta_f, double t0,
                           double t1);

/// E(t) = ∫_M (φ')² dVol_φ(t).
double energy(const PathInH& path, double t);

/// ∫_{t0}^{t1} sqrt(E) dt by composite quadrature.
double length(const PathInH& path, double t0, double t1);

struct C0Profile {
  std::vector<double> times;
  std::vector<double> norms;
  bool strictly_increasing = false;
};

C0Profile c0_profile(const PathInH& path, const std::vector<double>& times);
/// Sampled paths: profile over the stored grid.
C0Profile c0_profile(const PathInH& path);

struct RayDiagnostics {
  std::vector<double> times;
  std::vector<double> energy;
  std::vector<double> c0;
  double length = 0.0;
  double speed_drift = 0.0;  ///< max |E - E_0| / E_0 (0 for the zero path)
  bool c0_strictly_increasing = false;
};

RayDiagnostics diagnostics(const PathInH& path, const std::vector<double>& times);

}  // namespace kgeo
