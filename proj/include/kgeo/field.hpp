#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "kgeo/surface.hpp"

namespace kgeo {

class KahlerMetric;

enum class DiffMode { Dz, Dzbar, DzDzbar };

class ComplexField;

/// Real-valued real-analytic function on a model surface, stored by nodal
/// values. On RadialCP1 the represented function depends on |z|^2 only.
class ScalarField {
 public:
  ScalarField() = default;

  static ScalarField constant(const ModelSurface& surface, double value);
  static ScalarField from_values(const ModelSurface& surface, std::vector<double> values);
  /// Torus sampling: f(x, y) on the equispaced grid.
  static ScalarField sample_xy(const ModelSurface& surface,
                               const std::function<double(double, double)>& f);
  /// Radial sampling: f(u) with u = |z|^2 on the radial grid.
  static ScalarField sample_radial(const ModelSurface& surface,
                                   const std::function<double(double)>& f);

  bool empty() const { return values_.empty(); }
  const ModelSurface& surface() const { return surface_; }
  std::span<const double> values() const { return values_; }
  double value(std::size_t node) const { return values_[node]; }

  double sup_norm() const;
  /// Plain average of the nodal values (grid mean; the area-weighted mean is
  /// integrate(f, metric) / volume).
  double mean() const;

  ScalarField& operator+=(const ScalarField& rhs);
  ScalarField& operator-=(const ScalarField& rhs);
  ScalarField& operator*=(double c);

  friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
  friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
  friend ScalarField operator*(ScalarField a, double c) { return a *= c; }
  friend ScalarField operator*(double c, ScalarField a) { return a *= c; }
  friend ScalarField operator-(ScalarField a) { return a *= -1.0; }

  /// Pointwise product, guarded against aliasing on the torus.
  friend ScalarField operator*(const ScalarField& a, const ScalarField& b);

  /// Pointwise quotient (pseudo-spectral; no band guarantee). Denominator
  /// must be bounded away from zero.
  friend ScalarField pointwise_divide(const ScalarField& num, const ScalarField& den);

 private:
  ScalarField(ModelSurface surface, std::vector<double> values);
  ModelSurface surface_;
  std::vector<double> values_;
  friend class ComplexField;
};

/// Complex-valued field. On RadialCP1 it carries an integer angular weight m:
/// the represented function is profile(r) · e^{i m θ}, and only the radial
/// profile is stored. Torus fields always have weight 0.
class ComplexField {
 public:
  ComplexField() = default;

  static ComplexField from_values(const ModelSurface& surface,
                                  std::vector<std::complex<double>> values, int weight = 0);
  /// Promote a real field (weight 0).
  explicit ComplexField(const ScalarField& real);

  bool empty() const { return values_.empty(); }
  const ModelSurface& surface() const { return surface_; }
  int weight() const { return weight_; }
  std::span<const std::complex<double>> values() const { return values_; }

  double sup_norm() const;
  ComplexField conj() const;
  /// Real/imaginary part; requires weight 0.
  ScalarField real_part() const;
  ScalarField imag_part() const;
  double max_imag() const;

  ComplexField& operator+=(const ComplexField& rhs);
  ComplexField& operator-=(const ComplexField& rhs);
  ComplexField& operator*=(std::complex<double> c);

  friend ComplexField operator+(ComplexField a, const ComplexField& b) { return a += b; }
  friend ComplexField operator-(ComplexField a, const ComplexField& b) { return a -= b; }
  friend ComplexField operator*(ComplexField a, std::complex<double> c) { return a *= c; }
  friend ComplexField operator*(std::complex<double> c, ComplexField a) { return a *= c; }
  friend ComplexField operator-(ComplexField a) { return a *= -1.0; }

  /// Pointwise product; weights add; alias-guarded on the torus.
  friend ComplexField operator*(const ComplexField& a, const ComplexField& b);

  friend ComplexField pointwise_divide(const ComplexField& num, const ScalarField& den);

 private:
  ComplexField(ModelSurface surface, std::vector<std::complex<double>> values, int weight);
  ModelSurface surface_;
  std::vector<std::complex<double>> values_;
  int weight_ = 0;
};

/// ∂/∂z, ∂/∂z̄, or ∂²/∂z∂z̄ of a field. Spectral on the torus, Chebyshev
/// collocation in s = u/(1+u) on the radial grid. DzDzbar of a real field is
/// real up to roundoff. Throws AliasingError when the grid cannot represent
/// the requested derivative.
ComplexField differentiate(const ScalarField& f, DiffMode mode);
ComplexField differentiate(const ComplexField& f, DiffMode mode);

/// Effective spectral band (torus) of a field: max |k| carrying more than
/// 1e-13 of the peak spectral magnitude. Returns 0 on RadialCP1.
int effective_band(const ScalarField& f);
int effective_band(const ComplexField& f);

/// Projection onto the modes carrying more than 1e-13 of the peak spectral
/// magnitude (Fourier on the torus, Chebyshev on the radial grid). Recursions
/// apply this after pointwise divisions, whose edge amplification would
/// otherwise compound roundoff order by order.
ScalarField denoise(const ScalarField& f);

struct Integral {
  double value = 0.0;         ///< quadrature (+ tail correction when applied)
  double tail = 0.0;          ///< tail correction that was applied
  double tail_bound = 0.0;    ///< bound on the integral mass beyond the cutoff
  bool tail_applied = false;  ///< false on the torus and for non-decaying tails
};

/// ∫_M f dVol with dVol = i·g·dz∧dz̄ and i·dz∧dz̄ = 2·dx∧dy. Spectrally exact
/// on the torus; Clenshaw–Curtis plus an algebraic cutoff-tail correction on
/// the radial grid.
Integral integrate_detailed(const ScalarField& f, const KahlerMetric& metric);
double integrate(const ScalarField& f, const KahlerMetric& metric);

/// ∫_M f dx∧dy (coordinate area element, no metric weight).
double flat_integral(const ScalarField& f);

/// ∫_M a·b dx∧dy as a direct weighted inner product of nodal values. Unlike
/// a field product this never re-represents a·b, so it is safe for
/// quadrature against noise-level densities.
double flat_inner(const ScalarField& a, const ScalarField& b);

}  // namespace kgeo
