#include "kgeo/field.hpp"

#include <algorithm>
#include <cmath>

#include "kgeo/conventions.hpp"
#include "kgeo/errors.hpp"
#include "kgeo/metric.hpp"

namespace kgeo {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kNyquistContentTol = 1e-6;
constexpr double kChebTailTol = 1e-6;

void check_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) throw InvalidArgument("field contains a non-finite value");
  }
}

void check_finite(std::span<const std::complex<double>> v) {
  for (const auto& x : v) {
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) {
      throw InvalidArgument("field contains a non-finite value");
    }
  }
}

void check_same_grid(const ModelSurface& a, const ModelSurface& b) {
  if (!a.same_grid(b)) throw InvalidArgument("fields live on different grids");
}

std::vector<std::complex<double>> to_complex(std::span<const double> v) {
  std::vector<std::complex<double>> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
  return out;
}

int torus_band_of(const ModelSurface& surface, std::span<const std::complex<double>> values) {
  const auto& d = surface.data();
  std::vector<std::complex<double>> spec(values.size());
  d.torus_forward(values.data(), spec.data());
  return d.spectrum_band(spec.data());
}

void guard_torus_product(const ModelSurface& surface, int band_a, int band_b) {
  const int limit = surface.alias_safe_band();
  if (band_a + band_b > limit) {
    throw AliasingError("pointwise product would exceed the alias-safe band: " +
                        std::to_string(band_a) + " + " + std::to_string(band_b) + " > " +
                        std::to_string(limit) + " at resolution " +
                        std::to_string(surface.resolution()));
  }
}

// Spectral multiplier for the requested derivative at mode (kx, ky); modes at
// the Nyquist line get zero.
std::complex<double> torus_multiplier(DiffMode mode, int kx, int ky, int n) {
  if (std::abs(kx) == n / 2 || std::abs(ky) == n / 2) return 0.0;
  const std::complex<double> dz{kPi * ky, kPi * kx};
  const std::complex<double> dzbar{-kPi * ky, kPi * kx};
  switch (mode) {
    case DiffMode::Dz:
      return dz;
    case DiffMode::Dzbar:
      return dzbar;
    case DiffMode::DzDzbar:
      return dz * dzbar;
  }
  return 0.0;
}

ComplexField torus_differentiate(const ModelSurface& surface,
                                 std::span<const std::complex<double>> values, DiffMode mode) {
  const auto& d = surface.data();
  const int n = surface.resolution();
  std::vector<std::complex<double>> spec(values.size());
  d.torus_forward(values.data(), spec.data());

  // Drop sub-roundoff modes before multiplying: the |k|^2 factor of the
  // Laplacian would otherwise lift the noise floor into the detected band.
  double clean_peak = 0.0;
  for (const auto& v : spec) clean_peak = std::max(clean_peak, std::abs(v));
  const double clean_threshold = 1e-13 * clean_peak;
  for (auto& v : spec) {
    if (std::abs(v) < clean_threshold) v = 0.0;
  }

  // Reject genuine Nyquist-band content: its derivative is not representable.
  double peak = 0.0, nyq = 0.0;
  for (int ky = 0; ky < n; ++ky) {
    for (int kx = 0; kx < n; ++kx) {
      const double mag = std::abs(spec[static_cast<std::size_t>(ky) * n + kx]);
      peak = std::max(peak, mag);
      if (std::abs(d.wavenumber(kx)) == n / 2 || std::abs(d.wavenumber(ky)) == n / 2) {
        nyq = std::max(nyq, mag);
      }
    }
  }
  if (peak > 0.0 && nyq > kNyquistContentTol * peak) {
    throw AliasingError("resolution " + std::to_string(n) +
                        " too small to represent the requested derivative "
                        "(Nyquist-band content)");
  }

  for (int ky = 0; ky < n; ++ky) {
    for (int kx = 0; kx < n; ++kx) {
      spec[static_cast<std::size_t>(ky) * n + kx] *=
          torus_multiplier(mode, d.wavenumber(kx), d.wavenumber(ky), n);
    }
  }
  std::vector<std::complex<double>> out(values.size());
  d.torus_backward(spec.data(), out.data());
  return ComplexField::from_values(surface, std::move(out), 0);
}

// d/ds of nodal values through Chebyshev coefficient space: analysis, drop
// sub-roundoff modes, derivative recurrence, synthesis. Roundoff stays O(M ε)
// where the collocation matrix would give O(M^2 ε), which matters because the
// recursions divide by metric coefficients that are tiny at the outer edge.
// Throws when the top coefficients carry genuine unresolved content.
std::vector<std::complex<double>> radial_dds_spectral(const detail::SurfaceData& d,
                                                      std::span<const std::complex<double>> v) {
  const int m = d.resolution;
  const int n = m - 1;
  std::vector<std::complex<double>> a(m);
  double peak = 0.0;
  for (int k = 0; k < m; ++k) {
    std::complex<double> acc = 0.0;
    const double* row = d.cheb_analysis.data() + static_cast<std::size_t>(k) * m;
    for (int j = 0; j < m; ++j) acc += row[j] * v[j];
    a[k] = acc;
    peak = std::max(peak, std::abs(acc));
  }
  if (peak > 0.0) {
    double tail = 0.0;
    for (int k = m - 3; k < m; ++k) tail = std::max(tail, std::abs(a[k]));
    if (tail > kChebTailTol * peak) {
      throw AliasingError("radial resolution " + std::to_string(m) +
                          " too small to represent the requested derivative "
                          "(Chebyshev tail not resolved)");
    }
    const double threshold = 1e-13 * peak;
    for (auto& c : a) {
      if (std::abs(c) < threshold) c = 0.0;
    }
  }
  // Derivative coefficients on [-1,1] (classical recurrence in the halved-c0
  // convention), then map by dxi/ds = -2/s_max.
  std::vector<std::complex<double>> c(m), dd(static_cast<std::size_t>(m) + 1, 0.0);
  c[0] = 2.0 * a[0];
  for (int k = 1; k < m; ++k) c[k] = a[k];
  for (int k = n; k >= 1; --k) {
    dd[static_cast<std::size_t>(k) - 1] = dd[static_cast<std::size_t>(k) + 1] + 2.0 * k * c[k];
  }
  std::vector<std::complex<double>> b(m);
  b[0] = 0.5 * dd[0];
  for (int k = 1; k < m; ++k) b[k] = dd[k];
  const double s_max = d.s_nodes[m - 1];
  const double scale = -2.0 / s_max;
  std::vector<std::complex<double>> out(m);
  for (int j = 0; j < m; ++j) {
    std::complex<double> acc = 0.0;
    const double* row = d.cheb_synthesis.data() + static_cast<std::size_t>(j) * m;
    for (int k = 0; k < m; ++k) acc += row[k] * b[k];
    out[j] = scale * acc;
  }
  return out;
}

ComplexField radial_differentiate(const ModelSurface& surface,
                                  std::span<const std::complex<double>> values, DiffMode mode,
                                  int weight) {
  if (weight != 0) {
    throw InvalidArgument("derivatives of fields with nonzero angular weight are not supported");
  }
  const auto& d = surface.data();
  const int m = surface.resolution();
  // dF/du = (1-s)^2 dF/ds on the compactified grid.
  const std::vector<std::complex<double>> dds = radial_dds_spectral(d, values);
  std::vector<std::complex<double>> dfdu(values.size());
  for (int j = 0; j < m; ++j) {
    const double w = (1.0 - d.s_nodes[j]);
    dfdu[j] = w * w * dds[j];
  }
  if (mode == DiffMode::DzDzbar) {
    // d/du (u dF/du)
    std::vector<std::complex<double>> e(values.size());
    for (int j = 0; j < m; ++j) e[j] = d.u_nodes[j] * dfdu[j];
    const std::vector<std::complex<double>> dde = radial_dds_spectral(d, e);
    std::vector<std::complex<double>> out(values.size());
    for (int j = 0; j < m; ++j) {
      const double w = (1.0 - d.s_nodes[j]);
      out[j] = w * w * dde[j];
    }
    return ComplexField::from_values(surface, std::move(out), 0);
  }
  // Dz f = F'(u) zbar -> profile r F'(u), weight -1; Dzbar mirrors at +1.
  std::vector<std::complex<double>> out(values.size());
  for (int j = 0; j < m; ++j) out[j] = d.r_nodes[j] * dfdu[j];
  return ComplexField::from_values(surface, std::move(out), mode == DiffMode::Dz ? -1 : +1);
}

struct DuIntegral {
  double main = 0.0;
  double abs_main = 0.0;
  double tail = 0.0;
  double tail_bound = 0.0;
  bool tail_applied = false;
};

// ∫_0^{u_max} H du over the radial grid plus a two-term algebraic tail
// extrapolation (H ~ a/u^2 + b/u^3 beyond the cutoff, fitted from the two
// outermost nodes). The correction is only applied when the integrand
// actually decays; the estimated mass beyond the cutoff is reported either
// way.
DuIntegral radial_du_integral(const ModelSurface& surface, std::span<const double> h) {
  const auto& d = surface.data();
  const int m = surface.resolution();
  DuIntegral out;
  long double acc = 0.0L, acc_abs = 0.0L;
  for (int j = 0; j < m; ++j) {
    const double w = 1.0 - d.s_nodes[j];
    const double term = d.cc_weights[j] * h[j] / (w * w);
    acc += term;
    acc_abs += std::abs(term);
  }
  out.main = static_cast<double>(acc);
  out.abs_main = static_cast<double>(acc_abs);

  const double ua = d.u_nodes[m - 2], ub = d.u_nodes[m - 1];
  const double ha = h[m - 2], hb = h[m - 1];
  const double p = 1.0 / ua, q = 1.0 / ub;
  const double det = p * p * q * q * (q - p);
  double tail = 0.0;
  if (det != 0.0) {
    const double alpha = (ha * q * q * q - hb * p * p * p) / det;
    const double beta = (hb * p * p - ha * q * q) / det;
    tail = alpha / ub + beta / (2.0 * ub * ub);
  }
  const bool decaying = std::abs(hb) <= std::abs(ha) && ub >= 4.0;
  const bool small = std::abs(tail) <= 0.15 * (out.abs_main + 1e-300);
  if (decaying && small) {
    out.tail = tail;
    out.tail_applied = true;
    out.tail_bound = (std::abs(tail) + std::abs(hb) * ub) * (3.0 / ub);
  } else {
    out.tail = 0.0;
    out.tail_applied = false;
    out.tail_bound = 2.0 * std::abs(hb) * ub;
  }
  return out;
}

}  // namespace

// --- ScalarField -------------------------------------------------------------

ScalarField::ScalarField(ModelSurface surface, std::vector<double> values)
    : surface_(std::move(surface)), values_(std::move(values)) {}

ScalarField ScalarField::constant(const ModelSurface& surface, double value) {
  if (!std::isfinite(value)) throw InvalidArgument("constant field value must be finite");
  return {surface, std::vector<double>(surface.node_count(), value)};
}

ScalarField ScalarField::from_values(const ModelSurface& surface, std::vector<double> values) {
  if (values.size() != surface.node_count()) {
    throw InvalidArgument("value array size does not match the grid");
  }
  check_finite(values);
  return {surface, std::move(values)};
}

ScalarField ScalarField::sample_xy(const ModelSurface& surface,
                                   const std::function<double(double, double)>& f) {
  if (surface.kind() != SurfaceKind::UnitTorus) {
    throw InvalidArgument("sample_xy requires a torus surface");
  }
  std::vector<double> v(surface.node_count());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(surface.x(i), surface.y(i));
  check_finite(v);
  return {surface, std::move(v)};
}

ScalarField ScalarField::sample_radial(const ModelSurface& surface,
                                       const std::function<double(double)>& f) {
  if (surface.kind() != SurfaceKind::RadialCP1) {
    throw InvalidArgument("sample_radial requires a radial surface");
  }
  std::vector<double> v(surface.node_count());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(surface.u(i));
  check_finite(v);
  return {surface, std::move(v)};
}

double ScalarField::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double ScalarField::mean() const {
  long double acc = 0.0L;
  for (double v : values_) acc += v;
  return values_.empty() ? 0.0 : static_cast<double>(acc / values_.size());
}

ScalarField& ScalarField::operator+=(const ScalarField& rhs) {
  check_same_grid(surface_, rhs.surface_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += rhs.values_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& rhs) {
  check_same_grid(surface_, rhs.surface_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= rhs.values_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(double c) {
  for (double& v : values_) v *= c;
  return *this;
}

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  check_same_grid(a.surface_, b.surface_);
  if (a.surface_.kind() == SurfaceKind::UnitTorus) {
    guard_torus_product(a.surface_, torus_band_of(a.surface_, to_complex(a.values_)),
                        torus_band_of(b.surface_, to_complex(b.values_)));
  }
  std::vector<double> v(a.values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.values_[i] * b.values_[i];
  return {a.surface_, std::move(v)};
}

ScalarField pointwise_divide(const ScalarField& num, const ScalarField& den) {
  check_same_grid(num.surface_, den.surface_);
  std::vector<double> v(num.values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (den.values_[i] == 0.0) throw InvalidArgument("pointwise division by zero");
    v[i] = num.values_[i] / den.values_[i];
  }
  return {num.surface_, std::move(v)};
}

// --- ComplexField ------------------------------------------------------------

ComplexField::ComplexField(ModelSurface surface, std::vector<std::complex<double>> values,
                           int weight)
    : surface_(std::move(surface)), values_(std::move(values)), weight_(weight) {}

ComplexField ComplexField::from_values(const ModelSurface& surface,
                                       std::vector<std::complex<double>> values, int weight) {
  if (values.size() != surface.node_count()) {
    throw InvalidArgument("value array size does not match the grid");
  }
  if (surface.kind() == SurfaceKind::UnitTorus && weight != 0) {
    throw InvalidArgument("torus fields have angular weight 0");
  }
  check_finite(values);
  return {surface, std::move(values), weight};
}

ComplexField::ComplexField(const ScalarField& real)
    : surface_(real.surface()), values_(to_complex(real.values())), weight_(0) {}

double ComplexField::sup_norm() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

ComplexField ComplexField::conj() const {
  std::vector<std::complex<double>> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::conj(values_[i]);
  return {surface_, std::move(v), -weight_};
}

ScalarField ComplexField::real_part() const {
  if (weight_ != 0) throw InvalidArgument("real part requires angular weight 0");
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i].real();
  return ScalarField::from_values(surface_, std::move(v));
}

ScalarField ComplexField::imag_part() const {
  if (weight_ != 0) throw InvalidArgument("imaginary part requires angular weight 0");
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i].imag();
  return ScalarField::from_values(surface_, std::move(v));
}

double ComplexField::max_imag() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v.imag()));
  return m;
}

ComplexField& ComplexField::operator+=(const ComplexField& rhs) {
  check_same_grid(surface_, rhs.surface_);
  if (weight_ != rhs.weight_) {
    throw InvalidArgument("cannot add fields with different angular weights");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += rhs.values_[i];
  return *this;
}

ComplexField& ComplexField::operator-=(const ComplexField& rhs) {
  check_same_grid(surface_, rhs.surface_);
  if (weight_ != rhs.weight_) {
    throw InvalidArgument("cannot subtract fields with different angular weights");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= rhs.values_[i];
  return *this;
}

ComplexField& ComplexField::operator*=(std::complex<double> c) {
  for (auto& v : values_) v *= c;
  return *this;
}

ComplexField operator*(const ComplexField& a, const ComplexField& b) {
  check_same_grid(a.surface_, b.surface_);
  if (a.surface_.kind() == SurfaceKind::UnitTorus) {
    guard_torus_product(a.surface_, torus_band_of(a.surface_, a.values_),
                        torus_band_of(b.surface_, b.values_));
  }
  std::vector<std::complex<double>> v(a.values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.values_[i] * b.values_[i];
  return {a.surface_, std::move(v), a.weight_ + b.weight_};
}

ComplexField pointwise_divide(const ComplexField& num, const ScalarField& den) {
  check_same_grid(num.surface(), den.surface());
  std::vector<std::complex<double>> v(num.values().begin(), num.values().end());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (den.values()[i] == 0.0) throw InvalidArgument("pointwise division by zero");
    v[i] /= den.values()[i];
  }
  return ComplexField::from_values(num.surface(), std::move(v), num.weight());
}

// --- calculus ----------------------------------------------------------------

ComplexField differentiate(const ScalarField& f, DiffMode mode) {
  if (f.empty()) throw InvalidArgument("differentiate: empty field");
  if (f.surface().kind() == SurfaceKind::UnitTorus) {
    return torus_differentiate(f.surface(), to_complex(f.values()), mode);
  }
  return radial_differentiate(f.surface(), to_complex(f.values()), mode, 0);
}

ComplexField differentiate(const ComplexField& f, DiffMode mode) {
  if (f.empty()) throw InvalidArgument("differentiate: empty field");
  if (f.surface().kind() == SurfaceKind::UnitTorus) {
    return torus_differentiate(f.surface(), f.values(), mode);
  }
  return radial_differentiate(f.surface(), f.values(), mode, f.weight());
}

int effective_band(const ScalarField& f) {
  if (f.surface().kind() != SurfaceKind::UnitTorus) return 0;
  return torus_band_of(f.surface(), to_complex(f.values()));
}

int effective_band(const ComplexField& f) {
  if (f.surface().kind() != SurfaceKind::UnitTorus) return 0;
  return torus_band_of(f.surface(), f.values());
}

ScalarField denoise(const ScalarField& f) {
  const auto& d = f.surface().data();
  std::vector<std::complex<double>> buf = to_complex(f.values());
  if (f.surface().kind() == SurfaceKind::UnitTorus) {
    std::vector<std::complex<double>> spec(buf.size());
    d.torus_forward(buf.data(), spec.data());
    double peak = 0.0;
    for (const auto& v : spec) peak = std::max(peak, std::abs(v));
    const double threshold = 1e-13 * peak;
    for (auto& v : spec) {
      if (std::abs(v) < threshold) v = 0.0;
    }
    d.torus_backward(spec.data(), buf.data());
  } else {
    d.cheb_clean(buf.data());
  }
  std::vector<double> out(buf.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = buf[i].real();
  return ScalarField::from_values(f.surface(), std::move(out));
}

Integral integrate_detailed(const ScalarField& f, const KahlerMetric& metric) {
  check_same_grid(f.surface(), metric.surface());
  Integral out;
  if (f.surface().kind() == SurfaceKind::UnitTorus) {
    // ∫ f g · 2 dx dy, exact for band-limited data.
    long double acc = 0.0L;
    const auto fv = f.values();
    const auto gv = metric.g().values();
    for (std::size_t i = 0; i < fv.size(); ++i) acc += fv[i] * gv[i];
    out.value = conventions::kAreaFactor * static_cast<double>(acc / fv.size());
    return out;
  }
  const std::size_t m = f.surface().node_count();
  std::vector<double> h(m);
  for (std::size_t j = 0; j < m; ++j) h[j] = f.values()[j] * metric.g().values()[j];
  const DuIntegral du = radial_du_integral(f.surface(), h);
  const double two_pi = conventions::kCylinderCircumference;
  out.value = two_pi * (du.main + du.tail);
  out.tail = two_pi * du.tail;
  out.tail_bound = two_pi * du.tail_bound;
  out.tail_applied = du.tail_applied;
  return out;
}

double integrate(const ScalarField& f, const KahlerMetric& metric) {
  return integrate_detailed(f, metric).value;
}

double flat_integral(const ScalarField& f) {
  if (f.surface().kind() == SurfaceKind::UnitTorus) return f.mean();
  std::vector<double> h(f.values().begin(), f.values().end());
  const DuIntegral du = radial_du_integral(f.surface(), h);
  return 0.5 * conventions::kCylinderCircumference * (du.main + du.tail);
}

double flat_inner(const ScalarField& a, const ScalarField& b) {
  check_same_grid(a.surface(), b.surface());
  const auto av = a.values();
  const auto bv = b.values();
  if (a.surface().kind() == SurfaceKind::UnitTorus) {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < av.size(); ++i) acc += av[i] * bv[i];
    return static_cast<double>(acc / av.size());
  }
  std::vector<double> h(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) h[i] = av[i] * bv[i];
  const DuIntegral du = radial_du_integral(a.surface(), h);
  return 0.5 * conventions::kCylinderCircumference * (du.main + du.tail);
}

}  // namespace kgeo
