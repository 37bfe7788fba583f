#include "kgeo/surface.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

#include "kgeo/errors.hpp"

namespace kgeo {
namespace {

// FFTW plan creation is not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr double kPi = 3.141592653589793238462643383279502884;

void build_torus(detail::SurfaceData& d, int n) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  std::vector<std::complex<double>> a(static_cast<std::size_t>(n) * n);
  std::vector<std::complex<double>> b(a.size());
  auto* pa = reinterpret_cast<fftw_complex*>(a.data());
  auto* pb = reinterpret_cast<fftw_complex*>(b.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  d.plan_fwd = fftw_plan_dft_2d(n, n, pa, pb, FFTW_FORWARD, flags);
  d.plan_bwd = fftw_plan_dft_2d(n, n, pa, pb, FFTW_BACKWARD, flags);
  if (d.plan_fwd == nullptr || d.plan_bwd == nullptr) {
    throw InvalidArgument("failed to create FFT plans for torus resolution " + std::to_string(n));
  }
}

void build_radial(detail::SurfaceData& d, int m, double cutoff) {
  const int n = m - 1;  // Chebyshev degree
  const double u_max = cutoff * cutoff;
  const double s_max = u_max / (1.0 + u_max);

  d.s_nodes.resize(m);
  d.u_nodes.resize(m);
  d.r_nodes.resize(m);
  for (int j = 0; j < m; ++j) {
    const double xi = std::cos(kPi * j / n);          // 1 -> -1
    const double s = s_max * 0.5 * (1.0 - xi);        // 0 -> s_max
    d.s_nodes[j] = s;
    d.u_nodes[j] = s / (1.0 - s);
    d.r_nodes[j] = std::sqrt(d.u_nodes[j]);
  }

  auto c = [&](int i) { return (i == 0 || i == n) ? 2.0 : 1.0; };

  // Chebyshev analysis matrix: a_k = (2/(n c_k)) sum'' f_j cos(k j pi / n),
  // where the double prime halves the first and last terms.
  d.cheb_analysis.assign(static_cast<std::size_t>(m) * m, 0.0);
  for (int k = 0; k < m; ++k) {
    for (int j = 0; j < m; ++j) {
      double w = (2.0 / (n * c(k))) * std::cos(kPi * k * j / n);
      if (j == 0 || j == n) w *= 0.5;
      d.cheb_analysis[static_cast<std::size_t>(k) * m + j] = w;
    }
  }

  d.cheb_synthesis.assign(static_cast<std::size_t>(m) * m, 0.0);
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < m; ++k) {
      d.cheb_synthesis[static_cast<std::size_t>(j) * m + k] = std::cos(kPi * k * j / n);
    }
  }

  // Clenshaw–Curtis weights over [0, s_max]: integrate the interpolant using
  // int_{-1}^{1} T_k = 2/(1-k^2) for even k, and the (s_max/2) Jacobian.
  d.cc_weights.assign(m, 0.0);
  for (int k = 0; k < m; k += 2) {
    const double mk = 2.0 / (1.0 - static_cast<double>(k) * k);
    for (int j = 0; j < m; ++j) {
      d.cc_weights[j] += mk * d.cheb_analysis[static_cast<std::size_t>(k) * m + j];
    }
  }
  for (double& w : d.cc_weights) w *= 0.5 * s_max;
}

}  // namespace

namespace detail {

SurfaceData::~SurfaceData() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plan_fwd != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd));
  if (plan_bwd != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd));
}

void SurfaceData::torus_forward(const std::complex<double>* in, std::complex<double>* out) const {
  const std::size_t total = static_cast<std::size_t>(resolution) * resolution;
  fftw_execute_dft(static_cast<fftw_plan>(plan_fwd),
                   reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
  const double norm = 1.0 / static_cast<double>(total);
  for (std::size_t i = 0; i < total; ++i) out[i] *= norm;
}

void SurfaceData::torus_backward(const std::complex<double>* in, std::complex<double>* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(plan_bwd),
                   reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

int SurfaceData::wavenumber(int index) const {
  return (index <= resolution / 2) ? index : index - resolution;
}

int SurfaceData::spectrum_band(const std::complex<double>* spectrum) const {
  const int n = resolution;
  double peak = 0.0;
  for (std::size_t i = 0, total = static_cast<std::size_t>(n) * n; i < total; ++i) {
    peak = std::max(peak, std::abs(spectrum[i]));
  }
  if (peak == 0.0) return 0;
  const double threshold = 1e-13 * peak;
  int band = 0;
  for (int ky = 0; ky < n; ++ky) {
    for (int kx = 0; kx < n; ++kx) {
      if (std::abs(spectrum[static_cast<std::size_t>(ky) * n + kx]) > threshold) {
        const int b = std::max(std::abs(wavenumber(kx)), std::abs(wavenumber(ky)));
        band = std::max(band, b);
      }
    }
  }
  return band;
}

void SurfaceData::cheb_clean(std::complex<double>* values) const {
  const int m = resolution;
  std::vector<std::complex<double>> a(m);
  double peak = 0.0;
  for (int k = 0; k < m; ++k) {
    std::complex<double> acc = 0.0;
    const double* row = cheb_analysis.data() + static_cast<std::size_t>(k) * m;
    for (int j = 0; j < m; ++j) acc += row[j] * values[j];
    a[k] = acc;
    peak = std::max(peak, std::abs(acc));
  }
  if (peak == 0.0) return;
  const double threshold = 1e-13 * peak;
  for (auto& c : a) {
    if (std::abs(c) < threshold) c = 0.0;
  }
  for (int j = 0; j < m; ++j) {
    std::complex<double> acc = 0.0;
    const double* row = cheb_synthesis.data() + static_cast<std::size_t>(j) * m;
    for (int k = 0; k < m; ++k) acc += row[k] * a[k];
    values[j] = acc;
  }
}

}  // namespace detail

ModelSurface::ModelSurface(std::shared_ptr<const detail::SurfaceData> data)
    : data_(std::move(data)) {}

ModelSurface ModelSurface::unit_torus(int resolution) {
  if (resolution < 8) {
    throw InvalidArgument("torus resolution must be >= 8, got " + std::to_string(resolution));
  }
  auto d = std::make_shared<detail::SurfaceData>();
  d->kind = SurfaceKind::UnitTorus;
  d->resolution = resolution;
  build_torus(*d, resolution);
  return ModelSurface(std::move(d));
}

ModelSurface ModelSurface::radial_cp1(int resolution, double radial_cutoff) {
  if (resolution < 8) {
    throw InvalidArgument("radial resolution must be >= 8, got " + std::to_string(resolution));
  }
  if (!(radial_cutoff > 1.0) || !std::isfinite(radial_cutoff)) {
    throw InvalidArgument("radial_cutoff must be a finite real > 1");
  }
  auto d = std::make_shared<detail::SurfaceData>();
  d->kind = SurfaceKind::RadialCP1;
  d->resolution = resolution;
  d->radial_cutoff = radial_cutoff;
  build_radial(*d, resolution, radial_cutoff);
  return ModelSurface(std::move(d));
}

SurfaceKind ModelSurface::kind() const { return data_->kind; }
int ModelSurface::resolution() const { return data_->resolution; }

double ModelSurface::radial_cutoff() const {
  if (data_->kind != SurfaceKind::RadialCP1) {
    throw InvalidArgument("radial_cutoff is defined for RadialCP1 only");
  }
  return data_->radial_cutoff;
}

std::size_t ModelSurface::node_count() const {
  const auto n = static_cast<std::size_t>(data_->resolution);
  return data_->kind == SurfaceKind::UnitTorus ? n * n : n;
}

double ModelSurface::x(std::size_t node) const {
  const auto n = static_cast<std::size_t>(data_->resolution);
  return static_cast<double>(node % n) / static_cast<double>(n);
}

double ModelSurface::y(std::size_t node) const {
  const auto n = static_cast<std::size_t>(data_->resolution);
  return static_cast<double>(node / n) / static_cast<double>(n);
}

double ModelSurface::u(std::size_t node) const { return data_->u_nodes.at(node); }
double ModelSurface::s(std::size_t node) const { return data_->s_nodes.at(node); }
double ModelSurface::r(std::size_t node) const { return data_->r_nodes.at(node); }

int ModelSurface::alias_safe_band() const { return data_->resolution / 3; }

bool ModelSurface::same_grid(const ModelSurface& other) const {
  return data_ == other.data_;
}

}  // namespace kgeo
