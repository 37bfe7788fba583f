#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace kgeo {

enum class SurfaceKind { UnitTorus, RadialCP1 };

namespace detail {
struct SurfaceData;
}

/// One of the two supported model surfaces.
///
/// UnitTorus: C/(Z+iZ) with coordinate z = x+iy, x,y in [0,1), discretized on
/// an N×N equispaced grid (N = resolution); fields are band-limited and all
/// calculus is Fourier-spectral.
///
/// RadialCP1: the rotationally symmetric reduction of CP^1 in the affine
/// chart, fields depend on u = |z|^2 only. The grid holds `resolution`
/// Chebyshev–Gauss–Lobatto nodes in the compactified coordinate
/// s = u/(1+u) over [0, s_max] with s_max = cutoff^2/(1+cutoff^2).
///
/// Instances are immutable and cheap to copy; grid tables and transform plans
/// are shared.
class ModelSurface {
 public:
  /// Empty handle; any operation other than same_grid/valid is undefined
  /// until assigned from one of the factories.
  ModelSurface() = default;
  bool valid() const { return data_ != nullptr; }

  static ModelSurface unit_torus(int resolution);
  static ModelSurface radial_cp1(int resolution, double radial_cutoff);

  SurfaceKind kind() const;
  int resolution() const;
  /// Outer radius of the radial grid (RadialCP1 only).
  double radial_cutoff() const;

  std::size_t node_count() const;

  // Torus node coordinates (node index = iy*N + ix).
  double x(std::size_t node) const;
  double y(std::size_t node) const;
  // Radial node coordinates.
  double u(std::size_t node) const;  ///< |z|^2
  double s(std::size_t node) const;  ///< u/(1+u)
  double r(std::size_t node) const;  ///< |z|

  /// Largest band a pointwise product may occupy without aliasing risk
  /// (2/3 of the Nyquist band). Torus only.
  int alias_safe_band() const;

  /// Same shared grid (fields are only compatible within one instance).
  bool same_grid(const ModelSurface& other) const;

  const detail::SurfaceData& data() const { return *data_; }

 private:
  explicit ModelSurface(std::shared_ptr<const detail::SurfaceData> data);
  std::shared_ptr<const detail::SurfaceData> data_;
};

namespace detail {

/// Spectral engine internals shared by fields on one surface.
struct SurfaceData {
  SurfaceKind kind;
  int resolution = 0;
  double radial_cutoff = 0.0;

  // --- torus ---
  // Forward transform produces the normalized spectrum
  //   F[k] = (1/N^2) sum_j f[j] e^{-2 pi i k.j / N}.
  void torus_forward(const std::complex<double>* in, std::complex<double>* out) const;
  void torus_backward(const std::complex<double>* in, std::complex<double>* out) const;
  int wavenumber(int index) const;  ///< signed k for index in [0, N)

  /// Effective band of a normalized spectrum: max over modes carrying more
  /// than 1e-13 of the peak magnitude of max(|kx|, |ky|).
  int spectrum_band(const std::complex<double>* spectrum) const;

  // --- radial CP1 ---
  std::vector<double> s_nodes;   // ascending, s_nodes[0] = 0
  std::vector<double> u_nodes;
  std::vector<double> r_nodes;
  std::vector<double> cc_weights;     // integral over [0, s_max] of interpolant
  std::vector<double> cheb_analysis;  // row-major M×M, values -> Chebyshev coefficients
  std::vector<double> cheb_synthesis; // row-major M×M, coefficients -> values

  /// Project onto the Chebyshev modes carrying more than 1e-13 of the peak
  /// coefficient magnitude (drops roundoff spikes that differentiation would
  /// amplify).
  void cheb_clean(std::complex<double>* values) const;

  SurfaceData() = default;
  ~SurfaceData();
  SurfaceData(const SurfaceData&) = delete;
  SurfaceData& operator=(const SurfaceData&) = delete;

  void* plan_fwd = nullptr;  // fftw plans (torus)
  void* plan_bwd = nullptr;
};

}  // namespace detail
}  // namespace kgeo
