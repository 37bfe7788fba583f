#include <doctest.h>

#include <cmath>
#include <complex>

#include "kgeo/errors.hpp"
#include "kgeo/field.hpp"
#include "kgeo/metric.hpp"
#include "kgeo/numerics.hpp"

using namespace kgeo;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

ModelSurface torus64() {
  static ModelSurface s = ModelSurface::unit_torus(64);
  return s;
}

ScalarField cos_mode(const ModelSurface& s, double amplitude, int mode) {
  return ScalarField::sample_xy(
      s, [=](double x, double) { return amplitude * std::cos(2.0 * kPi * mode * x); });
}
}  // namespace

TEST_CASE("surface construction validates its invariants") {
  CHECK_THROWS_AS(ModelSurface::unit_torus(7), InvalidArgument);
  CHECK_THROWS_AS(ModelSurface::radial_cp1(4, 4.0), InvalidArgument);
  CHECK_THROWS_AS(ModelSurface::radial_cp1(64, 1.0), InvalidArgument);
  CHECK_THROWS_AS(ModelSurface::radial_cp1(64, 0.5), InvalidArgument);
  CHECK(ModelSurface::unit_torus(8).node_count() == 64);
  CHECK(ModelSurface::radial_cp1(8, 2.0).node_count() == 8);
}

TEST_CASE("fields reject non-finite data and mismatched grids") {
  const ModelSurface t = torus64();
  CHECK_THROWS_AS(ScalarField::constant(t, std::nan("")), InvalidArgument);
  std::vector<double> short_values(3, 0.0);
  CHECK_THROWS_AS(ScalarField::from_values(t, short_values), InvalidArgument);
  const ModelSurface other = ModelSurface::unit_torus(64);
  CHECK_THROWS_AS(ScalarField::constant(t, 1.0) + ScalarField::constant(other, 1.0),
                  InvalidArgument);
}

TEST_CASE("Dz of cos(2 pi x) is -pi sin(2 pi x)") {
  const ModelSurface t = torus64();
  const ComplexField dz = differentiate(cos_mode(t, 1.0, 1), DiffMode::Dz);
  double err = 0.0;
  for (std::size_t i = 0; i < t.node_count(); ++i) {
    const std::complex<double> expect{-kPi * std::sin(2.0 * kPi * t.x(i)), 0.0};
    err = std::max(err, std::abs(dz.values()[i] - expect));
  }
  CHECK(err < 1e-13);
}

TEST_CASE("derivatives of a constant vanish in every mode") {
  for (const ModelSurface& s : {torus64(), ModelSurface::radial_cp1(64, 4.0)}) {
    const ScalarField c = ScalarField::constant(s, 3.25);
    for (DiffMode mode : {DiffMode::Dz, DiffMode::Dzbar, DiffMode::DzDzbar}) {
      CHECK(differentiate(c, mode).sup_norm() < 1e-14);
    }
  }
}

TEST_CASE("DzDzbar of cos(2 pi x) is -pi^2 cos(2 pi x) and is real") {
  const ModelSurface t = torus64();
  const ComplexField lap = differentiate(cos_mode(t, 1.0, 1), DiffMode::DzDzbar);
  CHECK(lap.max_imag() < 1e-13);
  double err = 0.0;
  for (std::size_t i = 0; i < t.node_count(); ++i) {
    err = std::max(err,
                   std::abs(lap.values()[i].real() + kPi * kPi * std::cos(2.0 * kPi * t.x(i))));
  }
  CHECK(err < 1e-12);
}

TEST_CASE("Dz and Dzbar of a real field are conjugate at every node") {
  const ModelSurface t = torus64();
  const ScalarField f = ScalarField::sample_xy(t, [](double x, double y) {
    return std::cos(2.0 * kPi * x) * std::sin(2.0 * kPi * y) + 0.3 * std::cos(4.0 * kPi * y);
  });
  CHECK((differentiate(f, DiffMode::Dz) - differentiate(f, DiffMode::Dzbar).conj()).sup_norm() <
        1e-13);

  const ModelSurface c = ModelSurface::radial_cp1(48, 3.0);
  const ScalarField g = ScalarField::sample_radial(c, [](double u) { return u / (1.0 + u); });
  const ComplexField dz = differentiate(g, DiffMode::Dz);
  const ComplexField dzbar = differentiate(g, DiffMode::Dzbar);
  CHECK(dz.weight() == -1);
  CHECK(dzbar.weight() == +1);
  CHECK((dz - dzbar.conj()).sup_norm() == 0.0);
}

TEST_CASE("radial chain rule: DzDzbar of 2s equals 2(1-u)/(1+u)^3") {
  const ModelSurface c = ModelSurface::radial_cp1(64, 4.0);
  const ScalarField f =
      ScalarField::sample_radial(c, [](double u) { return 2.0 * u / (1.0 + u); });
  const ComplexField lap = differentiate(f, DiffMode::DzDzbar);
  double err = 0.0;
  for (std::size_t j = 0; j < c.node_count(); ++j) {
    const double u = c.u(j);
    const double expect = 2.0 * (1.0 - u) / std::pow(1.0 + u, 3);
    err = std::max(err, std::abs(lap.values()[j].real() - expect));
  }
  CHECK(err < 1e-12);
  CHECK(lap.max_imag() < 1e-14);
}

TEST_CASE("aliasing guard rejects Nyquist content and band-overflow products") {
  const ModelSurface t = ModelSurface::unit_torus(16);
  const ScalarField nyquist = cos_mode(t, 1.0, 8);
  CHECK_THROWS_AS(differentiate(nyquist, DiffMode::Dz), AliasingError);

  // 4 + 4 > 16/3: the product would alias.
  const ScalarField f = cos_mode(t, 1.0, 4);
  CHECK_THROWS_AS(f * f, AliasingError);
  // 2 + 2 <= 5 is fine.
  const ScalarField g = cos_mode(t, 1.0, 2);
  CHECK_NOTHROW(g * g);
}

TEST_CASE("products stay spectrally exact inside the alias-safe band") {
  const ModelSurface t = torus64();
  const ScalarField a = cos_mode(t, 0.7, 3);
  const ScalarField b = cos_mode(t, 1.3, 5);
  const ScalarField p = a * b;
  double err = 0.0;
  for (std::size_t i = 0; i < t.node_count(); ++i) {
    err = std::max(err, std::abs(p.values()[i] - a.values()[i] * b.values()[i]));
  }
  CHECK(err == 0.0);
  CHECK(effective_band(p) == 8);
}

TEST_CASE("integrate: unit torus volume is exactly 2") {
  const ModelSurface t = torus64();
  const KahlerMetric flat = KahlerMetric::flat(t);
  CHECK(integrate(ScalarField::constant(t, 1.0), flat) == 2.0);
  CHECK(std::abs(integrate(cos_mode(t, 1.0, 1), flat)) < 1e-15);
}

TEST_CASE("integrate: divergence theorem on the torus") {
  const ModelSurface t = torus64();
  const KahlerMetric flat = KahlerMetric::flat(t);
  const ScalarField f = ScalarField::sample_xy(t, [](double x, double y) {
    return std::cos(2.0 * kPi * x) + 0.4 * std::cos(2.0 * kPi * (x + 2.0 * y));
  });
  const ScalarField lap = differentiate(f, DiffMode::DzDzbar).real_part();
  CHECK(std::abs(integrate(lap, flat)) < 1e-12);
}

TEST_CASE("integrate: Fubini-Study volume matches 2 pi within the tail bound") {
  for (double cutoff : {4.0, 10.0, 50.0}) {
    const ModelSurface c = ModelSurface::radial_cp1(128, cutoff);
    const KahlerMetric fs = KahlerMetric::fubini_study(c);
    const Integral vol = integrate_detailed(ScalarField::constant(c, 1.0), fs);
    CHECK(std::abs(vol.value - 2.0 * kPi) <= vol.tail_bound);
    CHECK(vol.tail_applied);
  }
  // At cutoff 50 the corrected value is essentially exact.
  const ModelSurface c = ModelSurface::radial_cp1(256, 50.0);
  const KahlerMetric fs = KahlerMetric::fubini_study(c);
  CHECK(std::abs(integrate(ScalarField::constant(c, 1.0), fs) - 2.0 * kPi) < 1e-8);
}

TEST_CASE("spectral derivative agrees with 4th-order finite differences at order >= 3.5") {
  std::vector<double> log_h, log_e;
  for (int n : {16, 32, 64}) {
    const ModelSurface t = ModelSurface::unit_torus(n);
    const ScalarField f = ScalarField::sample_xy(
        t, [](double x, double y) { return std::cos(2.0 * kPi * (3.0 * x + 2.0 * y)); });
    const ComplexField spectral = differentiate(f, DiffMode::Dz);
    const double h = 1.0 / n;
    double err = 0.0;
    for (std::size_t node = 0; node < t.node_count(); ++node) {
      const auto ix = static_cast<std::ptrdiff_t>(node % static_cast<std::size_t>(n));
      const auto iy = static_cast<std::ptrdiff_t>(node / static_cast<std::size_t>(n));
      const auto at = [&](std::ptrdiff_t dx, std::ptrdiff_t dy) {
        const std::size_t jx = static_cast<std::size_t>((ix + dx + n) % n);
        const std::size_t jy = static_cast<std::size_t>((iy + dy + n) % n);
        return f.values()[jy * static_cast<std::size_t>(n) + jx];
      };
      const double fx = (-at(2, 0) + 8 * at(1, 0) - 8 * at(-1, 0) + at(-2, 0)) / (12 * h);
      const double fy = (-at(0, 2) + 8 * at(0, 1) - 8 * at(0, -1) + at(0, -2)) / (12 * h);
      err = std::max(err, std::abs(spectral.values()[node] - std::complex<double>{0.5 * fx,
                                                                                  -0.5 * fy}));
    }
    log_h.push_back(std::log(h));
    log_e.push_back(std::log(err));
  }
  CHECK(fitted_slope(log_h, log_e) >= 3.5);
}

TEST_CASE("metric_from_potential: zero potential returns the base exactly") {
  const ModelSurface t = torus64();
  const KahlerMetric flat = KahlerMetric::flat(t);
  const auto m = metric_from_potential(flat, ScalarField::constant(t, 0.0));
  REQUIRE(positive(m));
  CHECK((std::get<KahlerMetric>(m).g() - flat.g()).sup_norm() == 0.0);
}

TEST_CASE("metric_from_potential: epsilon cosine perturbation") {
  const ModelSurface t = torus64();
  const KahlerMetric flat = KahlerMetric::flat(t);
  const double eps = 0.05;
  const auto m = metric_from_potential(flat, cos_mode(t, eps, 1));
  REQUIRE(positive(m));
  const KahlerMetric& gp = std::get<KahlerMetric>(m);
  double err = 0.0;
  for (std::size_t i = 0; i < t.node_count(); ++i) {
    err = std::max(err, std::abs(gp.g().values()[i] -
                                 (1.0 - eps * kPi * kPi * std::cos(2.0 * kPi * t.x(i)))));
  }
  CHECK(err < 1e-13);
}

TEST_CASE("metric_from_potential: positivity failure is a value at x = 0") {
  const ModelSurface t = torus64();
  const KahlerMetric flat = KahlerMetric::flat(t);
  const auto m = metric_from_potential(flat, cos_mode(t, 2.0 / (kPi * kPi), 1));
  REQUIRE(!positive(m));
  const auto& failure = std::get<PositivityFailure>(m);
  CHECK(failure.min_value == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(t.x(failure.node) == 0.0);
}

TEST_CASE("complex field weight bookkeeping on the radial grid") {
  const ModelSurface c = ModelSurface::radial_cp1(32, 2.0);
  const ScalarField f = ScalarField::sample_radial(c, [](double u) { return u / (1.0 + u); });
  const ComplexField dz = differentiate(f, DiffMode::Dz);
  const ComplexField prod = dz * dz.conj();
  CHECK(prod.weight() == 0);
  CHECK(prod.max_imag() < 1e-15);
  CHECK_THROWS_AS(dz.real_part(), InvalidArgument);
  CHECK_THROWS_AS(dz + dz.conj(), InvalidArgument);
  CHECK_THROWS_AS(differentiate(dz, DiffMode::Dz), InvalidArgument);
}

TEST_CASE("flat_integral matches the coordinate area element") {
  const ModelSurface t = torus64();
  CHECK(flat_integral(ScalarField::constant(t, 3.0)) == doctest::Approx(3.0).epsilon(1e-14));
  const ModelSurface c = ModelSurface::radial_cp1(128, 10.0);
  // pi * integral of 1/(1+u)^2 du = pi
  const ScalarField f =
      ScalarField::sample_radial(c, [](double u) { return 1.0 / ((1.0 + u) * (1.0 + u)); });
  CHECK(flat_integral(f) == doctest::Approx(kPi).epsilon(1e-5));
}

TEST_CASE("Fornberg weights reproduce the classic centered stencils") {
  const std::vector<double> nodes = {-2.0, -1.0, 0.0, 1.0, 2.0};
  const auto w1 = fd_weights(0.0, nodes, 1);
  CHECK(w1[0] == doctest::Approx(1.0 / 12));
  CHECK(w1[1] == doctest::Approx(-8.0 / 12));
  CHECK(w1[3] == doctest::Approx(8.0 / 12));
  const auto w2 = fd_weights(0.0, nodes, 2);
  CHECK(w2[2] == doctest::Approx(-30.0 / 12));
}
