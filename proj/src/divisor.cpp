#include "kgeo/divisor.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include "kgeo/conventions.hpp"
#include "kgeo/errors.hpp"

namespace kgeo {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kInvarianceTol = 1e-10;

/// Polynomial in (S, S̄) with field coefficients, truncated by total degree.
struct SPoly {
  int cap = 0;
  std::map<std::pair<int, int>, ComplexField> c;

  void add(int a, int b, const ComplexField& f) {
    if (a + b > cap) return;
    auto it = c.find({a, b});
    if (it == c.end()) {
      c.emplace(std::make_pair(a, b), f);
    } else {
      it->second += f;
    }
  }
};

SPoly sp_mul(const SPoly& p, const SPoly& q, int cap) {
  SPoly out;
  out.cap = cap;
  for (const auto& [kp, fp] : p.c) {
    for (const auto& [kq, fq] : q.c) {
      const int a = kp.first + kq.first;
      const int b = kp.second + kq.second;
      if (a + b > cap) continue;
      out.add(a, b, fp * fq);
    }
  }
  return out;
}

SPoly sp_sub(const SPoly& p, const SPoly& q) {
  SPoly out = p;
  for (const auto& [k, f] : q.c) {
    auto it = out.c.find(k);
    if (it == out.c.end()) {
      out.c.emplace(k, -f);
    } else {
      it->second -= f;
    }
  }
  return out;
}

/// Coefficients of ω² = (ω̃_V + i∂∂̄φ)² as a polynomial in (S, S̄); ω² =
/// -2(ad - bc) dz∧dz̄∧dS∧dS̄ with a,b,c,d the dz∧dz̄, dz∧dS̄, dS∧dz̄, dS∧dS̄
/// components. Returns ad - bc.
SPoly equation_poly(const ExtensionForm& ext, const std::map<BidegreeSeries::Key,
                                                             BidegreeSeries::Entry>& thetas,
                    int cap) {
  SPoly a, b, c, d;
  a.cap = b.cap = c.cap = d.cap = cap;

  a.add(0, 0, ComplexField(ext.base.g()));
  a.add(1, 1, differentiate(ext.h, DiffMode::DzDzbar));
  b.add(1, 0, differentiate(ext.h, DiffMode::Dz));
  c.add(0, 1, differentiate(ext.h, DiffMode::Dzbar));
  d.add(0, 0, ComplexField(ext.h));

  for (const auto& [key, entry] : thetas) {
    const auto [i, j] = key;
    const ComplexField& th = entry.field;
    a.add(i, j, differentiate(th, DiffMode::DzDzbar));
    b.add(i, j - 1, static_cast<std::complex<double>>(j) * differentiate(th, DiffMode::Dz));
    c.add(i - 1, j, static_cast<std::complex<double>>(i) * differentiate(th, DiffMode::Dzbar));
    d.add(i - 1, j - 1, static_cast<std::complex<double>>(i * j) * th);
  }
  return sp_sub(sp_mul(a, d, cap), sp_mul(b, c, cap));
}

}  // namespace

BidegreeSeries::BidegreeSeries(ExtensionForm extension, int order)
    : extension_(std::move(extension)), order_(order) {
  if (order_ < 1) throw InvalidArgument("bidegree series order must be >= 1");
  if (!extension_.h.surface().same_grid(extension_.base.surface())) {
    throw InvalidArgument("extension data on a different grid than the base metric");
  }
}

ComplexField BidegreeSeries::theta(int i, int j) const {
  auto it = thetas_.find({i, j});
  if (it != thetas_.end()) return it->second.field;
  return ComplexField(ScalarField::constant(extension_.base.surface(), 0.0));
}

void BidegreeSeries::set(int i, int j, ComplexField field, int weight) {
  if (i < 1 || j < 1 || i + j > order_ + 1) {
    throw InvalidArgument("bidegree index out of range (1 <= i,j and i+j <= order+1)");
  }
  thetas_.insert_or_assign({i, j}, Entry{std::move(field), weight});
}

BidegreeSeries BidegreeSeries::with_theta(int i, int j, const ComplexField& field,
                                          int weight) const {
  BidegreeSeries out = *this;
  out.set(i, j, field, weight);
  if (i != j) out.set(j, i, field.conj(), -weight);
  return out;
}

BidegreeSeries solve_order(const ExtensionForm& extension, int order, int max_order) {
  if (order < 1) throw InvalidArgument("solve_order needs order >= 1");
  if (order > max_order) {
    throw InvalidArgument("solve_order capped at order " + std::to_string(max_order));
  }
  BidegreeSeries series(extension, order);
  const ScalarField& g = extension.base.g();

  for (int m = 0; m <= order - 1; ++m) {
    // The unknowns θ_{a+1,b+1} with a+b = m enter the (a,b) coefficient only
    // through g·(a+1)(b+1)·θ; everything else is determined by lower orders.
    const SPoly f = equation_poly(extension, series.thetas(), m);
    for (int a = 0; a <= m; ++a) {
      const int b = m - a;
      if (a > b) continue;  // reality: the mirror comes along for free
      auto it = f.c.find({a, b});
      ComplexField known = (it != f.c.end())
                               ? it->second
                               : ComplexField(ScalarField::constant(g.surface(), 0.0));
      ComplexField theta = pointwise_divide(
          known * std::complex<double>(-1.0 /
                                       (conventions::kDivisorOrientation * (a + 1) * (b + 1))),
          g);
      series.set(a + 1, b + 1, theta, b - a);
      if (a != b) series.set(b + 1, a + 1, theta.conj(), a - b);
    }
  }
  return series;
}

std::vector<BidegreeResidual> residual_mod_sk(const BidegreeSeries& series, int k) {
  if (k > series.order()) {
    throw InvalidArgument("residual_mod_sk order exceeds the series order");
  }
  const SPoly f = equation_poly(series.extension(), series.thetas(), k);
  std::vector<BidegreeResidual> out;
  for (int m = 0; m <= k; ++m) {
    for (int a = 0; a <= m; ++a) {
      const int b = m - a;
      auto it = f.c.find({a, b});
      out.push_back({a, b, (it != f.c.end()) ? it->second.sup_norm() : 0.0});
    }
  }
  return out;
}

double equivariance_check(const BidegreeSeries& series, int phases) {
  if (phases < 4) throw InvalidArgument("equivariance_check needs phases >= 4");
  const std::vector<double> radii = {0.125, 0.25, 0.5};
  const std::size_t nodes = series.extension().base.surface().node_count();

  double defect = 0.0;
  for (double rho : radii) {
    std::vector<double> lo(nodes, std::numeric_limits<double>::infinity());
    std::vector<double> hi(nodes, -std::numeric_limits<double>::infinity());
    for (int l = 0; l < phases; ++l) {
      const double y = 2.0 * kPi * l / phases;
      std::vector<double> acc(nodes, 0.0);
      for (const auto& [key, entry] : series.thetas()) {
        const auto [i, j] = key;
        // A content weight w makes the monomial transform as e^{i(i-j+w)y}.
        const std::complex<double> phase =
            std::pow(rho, i + j) *
            std::exp(std::complex<double>(0.0, (i - j + entry.weight) * y));
        const auto vals = entry.field.values();
        for (std::size_t p = 0; p < nodes; ++p) acc[p] += (phase * vals[p]).real();
      }
      for (std::size_t p = 0; p < nodes; ++p) {
        lo[p] = std::min(lo[p], acc[p]);
        hi[p] = std::max(hi[p], acc[p]);
      }
    }
    for (std::size_t p = 0; p < nodes; ++p) defect = std::max(defect, hi[p] - lo[p]);
  }
  return defect;
}

PathInH DivisorRay::to_path() const { return PathInH::from_samples(base, x, phi); }

DivisorRay to_geodesic_ray(const BidegreeSeries& series, double x0, double x1, int samples,
                           double ray_tolerance) {
  if (!(x0 < x1) || samples < 2) {
    throw InvalidArgument("to_geodesic_ray needs x0 < x1 and samples >= 2");
  }
  double scale = 1.0;
  for (const auto& [key, entry] : series.thetas()) {
    scale = std::max(scale, entry.field.sup_norm());
  }
  if (!series.extension().invariant) {
    throw NotInvariantError("extension is not S^1-invariant");
  }
  const double defect = equivariance_check(series, 8);
  if (defect > kInvarianceTol * scale) {
    throw NotInvariantError("bidegree series is not S^1-invariant (defect " +
                            std::to_string(defect) + ")");
  }

  // Collapse to real per-total-order coefficients c_m = Σ_{i+j=m} θ_ij.
  const ModelSurface& surface = series.extension().base.surface();
  const int m_max = series.order() + 1;
  std::vector<ScalarField> c(static_cast<std::size_t>(m_max) + 1,
                             ScalarField::constant(surface, 0.0));
  for (const auto& [key, entry] : series.thetas()) {
    const auto [i, j] = key;
    c[static_cast<std::size_t>(i + j)] += entry.field.real_part();
  }

  // Geodesic-defect bound of the reconstruction relative to the fixed base:
  // sup |Φ_tt| + sup |∂Φ_t|² / min g, with Φ = Σ c_m e^{-m x}.
  std::vector<double> c_norm(c.size(), 0.0), dc_norm(c.size(), 0.0);
  for (std::size_t m = 2; m < c.size(); ++m) {
    c_norm[m] = c[m].sup_norm();
    dc_norm[m] = differentiate(c[m], DiffMode::Dz).sup_norm();
  }
  const double min_g = series.extension().base.min_g();
  const auto defect_bound = [&](double x) {
    double second = 0.0, grad = 0.0;
    for (std::size_t m = 2; m < c.size(); ++m) {
      const double decay = std::exp(-static_cast<double>(m) * x);
      second += static_cast<double>(m * m) * c_norm[m] * decay;
      grad += static_cast<double>(m) * dc_norm[m] * decay;
    }
    return second + grad * grad / min_g;
  };

  DivisorRay ray{{}, {}, series.extension().base, 0.0, false};
  if (defect_bound(0.0) <= ray_tolerance) {
    ray.trust_x_min = 0.0;
  } else if (defect_bound(80.0) > ray_tolerance) {
    ray.trust_x_min = std::numeric_limits<double>::infinity();
  } else {
    double lo = 0.0, hi = 80.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (defect_bound(mid) <= ray_tolerance ? hi : lo) = mid;
    }
    ray.trust_x_min = hi;
  }
  ray.trusted_from_start = x0 >= ray.trust_x_min;

  ray.x.resize(samples);
  ray.phi.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    const double x = x0 + (x1 - x0) * i / (samples - 1);
    ray.x[static_cast<std::size_t>(i)] = x;
    ScalarField phi = ScalarField::constant(surface, 0.0);
    for (std::size_t m = 2; m < c.size(); ++m) {
      phi += std::exp(-conventions::kRaySubstitution * static_cast<double>(m) * x) * c[m];
    }
    ray.phi.push_back(std::move(phi));
  }
  return ray;
}

}  // namespace kgeo
