#include "kgeo/oracle.hpp"

#include <cmath>

#include "kgeo/errors.hpp"

namespace kgeo {

Jet::Jet(std::vector<ComplexField> coefficients) : coeffs_(std::move(coefficients)) {
  if (coeffs_.empty()) throw InvalidArgument("a jet needs at least one coefficient");
}

const ComplexField& Jet::coeff(int k) const {
  if (k < 0 || k > order()) throw InvalidArgument("jet coefficient index out of range");
  return coeffs_[static_cast<std::size_t>(k)];
}

Jet jet_mul(const Jet& a, const Jet& b, int order) {
  const ModelSurface& surface = a.coeff(0).surface();
  std::vector<ComplexField> c;
  c.reserve(static_cast<std::size_t>(order) + 1);
  for (int k = 0; k <= order; ++k) {
    ComplexField acc(ScalarField::constant(surface, 0.0));
    for (int i = 0; i <= k; ++i) {
      if (i > a.order() || k - i > b.order()) continue;
      ComplexField term = a.coeff(i) * b.coeff(k - i);
      if (term.weight() != 0) {
        // Angular sectors must cancel in any jet we accumulate.
        throw InvalidArgument("jet product with unbalanced angular weight");
      }
      acc += term;
    }
    c.push_back(std::move(acc));
  }
  return Jet(std::move(c));
}

Jet jet_div(const Jet& num, const Jet& den, int order) {
  const ScalarField lead = den.coeff(0).real_part();
  double min_abs = std::abs(lead.values()[0]);
  for (double v : lead.values()) min_abs = std::min(min_abs, std::abs(v));
  if (!(min_abs > 0.0)) {
    throw PositivityError("jet division by a non-invertible leading coefficient");
  }
  std::vector<ComplexField> w;
  w.reserve(static_cast<std::size_t>(order) + 1);
  for (int k = 0; k <= order; ++k) {
    ComplexField acc = (k <= num.order())
                           ? num.coeff(k)
                           : ComplexField(ScalarField::constant(lead.surface(), 0.0));
    for (int j = 1; j <= k; ++j) {
      if (j <= den.order()) acc -= den.coeff(j) * w[static_cast<std::size_t>(k - j)];
    }
    w.push_back(pointwise_divide(acc, lead));
  }
  return Jet(std::move(w));
}

Jet jet_differentiate(const Jet& a, DiffMode mode) {
  std::vector<ComplexField> c;
  c.reserve(a.coeffs().size());
  for (const auto& f : a.coeffs()) c.push_back(differentiate(f, mode));
  return Jet(std::move(c));
}

std::vector<ScalarField> taylor_from_evolution(const KahlerMetric& base, const ScalarField& psi0,
                                               int order) {
  if (order < 1) throw InvalidArgument("taylor_from_evolution needs order >= 1");
  if (order > 10) throw InvalidArgument("taylor_from_evolution is capped at order 10");
  if (!base.surface().same_grid(psi0.surface())) {
    throw InvalidArgument("initial velocity lives on a different grid than the base metric");
  }
  std::vector<ScalarField> thetas;
  thetas.push_back(psi0);

  for (int k = 2; k <= order; ++k) {
    const int jet_order = k - 2;
    // u = φ_t as a jet: coefficient a is (a+1) θ_{a+1}.
    std::vector<ComplexField> u;
    for (int a = 0; a <= jet_order; ++a) {
      u.emplace_back(thetas[static_cast<std::size_t>(a)] * static_cast<double>(a + 1));
    }
    const Jet u_jet{std::move(u)};
    const Jet du = jet_differentiate(u_jet, DiffMode::Dz);
    const Jet du_bar = jet_differentiate(u_jet, DiffMode::Dzbar);
    const Jet num = jet_mul(du, du_bar, jet_order);

    // g_φ as a jet: g + Σ_a t^a ∂_z∂_z̄ θ_a.
    std::vector<ComplexField> g;
    g.emplace_back(base.g());
    for (int a = 1; a <= jet_order; ++a) {
      g.push_back(differentiate(thetas[static_cast<std::size_t>(a) - 1], DiffMode::DzDzbar));
    }
    const Jet rhs = jet_div(num, Jet{std::move(g)}, jet_order);

    thetas.push_back(denoise(rhs.coeff(jet_order).real_part() *
                             (1.0 / (static_cast<double>(k) * (k - 1)))));
  }
  return thetas;
}

RotationRay::RotationRay(ModelSurface s) : surface(std::move(s)) {
  if (surface.kind() != SurfaceKind::RadialCP1) {
    throw InvalidArgument("the rotation family lives on RadialCP1");
  }
}

ScalarField RotationRay::value(double t) const {
  // log(1 + e^{2t} u) - log(1 + u) = log1p((e^{2t} - 1) s), s = u/(1+u).
  const double em1 = std::expm1(2.0 * t);
  std::vector<double> v(surface.node_count());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = std::log1p(em1 * surface.s(j));
  return ScalarField::from_values(surface, std::move(v));
}

ScalarField RotationRay::dt(double t) const {
  // 2 A u / (1 + A u) = 2 A s / (1 - s + A s), A = e^{2t}.
  const double a = std::exp(2.0 * t);
  std::vector<double> v(surface.node_count());
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double s = surface.s(j);
    v[j] = 2.0 * a * s / (1.0 - s + a * s);
  }
  return ScalarField::from_values(surface, std::move(v));
}

ScalarField RotationRay::dtt(double t) const {
  // 4 A u / (1 + A u)^2 = 4 A s (1 - s) / (1 - s + A s)^2.
  const double a = std::exp(2.0 * t);
  std::vector<double> v(surface.node_count());
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double s = surface.s(j);
    const double d = 1.0 - s + a * s;
    v[j] = 4.0 * a * s * (1.0 - s) / (d * d);
  }
  return ScalarField::from_values(surface, std::move(v));
}

ScalarField RotationRay::initial_velocity() const { return dt(0.0); }

}  // namespace kgeo
