#include "kgeo/numerics.hpp"

#include <cmath>
#include <cstddef>

#include "kgeo/errors.hpp"

namespace kgeo {

std::vector<double> fd_weights(double x0, const std::vector<double>& nodes, int order) {
  // B. Fornberg, "Generation of finite difference formulas on arbitrarily
  // spaced grids", Math. Comp. 51 (1988).
  const int n = static_cast<int>(nodes.size()) - 1;
  if (n < order) throw InvalidArgument("fd_weights: not enough nodes for the requested order");
  std::vector<std::vector<double>> c(static_cast<std::size_t>(n) + 1,
                                     std::vector<double>(static_cast<std::size_t>(order) + 1, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) {
        c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      }
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) w[i] = c[i][order];
  return w;
}

namespace {

double simpson_fixed(const std::function<double(double)>& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double acc = f(a) + f(b);
  for (int i = 1; i < panels; ++i) {
    acc += f(a + i * h) * ((i % 2 == 1) ? 4.0 : 2.0);
  }
  return acc * h / 3.0;
}

}  // namespace

double simpson_adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_doublings) {
  if (a == b) return 0.0;
  int panels = 8;
  double prev = simpson_fixed(f, a, b, panels);
  for (int i = 0; i < max_doublings; ++i) {
    panels *= 2;
    const double cur = simpson_fixed(f, a, b, panels);
    if (std::abs(cur - prev) <= tol * (1.0 + std::abs(cur)) * 15.0) return cur;
    prev = cur;
  }
  return prev;
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidArgument("fitted_slope: need two samples of matching length");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace kgeo
