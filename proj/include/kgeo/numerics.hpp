#pragma once

#include <functional>
#include <vector>

namespace kgeo {

/// Finite-difference weights (Fornberg) for the m-th derivative at x0 from
/// samples at the given nodes. Exact for polynomials up to degree
/// nodes.size()-1.
std::vector<double> fd_weights(double x0, const std::vector<double>& nodes, int order);

/// Composite-Simpson quadrature with Richardson-style refinement: panels are
/// doubled until successive estimates agree to `tol` (absolute + relative) or
/// the panel cap is reached.
double simpson_adaptive(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int max_doublings = 14);

/// Least-squares slope of y against x.
double fitted_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace kgeo
