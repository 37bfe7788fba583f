#pragma once

#include <map>
#include <utility>
#include <vector>

#include "kgeo/metric.hpp"
#include "kgeo/ray.hpp"

namespace kgeo {

/// Extension of the central-fibre form to the flat model family M×Δ with
/// trivial normal bundle: ω̃_V = π*ω_D + i∂∂̄(|S|²·h). Closed and analytic by
/// construction; restricts to ω_D at S = 0. `invariant` records that h is
/// S-independent real data (always true in this family).
struct ExtensionForm {
  KahlerMetric base;
  ScalarField h;
  bool invariant = true;
};

/// Truncated double series φ = Σ S^i S̄^j θ_ij (1 ≤ i,j, i+j ≤ K+1) with the
/// reality constraint θ_ij = conj(θ_ji) and the gauge θ_i0 = θ_0j = 0.
/// Each stored coefficient carries an integer S¹ content weight (j−i for
/// solver output), so that S^i S̄^j θ_ij is invariant.
class BidegreeSeries {
 public:
  struct Entry {
    ComplexField field;
    int weight = 0;
  };
  using Key = std::pair<int, int>;

  BidegreeSeries(ExtensionForm extension, int order);

  const ExtensionForm& extension() const { return extension_; }
  int order() const { return order_; }
  const std::map<Key, Entry>& thetas() const { return thetas_; }
  /// Zero field when the coefficient is not stored.
  ComplexField theta(int i, int j) const;

  /// Copy with θ_ij (and its conjugate mirror θ_ji) replaced; the injected
  /// content weight is stored verbatim, enabling equivariance-violation
  /// experiments.
  BidegreeSeries with_theta(int i, int j, const ComplexField& field, int weight) const;

  void set(int i, int j, ComplexField field, int weight);

 private:
  ExtensionForm extension_;
  int order_;
  std::map<Key, Entry> thetas_;
};

/// Determine θ_ij for i+j ≤ K+1 by zeroing the S^a S̄^b coefficients of ω²
/// through total degree K−1 (coefficient extraction; in this flat family the
/// curvature correction terms vanish identically). K is capped (default 5).
BidegreeSeries solve_order(const ExtensionForm& extension, int order, int max_order = 5);

struct BidegreeResidual {
  int s_power = 0;
  int sbar_power = 0;
  double sup_norm = 0.0;
};

/// Sup-norms of the S^a S̄^b coefficients of ω² for a+b ≤ k.
std::vector<BidegreeResidual> residual_mod_sk(const BidegreeSeries& series, int k);

/// Max over sampled |S| and `phases` equally spaced arguments of the spread
/// of the reconstructed φ; 0 for an S¹-invariant series.
double equivariance_check(const BidegreeSeries& series, int phases);

/// The geodesic ray extracted by the substitution S = e^{-x}.
struct DivisorRay {
  std::vector<double> x;
  std::vector<ScalarField> phi;
  KahlerMetric base;
  /// x from which the reconstruction's geodesic-defect bound is below the
  /// ray tolerance; +inf when never.
  double trust_x_min = 0.0;
  bool trusted_from_start = false;

  PathInH to_path() const;
};

/// Φ(x) = φ at S = e^{-x} on a uniform grid over [x0, x1]. Requires an
/// invariant series (defect below tolerance); a ray starting before
/// trust_x_min is returned with a warning annotation, not an error.
DivisorRay to_geodesic_ray(const BidegreeSeries& series, double x0, double x1, int samples,
                           double ray_tolerance = 1e-8);

}  // namespace kgeo
