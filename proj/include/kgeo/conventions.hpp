#pragma once

namespace kgeo::conventions {

// The convention sheet. Every factor below is pinned once by requiring that
// the truncated series solutions annihilate the determinant residual order by
// order; all modules and file formats use these constants.

/// i dz ∧ dz̄ = kAreaFactor · dx ∧ dy  (z = x + iy).
inline constexpr double kAreaFactor = 2.0;

/// With S = t + is and data independent of s: ∂²/∂S∂S̄ = kTimeFactor · ∂²/∂t².
/// The determinant residual is  kTimeFactor · (g_φ φ_tt − |∂_z φ_t|²).
inline constexpr double kTimeFactor = 0.25;

/// Orientation constant in the order-(0,0) divisor equation
/// g · (h + kDivisorOrientation · θ_11) = 0.
inline constexpr double kDivisorOrientation = 1.0;

/// |S|^2 at S = e^{-x} enters the ray as e^{-kRaySubstitution · 2x}; the
/// stored θ_ij contribute with unit weight (κ' = 1).
inline constexpr double kRaySubstitution = 1.0;

/// Circumference assigned to the S^1 factor of the cylinder measure used by
/// the first-variation pairing.
inline constexpr double kCylinderCircumference = 6.283185307179586476925286766559;

}  // namespace kgeo::conventions
