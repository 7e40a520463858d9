#pragma once

// Von Neumann, Shannon, relative and Gaussian cross entropies, and the
// entropic non-Gaussianity δ_S = S(τ_G) − S(ρ).

#include <limits>
#include <optional>
#include <span>
#include <string>

#include "ngauss/gaussian_states.hpp"

namespace ngauss {

/// Eigenvalues below this contribute nothing to entropies and are floored to
/// it inside logarithms.
inline constexpr double kEigenFloor = 1e-12;
/// Weight of ρ₁ outside the support of ρ₂ above which S(ρ₁|ρ₂) = +∞.
inline constexpr double kSupportTolerance = 1e-8;
/// Eigenvalues below −kNegativityTolerance make a state invalid.
inline constexpr double kNegativityTolerance = 1e-8;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

double von_neumann(const DensityMatrix& rho);

/// −Σ p ln p. Throws InvalidState for negative entries or a sum off by more
/// than 1e-9.
double shannon(std::span<const double> p);

/// Tr[ρ₁ ln ρ₂], or −∞ when ρ₁ has weight outside the support of ρ₂.
double log_trace(const DensityMatrix& rho1, const DensityMatrix& rho2);

/// S(ρ₁|ρ₂) = Tr[ρ₁ ln ρ₁] − Tr[ρ₁ ln ρ₂]; kInfinity on support mismatch.
double relative_entropy(const DensityMatrix& rho1, const DensityMatrix& rho2);

/// Tr[ρ ln ρ_G] = −½ tr[G (V + Δd Δdᵀ)] + c from moments alone.
double gaussian_cross_entropy(const Moments& m, const GaussianLogForm& lf);

struct NonGaussOptions {
  /// Cross-check δ_S against the dense relative entropy S(ρ|τ_G).
  bool dense_check = true;
  SynthesisOptions synthesis{};
};

struct NonGaussReport {
  double delta_s = 0.0;
  double entropy_state = 0.0;
  double entropy_gaussian = 0.0;
  AssociateParams associate;
  bool boundary_flag = false;
  double imaginary_residue = 0.0;
  bool truncation_warning = false;

  /// Present when the associate Gaussian could be synthesized at the input
  /// cutoff.
  std::optional<double> dense_relative_entropy;
  std::optional<double> identity_residual;
  std::optional<double> gaussian_leakage;
  std::string dense_check_note;
};

NonGaussReport nongaussianity(const DensityMatrix& rho, const NonGaussOptions& opts = {});

struct Theorem1Residual {
  double lhs = 0.0;       ///< S(ρ|ρ_G) − S(ρ|τ_G), moment-level cross entropies
  double rhs = 0.0;       ///< S(τ_G|ρ_G), dense synthesized Gaussians
  double residual = 0.0;  ///< |lhs − rhs|
  double gap = 0.0;       ///< rhs
};

/// Both sides of S(ρ|ρ_G) − S(ρ|τ_G) = S(τ_G|ρ_G) for a Gaussian reference.
Theorem1Residual theorem1_identity(const DensityMatrix& rho, const GaussianParams& reference,
                                   const SynthesisOptions& opts = {});

}  // namespace ngauss
