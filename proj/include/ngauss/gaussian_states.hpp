#pragma once

// Gaussian states: Williamson normal form, symplectic-spectrum entropy, the
// logarithmic (quadratic) form and synthesis of truncated density matrices.

#include <vector>

#include "ngauss/fock_space.hpp"
#include "ngauss/moments.hpp"

namespace ngauss {

/// Smallest admissible mean occupancy of a Gaussian reference. Below it the
/// logarithm of the state is unbounded.
inline constexpr double kOccupancyFloor = 1e-6;

/// ρ_G = D(α) U(S) ⊗_j ρ_T(n̄_j) U(S)† D(α)†, parametrized by the occupancies
/// n̄_j (symplectic eigenvalues n̄_j + 1/2), the symplectic S and the mean
/// displacement d.
struct GaussianParams {
  std::vector<double> occupancies;
  RealMatrix symplectic;
  RealVector displacement;

  int num_modes() const { return static_cast<int>(occupancies.size()); }

  static GaussianParams thermal(std::vector<double> occupancies);

  /// S (⊕ (n̄_j + 1/2) 1₂) Sᵀ.
  RealMatrix covariance() const;
  Moments moments() const;
};

/// ln ρ_G = −½ (R − d)ᵀ G (R − d) + c·1.
struct GaussianLogForm {
  RealMatrix quadratic;  ///< G = S⁻ᵀ η S⁻¹
  double constant = 0.0; ///< c = −Σ ln(n̄_j + 1) + ¼ tr η
  RealVector displacement;
};

struct WilliamsonForm {
  RealMatrix symplectic;
  std::vector<double> nu;  ///< descending
};

/// V = S (⊕ ν_j 1₂) Sᵀ. Throws DomainError when V is not positive definite or
/// some ν_j falls below 1/2 − tol.
WilliamsonForm williamson(const RealMatrix& covariance, double tol = 1e-9);

/// ‖S Ω Sᵀ − Ω‖_max.
double symplectic_residual(const RealMatrix& s);

/// R(φ) diag(e^r, e^−r) R(φ)ᵀ.
RealMatrix single_mode_symplectic(double r, double phi);
/// (√2 Re α, √2 Im α).
RealVector displacement_from_alpha(Complex alpha);

/// η_j = ln((n̄_j + 1) / n̄_j), capped for pure directions.
double thermal_exponent(double nbar);

/// Geometric photon-number distribution truncated at `cutoff` and
/// renormalized to unit trace.
DensityMatrix thermal_state(double nbar, int cutoff);
/// Probability mass beyond the cutoff, (n̄ / (n̄ + 1))^cutoff. The truncated
/// state is renormalized by 1 / (1 − leakage).
double thermal_leakage(double nbar, int cutoff);

/// Coherent state |α⟩⟨α| truncated and renormalized.
DensityMatrix coherent_state(Complex alpha, int cutoff);

struct SynthesisOptions {
  /// Largest admissible population of the top Fock level of any mode.
  double tail_limit = 1e-5;
  /// Largest admissible ‖exponent‖ before eigenvalue errors dominate.
  double max_exponent_norm = 1e8;
};

struct GaussianSynthesis {
  DensityMatrix state;
  double leakage = 0.0;           ///< 1 − (unnormalized truncated trace)
  std::vector<double> tail_mass;  ///< top-level population, per mode
};

/// Exponentiates −½ δRᵀ G δR in the truncated basis and normalizes. Throws
/// TruncationError when the tail exceeds `opts.tail_limit`.
GaussianSynthesis synthesize_gaussian(const GaussianParams& params, const ModeConfig& config,
                                      const SynthesisOptions& opts = {});

DensityMatrix single_mode_gaussian(double nbar, double r, double phi, Complex alpha, int cutoff,
                                   const SynthesisOptions& opts = {});

struct AssociateParams {
  GaussianParams params;
  std::vector<double> nu;  ///< symplectic eigenvalues of the input covariance
  bool boundary = false;   ///< some ν_j − 1/2 fell below the occupancy floor
};

/// Associate Gaussian with the same displacement and covariance.
AssociateParams associate_params(const Moments& m);

struct AssociateGaussian {
  AssociateParams associate;
  GaussianSynthesis synthesis;
};

AssociateGaussian associate_gaussian(const DensityMatrix& rho, const QuadratureOps& ops,
                                     const SynthesisOptions& opts = {});

/// Σ_j (ν_j + ½) ln(ν_j + ½) − (ν_j − ½) ln(ν_j − ½).
double gaussian_entropy(const std::vector<double>& nu, double tol = 1e-9);

/// Throws DomainError for occupancies below kOccupancyFloor.
GaussianLogForm log_form(const GaussianParams& params);

/// Dense −½ δRᵀ G δR + c·1 (the operator whose exponential is ρ_G).
Matrix log_form_matrix(const GaussianLogForm& lf, const QuadratureOps& ops);

}  // namespace ngauss
