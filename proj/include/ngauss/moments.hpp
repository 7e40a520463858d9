#pragma once

// First and second quadrature moments of truncated states.

#include "ngauss/fock_space.hpp"

namespace ngauss {

/// Expectation values with an imaginary part above this are flagged.
inline constexpr double kImaginaryTolerance = 1e-10;

struct Moments {
  RealVector displacement;  ///< ⟨R_l⟩
  RealMatrix covariance;    ///< σ(R_l, R_m)

  int num_modes() const { return static_cast<int>(displacement.size() / 2); }
};

struct MomentExtraction {
  Moments moments;
  double imaginary_residue = 0.0;  ///< largest |Im| among the traces taken
  bool imaginary_flag = false;
  bool truncation_warning = false;  ///< top-level population above the tail threshold
};

RealVector displacement(const DensityMatrix& rho, const QuadratureOps& ops);
RealMatrix covariance(const DensityMatrix& rho, const QuadratureOps& ops);
MomentExtraction extract_moments(const DensityMatrix& rho, const QuadratureOps& ops);

/// Ω = ⊕ [[0, 1], [−1, 0]].
RealMatrix symplectic_form(int num_modes);

struct UncertaintyCheck {
  bool physical = false;
  double margin = 0.0;  ///< smallest eigenvalue of V + iΩ/2
};

/// Throws InvalidArgument if the covariance is not symmetric.
UncertaintyCheck check_uncertainty(const Moments& m, double tol = 1e-10);

}  // namespace ngauss
