#pragma once

// Brute-force checks of the extremal properties: closest Gaussian by grid
// search, maximum entropy at fixed moments, closest Fock-diagonal state.

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "ngauss/entropy.hpp"
#include "ngauss/fock_diagonal.hpp"
#include "ngauss/gaussian_states.hpp"

namespace ngauss {

/// Displaced squeezed thermal single-mode state.
struct SingleModeGaussian {
  double nbar = 0.0;
  double r = 0.0;
  double phi = 0.0;
  Complex alpha{0.0, 0.0};

  GaussianParams to_params() const;
};

/// Inverse of SingleModeGaussian::to_params for one-mode moments; r ≥ 0 and
/// φ ∈ [0, π).
SingleModeGaussian single_mode_from_moments(const Moments& m);

/// Search box over (n̄, r, φ, Re α, Im α). α is restricted to a disc.
struct SearchSpec {
  int grid_points = 15;
  int refinement_rounds = 3;
  int shrink = 4;  ///< step reduction per refinement round
  double nbar_min = kOccupancyFloor;
  double nbar_max = 4.0;
  double r_max = 1.5;
  double alpha_radius = 2.0;

  void validate() const;
};

inline constexpr int kSearchDims = 5;

struct ClosestGaussianSearch {
  SingleModeGaussian best;
  double best_value = 0.0;
  SingleModeGaussian associate;
  double associate_value = 0.0;  ///< S(ρ|τ_G)
  double gap = 0.0;              ///< best_value − associate_value
  std::array<double, kSearchDims> resolution{};  ///< final grid steps
  double resolution_bound = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped_divergent = 0;
  std::size_t outside_disc = 0;
  bool associate_in_domain = true;
  bool parameters_match = false;  ///< per-coordinate within one final step
};

/// Minimizes S(ρ|ρ_G(n̄, r, φ, α)) with moment-level cross entropies. Grid
/// points are visited in lexicographic order and ties keep the first one.
ClosestGaussianSearch brute_force_closest_gaussian(const DensityMatrix& rho, const SearchSpec& spec = {});

struct MaxEntropyOptions {
  double margin = 1e-3;     ///< required ν_j − ½
  int subspace_dim = 10;    ///< perturbations live on the top eigenvectors of τ_G
  double mixing_max = 1.0;  ///< fraction of the feasible perturbation strength
  SynthesisOptions synthesis{};
};

struct MaxEntropyReport {
  std::uint64_t seed = 0;
  double reference_entropy = 0.0;  ///< S(τ_G), dense
  double gaussian_entropy = 0.0;   ///< symplectic-spectrum formula
  std::vector<double> sample_entropies;
  double max_excess = 0.0;         ///< max S(sample) − S(τ_G)
  double max_moment_deviation = 0.0;
  double mean_strength = 0.0;
  std::size_t violations = 0;      ///< samples with S > S(τ_G) + 1e-8
};

/// Random states sharing the moments of τ_G: τ_G + t X with X orthogonal to
/// every moment operator, t drawn below the positivity limit found by
/// bisection.
MaxEntropyReport max_entropy_sampling(const Moments& moments, const ModeConfig& config, int num_samples,
                                      std::uint64_t seed, const MaxEntropyOptions& opts = {});

/// S(ρ|ρ_F(μ)).
double relative_entropy_to_fds(const DensityMatrix& rho, const FockDiagonal& mu);

struct NearestFdsReport {
  std::uint64_t seed = 0;
  std::vector<double> dephased;  ///< λ* = diagonal of ρ
  double base_value = 0.0;  ///< S(ρ|Λ(ρ))
  double min_margin = 0.0;  ///< min over perturbations of S(ρ|μ) − base
  std::size_t perturbations = 0;
  std::size_t divergent = 0;
  bool pass = true;
};

NearestFdsReport nearest_fds_search(const DensityMatrix& rho, int num_perturbations, std::uint64_t seed);

struct ReferenceRanges {
  double nbar_min = 0.2;
  double nbar_max = 1.2;
  double r_max = 0.3;
  double alpha_max = 0.5;
};

/// Random symplectic: passive · squeezers · passive.
RealMatrix random_symplectic(int num_modes, double r_max, std::uint64_t seed);

std::vector<GaussianParams> sample_gaussian_references(int num_modes, int count, std::uint64_t seed,
                                                       const ReferenceRanges& ranges = {});

}  // namespace ngauss
