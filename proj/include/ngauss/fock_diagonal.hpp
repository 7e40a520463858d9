#pragma once

// Fock-diagonal states ρ = Σ λ_{n} |{n}⟩⟨{n}|: marginals, nearest product
// state, total mutual information, closed-form non-Gaussianity and the
// photon-number dephasing map.

#include <vector>

#include "ngauss/entropy.hpp"
#include "ngauss/fock_space.hpp"
#include "ngauss/gaussian_states.hpp"
#include "ngauss/moments.hpp"

namespace ngauss {

/// Photon-number distribution over multi-indices in flat basis order.
class FockDiagonal {
 public:
  /// Throws InvalidState for negative entries or a sum off by more than 1e-9.
  FockDiagonal(ModeConfig config, std::vector<double> lambda);

  /// Product distribution of single-mode distributions, in mode order.
  static FockDiagonal product(const std::vector<std::vector<double>>& factors,
                              std::size_t max_dim = kDefaultMaxDim);

  const ModeConfig& config() const { return config_; }
  const std::vector<double>& lambda() const { return lambda_; }
  double operator[](std::span<const int> occupations) const { return lambda_[config_.flat_index(occupations)]; }

 private:
  ModeConfig config_;
  std::vector<double> lambda_;
};

struct MarginalSet {
  std::vector<std::vector<double>> distributions;
  std::vector<double> means;
};

MarginalSet marginals(const FockDiagonal& fds);
FockDiagonal product_state(const FockDiagonal& fds);
double total_mutual_information(const FockDiagonal& fds);

/// Zero displacement and V = ⊕ (⟨n⟩_j + ½) 1₂.
Moments fds_covariance(const FockDiagonal& fds);
/// Thermal state with the marginal mean occupancies.
GaussianParams closest_gaussian_fds(const FockDiagonal& fds);

/// Closed form Σ_j [(⟨n⟩_j+1)ln(⟨n⟩_j+1) − ⟨n⟩_j ln⟨n⟩_j] + Σ λ ln λ.
double nongauss_fds(const FockDiagonal& fds);
/// Same for the nearest product state: a sum of single-mode terms.
double nongauss_product(const FockDiagonal& fds);

DensityMatrix to_density(const FockDiagonal& fds);

/// Photon-number dephasing: keeps the diagonal ⟨{n}|ρ|{n}⟩.
FockDiagonal dephase(const DensityMatrix& rho);

struct DephasingGain {
  double gain = 0.0;              ///< S(Λ(ρ)) − S(ρ)
  double relative_entropy = 0.0;  ///< S(ρ|Λ(ρ)), dense
  double residual = 0.0;
};

DephasingGain dephasing_entropy_gain(const DensityMatrix& rho);

}  // namespace ngauss
