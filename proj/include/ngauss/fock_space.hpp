#pragma once

// Truncated N-mode Fock space: mode configurations, density matrices,
// quadrature operators, tensor products and partial traces.
//
// Conventions: hbar = 1, [q, p] = i, vacuum covariance 1/2. Basis states are
// ordered with mode 0 as the most significant index, so that an operator A
// acting on mode j is embedded as 1 ⊗ ... ⊗ A ⊗ ... ⊗ 1 in mode order.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ngauss {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr std::size_t kDefaultMaxDim = 4096;
inline constexpr int kDefaultCutoff = 30;
/// Population of the top two Fock levels of every mode below which a state
/// counts as well truncated.
inline constexpr double kWellTruncatedThreshold = 1e-8;

class ModeConfig {
 public:
  /// Throws InvalidArgument for an empty list or a cutoff below 2 and
  /// DimensionError when the product of cutoffs exceeds `max_dim`.
  explicit ModeConfig(std::vector<int> cutoffs, std::size_t max_dim = kDefaultMaxDim);

  static ModeConfig uniform(int num_modes, int cutoff, std::size_t max_dim = kDefaultMaxDim);

  int num_modes() const { return static_cast<int>(cutoffs_.size()); }
  int cutoff(int mode) const { return cutoffs_.at(static_cast<std::size_t>(mode)); }
  const std::vector<int>& cutoffs() const { return cutoffs_; }
  std::size_t total_dim() const { return total_dim_; }

  std::vector<int> multi_index(std::size_t flat) const;
  std::size_t flat_index(std::span<const int> occupations) const;

  bool operator==(const ModeConfig& other) const { return cutoffs_ == other.cutoffs_; }

 private:
  std::vector<int> cutoffs_;
  std::size_t total_dim_ = 1;
};

/// A Fock-basis matrix together with its mode configuration. Construction only
/// checks the shape; physical validity is reported by validate().
class DensityMatrix {
 public:
  DensityMatrix(ModeConfig config, Matrix data);

  static DensityMatrix from_pure(ModeConfig config, const Vector& psi);

  const ModeConfig& config() const { return config_; }
  const Matrix& data() const { return data_; }
  std::size_t dim() const { return config_.total_dim(); }

  /// Photon-number populations ⟨n|ρ|n⟩ in flat basis order.
  std::vector<double> populations() const;

 private:
  ModeConfig config_;
  Matrix data_;
};

/// Operators of a single mode compressed to the truncated basis. The second
/// moments are compressions of the exact products (computed one level above
/// the cutoff), so q² + p² = 2n + 1 holds on every retained level.
struct LocalModeOps {
  Matrix a;
  Matrix q;
  Matrix p;
  Matrix qq;
  Matrix pp;
  Matrix qp_sym;  ///< (qp + pq) / 2
  Matrix number;

  /// Symmetrized second moment of quadratures `u`, `v` ∈ {0 (q), 1 (p)}.
  const Matrix& second(int u, int v) const;
  const Matrix& first(int u) const { return u == 0 ? q : p; }
};

class QuadratureOps {
 public:
  explicit QuadratureOps(ModeConfig config);

  const ModeConfig& config() const { return config_; }
  int size() const { return 2 * config_.num_modes(); }
  const LocalModeOps& local(int mode) const { return local_.at(static_cast<std::size_t>(mode)); }

  /// Quadrature R_l in the order (q_1, p_1, ..., q_N, p_N), full-space matrix.
  Matrix quadrature(int l) const;
  Matrix number_operator(int mode) const;
  Matrix annihilation(int mode) const;
  /// Compression of (R_l R_m + R_m R_l) / 2 to the truncated space.
  Matrix symmetric_product(int l, int m) const;

  /// Embeds a single-mode operator acting on `mode`.
  Matrix embed(const Matrix& op, int mode) const;

 private:
  ModeConfig config_;
  std::vector<LocalModeOps> local_;
};

LocalModeOps build_local_ops(int cutoff);
QuadratureOps build_operators(const ModeConfig& config);

Matrix kron(const Matrix& a, const Matrix& b);

DensityMatrix fock_state(const ModeConfig& config, std::span<const int> occupations);
DensityMatrix fock_state(int n, int cutoff);
DensityMatrix vacuum(const ModeConfig& config);

/// Kronecker product in argument order. A single factor is returned as is.
DensityMatrix tensor(std::span<const DensityMatrix> states, std::size_t max_dim = kDefaultMaxDim);

/// Reduced state on the (sorted, unique) modes listed in `keep`.
DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<int> keep);

struct ValidationTolerances {
  double hermiticity = 1e-9;
  double trace = 1e-9;
  double negativity = 1e-9;
  double tail = 1e-6;
};

struct Diagnostics {
  double hermiticity_residual = 0.0;  ///< max |ρ_ij − conj(ρ_ji)|
  double trace_deviation = 0.0;       ///< |Tr ρ − 1|
  double min_eigenvalue = 0.0;        ///< of the Hermitian part
  std::vector<double> tail_mass;      ///< population of the top level, per mode
  std::vector<double> tail_mass_top2; ///< population of the top two levels, per mode

  bool hermitian = true;
  bool unit_trace = true;
  bool positive = true;
  bool tail_ok = true;
  bool well_truncated = true;

  bool physical() const { return hermitian && unit_trace && positive; }
  bool pass() const { return physical() && tail_ok; }
};

Diagnostics validate(const DensityMatrix& rho, const ValidationTolerances& tol = {});

/// Per-mode population of the levels n_j >= cutoff_j − depth.
std::vector<double> tail_populations(const ModeConfig& config, std::span<const double> populations,
                                     int depth);

}  // namespace ngauss
