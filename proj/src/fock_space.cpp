#include "ngauss/fock_space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "ngauss/errors.hpp"

namespace ngauss {

ModeConfig::ModeConfig(std::vector<int> cutoffs, std::size_t max_dim) : cutoffs_(std::move(cutoffs)) {
  if (cutoffs_.empty()) throw InvalidArgument("mode configuration needs at least one mode");
  for (int d : cutoffs_) {
    if (d < 2) throw InvalidArgument("Fock cutoff must be at least 2, got " + std::to_string(d));
    if (total_dim_ > max_dim / static_cast<std::size_t>(d)) {
      throw DimensionError("Hilbert-space dimension exceeds the limit of " + std::to_string(max_dim));
    }
    total_dim_ *= static_cast<std::size_t>(d);
  }
  if (total_dim_ > max_dim) {
    throw DimensionError("Hilbert-space dimension " + std::to_string(total_dim_) +
                         " exceeds the limit of " + std::to_string(max_dim));
  }
}

ModeConfig ModeConfig::uniform(int num_modes, int cutoff, std::size_t max_dim) {
  if (num_modes < 1) throw InvalidArgument("number of modes must be positive");
  return ModeConfig(std::vector<int>(static_cast<std::size_t>(num_modes), cutoff), max_dim);
}

std::vector<int> ModeConfig::multi_index(std::size_t flat) const {
  std::vector<int> occ(cutoffs_.size());
  for (std::size_t j = cutoffs_.size(); j-- > 0;) {
    const auto d = static_cast<std::size_t>(cutoffs_[j]);
    occ[j] = static_cast<int>(flat % d);
    flat /= d;
  }
  return occ;
}

std::size_t ModeConfig::flat_index(std::span<const int> occupations) const {
  if (occupations.size() != cutoffs_.size()) throw InvalidArgument("occupation label has the wrong length");
  std::size_t flat = 0;
  for (std::size_t j = 0; j < cutoffs_.size(); ++j) {
    if (occupations[j] < 0 || occupations[j] >= cutoffs_[j]) {
      throw InvalidArgument("occupation " + std::to_string(occupations[j]) + " outside the cutoff of mode " +
                            std::to_string(j));
    }
    flat = flat * static_cast<std::size_t>(cutoffs_[j]) + static_cast<std::size_t>(occupations[j]);
  }
  return flat;
}

DensityMatrix::DensityMatrix(ModeConfig config, Matrix data) : config_(std::move(config)), data_(std::move(data)) {
  const auto n = static_cast<Eigen::Index>(config_.total_dim());
  if (data_.rows() != n || data_.cols() != n) {
    throw InvalidArgument("matrix shape does not match the mode configuration");
  }
}

DensityMatrix DensityMatrix::from_pure(ModeConfig config, const Vector& psi) {
  const double norm = psi.norm();
  if (norm == 0.0) throw InvalidArgument("zero state vector");
  const Vector v = psi / norm;
  return DensityMatrix(std::move(config), v * v.adjoint());
}

std::vector<double> DensityMatrix::populations() const {
  std::vector<double> pop(dim());
  for (std::size_t i = 0; i < pop.size(); ++i) {
    pop[i] = data_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
  }
  return pop;
}

const Matrix& LocalModeOps::second(int u, int v) const {
  if (u == 0 && v == 0) return qq;
  if (u == 1 && v == 1) return pp;
  return qp_sym;
}

namespace {

Matrix ladder(int cutoff) {
  Matrix a = Matrix::Zero(cutoff, cutoff);
  for (int n = 1; n < cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Matrix identity(std::size_t n) {
  const auto k = static_cast<Eigen::Index>(n);
  return Matrix::Identity(k, k);
}

}  // namespace

LocalModeOps build_local_ops(int cutoff) {
  if (cutoff < 2) throw InvalidArgument("Fock cutoff must be at least 2");
  const double s = 1.0 / std::sqrt(2.0);
  const Complex i{0.0, 1.0};

  // One extra level makes the compressed quadratic monomials exact.
  const Matrix a_ext = ladder(cutoff + 1);
  const Matrix q_ext = s * (a_ext + a_ext.adjoint());
  const Matrix p_ext = (-i * s) * (a_ext - a_ext.adjoint());

  LocalModeOps ops;
  ops.a = ladder(cutoff);
  ops.q = q_ext.topLeftCorner(cutoff, cutoff);
  ops.p = p_ext.topLeftCorner(cutoff, cutoff);
  ops.qq = (q_ext * q_ext).topLeftCorner(cutoff, cutoff);
  ops.pp = (p_ext * p_ext).topLeftCorner(cutoff, cutoff);
  ops.qp_sym = (0.5 * (q_ext * p_ext + p_ext * q_ext)).topLeftCorner(cutoff, cutoff);
  ops.number = Matrix::Zero(cutoff, cutoff);
  for (int n = 0; n < cutoff; ++n) ops.number(n, n) = static_cast<double>(n);
  return ops;
}

QuadratureOps::QuadratureOps(ModeConfig config) : config_(std::move(config)) {
  local_.reserve(static_cast<std::size_t>(config_.num_modes()));
  for (int d : config_.cutoffs()) local_.push_back(build_local_ops(d));
}

Matrix QuadratureOps::embed(const Matrix& op, int mode) const {
  if (mode < 0 || mode >= config_.num_modes()) throw InvalidArgument("mode index out of range");
  std::size_t before = 1;
  std::size_t after = 1;
  for (int j = 0; j < mode; ++j) before *= static_cast<std::size_t>(config_.cutoff(j));
  for (int j = mode + 1; j < config_.num_modes(); ++j) after *= static_cast<std::size_t>(config_.cutoff(j));
  return kron(kron(identity(before), op), identity(after));
}

Matrix QuadratureOps::quadrature(int l) const {
  if (l < 0 || l >= size()) throw InvalidArgument("quadrature index out of range");
  return embed(local(l / 2).first(l % 2), l / 2);
}

Matrix QuadratureOps::number_operator(int mode) const { return embed(local(mode).number, mode); }

Matrix QuadratureOps::annihilation(int mode) const { return embed(local(mode).a, mode); }

Matrix QuadratureOps::symmetric_product(int l, int m) const {
  if (l < 0 || l >= size() || m < 0 || m >= size()) throw InvalidArgument("quadrature index out of range");
  const int jl = l / 2;
  const int jm = m / 2;
  if (jl == jm) return embed(local(jl).second(l % 2, m % 2), jl);
  // Distinct modes commute, and the compression of a product of operators on
  // different factors is the product of the compressions.
  return quadrature(l) * quadrature(m);
}

QuadratureOps build_operators(const ModeConfig& config) { return QuadratureOps(config); }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

DensityMatrix fock_state(const ModeConfig& config, std::span<const int> occupations) {
  const auto k = static_cast<Eigen::Index>(config.flat_index(occupations));
  const auto n = static_cast<Eigen::Index>(config.total_dim());
  Matrix m = Matrix::Zero(n, n);
  m(k, k) = 1.0;
  return DensityMatrix(config, std::move(m));
}

DensityMatrix fock_state(int n, int cutoff) {
  const int occ[] = {n};
  return fock_state(ModeConfig({cutoff}), occ);
}

DensityMatrix vacuum(const ModeConfig& config) {
  const std::vector<int> zeros(static_cast<std::size_t>(config.num_modes()), 0);
  return fock_state(config, zeros);
}

DensityMatrix tensor(std::span<const DensityMatrix> states, std::size_t max_dim) {
  if (states.empty()) throw InvalidArgument("tensor product of an empty list");
  if (states.size() == 1) return states.front();
  std::vector<int> cutoffs;
  for (const auto& s : states) {
    cutoffs.insert(cutoffs.end(), s.config().cutoffs().begin(), s.config().cutoffs().end());
  }
  ModeConfig config(std::move(cutoffs), max_dim);
  Matrix data = states.front().data();
  for (std::size_t k = 1; k < states.size(); ++k) data = kron(data, states[k].data());
  return DensityMatrix(std::move(config), std::move(data));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<int> keep) {
  const ModeConfig& cfg = rho.config();
  if (keep.empty()) throw InvalidArgument("partial trace needs at least one kept mode");
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  for (int j : keep) {
    if (j < 0 || j >= cfg.num_modes()) throw InvalidArgument("kept mode " + std::to_string(j) + " out of range");
  }
  if (static_cast<int>(keep.size()) == cfg.num_modes()) return rho;

  std::vector<int> kept_cutoffs;
  std::vector<int> traced_cutoffs;
  std::vector<bool> is_kept(static_cast<std::size_t>(cfg.num_modes()), false);
  for (int j : keep) is_kept[static_cast<std::size_t>(j)] = true;
  for (int j = 0; j < cfg.num_modes(); ++j) {
    (is_kept[static_cast<std::size_t>(j)] ? kept_cutoffs : traced_cutoffs).push_back(cfg.cutoff(j));
  }
  ModeConfig kept_cfg(kept_cutoffs, cfg.total_dim());
  ModeConfig traced_cfg(traced_cutoffs, cfg.total_dim());

  // Group full-space indices by their traced-out label.
  std::vector<std::vector<std::pair<Eigen::Index, Eigen::Index>>> groups(traced_cfg.total_dim());
  std::vector<int> ka;
  std::vector<int> ta;
  for (std::size_t flat = 0; flat < cfg.total_dim(); ++flat) {
    const auto occ = cfg.multi_index(flat);
    ka.clear();
    ta.clear();
    for (int j = 0; j < cfg.num_modes(); ++j) {
      (is_kept[static_cast<std::size_t>(j)] ? ka : ta).push_back(occ[static_cast<std::size_t>(j)]);
    }
    groups[traced_cfg.flat_index(ta)].emplace_back(static_cast<Eigen::Index>(kept_cfg.flat_index(ka)),
                                                   static_cast<Eigen::Index>(flat));
  }

  const auto n = static_cast<Eigen::Index>(kept_cfg.total_dim());
  Matrix reduced = Matrix::Zero(n, n);
  const Matrix& data = rho.data();
  for (const auto& group : groups) {
    for (const auto& [ki, fi] : group) {
      for (const auto& [kj, fj] : group) reduced(ki, kj) += data(fi, fj);
    }
  }
  return DensityMatrix(std::move(kept_cfg), std::move(reduced));
}

std::vector<double> tail_populations(const ModeConfig& config, std::span<const double> populations, int depth) {
  std::vector<double> tail(static_cast<std::size_t>(config.num_modes()), 0.0);
  for (std::size_t flat = 0; flat < populations.size(); ++flat) {
    const auto occ = config.multi_index(flat);
    for (int j = 0; j < config.num_modes(); ++j) {
      if (occ[static_cast<std::size_t>(j)] >= config.cutoff(j) - depth) tail[static_cast<std::size_t>(j)] += populations[flat];
    }
  }
  return tail;
}

Diagnostics validate(const DensityMatrix& rho, const ValidationTolerances& tol) {
  Diagnostics diag;
  const Matrix& m = rho.data();
  diag.hermiticity_residual = (m - m.adjoint()).cwiseAbs().maxCoeff();
  diag.trace_deviation = std::abs(m.trace() - Complex(1.0, 0.0));

  const Matrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
  diag.min_eigenvalue = es.eigenvalues().minCoeff();

  const auto pop = rho.populations();
  diag.tail_mass = tail_populations(rho.config(), pop, 1);
  diag.tail_mass_top2 = tail_populations(rho.config(), pop, 2);

  diag.hermitian = std::isfinite(diag.hermiticity_residual) && diag.hermiticity_residual <= tol.hermiticity;
  diag.unit_trace = std::isfinite(diag.trace_deviation) && diag.trace_deviation <= tol.trace;
  diag.positive = std::isfinite(diag.min_eigenvalue) && diag.min_eigenvalue >= -tol.negativity;
  diag.tail_ok = std::all_of(diag.tail_mass.begin(), diag.tail_mass.end(), [&](double t) { return t < tol.tail; });
  diag.well_truncated = std::all_of(diag.tail_mass_top2.begin(), diag.tail_mass_top2.end(),
                                    [](double t) { return t < kWellTruncatedThreshold; });
  return diag;
}

}  // namespace ngauss
