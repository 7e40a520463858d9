#include "ngauss/fock_diagonal.hpp"

#include <cmath>
#include <numeric>

#include "ngauss/errors.hpp"

namespace ngauss {

namespace {

// (n+1) ln(n+1) − n ln n, the entropy of a thermal state with mean n.
double bose_einstein_entropy(double n) {
  if (n <= 0.0) return 0.0;
  return (n + 1.0) * std::log1p(n) - n * std::log(n);
}

double neg_shannon(const std::vector<double>& p) {
  double s = 0.0;
  for (double x : p) {
    if (x > 0.0) s += x * std::log(x);
  }
  return s;
}

}  // namespace

FockDiagonal::FockDiagonal(ModeConfig config, std::vector<double> lambda)
    : config_(std::move(config)), lambda_(std::move(lambda)) {
  if (lambda_.size() != config_.total_dim()) throw InvalidArgument("distribution size does not match the configuration");
  double total = 0.0;
  for (double x : lambda_) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidState("photon-number probabilities must be nonnegative");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidState("photon-number probabilities do not sum to one");
}

FockDiagonal FockDiagonal::product(const std::vector<std::vector<double>>& factors, std::size_t max_dim) {
  std::vector<int> cutoffs;
  for (const auto& f : factors) cutoffs.push_back(static_cast<int>(f.size()));
  ModeConfig config(cutoffs, max_dim);
  std::vector<double> lambda(config.total_dim());
  for (std::size_t flat = 0; flat < lambda.size(); ++flat) {
    const auto occ = config.multi_index(flat);
    double p = 1.0;
    for (std::size_t j = 0; j < factors.size(); ++j) p *= factors[j][static_cast<std::size_t>(occ[j])];
    lambda[flat] = p;
  }
  return FockDiagonal(std::move(config), std::move(lambda));
}

MarginalSet marginals(const FockDiagonal& fds) {
  const ModeConfig& cfg = fds.config();
  MarginalSet out;
  for (int d : cfg.cutoffs()) out.distributions.emplace_back(static_cast<std::size_t>(d), 0.0);
  for (std::size_t flat = 0; flat < cfg.total_dim(); ++flat) {
    const auto occ = cfg.multi_index(flat);
    for (std::size_t j = 0; j < occ.size(); ++j) {
      out.distributions[j][static_cast<std::size_t>(occ[j])] += fds.lambda()[flat];
    }
  }
  for (const auto& dist : out.distributions) {
    double mean = 0.0;
    for (std::size_t n = 0; n < dist.size(); ++n) mean += static_cast<double>(n) * dist[n];
    out.means.push_back(mean);
  }
  return out;
}

FockDiagonal product_state(const FockDiagonal& fds) {
  return FockDiagonal::product(marginals(fds).distributions, fds.config().total_dim());
}

double total_mutual_information(const FockDiagonal& fds) {
  const MarginalSet m = marginals(fds);
  double s = -shannon(fds.lambda());
  for (const auto& dist : m.distributions) s += shannon(dist);
  return s;
}

Moments fds_covariance(const FockDiagonal& fds) {
  const MarginalSet m = marginals(fds);
  const auto n = static_cast<Eigen::Index>(m.means.size());
  Moments out{RealVector::Zero(2 * n), RealMatrix::Zero(2 * n, 2 * n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    const double v = m.means[static_cast<std::size_t>(j)] + 0.5;
    out.covariance(2 * j, 2 * j) = v;
    out.covariance(2 * j + 1, 2 * j + 1) = v;
  }
  return out;
}

GaussianParams closest_gaussian_fds(const FockDiagonal& fds) { return GaussianParams::thermal(marginals(fds).means); }

double nongauss_fds(const FockDiagonal& fds) {
  const MarginalSet m = marginals(fds);
  double s = neg_shannon(fds.lambda());
  for (double mean : m.means) s += bose_einstein_entropy(mean);
  return s;
}

double nongauss_product(const FockDiagonal& fds) {
  const MarginalSet m = marginals(fds);
  double s = 0.0;
  for (std::size_t j = 0; j < m.means.size(); ++j) {
    s += bose_einstein_entropy(m.means[j]) + neg_shannon(m.distributions[j]);
  }
  return s;
}

DensityMatrix to_density(const FockDiagonal& fds) {
  const auto n = static_cast<Eigen::Index>(fds.config().total_dim());
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) = fds.lambda()[static_cast<std::size_t>(i)];
  return DensityMatrix(fds.config(), std::move(m));
}

FockDiagonal dephase(const DensityMatrix& rho) {
  std::vector<double> lambda = rho.populations();
  for (double& x : lambda) {
    if (x < -kNegativityTolerance) throw InvalidState("state has a negative photon-number population");
    x = std::max(x, 0.0);
  }
  return FockDiagonal(rho.config(), std::move(lambda));
}

DephasingGain dephasing_entropy_gain(const DensityMatrix& rho) {
  const FockDiagonal fds = dephase(rho);
  DephasingGain out;
  out.gain = shannon(fds.lambda()) - von_neumann(rho);
  out.relative_entropy = relative_entropy(rho, to_density(fds));
  out.residual = std::abs(out.gain - out.relative_entropy);
  return out;
}

}  // namespace ngauss
