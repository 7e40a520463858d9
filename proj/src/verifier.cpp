#include "ngauss/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "ngauss/errors.hpp"

namespace ngauss {

namespace {

using Point = std::array<double, kSearchDims>;

constexpr double kPi = std::numbers::pi;

double wrap_angle(double phi) {
  double w = std::fmod(phi, kPi);
  if (w < 0.0) w += kPi;
  return w;
}

double angle_distance(double a, double b) {
  const double d = std::abs(wrap_angle(a) - wrap_angle(b));
  return std::min(d, kPi - d);
}

SingleModeGaussian from_point(const Point& x) { return {x[0], x[1], x[2], Complex(x[3], x[4])}; }

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  if (n == 1) {
    v[0] = 0.5 * (lo + hi);
    return v;
  }
  for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (n - 1);
  return v;
}

class GridObjective {
 public:
  GridObjective(const Moments& m, double entropy, const SearchSpec& spec) : m_(m), s_(entropy), spec_(spec) {}

  double operator()(const Point& x) const {
    const SingleModeGaussian g = from_point(x);
    return -gaussian_cross_entropy(m_, log_form(g.to_params())) - s_;
  }

  bool in_disc(const Point& x) const { return std::hypot(x[3], x[4]) <= spec_.alpha_radius * (1.0 + 1e-12); }

 private:
  const Moments& m_;
  double s_;
  const SearchSpec& spec_;
};

struct GridResult {
  Point best{};
  double value = std::numeric_limits<double>::infinity();
  bool found = false;
};

// Visits the Cartesian product of `axes` in lexicographic order.
GridResult scan(const std::array<std::vector<double>, kSearchDims>& axes, const GridObjective& f,
                ClosestGaussianSearch& stats) {
  GridResult res;
  std::array<std::size_t, kSearchDims> idx{};
  for (const auto& a : axes) {
    if (a.empty()) return res;
  }
  while (true) {
    Point x;
    for (int k = 0; k < kSearchDims; ++k) x[static_cast<std::size_t>(k)] = axes[static_cast<std::size_t>(k)][idx[static_cast<std::size_t>(k)]];
    if (!f.in_disc(x)) {
      ++stats.outside_disc;
    } else {
      const double v = f(x);
      ++stats.evaluated;
      if (!std::isfinite(v)) {
        ++stats.skipped_divergent;
      } else if (v < res.value) {
        res.value = v;
        res.best = x;
        res.found = true;
      }
    }
    int k = kSearchDims - 1;
    while (k >= 0) {
      auto& i = idx[static_cast<std::size_t>(k)];
      if (++i < axes[static_cast<std::size_t>(k)].size()) break;
      i = 0;
      --k;
    }
    if (k < 0) break;
  }
  return res;
}

std::vector<double> local_axis(double center, double step, int half_width, double lo, double hi, bool periodic) {
  std::vector<double> axis;
  for (int m = -half_width; m <= half_width; ++m) {
    double v = center + m * step;
    if (periodic) {
      v = wrap_angle(v);
    } else if (v < lo - 1e-12 || v > hi + 1e-12) {
      continue;
    } else {
      v = std::clamp(v, lo, hi);
    }
    axis.push_back(v);
  }
  if (periodic) std::sort(axis.begin(), axis.end());
  return axis;
}

Matrix random_hermitian(int k, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix y(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) y(i, j) = Complex(normal(rng), normal(rng));
  }
  return 0.5 * (y + y.adjoint());
}

double hs_inner(const Matrix& a, const Matrix& b) { return (a.adjoint() * b).trace().real(); }

double min_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double max_abs_difference(const Moments& a, const Moments& b) {
  return std::max((a.displacement - b.displacement).cwiseAbs().maxCoeff(),
                  (a.covariance - b.covariance).cwiseAbs().maxCoeff());
}

}  // namespace

GaussianParams SingleModeGaussian::to_params() const {
  return {{nbar}, single_mode_symplectic(r, phi), displacement_from_alpha(alpha)};
}

SingleModeGaussian single_mode_from_moments(const Moments& m) {
  if (m.covariance.rows() != 2) throw InvalidArgument("single-mode moments expected");
  const RealMatrix v = 0.5 * (m.covariance + m.covariance.transpose());
  const double det = v.determinant();
  if (!(det > 0.0)) throw DomainError("covariance matrix is not positive definite");
  const double nu = std::sqrt(det);
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(v / nu);
  SingleModeGaussian g;
  g.nbar = std::max(nu - 0.5, kOccupancyFloor);
  g.r = 0.5 * std::log(es.eigenvalues()(1));
  const RealVector top = es.eigenvectors().col(1);
  g.phi = wrap_angle(std::atan2(top(1), top(0)));
  if (g.r < 1e-12) {
    g.r = 0.0;
    g.phi = 0.0;
  }
  g.alpha = Complex(m.displacement(0), m.displacement(1)) / std::sqrt(2.0);
  return g;
}

void SearchSpec::validate() const {
  if (grid_points < 2) throw InvalidArgument("search grid needs at least two points per parameter");
  if (refinement_rounds < 0) throw InvalidArgument("refinement rounds must be nonnegative");
  if (shrink < 2) throw InvalidArgument("refinement shrink factor must be at least 2");
  if (!(nbar_min >= kOccupancyFloor) || !(nbar_max > nbar_min)) throw InvalidArgument("bad occupancy bounds");
  if (!(r_max > 0.0) || !(alpha_radius > 0.0)) throw InvalidArgument("search bounds must be positive");
  if (!std::isfinite(nbar_max) || !std::isfinite(r_max) || !std::isfinite(alpha_radius)) {
    throw InvalidArgument("search bounds must be finite");
  }
}

ClosestGaussianSearch brute_force_closest_gaussian(const DensityMatrix& rho, const SearchSpec& spec) {
  spec.validate();
  if (rho.config().num_modes() != 1) throw InvalidArgument("closest-Gaussian search covers single-mode states only");

  const QuadratureOps ops(rho.config());
  const Moments m = extract_moments(rho, ops).moments;
  const double s_rho = von_neumann(rho);
  const AssociateParams assoc = associate_params(m);

  ClosestGaussianSearch out;
  out.associate = single_mode_from_moments(m);
  out.associate_value = gaussian_entropy(assoc.nu) - s_rho;
  out.associate_in_domain = out.associate.nbar <= spec.nbar_max && out.associate.r <= spec.r_max &&
                            std::abs(out.associate.alpha) <= spec.alpha_radius;

  const GridObjective f(m, s_rho, spec);
  const int g = spec.grid_points;
  std::array<std::vector<double>, kSearchDims> axes{
      linspace(spec.nbar_min, spec.nbar_max, g), linspace(0.0, spec.r_max, g), {},
      linspace(-spec.alpha_radius, spec.alpha_radius, g), linspace(-spec.alpha_radius, spec.alpha_radius, g)};
  for (int k = 0; k < g; ++k) axes[2].push_back(kPi * k / g);
  Point step{(spec.nbar_max - spec.nbar_min) / (g - 1), spec.r_max / (g - 1), kPi / g,
             2.0 * spec.alpha_radius / (g - 1), 2.0 * spec.alpha_radius / (g - 1)};
  const Point lo{spec.nbar_min, 0.0, 0.0, -spec.alpha_radius, -spec.alpha_radius};
  const Point hi{spec.nbar_max, spec.r_max, kPi, spec.alpha_radius, spec.alpha_radius};

  GridResult best = scan(axes, f, out);
  if (!best.found) throw DomainError("no finite candidate in the search grid");

  for (int round = 0; round < spec.refinement_rounds; ++round) {
    for (int k = 0; k < kSearchDims; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      step[ku] /= spec.shrink;
      axes[ku] = local_axis(best.best[ku], step[ku], spec.shrink, lo[ku], hi[ku], k == 2);
    }
    const GridResult refined = scan(axes, f, out);
    if (refined.found && refined.value <= best.value) best = refined;
  }

  out.best = from_point(best.best);
  out.best_value = best.value;
  out.gap = out.best_value - out.associate_value;
  out.resolution = step;

  // Second differences at the optimum bound the discretization error of a
  // locally quadratic objective: ½ (Σ_i sqrt(c_i))² with c_i ≈ H_ii h_i².
  double root_sum = 0.0;
  for (int k = 0; k < kSearchDims; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    Point up = best.best;
    Point down = best.best;
    up[ku] += step[ku];
    down[ku] -= step[ku];
    const bool periodic = k == 2;
    const bool has_up = periodic || up[ku] <= hi[ku] + 1e-12;
    const bool has_down = periodic || down[ku] >= lo[ku] - 1e-12;
    if (!periodic) {
      up[ku] = std::min(up[ku], hi[ku]);
      down[ku] = std::max(down[ku], lo[ku]);
    }
    const double fu = has_up ? f(up) : 0.0;
    const double fd = has_down ? f(down) : 0.0;
    double c = 0.0;
    if (has_up && has_down) {
      c = fu + fd - 2.0 * best.value;
    } else if (has_up) {
      c = 2.0 * (fu - best.value);
    } else if (has_down) {
      c = 2.0 * (fd - best.value);
    }
    root_sum += std::sqrt(std::max(c, 0.0));
  }
  out.resolution_bound = 0.5 * root_sum * root_sum;

  const auto& a = out.associate;
  const auto& b = out.best;
  out.parameters_match = std::abs(a.nbar - b.nbar) <= step[0] && std::abs(a.r - b.r) <= step[1] &&
                         std::abs(a.alpha.real() - b.alpha.real()) <= step[3] &&
                         std::abs(a.alpha.imag() - b.alpha.imag()) <= step[4];
  // The squeezing angle is only resolved once the squeezing is.
  if (a.r > 10.0 * step[1]) out.parameters_match = out.parameters_match && angle_distance(a.phi, b.phi) <= step[2];
  return out;
}

MaxEntropyReport max_entropy_sampling(const Moments& moments, const ModeConfig& config, int num_samples,
                                      std::uint64_t seed, const MaxEntropyOptions& opts) {
  if (moments.num_modes() != config.num_modes()) throw ConfigMismatch("moments and configuration disagree on N");
  if (num_samples < 0) throw InvalidArgument("sample count must be nonnegative");
  const AssociateParams assoc = associate_params(moments);
  for (double nu : assoc.nu) {
    if (nu <= 0.5 + opts.margin) {
      throw DomainError("symplectic eigenvalue " + std::to_string(nu) + " within the margin of 1/2: moment shell has no interior");
    }
  }
  const GaussianSynthesis tau = synthesize_gaussian(assoc.params, config, opts.synthesis);
  const QuadratureOps ops(config);
  const Moments tau_moments = extract_moments(tau.state, ops).moments;

  MaxEntropyReport rep;
  rep.seed = seed;
  rep.reference_entropy = von_neumann(tau.state);
  rep.gaussian_entropy = gaussian_entropy(assoc.nu);

  const auto dim = static_cast<int>(config.total_dim());
  const int k = std::min(opts.subspace_dim, dim);
  Eigen::SelfAdjointEigenSolver<Matrix> es(tau.state.data());
  const Matrix p = es.eigenvectors().rightCols(k);
  const RealVector top = es.eigenvalues().tail(k);

  // Moment operators restricted to the subspace, orthonormalized.
  std::vector<Matrix> constraints;
  auto add_constraint = [&](const Matrix& full) {
    Matrix c = p.adjoint() * full * p;
    c = 0.5 * (c + c.adjoint());
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& e : constraints) c -= hs_inner(e, c) * e;
    }
    const double norm = std::sqrt(hs_inner(c, c));
    if (norm > 1e-10) constraints.push_back(c / norm);
  };
  add_constraint(Matrix::Identity(dim, dim));
  for (int l = 0; l < ops.size(); ++l) add_constraint(ops.quadrature(l));
  for (int l = 0; l < ops.size(); ++l) {
    for (int mm = l; mm < ops.size(); ++mm) add_constraint(ops.symmetric_product(l, mm));
  }
  if (static_cast<int>(constraints.size()) >= k * k) {
    throw DomainError("perturbation subspace too small for the moment constraints");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Matrix lam = top.cast<Complex>().asDiagonal();
  double strength_sum = 0.0;
  for (int s = 0; s < num_samples; ++s) {
    Matrix x = random_hermitian(k, rng);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& e : constraints) x -= hs_inner(e, x) * e;
    }
    x /= std::sqrt(hs_inner(x, x));

    auto feasible = [&](double t) { return min_eigenvalue(lam + t * x) >= 0.0; };
    double t_lo = 0.0;
    double t_hi = 1.0;
    for (int it = 0; it < 200 && feasible(t_hi); ++it) t_hi *= 2.0;
    if (feasible(t_hi)) throw DomainError("perturbation does not leave the state space");
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (t_lo + t_hi);
      (feasible(mid) ? t_lo : t_hi) = mid;
    }
    if (t_lo <= 0.0) throw DomainError("moment shell is infeasible: associate Gaussian is singular on the subspace");

    const double t = opts.mixing_max * unit(rng) * t_lo;
    strength_sum += t;
    Matrix sample = tau.state.data() + t * (p * x * p.adjoint());
    sample = 0.5 * (sample + sample.adjoint());
    const DensityMatrix sigma(config, std::move(sample));
    const double entropy = von_neumann(sigma);
    rep.sample_entropies.push_back(entropy);
    rep.max_excess = s == 0 ? entropy - rep.reference_entropy : std::max(rep.max_excess, entropy - rep.reference_entropy);
    if (entropy > rep.reference_entropy + 1e-8) ++rep.violations;
    rep.max_moment_deviation =
        std::max(rep.max_moment_deviation, max_abs_difference(extract_moments(sigma, ops).moments, tau_moments));
  }
  rep.mean_strength = num_samples > 0 ? strength_sum / num_samples : 0.0;
  return rep;
}

double relative_entropy_to_fds(const DensityMatrix& rho, const FockDiagonal& mu) {
  return relative_entropy(rho, to_density(mu));
}

NearestFdsReport nearest_fds_search(const DensityMatrix& rho, int num_perturbations, std::uint64_t seed) {
  if (num_perturbations < 0) throw InvalidArgument("perturbation count must be nonnegative");
  const FockDiagonal star = dephase(rho);
  const double s_rho = von_neumann(rho);
  auto value = [&](const FockDiagonal& mu) {
    const double lt = log_trace(rho, to_density(mu));
    return std::isinf(lt) ? kInfinity : -s_rho - lt;
  };

  NearestFdsReport rep;
  rep.seed = seed;
  rep.dephased = star.lambda();
  rep.base_value = value(star);
  rep.min_margin = kInfinity;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t n = star.lambda().size();
  for (int i = 0; i < num_perturbations; ++i) {
    std::vector<double> mu(n);
    const double scale = std::pow(10.0, -4.0 + 4.0 * unit(rng));
    if (i % 2 == 0) {
      // Mixture with a random distribution on all levels.
      double total = 0.0;
      std::vector<double> q(n);
      for (auto& x : q) total += (x = expo(rng));
      for (std::size_t k = 0; k < n; ++k) mu[k] = (1.0 - scale) * star.lambda()[k] + scale * q[k] / total;
    } else {
      // Multiplicative tilt of the occupied levels.
      double total = 0.0;
      for (std::size_t k = 0; k < n; ++k) total += (mu[k] = star.lambda()[k] * std::exp(scale * normal(rng)));
      for (auto& x : mu) x /= total;
    }
    const double v = value(FockDiagonal(rho.config(), std::move(mu)));
    ++rep.perturbations;
    if (std::isinf(v)) {
      ++rep.divergent;
      continue;
    }
    rep.min_margin = std::min(rep.min_margin, v - rep.base_value);
  }
  if (std::isinf(rep.min_margin)) rep.min_margin = 0.0;
  rep.pass = rep.min_margin >= -1e-9;
  return rep;
}

RealMatrix random_symplectic(int num_modes, double r_max, std::uint64_t seed) {
  if (num_modes < 1) throw InvalidArgument("number of modes must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto passive = [&]() {
    Matrix z(num_modes, num_modes);
    for (int i = 0; i < num_modes; ++i) {
      for (int j = 0; j < num_modes; ++j) z(i, j) = Complex(normal(rng), normal(rng));
    }
    const Matrix u = Eigen::HouseholderQR<Matrix>(z).householderQ();
    RealMatrix o(2 * num_modes, 2 * num_modes);
    for (int j = 0; j < num_modes; ++j) {
      for (int k = 0; k < num_modes; ++k) {
        const double x = u(j, k).real();
        const double y = u(j, k).imag();
        o(2 * j, 2 * k) = x;
        o(2 * j, 2 * k + 1) = -y;
        o(2 * j + 1, 2 * k) = y;
        o(2 * j + 1, 2 * k + 1) = x;
      }
    }
    return o;
  };

  RealMatrix squeeze = RealMatrix::Zero(2 * num_modes, 2 * num_modes);
  for (int j = 0; j < num_modes; ++j) {
    const double r = r_max * unit(rng);
    squeeze(2 * j, 2 * j) = std::exp(r);
    squeeze(2 * j + 1, 2 * j + 1) = std::exp(-r);
  }
  const RealMatrix left = passive();
  const RealMatrix right = passive();
  return left * squeeze * right;
}

std::vector<GaussianParams> sample_gaussian_references(int num_modes, int count, std::uint64_t seed,
                                                       const ReferenceRanges& ranges) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<GaussianParams> refs;
  for (int i = 0; i < count; ++i) {
    GaussianParams p;
    for (int j = 0; j < num_modes; ++j) {
      p.occupancies.push_back(ranges.nbar_min + (ranges.nbar_max - ranges.nbar_min) * unit(rng));
    }
    p.symplectic = random_symplectic(num_modes, ranges.r_max, rng());
    p.displacement = RealVector(2 * num_modes);
    for (int j = 0; j < num_modes; ++j) {
      const double mag = ranges.alpha_max * std::sqrt(unit(rng));
      const double ang = 2.0 * kPi * unit(rng);
      const RealVector d = displacement_from_alpha(std::polar(mag, ang));
      p.displacement.segment(2 * j, 2) = d;
    }
    refs.push_back(std::move(p));
  }
  return refs;
}

}  // namespace ngauss
