#include "ngauss/gaussian_states.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "ngauss/errors.hpp"

namespace ngauss {

namespace {

// Boltzmann factor e^-60 is far below double resolution relative to 1, so a
// mode with this exponent is pure for every practical purpose.
constexpr double kMaxExponent = 60.0;

RealMatrix mode_diagonal(const std::vector<double>& per_mode) {
  const auto n = static_cast<Eigen::Index>(per_mode.size());
  RealMatrix d = RealMatrix::Zero(2 * n, 2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    d(2 * j, 2 * j) = per_mode[static_cast<std::size_t>(j)];
    d(2 * j + 1, 2 * j + 1) = per_mode[static_cast<std::size_t>(j)];
  }
  return d;
}

// Exponent of exp(−½ δRᵀ G δR) for V = S diag(ν) Sᵀ: G = S⁻ᵀ diag(η) S⁻¹,
// written with S⁻¹ = Ω Sᵀ Ωᵀ.
RealMatrix exponent_matrix(const RealMatrix& s, const std::vector<double>& eta) {
  const RealMatrix omega = symplectic_form(static_cast<int>(eta.size()));
  const RealMatrix g = omega * s * mode_diagonal(eta) * s.transpose() * omega.transpose();
  return 0.5 * (g + g.transpose());
}

void check_params(const GaussianParams& p) {
  const auto n2 = static_cast<Eigen::Index>(2 * p.occupancies.size());
  if (p.occupancies.empty()) throw InvalidArgument("Gaussian parameters need at least one mode");
  if (p.symplectic.rows() != n2 || p.symplectic.cols() != n2 || p.displacement.size() != n2) {
    throw InvalidArgument("Gaussian parameter shapes do not match the number of modes");
  }
  for (double nbar : p.occupancies) {
    if (!(nbar >= 0.0) || !std::isfinite(nbar)) throw DomainError("mean occupancies must be finite and nonnegative");
  }
  if (symplectic_residual(p.symplectic) > 1e-10 * std::max(1.0, p.symplectic.squaredNorm())) {
    throw InvalidArgument("matrix is not symplectic");
  }
}

// ½ (R − d)ᵀ G (R − d) with compressed second moments.
Matrix quadratic_operator(const RealMatrix& g, const RealVector& d, const QuadratureOps& ops) {
  const auto dim = static_cast<Eigen::Index>(ops.config().total_dim());
  const int n2 = ops.size();
  Matrix h = Matrix::Zero(dim, dim);
  std::vector<Matrix> r;
  r.reserve(static_cast<std::size_t>(n2));
  for (int l = 0; l < n2; ++l) r.push_back(ops.quadrature(l));
  for (int l = 0; l < n2; ++l) {
    for (int m = l; m < n2; ++m) {
      const double w = (l == m) ? 0.5 * g(l, m) : g(l, m);
      if (w == 0.0) continue;
      if (l / 2 == m / 2) {
        h += w * ops.embed(ops.local(l / 2).second(l % 2, m % 2), l / 2);
      } else {
        h += w * (r[static_cast<std::size_t>(l)] * r[static_cast<std::size_t>(m)]);
      }
    }
  }
  const RealVector gd = g * d;
  for (int l = 0; l < n2; ++l) {
    if (gd(l) != 0.0) h -= gd(l) * r[static_cast<std::size_t>(l)];
  }
  h += Matrix::Identity(dim, dim) * (0.5 * d.dot(gd));
  return 0.5 * (h + h.adjoint());
}

}  // namespace

GaussianParams GaussianParams::thermal(std::vector<double> occupancies) {
  const auto n2 = static_cast<Eigen::Index>(2 * occupancies.size());
  GaussianParams p;
  p.occupancies = std::move(occupancies);
  p.symplectic = RealMatrix::Identity(n2, n2);
  p.displacement = RealVector::Zero(n2);
  return p;
}

RealMatrix GaussianParams::covariance() const {
  std::vector<double> nu(occupancies.size());
  std::transform(occupancies.begin(), occupancies.end(), nu.begin(), [](double n) { return n + 0.5; });
  return symplectic * mode_diagonal(nu) * symplectic.transpose();
}

Moments GaussianParams::moments() const { return {displacement, covariance()}; }

double symplectic_residual(const RealMatrix& s) {
  if (s.rows() != s.cols() || s.rows() % 2 != 0) throw InvalidArgument("symplectic matrix must be square, even-sized");
  const RealMatrix omega = symplectic_form(static_cast<int>(s.rows() / 2));
  return (s * omega * s.transpose() - omega).cwiseAbs().maxCoeff();
}

WilliamsonForm williamson(const RealMatrix& v, double tol) {
  if (v.rows() != v.cols() || v.rows() % 2 != 0 || v.rows() == 0) {
    throw InvalidArgument("covariance matrix must be square with even dimension");
  }
  const double scale = v.cwiseAbs().maxCoeff();
  if ((v - v.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + scale)) {
    throw InvalidArgument("covariance matrix is not symmetric");
  }
  const RealMatrix sym = 0.5 * (v + v.transpose());
  const auto n = static_cast<int>(v.rows() / 2);

  Eigen::SelfAdjointEigenSolver<RealMatrix> ev(sym);
  if (ev.eigenvalues().minCoeff() <= 0.0) throw DomainError("covariance matrix is not positive definite");
  const RealVector sqrt_diag = ev.eigenvalues().cwiseSqrt();
  const RealMatrix v_half = ev.eigenvectors() * sqrt_diag.asDiagonal() * ev.eigenvectors().transpose();
  const RealMatrix v_inv_half =
      ev.eigenvectors() * sqrt_diag.cwiseInverse().asDiagonal() * ev.eigenvectors().transpose();

  // i V^{-1/2} Ω V^{-1/2} is Hermitian with eigenvalues ±1/ν_j.
  const RealMatrix k = v_inv_half * symplectic_form(n) * v_inv_half;
  const Matrix ik = Complex(0.0, 1.0) * k.cast<Complex>();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (ik + ik.adjoint()));

  // Inside a degenerate eigenspace the solver's basis is arbitrary. Replace it
  // by Gram-Schmidt on the projections of the coordinate vectors, so that
  // e.g. a thermal covariance gives S = 1.
  Matrix vecs = es.eigenvectors();
  for (int start = n; start < 2 * n;) {
    int stop = start + 1;
    const double lam0 = es.eigenvalues()(start);
    while (stop < 2 * n && std::abs(es.eigenvalues()(stop) - lam0) <= 1e-10 * std::abs(lam0)) ++stop;
    const int k = stop - start;
    if (k > 1) {
      const Matrix u = es.eigenvectors().middleCols(start, k);
      const Matrix proj = u * u.adjoint();
      std::vector<Vector> basis;
      for (int c = 0; c < 2 * n && static_cast<int>(basis.size()) < k; ++c) {
        Vector w = proj.col(c);
        for (const auto& b : basis) w -= b * b.dot(w);
        if (w.norm() > 1e-6) basis.push_back(w / w.norm());
      }
      for (int c = 0; c < k; ++c) vecs.col(start + c) = basis[static_cast<std::size_t>(c)];
    }
    start = stop;
  }

  struct Pair {
    double nu;
    RealVector a;
    RealVector b;
  };
  std::vector<Pair> pairs;
  pairs.reserve(static_cast<std::size_t>(n));
  for (int idx = n; idx < 2 * n; ++idx) {
    const double lam = es.eigenvalues()(idx);
    if (lam <= 0.0) throw DomainError("degenerate symplectic spectrum");
    const Vector u = vecs.col(idx);
    // u and conj(u) are orthogonal, so Re u ⟂ Im u with equal norms.
    RealVector a = u.real();
    RealVector b = -u.imag();
    a.normalize();
    b.normalize();
    pairs.push_back({1.0 / lam, std::move(a), std::move(b)});
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
    if (std::abs(x.nu - y.nu) > 1e-10 * std::max(1.0, x.nu)) return x.nu > y.nu;
    for (Eigen::Index i = 0; i < x.a.size(); ++i) {
      if (std::abs(x.a(i) - y.a(i)) > 1e-12) return x.a(i) > y.a(i);
    }
    return false;
  });

  WilliamsonForm out;
  RealMatrix o(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    const auto& pr = pairs[static_cast<std::size_t>(j)];
    if (pr.nu < 0.5 - tol) {
      throw DomainError("covariance violates the uncertainty principle (nu = " + std::to_string(pr.nu) + ")");
    }
    out.nu.push_back(pr.nu);
    o.col(2 * j) = pr.a / std::sqrt(pr.nu);
    o.col(2 * j + 1) = pr.b / std::sqrt(pr.nu);
  }
  RealMatrix s = v_half * o;

  // Fix the per-pair rotation gauge: make each diagonal 2x2 block symmetric
  // with nonnegative trace.
  for (int j = 0; j < n; ++j) {
    const double b11 = s(2 * j, 2 * j);
    const double b12 = s(2 * j, 2 * j + 1);
    const double b21 = s(2 * j + 1, 2 * j);
    const double b22 = s(2 * j + 1, 2 * j + 1);
    const double theta = std::atan2(b12 - b21, b11 + b22);
    const double c = std::cos(theta);
    const double sn = std::sin(theta);
    const RealVector c0 = s.col(2 * j);
    const RealVector c1 = s.col(2 * j + 1);
    s.col(2 * j) = c * c0 + sn * c1;
    s.col(2 * j + 1) = -sn * c0 + c * c1;
  }
  out.symplectic = std::move(s);
  return out;
}

RealMatrix single_mode_symplectic(double r, double phi) {
  RealMatrix rot(2, 2);
  rot << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  RealMatrix sq = RealMatrix::Zero(2, 2);
  sq(0, 0) = std::exp(r);
  sq(1, 1) = std::exp(-r);
  return rot * sq * rot.transpose();
}

RealVector displacement_from_alpha(Complex alpha) {
  RealVector d(2);
  d << std::sqrt(2.0) * alpha.real(), std::sqrt(2.0) * alpha.imag();
  return d;
}

double thermal_exponent(double nbar) {
  if (nbar < 0.0) throw DomainError("mean occupancy must be nonnegative");
  if (nbar == 0.0) return kMaxExponent;
  return std::min(std::log1p(1.0 / nbar), kMaxExponent);
}

double thermal_leakage(double nbar, int cutoff) {
  if (nbar < 0.0) throw DomainError("mean occupancy must be nonnegative");
  if (nbar == 0.0) return 0.0;
  return std::pow(nbar / (nbar + 1.0), cutoff);
}

DensityMatrix thermal_state(double nbar, int cutoff) {
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) throw DomainError("mean occupancy must be finite and nonnegative");
  ModeConfig config({cutoff});
  Matrix m = Matrix::Zero(cutoff, cutoff);
  const double ratio = nbar / (nbar + 1.0);
  const double norm = (1.0 / (nbar + 1.0)) / (1.0 - thermal_leakage(nbar, cutoff));
  double w = norm;
  for (int n = 0; n < cutoff; ++n) {
    m(n, n) = w;
    w *= ratio;
  }
  return DensityMatrix(std::move(config), std::move(m));
}

DensityMatrix coherent_state(Complex alpha, int cutoff) {
  Vector psi(cutoff);
  Complex amp = std::exp(-0.5 * std::norm(alpha));
  for (int n = 0; n < cutoff; ++n) {
    psi(n) = amp;
    amp *= alpha / std::sqrt(static_cast<double>(n + 1));
  }
  return DensityMatrix::from_pure(ModeConfig({cutoff}), psi);
}

GaussianSynthesis synthesize_gaussian(const GaussianParams& params, const ModeConfig& config,
                                      const SynthesisOptions& opts) {
  check_params(params);
  if (params.num_modes() != config.num_modes()) throw ConfigMismatch("parameters and configuration disagree on N");

  std::vector<double> eta(params.occupancies.size());
  std::transform(params.occupancies.begin(), params.occupancies.end(), eta.begin(), thermal_exponent);
  const RealMatrix g = exponent_matrix(params.symplectic, eta);

  const QuadratureOps ops(config);
  const Matrix h = quadratic_operator(g, params.displacement, ops);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const RealVector& energies = es.eigenvalues();
  const double spread = energies.cwiseAbs().maxCoeff();
  if (!std::isfinite(spread) || spread > opts.max_exponent_norm) {
    throw DomainError("Gaussian exponent is ill-conditioned (norm " + std::to_string(spread) + ")");
  }
  const double e_min = energies.minCoeff();
  RealVector w = (-(energies.array() - e_min)).exp().matrix();
  const double z = w.sum();

  // Exact normalization: ρ_G = exp(c) exp(−H) with c from the occupancies
  // implied by the (possibly capped) exponents.
  double c = 0.0;
  for (double e : eta) c += -std::log1p(1.0 / std::expm1(e)) + 0.5 * e;
  const double leakage = 1.0 - std::exp(c - e_min + std::log(z));

  w /= z;
  Matrix rho = es.eigenvectors() * w.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  rho = 0.5 * (rho + rho.adjoint());

  GaussianSynthesis out{DensityMatrix(config, std::move(rho)), leakage, {}};
  out.tail_mass = tail_populations(config, out.state.populations(), 1);
  for (std::size_t j = 0; j < out.tail_mass.size(); ++j) {
    if (out.tail_mass[j] > opts.tail_limit) {
      throw TruncationError("Gaussian state not resolved at cutoff " + std::to_string(config.cutoff(static_cast<int>(j))) +
                            " of mode " + std::to_string(j) + " (top-level population " +
                            std::to_string(out.tail_mass[j]) + "); increase cutoff");
    }
  }
  return out;
}

DensityMatrix single_mode_gaussian(double nbar, double r, double phi, Complex alpha, int cutoff,
                                   const SynthesisOptions& opts) {
  if (!std::isfinite(r) || !std::isfinite(phi) || !std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
    throw InvalidArgument("single-mode Gaussian parameters must be finite");
  }
  GaussianParams p{{nbar}, single_mode_symplectic(r, phi), displacement_from_alpha(alpha)};
  return synthesize_gaussian(p, ModeConfig({cutoff}), opts).state;
}

AssociateParams associate_params(const Moments& m) {
  const WilliamsonForm wf = williamson(m.covariance);
  AssociateParams out;
  out.nu = wf.nu;
  out.params.symplectic = wf.symplectic;
  out.params.displacement = m.displacement;
  for (double nu : wf.nu) {
    double nbar = nu - 0.5;
    if (nbar < kOccupancyFloor) {
      out.boundary = true;
      nbar = kOccupancyFloor;
    }
    out.params.occupancies.push_back(nbar);
  }
  return out;
}

AssociateGaussian associate_gaussian(const DensityMatrix& rho, const QuadratureOps& ops, const SynthesisOptions& opts) {
  const MomentExtraction ex = extract_moments(rho, ops);
  AssociateParams assoc = associate_params(ex.moments);
  GaussianSynthesis syn = synthesize_gaussian(assoc.params, rho.config(), opts);
  return {std::move(assoc), std::move(syn)};
}

double gaussian_entropy(const std::vector<double>& nu, double tol) {
  double s = 0.0;
  for (double v : nu) {
    if (!(v >= 0.5 - tol)) throw DomainError("symplectic eigenvalue below 1/2: " + std::to_string(v));
    const double x = v - 0.5;
    if (x <= 0.0) continue;
    s += (x + 1.0) * std::log1p(x) - x * std::log(x);
  }
  return s;
}

GaussianLogForm log_form(const GaussianParams& params) {
  check_params(params);
  std::vector<double> eta;
  double c = 0.0;
  for (double nbar : params.occupancies) {
    if (nbar < kOccupancyFloor) {
      throw DomainError("occupancy below the floor: pure Gaussian references have no logarithm");
    }
    const double e = std::log1p(1.0 / nbar);
    eta.push_back(e);
    c += -std::log1p(nbar) + 0.5 * e;
  }
  GaussianLogForm lf;
  lf.quadratic = exponent_matrix(params.symplectic, eta);
  lf.constant = c;
  lf.displacement = params.displacement;
  return lf;
}

Matrix log_form_matrix(const GaussianLogForm& lf, const QuadratureOps& ops) {
  const auto dim = static_cast<Eigen::Index>(ops.config().total_dim());
  return -quadratic_operator(lf.quadratic, lf.displacement, ops) + lf.constant * Matrix::Identity(dim, dim);
}

}  // namespace ngauss
