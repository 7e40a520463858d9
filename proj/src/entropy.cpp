#include "ngauss/entropy.hpp"

#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "ngauss/errors.hpp"

namespace ngauss {

namespace {

void require_same_config(const DensityMatrix& a, const DensityMatrix& b) {
  if (!(a.config() == b.config())) throw ConfigMismatch("states use different mode configurations");
}

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

double entropy_of_spectrum(const RealVector& eig) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < eig.size(); ++k) {
    const double lam = eig(k);
    if (lam < -kNegativityTolerance) {
      throw InvalidState("state has a negative eigenvalue " + std::to_string(lam));
    }
    if (lam > kEigenFloor) s -= lam * std::log(lam);
  }
  return s;
}

bool is_diagonal(const Matrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (i != j && m(i, j) != Complex(0.0, 0.0)) return false;
    }
  }
  return true;
}

}  // namespace

double von_neumann(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(rho.data()), Eigen::EigenvaluesOnly);
  return entropy_of_spectrum(es.eigenvalues());
}

double shannon(std::span<const double> p) {
  double total = 0.0;
  double s = 0.0;
  for (double x : p) {
    if (x < 0.0) throw InvalidState("probability entry is negative");
    total += x;
    if (x > 0.0) s -= x * std::log(x);
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidState("probabilities do not sum to one");
  return s;
}

double log_trace(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  require_same_config(rho1, rho2);
  const Matrix& r2 = rho2.data();
  RealVector lam;
  // Weights of ρ₁ along the eigenvectors of ρ₂.
  RealVector weight;
  if (is_diagonal(r2)) {
    lam = r2.diagonal().real();
    weight = rho1.data().diagonal().real();
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(r2));
    lam = es.eigenvalues();
    const Matrix& u = es.eigenvectors();
    weight = (u.adjoint() * rho1.data() * u).diagonal().real();
  }
  double outside = 0.0;
  double acc = 0.0;
  for (Eigen::Index k = 0; k < lam.size(); ++k) {
    if (lam(k) < -kNegativityTolerance) throw InvalidState("reference state has a negative eigenvalue");
    if (lam(k) < kEigenFloor) outside += weight(k);
    acc += weight(k) * std::log(std::max(lam(k), kEigenFloor));
  }
  if (outside > kSupportTolerance) return -kInfinity;
  return acc;
}

double relative_entropy(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  require_same_config(rho1, rho2);
  const double lt = log_trace(rho1, rho2);
  if (std::isinf(lt)) return kInfinity;
  return -von_neumann(rho1) - lt;
}

double gaussian_cross_entropy(const Moments& m, const GaussianLogForm& lf) {
  const auto n2 = m.displacement.size();
  if (m.covariance.rows() != n2 || lf.quadratic.rows() != n2 || lf.displacement.size() != n2) {
    throw InvalidArgument("moment and log-form dimensions differ");
  }
  const RealVector dd = m.displacement - lf.displacement;
  const RealMatrix second = m.covariance + dd * dd.transpose();
  return -0.5 * (lf.quadratic.cwiseProduct(second)).sum() + lf.constant;
}

NonGaussReport nongaussianity(const DensityMatrix& rho, const NonGaussOptions& opts) {
  const QuadratureOps ops(rho.config());
  const MomentExtraction ex = extract_moments(rho, ops);

  NonGaussReport rep;
  rep.imaginary_residue = ex.imaginary_residue;
  rep.truncation_warning = ex.truncation_warning;
  rep.associate = associate_params(ex.moments);
  rep.boundary_flag = rep.associate.boundary;
  rep.entropy_state = von_neumann(rho);
  rep.entropy_gaussian = gaussian_entropy(rep.associate.nu);
  rep.delta_s = rep.entropy_gaussian - rep.entropy_state;

  if (!opts.dense_check) {
    rep.dense_check_note = "disabled";
    return rep;
  }
  try {
    const GaussianSynthesis tau = synthesize_gaussian(rep.associate.params, rho.config(), opts.synthesis);
    rep.gaussian_leakage = tau.leakage;
    const double rel = relative_entropy(rho, tau.state);
    rep.dense_relative_entropy = rel;
    rep.identity_residual = std::abs(rel - rep.delta_s);
    rep.dense_check_note = "ok";
  } catch (const TruncationError& e) {
    rep.dense_check_note = std::string("skipped: ") + e.what();
  }
  return rep;
}

Theorem1Residual theorem1_identity(const DensityMatrix& rho, const GaussianParams& reference,
                                   const SynthesisOptions& opts) {
  const QuadratureOps ops(rho.config());
  const Moments m = extract_moments(rho, ops).moments;
  const AssociateParams tau = associate_params(m);

  const double s_rho = von_neumann(rho);
  const double rel_ref = -gaussian_cross_entropy(m, log_form(reference)) - s_rho;
  const double rel_tau = -gaussian_cross_entropy(m, log_form(tau.params)) - s_rho;

  // ln ρ_G is taken from its exponent: the synthesized spectrum of a cold
  // reference drops below the eigenvalue floor at the top levels while τ_G
  // still has weight there.
  const GaussianSynthesis tau_state = synthesize_gaussian(tau.params, rho.config(), opts);
  const Matrix log_ref = log_form_matrix(log_form(reference), ops);
  const double cross = (tau_state.state.data().transpose().cwiseProduct(log_ref)).sum().real();

  Theorem1Residual out;
  out.lhs = rel_ref - rel_tau;
  out.rhs = -von_neumann(tau_state.state) - cross;
  out.residual = std::abs(out.lhs - out.rhs);
  out.gap = out.rhs;
  return out;
}

}  // namespace ngauss
