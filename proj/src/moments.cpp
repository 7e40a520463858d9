#include "ngauss/moments.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "ngauss/errors.hpp"

namespace ngauss {

namespace {

void require_same_config(const DensityMatrix& rho, const QuadratureOps& ops) {
  if (!(rho.config() == ops.config())) throw ConfigMismatch("state and operators use different mode configurations");
}

Complex trace_product(const Matrix& rho, const Matrix& op) {
  // Tr[ρ A] without forming the product.
  return (rho.transpose().cwiseProduct(op)).sum();
}

// Reduced states are shared among all entries touching the same modes.
class ReducedStates {
 public:
  explicit ReducedStates(const DensityMatrix& rho) : rho_(rho) {
    const int n = rho.config().num_modes();
    single_.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) single_.push_back(partial_trace(rho, {j}).data());
  }

  const Matrix& single(int j) const { return single_[static_cast<std::size_t>(j)]; }

  Matrix pair(int j, int k) const { return partial_trace(rho_, {j, k}).data(); }

 private:
  const DensityMatrix& rho_;
  std::vector<Matrix> single_;
};

struct RawMoments {
  RealVector first;
  RealMatrix second;  // symmetrized, not yet centred
  double imag = 0.0;
};

RawMoments raw_moments(const DensityMatrix& rho, const QuadratureOps& ops, bool with_second) {
  require_same_config(rho, ops);
  const int n = rho.config().num_modes();
  const ReducedStates reduced(rho);
  RawMoments raw;
  raw.first = RealVector::Zero(2 * n);
  for (int l = 0; l < 2 * n; ++l) {
    const Complex v = trace_product(reduced.single(l / 2), ops.local(l / 2).first(l % 2));
    raw.first(l) = v.real();
    raw.imag = std::max(raw.imag, std::abs(v.imag()));
  }
  if (!with_second) return raw;

  raw.second = RealMatrix::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    const auto& loc = ops.local(j);
    for (int u = 0; u < 2; ++u) {
      for (int v = u; v < 2; ++v) {
        const Complex e = trace_product(reduced.single(j), loc.second(u, v));
        raw.second(2 * j + u, 2 * j + v) = raw.second(2 * j + v, 2 * j + u) = e.real();
        raw.imag = std::max(raw.imag, std::abs(e.imag()));
      }
    }
    for (int k = j + 1; k < n; ++k) {
      const Matrix pair = reduced.pair(j, k);
      for (int u = 0; u < 2; ++u) {
        for (int v = 0; v < 2; ++v) {
          const Complex e = trace_product(pair, kron(loc.first(u), ops.local(k).first(v)));
          raw.second(2 * j + u, 2 * k + v) = raw.second(2 * k + v, 2 * j + u) = e.real();
          raw.imag = std::max(raw.imag, std::abs(e.imag()));
        }
      }
    }
  }
  return raw;
}

RealMatrix centred(const RawMoments& raw) {
  RealMatrix v = raw.second - raw.first * raw.first.transpose();
  return 0.5 * (v + v.transpose());
}

}  // namespace

RealVector displacement(const DensityMatrix& rho, const QuadratureOps& ops) {
  return raw_moments(rho, ops, false).first;
}

RealMatrix covariance(const DensityMatrix& rho, const QuadratureOps& ops) {
  return centred(raw_moments(rho, ops, true));
}

MomentExtraction extract_moments(const DensityMatrix& rho, const QuadratureOps& ops) {
  const RawMoments raw = raw_moments(rho, ops, true);
  MomentExtraction out;
  out.moments.displacement = raw.first;
  out.moments.covariance = centred(raw);
  out.imaginary_residue = raw.imag;
  out.imaginary_flag = raw.imag >= kImaginaryTolerance;
  const auto tail = tail_populations(rho.config(), rho.populations(), 1);
  const ValidationTolerances defaults;
  out.truncation_warning = std::any_of(tail.begin(), tail.end(), [&](double t) { return t >= defaults.tail; });
  return out;
}

RealMatrix symplectic_form(int num_modes) {
  RealMatrix omega = RealMatrix::Zero(2 * num_modes, 2 * num_modes);
  for (int j = 0; j < num_modes; ++j) {
    omega(2 * j, 2 * j + 1) = 1.0;
    omega(2 * j + 1, 2 * j) = -1.0;
  }
  return omega;
}

UncertaintyCheck check_uncertainty(const Moments& m, double tol) {
  const RealMatrix& v = m.covariance;
  if (v.rows() != v.cols() || v.rows() % 2 != 0 || v.rows() == 0) {
    throw InvalidArgument("covariance matrix must be square with even dimension");
  }
  if ((v - v.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + v.cwiseAbs().maxCoeff())) {
    throw InvalidArgument("covariance matrix is not symmetric");
  }
  const auto n = static_cast<int>(v.rows() / 2);
  const Matrix h = v.cast<Complex>() + Complex(0.0, 0.5) * symplectic_form(n).cast<Complex>();
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  UncertaintyCheck out;
  out.margin = es.eigenvalues().minCoeff();
  out.physical = out.margin >= -tol;
  return out;
}

}  // namespace ngauss
