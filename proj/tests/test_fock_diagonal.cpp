#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ngauss/errors.hpp"
#include "ngauss/fock_diagonal.hpp"
#include "test_support.hpp"

using namespace ngauss;
using ngauss::testing::max_abs;

namespace {

FockDiagonal bell_like() {
  std::vector<double> l(4, 0.0);
  l[0] = l[3] = 0.5;
  return FockDiagonal(ModeConfig({2, 2}), l);
}

double plogp(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace

TEST_CASE("construction") {
  CHECK_THROWS_AS(FockDiagonal(ModeConfig({2}), {1.2, -0.2}), InvalidState);
  CHECK_THROWS_AS(FockDiagonal(ModeConfig({2}), {0.5, 0.4}), InvalidState);
  CHECK_THROWS_AS(FockDiagonal(ModeConfig({3}), {0.5, 0.5}), InvalidArgument);
  const FockDiagonal p = FockDiagonal::product({{0.25, 0.75}, {0.1, 0.2, 0.7}});
  CHECK(p.config() == ModeConfig({2, 3}));
  const std::vector<int> occ{1, 2};
  CHECK(p[occ] == doctest::Approx(0.75 * 0.7));
}

TEST_CASE("marginals") {
  const MarginalSet b = marginals(bell_like());
  CHECK(b.distributions[0] == std::vector<double>{0.5, 0.5});
  CHECK(b.distributions[1] == std::vector<double>{0.5, 0.5});
  CHECK(b.means == std::vector<double>{0.5, 0.5});

  const MarginalSet pm = marginals(FockDiagonal::product({{0.25, 0.75}, {0.1, 0.2, 0.7}}));
  CHECK(pm.distributions[0][1] == doctest::Approx(0.75));
  CHECK(pm.distributions[1][2] == doctest::Approx(0.7));
  CHECK(pm.means[1] == doctest::Approx(1.6));

  const MarginalSet one = marginals(FockDiagonal(ModeConfig({3}), {0.2, 0.3, 0.5}));
  CHECK(one.distributions[0] == std::vector<double>{0.2, 0.3, 0.5});
}

TEST_CASE("product state and total mutual information") {
  const FockDiagonal pi = product_state(bell_like());
  for (double x : pi.lambda()) CHECK(x == doctest::Approx(0.25));
  CHECK(total_mutual_information(bell_like()) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(std::abs(total_mutual_information(FockDiagonal::product({{0.5, 0.5}, {0.5, 0.5}}))) < 1e-15);

  const FockDiagonal p = FockDiagonal::product({{0.25, 0.75}, {0.1, 0.2, 0.7}});
  const FockDiagonal pp = product_state(p);
  for (std::size_t i = 0; i < p.lambda().size(); ++i) CHECK(std::abs(pp.lambda()[i] - p.lambda()[i]) < 1e-15);
  CHECK(std::abs(total_mutual_information(p)) < 1e-14);

  const FockDiagonal single(ModeConfig({3}), {0.2, 0.3, 0.5});
  CHECK(product_state(single).lambda() == single.lambda());
}

TEST_CASE("covariance closed form") {
  std::mt19937_64 rng(79);
  for (int k = 0; k < 10; ++k) {
    const ModeConfig c = k % 2 ? ModeConfig({5, 4}) : ModeConfig({7});
    const FockDiagonal f(c, ngauss::testing::random_distribution(c.total_dim(), rng, 0.2));
    const Moments closed = fds_covariance(f);
    const Moments dense = extract_moments(to_density(f), QuadratureOps(c)).moments;
    CHECK(max_abs(closed.covariance - dense.covariance) < 1e-10);
    CHECK(dense.displacement.cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK(max_abs(fds_covariance(FockDiagonal(ModeConfig({3}), {0.0, 1.0, 0.0})).covariance -
                1.5 * RealMatrix::Identity(2, 2)) == 0.0);
  CHECK(max_abs(fds_covariance(FockDiagonal(ModeConfig({3}), {0.5, 0.5, 0.0})).covariance -
                RealMatrix::Identity(2, 2)) == 0.0);
  CHECK(max_abs(fds_covariance(FockDiagonal(ModeConfig({3}), {1.0, 0.0, 0.0})).covariance -
                0.5 * RealMatrix::Identity(2, 2)) == 0.0);
}

TEST_CASE("closest Gaussian is thermal") {
  const GaussianParams g1 = closest_gaussian_fds(FockDiagonal(ModeConfig({3}), {0.0, 1.0, 0.0}));
  CHECK(g1.occupancies == std::vector<double>{1.0});
  CHECK(max_abs(g1.symplectic - RealMatrix::Identity(2, 2)) == 0.0);
  const GaussianParams g2 = closest_gaussian_fds(bell_like());
  CHECK(g2.occupancies == std::vector<double>{0.5, 0.5});

  std::vector<double> geo(30);
  for (int n = 0; n < 30; ++n) geo[static_cast<std::size_t>(n)] = thermal_state(0.7, 30).data()(n, n).real();
  CHECK(closest_gaussian_fds(FockDiagonal(ModeConfig({30}), geo)).occupancies[0] == doctest::Approx(0.7).epsilon(1e-6));

  // Same as the generic associate on the dense realization.
  std::mt19937_64 rng(83);
  const ModeConfig c({5, 5});
  const FockDiagonal f(c, ngauss::testing::random_distribution(c.total_dim(), rng));
  const AssociateParams a = associate_params(extract_moments(to_density(f), QuadratureOps(c)).moments);
  const GaussianParams t = closest_gaussian_fds(f);
  for (int j = 0; j < 2; ++j) {
    CHECK(std::abs(a.params.occupancies[static_cast<std::size_t>(j)] - t.occupancies[static_cast<std::size_t>(j)]) < 1e-10);
  }
  CHECK(max_abs(a.params.symplectic - RealMatrix::Identity(4, 4)) < 1e-8);
}

TEST_CASE("closed-form non-Gaussianity") {
  CHECK(nongauss_fds(FockDiagonal(ModeConfig({3}), {0.0, 1.0, 0.0})) == doctest::Approx(2 * std::log(2.0)).epsilon(1e-14));
  CHECK(nongauss_fds(FockDiagonal(ModeConfig({2}), {0.5, 0.5})) == doctest::Approx(0.261624).epsilon(1e-6));
  const double single = 1.5 * std::log(1.5) - 0.5 * std::log(0.5);
  CHECK(single == doctest::Approx(0.954771).epsilon(1e-6));
  CHECK(nongauss_fds(bell_like()) == doctest::Approx(2 * single - std::log(2.0)).epsilon(1e-13));
  CHECK(nongauss_product(bell_like()) == doctest::Approx(2 * (single - std::log(2.0))).epsilon(1e-13));
  CHECK(nongauss_product(bell_like()) == doctest::Approx(0.523248).epsilon(1e-6));

  const FockDiagonal one(ModeConfig({3}), {0.2, 0.3, 0.5});
  CHECK(nongauss_fds(one) == doctest::Approx(nongauss_product(one)).epsilon(1e-14));
  const FockDiagonal p = FockDiagonal::product({{0.25, 0.75}, {0.1, 0.2, 0.7}});
  CHECK(std::abs(nongauss_fds(p) - nongauss_product(p)) < 1e-13);
  CHECK(std::abs(nongauss_product(bell_like()) - nongauss_fds(product_state(bell_like()))) < 1e-13);
}

TEST_CASE("Corollary 3 and the product inequality on random distributions") {
  std::mt19937_64 rng(89);
  for (int k = 0; k < 30; ++k) {
    const ModeConfig c = k % 3 == 0 ? ModeConfig({6}) : ModeConfig({3 + k % 3, 4});
    const FockDiagonal f(c, ngauss::testing::random_distribution(c.total_dim(), rng, 0.15));
    // Oracle from the definitions: marginal sums and Shannon entropies.
    std::vector<std::vector<double>> marg(static_cast<std::size_t>(c.num_modes()));
    for (int j = 0; j < c.num_modes(); ++j) marg[static_cast<std::size_t>(j)].assign(static_cast<std::size_t>(c.cutoff(j)), 0.0);
    double joint = 0.0;
    for (std::size_t i = 0; i < c.total_dim(); ++i) {
      const auto occ = c.multi_index(i);
      for (int j = 0; j < c.num_modes(); ++j) marg[static_cast<std::size_t>(j)][static_cast<std::size_t>(occ[static_cast<std::size_t>(j)])] += f.lambda()[i];
      joint -= plogp(f.lambda()[i]);
    }
    double sum_marg = 0.0;
    for (const auto& m : marg) {
      for (double x : m) sum_marg -= plogp(x);
    }
    const double tmi = total_mutual_information(f);
    CHECK(std::abs(tmi - (sum_marg - joint)) < 1e-12);
    CHECK(std::abs(nongauss_fds(f) - nongauss_product(f) - tmi) < 1e-9);
    CHECK(nongauss_fds(f) >= nongauss_product(f) - 1e-12);
    if (c.num_modes() == 2) CHECK(tmi > 1e-6);
  }
}

TEST_CASE("closed form agrees with the generic pipeline") {
  std::mt19937_64 rng(97);
  for (int k = 0; k < 5; ++k) {
    const ModeConfig c = k % 2 ? ModeConfig({12, 12}) : ModeConfig({30});
    const FockDiagonal f(c, ngauss::testing::random_damped_distribution(c, rng, 0.3));
    CHECK(std::abs(nongauss_fds(f) - nongaussianity(to_density(f)).delta_s) < 1e-6);
  }
}

TEST_CASE("dephasing") {
  const FockDiagonal f(ModeConfig({3}), {0.2, 0.3, 0.5});
  CHECK(dephase(to_density(f)).lambda() == f.lambda());

  const DensityMatrix coh = coherent_state({1.0, 0.0}, 30);
  const FockDiagonal poisson = dephase(coh);
  double fact = 1.0;
  for (int n = 0; n < 12; ++n) {
    if (n > 0) fact *= n;
    CHECK(poisson.lambda()[static_cast<std::size_t>(n)] == doctest::Approx(std::exp(-1.0) / fact).epsilon(1e-9));
  }

  Vector psi = Vector::Zero(4);
  psi(0) = psi(1) = 1.0;
  const DensityMatrix sup = DensityMatrix::from_pure(ModeConfig({4}), psi);
  const FockDiagonal d = dephase(sup);
  CHECK(d.lambda()[0] == doctest::Approx(0.5));
  CHECK(d.lambda()[1] == doctest::Approx(0.5));

  // Idempotent.
  std::mt19937_64 rng(101);
  const DensityMatrix r = ngauss::testing::random_state(ModeConfig({3, 3}), 2, rng);
  const FockDiagonal once = dephase(r);
  CHECK(dephase(to_density(once)).lambda() == once.lambda());
}

TEST_CASE("dephasing entropy gain") {
  CHECK(std::abs(dephasing_entropy_gain(to_density(FockDiagonal(ModeConfig({3}), {0.2, 0.3, 0.5}))).gain) < 1e-12);

  Vector psi = Vector::Zero(4);
  psi(0) = psi(1) = 1.0;
  const DephasingGain g = dephasing_entropy_gain(DensityMatrix::from_pure(ModeConfig({4}), psi));
  CHECK(g.gain == doctest::Approx(std::log(2.0)).epsilon(1e-10));
  CHECK(g.residual < 1e-5);

  const DensityMatrix coh = coherent_state({1.0, 0.0}, 30);
  const std::vector<double> pops = coh.populations();
  CHECK(std::abs(dephasing_entropy_gain(coh).gain - shannon(pops)) < 1e-8);

  std::mt19937_64 rng(103);
  for (int k = 0; k < 10; ++k) {
    const DensityMatrix r = ngauss::testing::random_state(k % 2 ? ModeConfig({3, 3}) : ModeConfig({6}), 1 + k % 4, rng);
    const DephasingGain d = dephasing_entropy_gain(r);
    CHECK(d.gain >= -1e-9);
    CHECK(std::abs(d.gain - d.relative_entropy) < 1e-5);
    CHECK(d.residual < 1e-5);
  }
}
