#include <doctest.h>

#include <cmath>
#include <random>

#include "slelab/stats.hpp"
#include "support.hpp"

using namespace slelab;
using testing_support::simpson;

namespace {

double weight(double kappa, double sigma, double x) {
  return std::exp((2.0 * sigma / kappa) * x) * std::pow(std::cosh(0.5 * x), -4.0 / kappa);
}

}  // namespace

TEST_SUITE("endpoint density") {
  TEST_CASE("hypotheses are enforced") {
    CHECK_THROWS_AS(DensitySpec::make(6.0, 2.0, -2.0), std::invalid_argument);
    CHECK_THROWS_AS(DensitySpec::make(6.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(endpoint_normalizer(6.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(endpoint_normalizer(6.0, -1.2), std::invalid_argument);
    CHECK_NOTHROW(DensitySpec::make(6.0, 0.5, -0.5));
  }

  TEST_CASE("sigma is half the force difference") {
    const DensitySpec s = DensitySpec::make(6.0, -0.5, 0.5);
    CHECK(s.sigma == doctest::Approx(0.5));
    CHECK(DensitySpec::make(2.0, -2.0, -2.0).sigma == doctest::Approx(0.0));
  }

  TEST_CASE("normalizer agrees with Simpson quadrature") {
    for (double kappa : {2.0, 6.0}) {
      for (double sigma : {0.0, 0.3, -0.6}) {
        const double oracle =
            simpson([&](double x) { return weight(kappa, sigma, x); }, -400.0, 400.0, 400000);
        CHECK(std::abs(endpoint_normalizer(kappa, sigma) - oracle) <= 1e-6 * oracle);
      }
    }
  }

  TEST_CASE("pdf integrates to one, is symmetric for sigma = 0 and tilts with sigma") {
    const EndpointDensity symmetric(DensitySpec::make(6.0, 0.0, 0.0));
    for (double x : {0.1, 1.0, 5.0}) CHECK(symmetric.pdf(x) == doctest::Approx(symmetric.pdf(-x)));
    CHECK(simpson([&](double x) { return symmetric.pdf(x); }, -200.0, 200.0, 200000) ==
          doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(symmetric.mean()) <= 1e-6);

    const EndpointDensity tilted(DensitySpec::make(6.0, -0.5, 0.5));
    CHECK(tilted.mean() > 0.0);
    const double m = simpson([&](double x) { return x * tilted.pdf(x); }, -300.0, 300.0, 300000);
    CHECK(tilted.mean() == doctest::Approx(m).epsilon(1e-4));
  }

  TEST_CASE("quantile inverts the cdf") {
    const EndpointDensity d(DensitySpec::make(2.0, -1.5, -2.5));
    for (double u : {0.01, 0.25, 0.5, 0.9, 0.999}) CHECK(d.cdf(d.quantile(u)) == doctest::Approx(u).epsilon(1e-6));
    const double x = 0.7;
    const double oracle = simpson([&](double s) { return d.pdf(s); }, d.lower(), x, 200000);
    CHECK(d.cdf(x) == doctest::Approx(oracle).epsilon(1e-6));
  }

  TEST_CASE("callable pdf matches the class") {
    const DensitySpec s = DensitySpec::make(6.0, 0.25, -0.25);
    const auto f = theoretical_endpoint_density(s);
    const EndpointDensity d(s);
    for (double x : {-3.0, 0.0, 2.0}) CHECK(f(x) == doctest::Approx(d.pdf(x)));
  }
}

TEST_SUITE("Kolmogorov-Smirnov") {
  TEST_CASE("two-sample limits") {
    const std::vector<double> a{1.0, 2.0, 3.0, 4.0};
    CHECK(ks_statistic(a, a) == 0.0);
    CHECK(ks_statistic(a, std::vector<double>{10.0, 11.0}) == 1.0);
  }

  TEST_CASE("uniform sample against its cdf") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u;
    std::vector<double> v(10000);
    for (double& x : v) x = u(rng);
    const double d = ks_statistic(v, [](double x) { return std::clamp(x, 0.0, 1.0); });
    CHECK(d < 0.03);
    CHECK(d > 0.0);
  }

  TEST_CASE("one-sample statistic of a single point") {
    CHECK(ks_statistic(std::vector<double>{0.5}, [](double x) { return std::clamp(x, 0.0, 1.0); }) ==
          doctest::Approx(0.5));
  }

  TEST_CASE("thresholds") {
    CHECK(ks_threshold(100) == doctest::Approx(0.163));
    CHECK(ks_threshold(100, 100) == doctest::Approx(1.63 * std::sqrt(0.02)));
  }

  TEST_CASE("reflection threshold matches the sup of |W| and its rejection rate") {
    const double c = ks_reflection_threshold(1);
    // Reflection principle tail, accurate to 1e-8 at this level.
    CHECK(2.0 * std::erfc(c / std::sqrt(2.0)) == doctest::Approx(0.01).epsilon(1e-3));
    CHECK(ks_reflection_threshold(400) == doctest::Approx(c / 20.0));

    std::mt19937_64 rng(31);
    std::normal_distribution<double> normal;
    const std::size_t n = 400;
    const int reps = 3000;
    int rejected = 0;
    int rejected_independent = 0;
    for (int r = 0; r < reps; ++r) {
      std::vector<double> x(n), flipped(n);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = normal(rng);
        flipped[i] = -x[i];
      }
      const double d = ks_statistic(x, flipped);
      rejected += d >= ks_reflection_threshold(n) ? 1 : 0;
      rejected_independent += d >= ks_threshold(n, n) ? 1 : 0;
    }
    CHECK(rejected <= 0.02 * reps);
    CHECK(rejected_independent >= 0.025 * reps);
  }
}

TEST_SUITE("exit probability") {
  double oracle(double kappa, double rp, double rm, double x0) {
    const double drift = -(2.0 / kappa) * (rp - rm);
    const double power = (4.0 / kappa) * (0.5 * kappa - 2.0 - 0.5 * (rp + rm));
    auto dh = [&](double x) { return std::exp(0.5 * drift * x) * std::pow(std::cosh(0.5 * x), -power); };
    const double left = simpson(dh, -400.0, x0, 400000);
    const double right = simpson(dh, x0, 400.0, 400000);
    return left / (left + right);
  }

  TEST_CASE("symmetric forces give one half") {
    CHECK(*gap_exit_probability(6.0, -1.0, -1.0, 0.0) == doctest::Approx(0.5));
    CHECK(*gap_exit_probability(2.0, -3.0, -3.0, 0.0) == doctest::Approx(0.5));
  }

  TEST_CASE("general case matches quadrature") {
    for (auto [k, rp, rm, x0] : {std::tuple{6.0, -1.5, -0.5, 0.0}, std::tuple{6.0, -1.0, -1.0, 1.3},
                                 std::tuple{4.0, -1.0, -2.0, -0.4}}) {
      const auto p = gap_exit_probability(k, rp, rm, x0);
      REQUIRE(p.has_value());
      CHECK(*p == doctest::Approx(oracle(k, rp, rm, x0)).epsilon(1e-6));
    }
  }

  TEST_CASE("unbounded scale function") {
    CHECK_FALSE(gap_exit_probability(6.0, 1.0, 1.0, 0.0).has_value());
  }

  TEST_CASE("binomial standard error") {
    CHECK(binomial_stderr(0.5, 100) == doctest::Approx(0.05));
    CHECK(binomial_stderr(0.0, 10) == 0.0);
  }
}
