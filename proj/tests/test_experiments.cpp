#include <doctest.h>

#include <cmath>
#include <numbers>

#include "slelab/experiments.hpp"
#include "slelab/stats.hpp"
#include "support.hpp"

using namespace slelab;

namespace {

constexpr double kPi = std::numbers::pi;

const Check* find_check(const ExperimentReport& r, const std::string& name) {
  for (const Check& c : r.checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

}  // namespace

TEST_SUITE("report plumbing") {
  TEST_CASE("checks compare in the stated direction") {
    CHECK(make_check("a", 0.1, "<", 0.2).passed);
    CHECK_FALSE(make_check("a", 0.2, "<", 0.2).passed);
    CHECK(make_check("a", 0.2, "<=", 0.2).passed);
    CHECK(make_check("a", 0.9, ">=", 0.9).passed);
    CHECK_FALSE(make_check("a", 0.8, ">=", 0.9).passed);
    CHECK_THROWS_AS(make_check("a", 0.0, "==", 0.0), std::invalid_argument);
  }

  TEST_CASE("finalize uses the first required check as headline") {
    ExperimentReport r;
    r.add(make_check("info", 5.0, "<", 1.0, false));
    r.add(make_check("main", 0.1, "<", 0.2));
    r.add(make_check("second", 0.95, ">=", 0.9));
    r.finalize();
    CHECK(r.passed);
    CHECK(r.statistic == 0.1);
    CHECK(r.threshold == 0.2);
    CHECK(r.comparison == "<");

    r.add(make_check("third", 0.5, ">=", 0.9));
    r.finalize();
    CHECK_FALSE(r.passed);
  }
}

TEST_SUITE("limit classification") {
  TEST_CASE("case labels") {
    CHECK(limit_case(6.0, 1.0, 1.0) == "11");
    CHECK(limit_case(6.0, 2.0, -2.0) == "13");
    CHECK(limit_case(6.0, -2.0, 2.0) == "31");
    CHECK(limit_case(6.0, -1.0, -1.0) == "33");
    CHECK(limit_case(6.0, 0.0, -1.0) == "23");
    CHECK(limit_case(6.0, 1.0, 0.0) == "12");
  }

  TEST_CASE("outcomes of terminal points") {
    LimitParams p;
    p.p0_re = 0.5;
    CHECK(classify_limit(Complex(-9.0, 1.0), p) == LimitOutcome::MinusInfinity);
    CHECK(classify_limit(Complex(9.0, 1.0), p) == LimitOutcome::PlusInfinity);
    CHECK(classify_limit(Complex(0.55, kPi - 0.02), p) == LimitOutcome::Converged);
    CHECK(classify_limit(Complex(-1.0, kPi - 0.01), p) == LimitOutcome::LeftOfP0);
    CHECK(classify_limit(Complex(2.0, kPi - 0.01), p) == LimitOutcome::RightOfP0);
    CHECK(classify_limit(Complex(2.0, 1.0), p) == LimitOutcome::Undecided);
    CHECK(to_string(LimitOutcome::Converged) == "converged_to_p0");
  }

  TEST_CASE("outcome fractions add up to one") {
    LimitParams p;
    p.rho_plus = 2.0;
    p.rho_minus = -2.0;
    p.horizon = 20.0;
    p.n_samples = 40;
    const ExperimentReport r = limit_classification_experiment(p, {7, 1});
    double total = 0.0;
    for (LimitOutcome o : {LimitOutcome::Converged, LimitOutcome::LeftOfP0, LimitOutcome::RightOfP0,
                           LimitOutcome::MinusInfinity, LimitOutcome::PlusInfinity, LimitOutcome::Undecided}) {
      const std::string key = "fraction_" + std::string(to_string(o));
      REQUIRE(r.diagnostics.count(key) == 1);
      total += r.diagnostics.at(key);
    }
    CHECK(total == doctest::Approx(1.0));
    CHECK(r.n_samples == 40);
  }
}

TEST_SUITE("experiments at small scale") {
  TEST_CASE("tilted endpoint law has positive mean") {
    DensityParams p;
    p.kappa = 6.0;
    p.rho_plus = -0.5;
    p.rho_minus = 0.5;
    p.n_samples = 100;
    const ExperimentReport r = density_experiment(p, {3, 1});
    REQUIRE(r.series.count("j") == 1);
    CHECK(testing_support::mean(r.series.at("j")) > 0.0);
    CHECK(find_check(r, "ks_endpoint_density") != nullptr);
  }

  TEST_CASE("scaling at a = 1 compares two independent copies of one law") {
    ScalingParams p;
    p.kappa = 2.0;
    p.a = 1.0;
    p.t = 0.1;
    p.n_samples = 300;
    CHECK(scaling_invariance_test(p, {5, 1}).passed);
    p.a = 3.0;
    CHECK(scaling_invariance_test(p, {5, 1}).passed);
  }

  TEST_CASE("mixture and its control") {
    MixtureParams p;
    p.kappa = 2.0;
    p.rho_plus = -2.0;
    p.rho_minus = -2.0;
    p.n_samples = 200;
    p.endpoint_samples = 10;
    p.endpoint_horizon = 20.0;
    const ExperimentReport r = mixture_experiment(p, {11, 1});
    CHECK(find_check(r, "ks_direct_vs_mixture") != nullptr);
    CHECK(find_check(r, "ks_control_direct_vs_direct") != nullptr);
    CHECK(find_check(r, "endpoint_near_top_point_fraction") != nullptr);

    p.control_only = true;
    const ExperimentReport c = mixture_experiment(p, {11, 1});
    CHECK(c.checks.size() == 1);
    CHECK(c.checks[0].name == "ks_control_direct_vs_direct");
  }

  TEST_CASE("duality samples for x and -x mirror each other in law") {
    DualityParams p;
    p.dt = 1e-3;
    p.n_samples = 40;
    std::vector<double> right, left;
    for (std::size_t i = 0; i < p.n_samples; ++i) {
      const DualitySample s = duality_sample(p, {13, 1}, i);
      if (s.decided) right.push_back(s.y);
    }
    p.x = -1.0;
    for (std::size_t i = 0; i < p.n_samples; ++i) {
      const DualitySample s = duality_sample(p, {17, 1}, i);
      if (s.decided) left.push_back(-s.y);
    }
    REQUIRE(right.size() >= 10);
    REQUIRE(left.size() >= 10);
    CHECK(ks_statistic(right, left) < ks_threshold(right.size(), left.size()));
    for (double y : right) CHECK(y > 1.0 - p.magnitude_tolerance);
  }

  TEST_CASE("results do not depend on the thread count") {
    ScalingParams p;
    p.kappa = 6.0;
    p.t = 0.1;
    p.n_samples = 100;
    const ExperimentReport one = scaling_invariance_test(p, {21, 1});
    const ExperimentReport three = scaling_invariance_test(p, {21, 3});
    CHECK(one.series == three.series);
    CHECK(one.diagnostics == three.diagnostics);
    CHECK(one.statistic == three.statistic);

    DimensionParams d;
    d.n_samples = 3;
    d.dt = 1e-3;
    const ExperimentReport d1 = dimension_experiment(d, {23, 1});
    const ExperimentReport d3 = dimension_experiment(d, {23, 3});
    CHECK(d1.series == d3.series);
  }

  TEST_CASE("expected dimensions") {
    DimensionParams d;
    d.kappa = 8.0 / 3.0;
    CHECK(expected_dimension(d) == doctest::Approx(4.0 / 3.0));
    d.kappa = 10.0;
    CHECK(expected_dimension(d) == 2.0);
    d.kappa = 6.0;
    d.target = DimensionTarget::HullBoundary;
    CHECK(expected_dimension(d) == doctest::Approx(4.0 / 3.0));
  }
}
