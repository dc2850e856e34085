#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "slelab/sde.hpp"
#include "slelab/stats.hpp"
#include "support.hpp"

using namespace slelab;
using testing_support::mean;
using testing_support::variance;

namespace {

SleConfig config(Geometry g, double kappa, std::vector<ForceSpec> points, double horizon, double dt,
                 std::uint64_t seed = 1) {
  SleConfig cfg;
  cfg.geometry = g;
  cfg.kappa = kappa;
  cfg.force_points = std::move(points);
  cfg.horizon = horizon;
  cfg.dt = dt;
  cfg.seed = seed;
  return cfg;
}

std::vector<double> terminal_values(const SleConfig& cfg, std::size_t n) {
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample_driving(cfg, i).driving.values.back());
  return out;
}

std::string validation_message(const SleConfig& cfg) {
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("config validation") {
  TEST_CASE("field paths in error messages") {
    auto cfg = config(Geometry::Chordal, 6.0, {ForceSpec::real(1.0, 0.0), ForceSpec::real(1.0, 2.0)}, 1.0, 1e-3);
    CHECK(validation_message(cfg).rfind("force_points[1].at", 0) == 0);

    cfg = config(Geometry::Chordal, 6.0, {ForceSpec::plus(0.5)}, 1.0, 1e-3);
    CHECK(validation_message(cfg).rfind("force_points[0].rho", 0) == 0);

    cfg = config(Geometry::Chordal, 2.0, {}, 1.0, 0.05);
    CHECK(validation_message(cfg).rfind("dt", 0) == 0);

    cfg = config(Geometry::Chordal, 6.0, {ForceSpec::plus_infinity(1.0)}, 1.0, 1e-3);
    CHECK(validation_message(cfg).rfind("force_points[0].at", 0) == 0);

    cfg = config(Geometry::Chordal, 6.0, {ForceSpec::real(0.0, 1.0)}, 1.0, 1e-3);
    CHECK_FALSE(validation_message(cfg).empty());

    cfg = config(Geometry::Chordal, -1.0, {}, 1.0, 1e-3);
    CHECK(validation_message(cfg).rfind("kappa", 0) == 0);
  }

  TEST_CASE("valid configurations pass") {
    CHECK(validation_message(config(Geometry::Chordal, 8.0, {ForceSpec::plus(2.0), ForceSpec::minus(2.0)}, 1.0,
                                    1e-3))
              .empty());
    CHECK(validation_message(config(Geometry::Strip, 6.0,
                                    {ForceSpec::plus_infinity(1.0), ForceSpec::minus_infinity(-1.0),
                                     ForceSpec::top(0.0, 0.0)},
                                    1.0, 1e-3))
              .empty());
  }
}

TEST_SUITE("swallowing rule") {
  TEST_CASE("strict threshold") {
    CHECK(detect_swallowing(0.0, 1e-4));
    CHECK_FALSE(detect_swallowing(1.0, 1e-4));
    CHECK_FALSE(detect_swallowing(2.0 * std::sqrt(2e-4), 1e-4));
    CHECK(detect_swallowing(std::nextafter(2.0 * std::sqrt(2e-4), 0.0), 1e-4));
  }
}

TEST_SUITE("seeding") {
  TEST_CASE("streams and indices give distinct, stable seeds") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t stream = 0; stream < 4; ++stream) {
      for (std::uint64_t i = 0; i < 100; ++i) seen.insert(sample_seed(42, stream, i));
    }
    CHECK(seen.size() == 400);
    CHECK(sample_seed(42, 1, 7) == sample_seed(42, 1, 7));
    CHECK(sample_seed(42, 1, 7) != sample_seed(43, 1, 7));
  }

  TEST_CASE("sampling is deterministic per index") {
    const auto cfg = config(Geometry::Chordal, 6.0, {ForceSpec::real(1.0, 1.0)}, 0.5, 1e-3, 9);
    const SampledPath a = sample_driving(cfg, 3);
    const SampledPath b = sample_driving(cfg, 3);
    CHECK(a.driving.values == b.driving.values);
    CHECK(a.driving.values != sample_driving(cfg, 4).driving.values);
  }
}

TEST_SUITE("driving sampler") {
  TEST_CASE("kappa = 2 without force points has variance 2 at t = 1") {
    const auto v = terminal_values(config(Geometry::Chordal, 2.0, {}, 1.0, 1e-3), 4000);
    CHECK(std::abs(variance(v) - 2.0) <= 0.15);
    CHECK(std::abs(mean(v)) <= 0.1);
  }

  TEST_CASE("a real force point keeps its order and moves right") {
    const auto cfg = config(Geometry::Chordal, 6.0, {ForceSpec::real(1.0, 1.0)}, 2.0, 1e-3);
    for (std::size_t i = 0; i < 200; ++i) {
      const SampledPath s = sample_driving(cfg, i);
      const auto& p = s.force.tracks[0].values;
      const std::size_t n = s.driving.values.size();
      REQUIRE(p.size() == n);
      bool ok = true;
      for (std::size_t k = 1; k < n; ++k) ok = ok && p[k] > p[k - 1];
      for (std::size_t k = 0; k < n; ++k) ok = ok && p[k] > s.driving.values[k];
      CHECK(ok);
    }
  }

  TEST_CASE("degenerate start with a dimension-2 gap never closes") {
    const auto cfg = config(Geometry::Chordal, 8.0, {ForceSpec::plus(2.0)}, 1.0, 1e-3);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < 1000; ++i) {
      const SampledPath s = sample_driving(cfg, i);
      const auto& p = s.force.tracks[0].values;
      bool hit = s.stopped_at.has_value();
      for (std::size_t k = 1; k < p.size(); ++k) hit = hit || p[k] <= s.driving.values[k];
      hits += hit ? 1 : 0;
    }
    CHECK(hits <= 10);
  }

  TEST_CASE("strip points at infinity give constant drift") {
    const auto cfg = config(Geometry::Strip, 6.0, {ForceSpec::plus_infinity(-1.0), ForceSpec::minus_infinity(1.0)},
                            1.0, 1e-3);
    const auto v = terminal_values(cfg, 4000);
    CHECK(std::abs(mean(v) - 1.0) <= 0.1);
    CHECK(std::abs(variance(v) - 6.0) <= 0.5);
  }

  TEST_CASE("symmetric strip case is a centred Gaussian") {
    const auto cfg = config(Geometry::Strip, 2.0, {ForceSpec::plus_infinity(-2.0), ForceSpec::minus_infinity(-2.0)},
                            1.0, 1e-3);
    auto v = terminal_values(cfg, 3000);
    CHECK(std::abs(mean(v)) <= 0.1);
    CHECK(std::abs(variance(v) - 2.0) <= 0.15);
    const double d = ks_statistic(v, [](double x) { return 0.5 * std::erfc(-x / 2.0); });
    CHECK(d < ks_threshold(v.size()));
  }

  TEST_CASE("a top-line point moves with speed below one") {
    const auto cfg = config(Geometry::Strip, 6.0, {ForceSpec::top(0.0, -4.0)}, 1.0, 1e-3);
    for (std::size_t i = 0; i < 50; ++i) {
      const SampledPath s = sample_driving(cfg, i);
      const auto& p = s.force.tracks[0].values;
      bool ok = true;
      for (std::size_t k = 0; k < p.size(); ++k) ok = ok && std::abs(p[k]) <= s.driving.time(k) + 1e-12;
      CHECK(ok);
    }
  }

  TEST_CASE("swallowing time of x = 1 for kappa = 6 obeys the Bessel hitting law") {
    // The gap divided by sqrt(6) is a Bessel process of dimension 5/3 started
    // at y0 = 1/sqrt(6). Its hitting time of a level e < y is e^2 / (2 G)
    // with G ~ Gamma(1/6) when started at e, so T_0 = y0^2 / (2 G) and
    // T_0 = T_e + e^2 / (2 G') with G' independent. The sampler stops at
    // T_e with e = 2 sqrt(2 dt) / sqrt(6), which brackets its frequency:
    //   P(T_0 <= t) <= P(T_e <= t) <= P(T_0 <= t + s) + P(e^2 / (2 G') > s).
    const double t = 2.0;
    const double dt = 1e-3;
    const auto cfg = config(Geometry::Chordal, 6.0, {ForceSpec::real(1.0, 0.0)}, t, dt);
    const std::size_t n = 800;
    std::size_t swallowed = 0;
    for (std::size_t i = 0; i < n; ++i) swallowed += sample_driving(cfg, i).stopped_at ? 1 : 0;
    const double freq = static_cast<double>(swallowed) / static_cast<double>(n);

    const double a = 1.0 / 6.0;
    auto hit_by = [&](double u) { return boost::math::gamma_q(a, 1.0 / (12.0 * u)); };
    const double e2 = 8.0 * dt / 6.0;
    double upper = 1.0;
    for (double s = 0.05; s < 20.0; s *= 1.2) {
      upper = std::min(upper, hit_by(t + s) + boost::math::gamma_p(a, e2 / (2.0 * s)));
    }
    const double noise = 3.0 * binomial_stderr(0.5, n);
    CHECK(freq >= hit_by(t) - noise);
    CHECK(freq <= upper + noise);
  }

  TEST_CASE("kappa = 2 never swallows a real point") {
    const auto cfg = config(Geometry::Chordal, 2.0, {ForceSpec::real(1.0, 0.0)}, 5.0, 1e-3);
    for (std::size_t i = 0; i < 100; ++i) CHECK_FALSE(sample_driving(cfg, i).stopped_at.has_value());
  }
}

TEST_SUITE("Bessel step") {
  // Oracle: a Bessel process of integer dimension d is the norm of a
  // d-dimensional Brownian motion.
  std::vector<double> gaussian_norms(std::size_t d, double y0, double h, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, std::sqrt(h));
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double c = (j == 0 ? y0 : 0.0) + g(rng);
        s += c * c;
      }
      out.push_back(std::sqrt(s));
    }
    return out;
  }

  TEST_CASE("dimensions 2 and 3 match Gaussian norms") {
    for (std::size_t d : {2u, 3u}) {
      for (double y0 : {0.0, 0.5, 3.0}) {
        std::mt19937_64 rng(100 + d);
        std::vector<double> bessel;
        for (int i = 0; i < 4000; ++i) bessel.push_back(sample_bessel(y0, static_cast<double>(d), 1.0, rng));
        const auto oracle = gaussian_norms(d, y0, 1.0, 4000, 7 + d);
        CHECK(ks_statistic(bessel, oracle) < ks_threshold(4000, 4000));
      }
    }
  }

  TEST_CASE("dimension 1 is reflected Brownian motion") {
    std::mt19937_64 rng(3);
    std::vector<double> bessel;
    for (int i = 0; i < 4000; ++i) bessel.push_back(sample_bessel(0.2, 1.0, 0.5, rng));
    const auto oracle = gaussian_norms(1, 0.2, 0.5, 4000, 4);
    CHECK(ks_statistic(bessel, oracle) < ks_threshold(4000, 4000));
    for (double b : bessel) CHECK(b >= 0.0);
  }
}
