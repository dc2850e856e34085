#include "slelab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>

namespace slelab {

namespace {

constexpr double kQuadratureTolerance = 1e-10;
constexpr double kRequiredRelativeError = 1e-8;
constexpr double kTailMass = 1e-10;
constexpr double kPi = std::numbers::pi;

double log_cosh_half(double x) {
  const double a = 0.5 * std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

// Integral over [0, inf) of exp(g(s)) by the exp-sinh rule.
template <class F>
double half_line(F&& g, double* error) {
  boost::math::quadrature::exp_sinh<double> rule;
  double err = 0.0;
  double l1 = 0.0;
  const double value = rule.integrate([&](double s) { return std::exp(g(s)); }, kQuadratureTolerance, &err, &l1);
  if (error) *error = err;
  return value;
}

}  // namespace

double endpoint_log_weight(double kappa, double sigma, double x) {
  return 2.0 * sigma / kappa * x - 4.0 / kappa * log_cosh_half(x);
}

double endpoint_normalizer(double kappa, double sigma) {
  if (!(std::abs(sigma) < 1.0)) {
    throw std::invalid_argument("endpoint density requires |sigma| < 1, i.e. |rho_plus - rho_minus| < 2");
  }
  boost::math::quadrature::sinh_sinh<double> rule;
  double err = 0.0;
  double l1 = 0.0;
  const double z = rule.integrate([&](double x) { return std::exp(endpoint_log_weight(kappa, sigma, x)); },
                                  kQuadratureTolerance, &err, &l1);
  if (!(z > 0.0) || !std::isfinite(z) || err > kRequiredRelativeError) {
    throw std::runtime_error("endpoint normalizer: quadrature did not reach relative error 1e-8");
  }
  return z;
}

DensitySpec DensitySpec::make(double kappa, double rho_plus, double rho_minus) {
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa: must be positive");
  if (!(std::abs(rho_plus - rho_minus) < 2.0)) {
    throw std::invalid_argument("rho: the endpoint density needs |rho_plus - rho_minus| < 2 (got " +
                                std::to_string(std::abs(rho_plus - rho_minus)) + ")");
  }
  if (std::abs(rho_plus + rho_minus - (kappa - 6.0)) > 1e-9) {
    throw std::invalid_argument("rho: the endpoint density needs rho_plus + rho_minus = kappa - 6");
  }
  DensitySpec spec;
  spec.kappa = kappa;
  spec.rho_plus = rho_plus;
  spec.rho_minus = rho_minus;
  spec.sigma = 0.5 * (rho_minus - rho_plus);
  spec.normalizer = endpoint_normalizer(kappa, spec.sigma);
  return spec;
}

EndpointDensity::EndpointDensity(const DensitySpec& spec, std::size_t nodes) : spec_(spec) {
  if (nodes < 100) throw std::invalid_argument("EndpointDensity: too few nodes");
  // log f decays linearly with these rates on the two sides.
  const double right_rate = 2.0 / spec.kappa * (1.0 - spec.sigma);
  const double left_rate = 2.0 / spec.kappa * (1.0 + spec.sigma);
  auto reach = [](double rate) { return (std::log(1.0 / (kTailMass * rate)) + 4.0) / rate; };
  const double lo = -reach(left_rate);
  const double hi = reach(right_rate);

  grid_.resize(nodes);
  cumulative_.assign(nodes, 0.0);
  const double h = (hi - lo) / static_cast<double>(nodes - 1);
  for (std::size_t i = 0; i < nodes; ++i) grid_[i] = lo + h * static_cast<double>(i);
  for (std::size_t i = 1; i < nodes; ++i) {
    const double a = grid_[i - 1];
    const double b = grid_[i];
    const double m = 0.5 * (a + b);
    cumulative_[i] = cumulative_[i - 1] + (b - a) / 6.0 * (pdf(a) + 4.0 * pdf(m) + pdf(b));
  }
  const double total = cumulative_.back();
  for (double& c : cumulative_) c /= total;
}

double EndpointDensity::pdf(double x) const {
  return std::exp(endpoint_log_weight(spec_.kappa, spec_.sigma, x)) / spec_.normalizer;
}

double EndpointDensity::cdf(double x) const {
  if (x <= grid_.front()) return 0.0;
  if (x >= grid_.back()) return 1.0;
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  const auto i = static_cast<std::size_t>(it - grid_.begin());
  const double a = grid_[i - 1];
  const double m = 0.5 * (a + x);
  const double piece = (x - a) / 6.0 * (pdf(a) + 4.0 * pdf(m) + pdf(x));
  return std::min(1.0, cumulative_[i - 1] + piece);
}

double EndpointDensity::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile: u must lie in (0, 1)");
  const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.begin()) return grid_.front();
  if (it == cumulative_.end()) return grid_.back();
  const auto i = static_cast<std::size_t>(it - cumulative_.begin());
  double lo = grid_[i - 1];
  double hi = grid_[i];
  double x = lo + (hi - lo) * (u - cumulative_[i - 1]) / (cumulative_[i] - cumulative_[i - 1]);
  for (int iter = 0; iter < 4; ++iter) {
    const double step = (cdf(x) - u) / pdf(x);
    const double next = x - step;
    if (!(next > lo && next < hi)) break;
    x = next;
  }
  return x;
}

double EndpointDensity::mean() const {
  double m = 0.0;
  for (std::size_t i = 1; i < grid_.size(); ++i) {
    const double a = grid_[i - 1];
    const double b = grid_[i];
    const double c = 0.5 * (a + b);
    m += (b - a) / 6.0 * (a * pdf(a) + 4.0 * c * pdf(c) + b * pdf(b));
  }
  return m;
}

std::function<double(double)> theoretical_endpoint_density(const DensitySpec& spec) {
  if (!(std::abs(spec.sigma) < 1.0)) {
    throw std::invalid_argument("endpoint density requires |rho_plus - rho_minus| < 2");
  }
  const double kappa = spec.kappa;
  const double sigma = spec.sigma;
  const double z = spec.normalizer > 0.0 ? spec.normalizer : endpoint_normalizer(kappa, sigma);
  return [=](double x) { return std::exp(endpoint_log_weight(kappa, sigma, x)) / z; };
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_threshold(std::size_t n) { return 1.63 / std::sqrt(static_cast<double>(n)); }

double ks_threshold(std::size_t n, std::size_t m) {
  const auto a = static_cast<double>(n);
  const auto b = static_cast<double>(m);
  return 1.63 * std::sqrt((a + b) / (a * b));
}

namespace {

// P(sup_[0,1] |W| < c) from the alternating series of the two-sided exit law.
double sup_abs_brownian_cdf(double c) {
  double sum = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double m = 2.0 * k + 1.0;
    sum += (k % 2 == 0 ? 1.0 : -1.0) / m * std::exp(-kPi * kPi * m * m / (8.0 * c * c));
  }
  return 4.0 / kPi * sum;
}

}  // namespace

double ks_reflection_threshold(std::size_t n) {
  static const double c = [] {
    double lo = 1.0, hi = 5.0;
    for (int i = 0; i < 80; ++i) {
      const double mid = 0.5 * (lo + hi);
      (sup_abs_brownian_cdf(mid) < 0.99 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }();
  return c / std::sqrt(static_cast<double>(n));
}

std::optional<double> gap_exit_probability(double kappa, double rho_plus, double rho_minus, double x0) {
  const double drift = -(2.0 / kappa) * (rho_plus - rho_minus);
  const double power = (4.0 / kappa) * (0.5 * kappa - 2.0 - 0.5 * (rho_plus + rho_minus));
  auto log_dh = [&](double x) { return 0.5 * drift * x - power * log_cosh_half(x); };
  // Tails decay like exp(-(power/2 -+ drift/2) |x|).
  const double right_rate = 0.5 * (power - drift);
  const double left_rate = 0.5 * (power + drift);
  if (!(right_rate > 0.0) || !(left_rate > 0.0)) return std::nullopt;

  double e1 = 0.0, e2 = 0.0;
  const double right = half_line([&](double s) { return log_dh(x0 + s); }, &e1);
  const double left = half_line([&](double s) { return log_dh(x0 - s); }, &e2);
  if (!std::isfinite(left) || !std::isfinite(right) || left + right <= 0.0) return std::nullopt;
  return left / (left + right);
}

double binomial_stderr(double p, std::size_t n) {
  if (n == 0) throw std::invalid_argument("binomial_stderr: n must be positive");
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace slelab
