#pragma once

#include <functional>
#include <optional>
#include <vector>

namespace slelab {

/// Parameters of the endpoint law on R_pi for strip SLE(kappa; rho+, rho-)
/// started from (0; +inf, -inf) with rho+ + rho- = kappa - 6.
struct DensitySpec {
  double kappa = 6.0;
  double rho_plus = 0.0;
  double rho_minus = 0.0;
  double sigma = 0.0;
  double normalizer = 0.0;

  /// Validates the hypotheses (|rho+ - rho-| < 2, rho+ + rho- = kappa - 6)
  /// and computes sigma and the normalizer Z by quadrature.
  static DensitySpec make(double kappa, double rho_plus, double rho_minus);
};

/// Unnormalized log density: (2 sigma / kappa) x - (4 / kappa) log cosh(x/2).
double endpoint_log_weight(double kappa, double sigma, double x);

/// Z = integral over R of the weight, double-exponential quadrature.
/// Throws when |sigma| >= 1 or the quadrature misses relative error 1e-8.
double endpoint_normalizer(double kappa, double sigma);

/// Normalized density with a tabulated CDF for sampling and KS tests.
class EndpointDensity {
 public:
  explicit EndpointDensity(const DensitySpec& spec, std::size_t nodes = 20000);

  double pdf(double x) const;
  double cdf(double x) const;
  double quantile(double u) const;
  double mean() const;

  const DensitySpec& spec() const noexcept { return spec_; }
  double lower() const noexcept { return grid_.front(); }
  double upper() const noexcept { return grid_.back(); }

 private:
  DensitySpec spec_;
  std::vector<double> grid_;
  std::vector<double> cumulative_;
};

/// theoretical_endpoint_density as a callable pdf.
std::function<double(double)> theoretical_endpoint_density(const DensitySpec& spec);

/// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);
/// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b);

/// Critical values at alpha ~ 0.01.
double ks_threshold(std::size_t n);
double ks_threshold(std::size_t n, std::size_t m);
/// Critical value at alpha ~ 0.01 for the two-sample statistic between a
/// sample and its own reflection -x. Under a symmetric law sqrt(n) times
/// that statistic tends to sup |W| over [0, 1] for a Brownian motion W, so
/// the independent two-sample value is too small.
double ks_reflection_threshold(std::size_t n);

/// Scale-function exit probability for the gap X = Re psi(t, p0) - xi(t)
/// of strip SLE(kappa; rho+, rho-, rho0) from (0; +inf, -inf, p0):
/// P(X -> +inf) = (h(x0) - h(-inf)) / (h(+inf) - h(-inf)), where
///   h'(x) = exp(x/2)^(-(2/kappa)(rho+ - rho-)) cosh(x/2)^(-(4/kappa)(kappa/2 - 2 - (rho+ + rho-)/2)).
/// Empty when h is unbounded on either side.
std::optional<double> gap_exit_probability(double kappa, double rho_plus, double rho_minus, double x0);

/// Binomial standard error sqrt(p (1 - p) / n).
double binomial_stderr(double p, std::size_t n);

}  // namespace slelab
