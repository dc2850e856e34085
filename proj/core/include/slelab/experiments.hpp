#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slelab/hull.hpp"
#include "slelab/loewner.hpp"
#include "slelab/sde.hpp"

namespace slelab {

/// One pass/fail assertion inside an experiment. `comparison` is one of
/// "<", "<=", ">=" and reads "statistic comparison threshold".
struct Check {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  std::string comparison = "<";
  bool passed = false;
  /// Informational checks are reported but do not decide `passed`.
  bool required = true;
};

Check make_check(std::string name, double statistic, std::string comparison, double threshold, bool required = true);

struct ExperimentReport {
  std::string name;
  std::map<std::string, double> parameters;
  std::map<std::string, std::string> labels;
  /// Headline statistic and threshold (the first required check).
  double statistic = 0.0;
  double threshold = 0.0;
  std::string comparison = "<";
  std::size_t n_samples = 0;
  bool passed = false;
  std::uint64_t seed = 0;
  /// Wall-clock seconds; not part of the reproducible record.
  double runtime = 0.0;
  std::vector<Check> checks;
  std::map<std::string, double> diagnostics;
  std::map<std::string, std::vector<double>> series;

  void add(Check check);
  /// Sets the headline fields and `passed` from the checks.
  void finalize();
};

struct RunOptions {
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

// ---- trace probes shared by the strip experiments ----

struct TopApproach {
  std::optional<std::size_t> index;
  Complex point;
};

/// First grid index at which the strip trace comes within `within` of
/// R_pi. Checkpoints are spaced by the distance still to cover and the
/// last interval is scanned step by step.
TopApproach first_top_approach(const LoewnerChain& chain, double within, std::size_t min_stride = 60);

// ---- experiments ----

struct DensityParams {
  double kappa = 6.0;
  double rho_plus = 0.0;
  double rho_minus = 0.0;
  std::size_t n_samples = 2000;
  double dt = 1e-3;
  double horizon = 50.0;
  double approach = 0.02;
  double max_failure_fraction = 0.05;
};
ExperimentReport density_experiment(const DensityParams& params, const RunOptions& run);

struct MixtureParams {
  double kappa = 6.0;
  double rho_plus = 0.0;
  double rho_minus = 0.0;
  double t0 = 0.5;
  std::size_t n_samples = 2000;
  double dt = 1e-3;
  /// Arm B samples whose traces are followed to R_pi for the endpoint check.
  std::size_t endpoint_samples = 200;
  double endpoint_horizon = 50.0;
  double endpoint_radius = 0.1;
  /// Distance to R_pi that counts as the first approach. Tighter than the
  /// density band: the trace brushes R_pi near its target before settling.
  double endpoint_approach = 0.005;
  double endpoint_fraction = 0.9;
  /// Replace the mixture arm by a second direct arm.
  bool control_only = false;
};
ExperimentReport mixture_experiment(const MixtureParams& params, const RunOptions& run);

struct DualityParams {
  double kappa = 6.0;
  double x = 1.0;
  std::size_t n_samples = 500;
  double dt = 1e-4;
  double horizon = 8.0;
  std::size_t resolution = 200;
  double magnitude_tolerance = 0.02;
  double endpoint_tolerance = 0.05;
  double max_violation_fraction = 0.02;
};
ExperimentReport duality_boundary_experiment(const DualityParams& params, const RunOptions& run);

/// Per-sample crosscut data of the duality experiment.
struct DualitySample {
  bool decided = false;
  double swallow_time = 0.0;
  double y = 0.0;  // endpoint on the side of x
  double z = 0.0;  // endpoint on the other side
  double trace_re = 0.0;
  bool extraction_failed = false;
  bool simple = true;
};
DualitySample duality_sample(const DualityParams& params, const RunOptions& run, std::size_t index);

enum class LimitOutcome { Converged, LeftOfP0, RightOfP0, MinusInfinity, PlusInfinity, Undecided };
std::string_view to_string(LimitOutcome outcome) noexcept;

struct LimitParams {
  double kappa = 6.0;
  double rho_plus = 1.0;
  double rho_minus = -1.0;
  double p0_re = 0.0;
  double horizon = 200.0;
  std::size_t n_samples = 300;
  double dt = 1e-3;
  double escape_re = 8.0;
  double reach = 0.05;
  double target_radius = 0.1;
  double max_undecided = 0.2;

  double rho0() const noexcept { return kappa - 6.0 - rho_plus - rho_minus; }
};
/// "jk": the intervals containing rho+ and rho-.
std::string limit_case(double kappa, double rho_plus, double rho_minus);
LimitOutcome classify_limit(Complex beta, const LimitParams& params);
ExperimentReport limit_classification_experiment(const LimitParams& params, const RunOptions& run);

struct ScalingParams {
  double kappa = 6.0;
  double a = 2.0;
  double t = 0.25;
  std::size_t n_samples = 2000;
  double dt = 1e-3;
};
ExperimentReport scaling_invariance_test(const ScalingParams& params, const RunOptions& run);

enum class DimensionTarget { Trace, HullBoundary };

struct DimensionParams {
  double kappa = 8.0 / 3.0;
  DimensionTarget target = DimensionTarget::Trace;
  std::size_t n_samples = 20;
  double dt = 1e-4;
  /// Trace length for Trace targets; horizon for the swallowing time otherwise.
  double t = 1.0;
  double x = 1.0;
  std::size_t n_scales = 10;
  double tolerance = 0.15;
  std::size_t boundary_resolution = 2000;
  std::size_t boundary_points = 20000;
  /// Preimage height for hull boundaries. A lift of order sqrt(dt) hides
  /// the fjords below that scale, so boundaries are taken almost on R.
  double boundary_lift = 1e-9;
};
double expected_dimension(const DimensionParams& params);
ExperimentReport dimension_experiment(const DimensionParams& params, const RunOptions& run);

}  // namespace slelab
