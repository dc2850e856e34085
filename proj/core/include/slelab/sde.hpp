#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "slelab/loewner.hpp"

namespace slelab {

enum class ForceKind { Real, DegeneratePlus, DegenerateMinus, PlusInfinity, MinusInfinity, StripTop };

std::string_view to_string(ForceKind kind) noexcept;

/// One marked point. `value` is the location for Real points and the real
/// part x0 for a StripTop point x0 + pi i; it is ignored otherwise.
struct ForceSpec {
  ForceKind kind = ForceKind::Real;
  double value = 0.0;
  double rho = 0.0;

  static ForceSpec real(double p, double rho) { return {ForceKind::Real, p, rho}; }
  static ForceSpec plus(double rho) { return {ForceKind::DegeneratePlus, 0.0, rho}; }
  static ForceSpec minus(double rho) { return {ForceKind::DegenerateMinus, 0.0, rho}; }
  static ForceSpec plus_infinity(double rho) { return {ForceKind::PlusInfinity, 0.0, rho}; }
  static ForceSpec minus_infinity(double rho) { return {ForceKind::MinusInfinity, 0.0, rho}; }
  static ForceSpec top(double x0, double rho) { return {ForceKind::StripTop, x0, rho}; }
};

struct SleConfig {
  Geometry geometry = Geometry::Chordal;
  double kappa = 2.0;
  double start = 0.0;
  std::vector<ForceSpec> force_points;
  double horizon = 1.0;
  double dt = 1e-3;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  std::size_t steps() const;
};

/// Largest accepted time step.
inline constexpr double kMaxDt = 1e-2;

struct ForceTrack {
  ForceSpec spec;
  /// p_k(t_i) for every grid index of the returned driving path; the real
  /// part for StripTop points and +-infinity for the infinite ones.
  std::vector<double> values;
  std::optional<double> swallowed;
};

struct ForcePointTrajectory {
  std::vector<ForceTrack> tracks;
};

struct SwallowReport {
  double point = 0.0;
  std::optional<double> time;
  double terminal_gap = 0.0;
};

struct SampledPath {
  DrivingPath driving;
  ForcePointTrajectory force;
  /// Grid index at which a force point was swallowed and the process
  /// stopped before the horizon.
  std::optional<std::size_t> stopped_at;
};

/// Seed for sample `index` of stream `stream` under a master seed. Streams
/// separate independent arms of one experiment.
std::uint64_t sample_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) noexcept;

/// Draws one sample with the RNG seeded from (config.seed, stream, index).
SampledPath sample_driving(const SleConfig& config, std::uint64_t index = 0, std::uint64_t stream = 0);

std::pair<DrivingPath, ForcePointTrajectory> sample_chordal_driving(const SleConfig& config,
                                                                     std::uint64_t index = 0);
std::pair<DrivingPath, ForcePointTrajectory> sample_strip_driving(const SleConfig& config,
                                                                   std::uint64_t index = 0);

/// True iff gap < 2 sqrt(2 dt).
bool detect_swallowing(double gap, double dt);

/// Exact transition of a Bessel process of dimension d > 0 started at
/// y0 >= 0 over time h (reflecting at 0 when d < 2).
double sample_bessel(double y0, double d, double h, std::mt19937_64& rng);

}  // namespace slelab
