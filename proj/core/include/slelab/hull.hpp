#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "slelab/loewner.hpp"
#include "slelab/sde.hpp"

namespace slelab {

struct HullExtent {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double t = 0.0;

  bool degenerate() const noexcept { return a == b; }
};

/// First grid time at which x enters the hull of the discrete chain.
SwallowReport swallowing_time(const DrivingPath& driving, double x);

/// Absolute tolerance of the bisection for a and b.
inline constexpr double kExtentTolerance = 1e-3;

/// Real extent [a, b] of the closed hull at grid time t and the images
/// c <= xi(t) <= d of its outer neighbours. a and b are the outermost
/// swallowed points found by bisection, so a - tol and b + tol are free.
/// With no swallowed point a = b = start and c = d = xi(t).
HullExtent hull_extent(const DrivingPath& driving, double t);

struct BoundaryOptions {
  std::size_t resolution = 200;
  /// When positive, preimage intervals are bisected until consecutive
  /// boundary points are at most this far apart.
  double max_segment = 0.0;
  std::size_t max_points = 20000;
  /// Extend each end by halving the inset until the image is within a
  /// tenth of kBoundaryReach of the real line. Deep pockets near a and b
  /// are otherwise skipped by the uniform inset.
  bool refine_ends = true;
  /// Height above R at which preimages are taken; negative means sqrt(dt).
  double lift = -1.0;
};

/// f_t sampled on (c + delta, d - delta), delta = (d - c) 1e-4, after a
/// lift by i sqrt(dt). On a side with no swallowed point the interval
/// ends at the image of the matching side of the start point, so
/// slit-like hulls are traversed along both sides down to their base.
/// Throws std::invalid_argument at t = 0. The resolution-only form
/// refines the ends.
Curve hull_boundary(const DrivingPath& driving, double t, const BoundaryOptions& options);
Curve hull_boundary(const DrivingPath& driving, double t, std::size_t resolution);

/// (left, right): f_t on (c, xi(t)] and on [xi(t), d); both contain the
/// image of xi(t). The resolution-only form samples exactly `resolution`
/// preimages per side with no end refinement.
std::pair<Curve, Curve> left_right_boundaries(const DrivingPath& driving, double t,
                                              const BoundaryOptions& options);
std::pair<Curve, Curve> left_right_boundaries(const DrivingPath& driving, double t, std::size_t resolution);

struct DimensionEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::vector<double> scales;
  std::vector<double> counts;
};

/// Box-counting slope of a polyline. Segments are densified so every box
/// they cross is counted.
DimensionEstimate box_counting_dimension(const Curve& curve, std::size_t n_scales);

/// Real parts of the first and last points; both must lie within 0.05
/// of the real line.
std::pair<double, double> crosscut_endpoints(const Curve& curve);

/// Endpoint distance from the real line accepted by crosscut_endpoints.
inline constexpr double kBoundaryReach = 0.05;

/// True when no two non-adjacent segments of the polyline intersect.
bool is_simple_polyline(const std::vector<Complex>& points);

}  // namespace slelab
