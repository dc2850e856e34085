#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace slelab {

using Complex = std::complex<double>;

enum class Geometry { Chordal, Strip };

std::string_view to_string(Geometry geometry) noexcept;

/// Driving function on the uniform grid t_i = i * dt.
///
/// The discrete Loewner chain holds the driving value constant at
/// values[i] over the step [t_i, t_{i+1}), so every step is an exact
/// slit map and compositions stay conformal. The hull tip at grid index
/// k > 0 was therefore produced by values[k - 1]; see tip().
struct DrivingPath {
  double dt = 0.0;
  std::vector<double> values;
  Geometry geometry = Geometry::Chordal;
  double kappa = 0.0;

  std::size_t steps() const noexcept { return values.empty() ? 0 : values.size() - 1; }
  double horizon() const noexcept { return dt * static_cast<double>(steps()); }
  double time(std::size_t i) const noexcept { return dt * static_cast<double>(i); }

  /// Driving value whose slit carries the hull tip at grid index k.
  double tip(std::size_t k) const noexcept { return values[k == 0 ? 0 : k - 1]; }

  /// Grid index for time t; throws std::out_of_range when t is negative,
  /// beyond the horizon or not on the grid (relative tolerance 1e-9).
  std::size_t index_of(double t) const;

  /// Throws std::invalid_argument when the path breaks its invariants.
  void validate() const;

  /// Copy of the first k + 1 samples (the path stopped at t_k).
  DrivingPath truncated(std::size_t k) const;
};

struct TracePath {
  std::vector<double> times;
  std::vector<Complex> points;
  Geometry geometry = Geometry::Chordal;
};

struct Curve {
  std::vector<Complex> points;
  bool closed = false;
};

/// Image of a point under the forward flow. Swallowing is an outcome,
/// not an error: swallowed_at holds the grid index at which the point
/// entered the hull and value is its last image before that.
struct FlowResult {
  Complex value;
  std::optional<std::size_t> swallowed_at;

  bool swallowed() const noexcept { return swallowed_at.has_value(); }
};

// Elementary maps for a constant driving value xi0 held for delta_t.

/// xi0 + sqrt((z - xi0)^2 + 4 delta_t), upper branch.
Complex elementary_slit_map(double xi0, double delta_t, Complex z);
/// xi0 + sqrt((w - xi0)^2 - 4 delta_t), upper branch.
Complex elementary_slit_inverse(double xi0, double delta_t, Complex w);
/// True when z lies within tol of the slit {xi0 + iy : 0 <= y <= 2 sqrt(delta_t)}.
bool on_elementary_slit(double xi0, double delta_t, Complex z, double tol);

/// Strip analogue: cosh((z' - xi0)/2) = exp(delta_t/2) cosh((z - xi0)/2),
/// the exact solution of d/dt psi = coth((psi - xi0)/2).
Complex elementary_strip_map(double xi0, double delta_t, Complex z);
Complex elementary_strip_inverse(double xi0, double delta_t, Complex w);

/// Composition of elementary maps along one driving path.
///
/// Precomputes the per-step shift factors so repeated inverse
/// evaluations (traces, boundaries) cost one square root per step.
class LoewnerChain {
 public:
  explicit LoewnerChain(const DrivingPath& driving);

  const DrivingPath& driving() const noexcept { return *driving_; }

  /// Forward flow of z up to time t (t need not be on the grid).
  FlowResult forward(Complex z, double t) const;
  /// Forward flow to grid index k.
  FlowResult forward_to(Complex z, std::size_t k) const;

  /// Inverse flow f_t(w) for Im w >= 0.
  Complex inverse(Complex w, double t) const;
  Complex inverse_from(Complex w, std::size_t k) const;

  /// f_{t_k}(tip(k) + i eps); the start point for k = 0.
  Complex trace_point(std::size_t k, double eps) const;

  /// Image of a real boundary point (or a point on R_pi for the strip)
  /// relative to the driving value, tracked step by step until it is
  /// swallowed. gaps[i] = image at t_i minus values[i].
  struct RealTrack {
    std::vector<double> gaps;
    std::optional<std::size_t> swallowed_at;
  };
  RealTrack track_real(double x, std::size_t max_steps) const;

  /// Image of x at time t_k (x real, unswallowed), or nothing if swallowed.
  std::optional<double> real_image(double x, std::size_t k) const;

 private:
  const DrivingPath* driving_;
  // cosh/sinh of half the driving increments, strip geometry only.
  std::vector<double> half_cosh_;
  std::vector<double> half_sinh_;
  double swallow_radius_;
  double swallow_height_;

  bool is_swallowed(Complex relative) const noexcept;
};

// Free-function surface (geometry checked against the path).

FlowResult chordal_forward_map(const DrivingPath& driving, Complex z, double t);
Complex chordal_inverse_map(const DrivingPath& driving, Complex w, double t);
TracePath chordal_trace(const DrivingPath& driving, std::optional<double> eps = {});

FlowResult strip_forward_map(const DrivingPath& driving, Complex z, double t);
Complex strip_inverse_map(const DrivingPath& driving, Complex w, double t);
TracePath strip_trace(const DrivingPath& driving, std::optional<double> eps = {});

/// Geometry-dispatching variants.
FlowResult forward_map(const DrivingPath& driving, Complex z, double t);
Complex inverse_map(const DrivingPath& driving, Complex w, double t);
TracePath trace(const DrivingPath& driving, std::optional<double> eps = {});

/// hcap of the chordal hull (2t) or scap of the strip hull (t).
double capacity(const DrivingPath& driving, double t);

/// Default trace offset sqrt(dt).
inline double default_trace_eps(const DrivingPath& driving) { return std::sqrt(driving.dt); }

}  // namespace slelab
