#include "slelab/sde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "slelab/detail/steps.hpp"

namespace slelab {

namespace {

std::string field(std::size_t i, const char* name) {
  return "force_points[" + std::to_string(i) + "]." + name;
}

[[noreturn]] void reject(const std::string& path, const std::string& why) {
  throw std::invalid_argument(path + ": " + why);
}

std::uint64_t splitmix(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

bool is_finite_point(ForceKind kind) noexcept {
  return kind == ForceKind::Real || kind == ForceKind::DegeneratePlus || kind == ForceKind::DegenerateMinus;
}

// Steps during which a degenerate point is advanced by the exact Bessel law
// regardless of its gap.
constexpr std::size_t kDegenerateBesselSteps = 10;
// Gaps below this many sqrt(dt) use the exact Bessel transition.
constexpr double kNearSingular = 10.0;
constexpr int kMaxRedraws = 10000;

double half_coth(double x) noexcept {
  if (std::abs(x) > detail::kStripFarGap) return detail::sign_of(x);
  return 1.0 / std::tanh(0.5 * x);
}

struct Point {
  ForceKind kind;
  double rho;
  double pos;            // real position, or real part for StripTop
  double side;           // sign of pos - xi for finite points
  bool swallowable;
  bool degenerate;
};

class Sampler {
 public:
  Sampler(const SleConfig& config, std::mt19937_64& rng) : cfg_(config), rng_(rng) {
    h_ = config.dt;
    sqrt_h_ = std::sqrt(h_);
    for (const ForceSpec& f : config.force_points) {
      Point p{f.kind, f.rho, 0.0, 1.0, false, false};
      const double threshold = 0.5 * config.kappa - 2.0;
      switch (f.kind) {
        case ForceKind::Real:
          p.pos = f.value;
          p.side = detail::sign_of(f.value - config.start);
          p.swallowable = f.rho < threshold;
          break;
        case ForceKind::DegeneratePlus:
        case ForceKind::DegenerateMinus:
          p.side = f.kind == ForceKind::DegeneratePlus ? 1.0 : -1.0;
          p.pos = config.start + p.side * 0.1 * sqrt_h_;
          p.degenerate = true;
          break;
        case ForceKind::PlusInfinity:
          p.pos = std::numeric_limits<double>::infinity();
          break;
        case ForceKind::MinusInfinity:
          p.pos = -std::numeric_limits<double>::infinity();
          break;
        case ForceKind::StripTop:
          p.pos = f.value;
          break;
      }
      points_.push_back(p);
    }
  }

  SampledPath run() {
    const std::size_t n = cfg_.steps();
    SampledPath out;
    out.driving.dt = h_;
    out.driving.geometry = cfg_.geometry;
    out.driving.kappa = cfg_.kappa;
    out.driving.values.reserve(n + 1);
    out.driving.values.push_back(cfg_.start);
    out.force.tracks.resize(points_.size());
    for (std::size_t j = 0; j < points_.size(); ++j) {
      out.force.tracks[j].spec = cfg_.force_points[j];
      out.force.tracks[j].values.reserve(n + 1);
      out.force.tracks[j].values.push_back(points_[j].pos);
    }

    double xi = cfg_.start;
    std::vector<double> next(points_.size());
    std::vector<double> drift(points_.size());
    for (std::size_t i = 0; i < n; ++i) {
      double total_drift = 0.0;
      for (std::size_t j = 0; j < points_.size(); ++j) {
        next[j] = advance(points_[j], xi);
        drift[j] = drift_of(points_[j], xi);
        total_drift += drift[j];
      }
      const std::optional<std::size_t> near = nearest_singular(xi, i);

      double xi_next = xi;
      for (int attempt = 0;; ++attempt) {
        xi_next = near ? bessel_step(*near, xi, next[*near], total_drift - drift[*near])
                       : xi + total_drift * h_ + std::sqrt(cfg_.kappa * h_) * normal_(rng_);
        if (!crosses_protected(next, xi_next) || attempt >= kMaxRedraws) break;
      }

      std::optional<std::size_t> swallowed;
      for (std::size_t j = 0; j < points_.size(); ++j) {
        if (!points_[j].swallowable) continue;
        const double gap = points_[j].side * (next[j] - xi_next);
        if (gap <= 0.0 || detect_swallowing(gap, h_)) swallowed = j;
      }

      xi = xi_next;
      out.driving.values.push_back(xi);
      for (std::size_t j = 0; j < points_.size(); ++j) {
        points_[j].pos = next[j];
        out.force.tracks[j].values.push_back(next[j]);
      }
      if (swallowed) {
        out.force.tracks[*swallowed].swallowed = out.driving.time(i + 1);
        out.stopped_at = i + 1;
        break;
      }
    }
    return out;
  }

 private:
  const SleConfig& cfg_;
  std::mt19937_64& rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::vector<Point> points_;
  double h_ = 0.0;
  double sqrt_h_ = 0.0;

  bool chordal() const noexcept { return cfg_.geometry == Geometry::Chordal; }

  // Exact image of a force point after one step with xi held fixed.
  double advance(const Point& p, double xi) const noexcept {
    switch (p.kind) {
      case ForceKind::PlusInfinity:
      case ForceKind::MinusInfinity:
        return p.pos;
      case ForceKind::StripTop:
        return xi + detail::strip_top_step(p.pos - xi, h_);
      default: {
        const double gap = p.pos - xi;
        return xi + (chordal() ? detail::chordal_real_step(gap, h_) : detail::strip_real_step(gap, h_));
      }
    }
  }

  double drift_of(const Point& p, double xi) const noexcept {
    switch (p.kind) {
      case ForceKind::PlusInfinity:
        return -0.5 * p.rho;
      case ForceKind::MinusInfinity:
        return 0.5 * p.rho;
      case ForceKind::StripTop:
        return 0.5 * p.rho * std::tanh(0.5 * (xi - p.pos));
      default:
        return chordal() ? p.rho / (xi - p.pos) : 0.5 * p.rho * half_coth(xi - p.pos);
    }
  }

  std::optional<std::size_t> nearest_singular(double xi, std::size_t step) const noexcept {
    std::optional<std::size_t> best;
    double best_gap = kNearSingular * sqrt_h_;
    for (std::size_t j = 0; j < points_.size(); ++j) {
      const Point& p = points_[j];
      if (!is_finite_point(p.kind) || p.swallowable) continue;
      const double gap = std::abs(p.pos - xi);
      if (gap < best_gap || (p.degenerate && step < kDegenerateBesselSteps && !best)) {
        best = j;
        best_gap = gap;
      }
    }
    return best;
  }

  // The gap X = |p - xi| to the nearest protected point solves
  // dX = ((2 + rho)/X + r) dt + sqrt(kappa) dW with a bounded remainder r.
  // Its singular part is sampled exactly as a scaled Bessel process and r
  // is added as an Euler increment whenever that keeps the gap positive.
  double bessel_step(std::size_t j, double xi, double p_next, double other_drift) {
    const Point& p = points_[j];
    const double kappa = cfg_.kappa;
    const double x0 = std::abs(p.pos - xi);
    const double d = 1.0 + 2.0 * (2.0 + p.rho) / kappa;
    const double x1 = std::sqrt(kappa) * sample_bessel(x0 / std::sqrt(kappa), d, h_, rng_);
    double remainder = -p.side * other_drift;
    if (!chordal()) remainder += (1.0 + 0.5 * p.rho) * (half_coth(x0) - 2.0 / x0);
    double gap = x1 + remainder * h_;
    if (!(gap > 0.0)) gap = x1;
    return p_next - p.side * gap;
  }

  bool crosses_protected(const std::vector<double>& next, double xi_next) const noexcept {
    for (std::size_t j = 0; j < points_.size(); ++j) {
      const Point& p = points_[j];
      if (!is_finite_point(p.kind) || p.swallowable) continue;
      if (!(p.side * (next[j] - xi_next) > 0.0)) return true;
    }
    return false;
  }
};

}  // namespace

std::string_view to_string(ForceKind kind) noexcept {
  switch (kind) {
    case ForceKind::Real: return "real";
    case ForceKind::DegeneratePlus: return "0+";
    case ForceKind::DegenerateMinus: return "0-";
    case ForceKind::PlusInfinity: return "+inf";
    case ForceKind::MinusInfinity: return "-inf";
    case ForceKind::StripTop: return "top";
  }
  return "?";
}

void SleConfig::validate() const {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) reject("kappa", "must be a positive number");
  if (!std::isfinite(start)) reject("start", "must be finite");
  if (!(dt > 0.0)) reject("dt", "must be positive");
  if (dt > kMaxDt) reject("dt", "step " + std::to_string(dt) + " exceeds the maximum 1e-2");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) reject("horizon", "must be positive and finite");
  if (horizon < dt) reject("horizon", "shorter than one time step");

  int plus = 0, minus = 0, plus_inf = 0, minus_inf = 0;
  for (std::size_t i = 0; i < force_points.size(); ++i) {
    const ForceSpec& f = force_points[i];
    if (!std::isfinite(f.rho)) reject(field(i, "rho"), "must be finite");
    switch (f.kind) {
      case ForceKind::Real:
        if (!std::isfinite(f.value)) reject(field(i, "at"), "must be finite");
        if (f.value == start) reject(field(i, "at"), "coincides with the start point; use 0+ or 0-");
        for (std::size_t j = 0; j < i; ++j) {
          if (force_points[j].kind == ForceKind::Real && force_points[j].value == f.value) {
            reject(field(i, "at"), "duplicates force_points[" + std::to_string(j) + "]");
          }
        }
        break;
      case ForceKind::DegeneratePlus:
      case ForceKind::DegenerateMinus: {
        int& count = f.kind == ForceKind::DegeneratePlus ? plus : minus;
        if (++count > 1) reject(field(i, "at"), "at most one degenerate point per side");
        if (f.rho < 0.5 * kappa - 2.0) {
          reject(field(i, "rho"), "a degenerate force point needs rho >= kappa/2 - 2");
        }
        break;
      }
      case ForceKind::PlusInfinity:
      case ForceKind::MinusInfinity: {
        if (geometry != Geometry::Strip) reject(field(i, "at"), "points at infinity need strip geometry");
        int& count = f.kind == ForceKind::PlusInfinity ? plus_inf : minus_inf;
        if (++count > 1) reject(field(i, "at"), "duplicate point at infinity");
        break;
      }
      case ForceKind::StripTop:
        if (geometry != Geometry::Strip) reject(field(i, "at"), "top-line points need strip geometry");
        if (!std::isfinite(f.value)) reject(field(i, "at.top"), "must be finite");
        for (std::size_t j = 0; j < i; ++j) {
          if (force_points[j].kind == ForceKind::StripTop && force_points[j].value == f.value) {
            reject(field(i, "at.top"), "duplicates force_points[" + std::to_string(j) + "]");
          }
        }
        break;
    }
  }
}

std::size_t SleConfig::steps() const {
  return static_cast<std::size_t>(std::llround(horizon / dt));
}

std::uint64_t sample_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) noexcept {
  return splitmix(splitmix(splitmix(master) ^ (stream * 0xd1b54a32d192ed03ULL)) ^ index);
}

SampledPath sample_driving(const SleConfig& config, std::uint64_t index, std::uint64_t stream) {
  config.validate();
  std::mt19937_64 rng(sample_seed(config.seed, stream, index));
  return Sampler(config, rng).run();
}

std::pair<DrivingPath, ForcePointTrajectory> sample_chordal_driving(const SleConfig& config,
                                                                     std::uint64_t index) {
  if (config.geometry != Geometry::Chordal) throw std::invalid_argument("geometry: expected chordal");
  SampledPath s = sample_driving(config, index);
  return {std::move(s.driving), std::move(s.force)};
}

std::pair<DrivingPath, ForcePointTrajectory> sample_strip_driving(const SleConfig& config,
                                                                   std::uint64_t index) {
  if (config.geometry != Geometry::Strip) throw std::invalid_argument("geometry: expected strip");
  SampledPath s = sample_driving(config, index);
  return {std::move(s.driving), std::move(s.force)};
}

bool detect_swallowing(double gap, double dt) {
  return gap < detail::swallow_radius(dt);
}

double sample_bessel(double y0, double d, double h, std::mt19937_64& rng) {
  // Y_h^2 / h is noncentral chi-square with d degrees of freedom and
  // noncentrality y0^2 / h: a Poisson mixture of central chi-squares.
  const double lambda = y0 * y0 / h;
  double shape = 0.5 * d;
  if (lambda > 0.0) {
    std::poisson_distribution<long long> poisson(0.5 * lambda);
    shape += static_cast<double>(poisson(rng));
  }
  std::gamma_distribution<double> gamma(shape, 2.0);
  return std::sqrt(h * gamma(rng));
}

}  // namespace slelab
