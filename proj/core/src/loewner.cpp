#include "slelab/loewner.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>
#include <string>

#include "slelab/detail/steps.hpp"

namespace slelab {

using detail::mul;
using detail::sign_of;
using detail::square;
using detail::upper_sqrt;

namespace {

constexpr double kPi = std::numbers::pi;

// w from (cosh(w/2), sinh(w/2)) without cancellation on either side.
Complex from_half_cosh_sinh(Complex c, Complex s) {
  const Complex e = c + s;
  const Complex f = c - s;
  Complex w = std::norm(e) >= std::norm(f) ? 2.0 * std::log(e) : -2.0 * std::log(f);
  if (w.imag() < 0.0) w.imag(0.0);
  if (w.imag() > kPi) w.imag(kPi);
  return w;
}

void require_geometry(const DrivingPath& driving, Geometry expected) {
  if (driving.geometry != expected) {
    throw std::invalid_argument("driving path geometry is " + std::string(to_string(driving.geometry)) +
                                ", expected " + std::string(to_string(expected)));
  }
}

// Grid index k and remainder r with t = k dt + r, 0 <= r < dt.
std::pair<std::size_t, double> split_time(const DrivingPath& driving, double t) {
  if (!(t >= 0.0)) throw std::out_of_range("time must be nonnegative");
  const double horizon = driving.horizon();
  const double tol = 1e-9 * std::max(1.0, horizon);
  if (t > horizon + tol) throw std::out_of_range("time beyond the driving path horizon");
  const double ratio = t / driving.dt;
  auto k = static_cast<std::size_t>(std::floor(ratio + 1e-9));
  k = std::min(k, driving.steps());
  double r = t - driving.time(k);
  if (r < tol) r = 0.0;
  return {k, r};
}

}  // namespace

std::string_view to_string(Geometry geometry) noexcept {
  return geometry == Geometry::Chordal ? "chordal" : "strip";
}

std::size_t DrivingPath::index_of(double t) const {
  const auto [k, r] = split_time(*this, t);
  if (r > 0.0) throw std::out_of_range("time " + std::to_string(t) + " is not on the grid");
  return k;
}

void DrivingPath::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("driving path: dt must be positive");
  if (values.empty()) throw std::invalid_argument("driving path: no samples");
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("driving path: non-finite sample");
  }
  if (kappa < 0.0) throw std::invalid_argument("driving path: kappa must be nonnegative");
}

DrivingPath DrivingPath::truncated(std::size_t k) const {
  DrivingPath out{dt, {}, geometry, kappa};
  const std::size_t end = std::min(k, steps()) + 1;
  out.values.assign(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

// ---- elementary maps ----

Complex elementary_slit_map(double xi0, double delta_t, Complex z) {
  if (delta_t < 0.0) throw std::invalid_argument("elementary_slit_map: negative time step");
  if (delta_t == 0.0) return z;
  const Complex rel = z - xi0;
  return xi0 + upper_sqrt(square(rel) + 4.0 * delta_t, sign_of(rel.real()));
}

Complex elementary_slit_inverse(double xi0, double delta_t, Complex w) {
  if (delta_t < 0.0) throw std::invalid_argument("elementary_slit_inverse: negative time step");
  if (delta_t == 0.0) return w;
  const Complex rel = w - xi0;
  return xi0 + upper_sqrt(square(rel) - 4.0 * delta_t, sign_of(rel.real()));
}

bool on_elementary_slit(double xi0, double delta_t, Complex z, double tol) {
  const double height = 2.0 * std::sqrt(std::max(delta_t, 0.0));
  const double dx = z.real() - xi0;
  const double dy = z.imag() < 0.0 ? -z.imag() : (z.imag() > height ? z.imag() - height : 0.0);
  return std::hypot(dx, dy) <= tol;
}

Complex elementary_strip_map(double xi0, double delta_t, Complex z) {
  if (delta_t < 0.0) throw std::invalid_argument("elementary_strip_map: negative time step");
  if (delta_t == 0.0) return z;
  const Complex rel = z - xi0;
  const Complex c = std::exp(0.5 * delta_t) * std::cosh(0.5 * rel);
  const Complex s = upper_sqrt(mul(c - 1.0, c + 1.0), sign_of(rel.real()));
  return xi0 + from_half_cosh_sinh(c, s);
}

Complex elementary_strip_inverse(double xi0, double delta_t, Complex w) {
  if (delta_t < 0.0) throw std::invalid_argument("elementary_strip_inverse: negative time step");
  if (delta_t == 0.0) return w;
  const Complex rel = w - xi0;
  const Complex c = std::exp(-0.5 * delta_t) * std::cosh(0.5 * rel);
  const Complex s = upper_sqrt(mul(c - 1.0, c + 1.0), sign_of(rel.real()));
  return xi0 + from_half_cosh_sinh(c, s);
}

// ---- LoewnerChain ----

LoewnerChain::LoewnerChain(const DrivingPath& driving)
    : driving_(&driving),
      swallow_radius_(detail::swallow_radius(driving.dt)),
      swallow_height_(std::sqrt(driving.dt)) {
  driving.validate();
  if (driving.geometry == Geometry::Strip) {
    const auto& xi = driving.values;
    half_cosh_.assign(xi.size(), 1.0);
    half_sinh_.assign(xi.size(), 0.0);
    for (std::size_t i = 1; i < xi.size(); ++i) {
      const double half = 0.5 * (xi[i] - xi[i - 1]);
      half_cosh_[i] = std::cosh(half);
      half_sinh_[i] = std::sinh(half);
    }
  }
}

bool LoewnerChain::is_swallowed(Complex relative) const noexcept {
  return std::abs(relative) < swallow_radius_ && relative.imag() < swallow_height_;
}

FlowResult LoewnerChain::forward_to(Complex z, std::size_t k) const {
  const auto& xi = driving_->values;
  const double h = driving_->dt;
  if (k > driving_->steps()) throw std::out_of_range("forward_to: index beyond horizon");
  Complex rel = z - xi[0];
  const bool on_real_line = z.imag() == 0.0;

  if (driving_->geometry == Geometry::Chordal) {
    const double four_h = 4.0 * h;
    for (std::size_t i = 0; i < k; ++i) {
      const double side = sign_of(rel.real());
      rel = upper_sqrt(square(rel) + four_h, side);
      rel -= xi[i + 1] - xi[i];
      if (is_swallowed(rel) || (on_real_line && sign_of(rel.real()) != side)) {
        return {rel + xi[i + 1], i + 1};
      }
    }
    return {rel + xi[k], std::nullopt};
  }

  const double growth = std::exp(0.5 * h);
  Complex c = std::cosh(0.5 * rel);
  Complex s = std::sinh(0.5 * rel);
  for (std::size_t i = 0; i < k; ++i) {
    const double side = sign_of(s.real());
    c *= growth;
    s = upper_sqrt(mul(c - 1.0, c + 1.0), side);
    const double ch = half_cosh_[i + 1];
    const double sh = half_sinh_[i + 1];
    const Complex c2 = c * ch - s * sh;
    s = s * ch - c * sh;
    c = c2;
    if (on_real_line && s.imag() == 0.0 && sign_of(s.real()) != side) {
      return {from_half_cosh_sinh(c, s) + xi[i + 1], i + 1};
    }
    if (std::norm(s) < 1.0) {
      const Complex w = from_half_cosh_sinh(c, s);
      if (is_swallowed(w)) return {w + xi[i + 1], i + 1};
    }
  }
  return {from_half_cosh_sinh(c, s) + xi[k], std::nullopt};
}

FlowResult LoewnerChain::forward(Complex z, double t) const {
  const auto [k, r] = split_time(*driving_, t);
  FlowResult result = forward_to(z, k);
  if (result.swallowed() || r == 0.0) return result;
  const double xi_k = driving_->values[k];
  result.value = driving_->geometry == Geometry::Chordal ? elementary_slit_map(xi_k, r, result.value)
                                                         : elementary_strip_map(xi_k, r, result.value);
  return result;
}

Complex LoewnerChain::inverse_from(Complex w, std::size_t k) const {
  if (k == 0) return w;
  if (k > driving_->steps()) throw std::out_of_range("inverse_from: index beyond horizon");
  const auto& xi = driving_->values;
  const double h = driving_->dt;
  Complex rel = w - xi[k - 1];

  if (driving_->geometry == Geometry::Chordal) {
    const double four_h = 4.0 * h;
    for (std::size_t i = k - 1;; --i) {
      rel = upper_sqrt(square(rel) - four_h, sign_of(rel.real()));
      if (i == 0) break;
      rel += xi[i] - xi[i - 1];
    }
    return rel + xi[0];
  }

  const double decay = std::exp(-0.5 * h);
  Complex c = std::cosh(0.5 * rel);
  Complex s = std::sinh(0.5 * rel);
  for (std::size_t i = k - 1;; --i) {
    c *= decay;
    s = upper_sqrt(mul(c - 1.0, c + 1.0), sign_of(s.real()));
    if (i == 0) break;
    const double ch = half_cosh_[i];
    const double sh = half_sinh_[i];
    const Complex c2 = c * ch + s * sh;
    s = s * ch + c * sh;
    c = c2;
  }
  return from_half_cosh_sinh(c, s) + xi[0];
}

Complex LoewnerChain::inverse(Complex w, double t) const {
  const auto [k, r] = split_time(*driving_, t);
  if (r > 0.0) {
    const double xi_k = driving_->values[k];
    w = driving_->geometry == Geometry::Chordal ? elementary_slit_inverse(xi_k, r, w)
                                                : elementary_strip_inverse(xi_k, r, w);
  }
  return inverse_from(w, k);
}

Complex LoewnerChain::trace_point(std::size_t k, double eps) const {
  if (k == 0) return {driving_->values[0], 0.0};
  Complex p = inverse_from(Complex(driving_->tip(k), eps), k);
  if (p.imag() < 0.0) p.imag(0.0);
  return p;
}

LoewnerChain::RealTrack LoewnerChain::track_real(double x, std::size_t max_steps) const {
  const auto& xi = driving_->values;
  const double h = driving_->dt;
  const std::size_t n = std::min(max_steps, driving_->steps());
  RealTrack track;
  track.gaps.reserve(n + 1);
  double gap = x - xi[0];
  track.gaps.push_back(gap);
  const bool chordal = driving_->geometry == Geometry::Chordal;
  for (std::size_t i = 0; i < n; ++i) {
    const double side = sign_of(gap);
    gap = chordal ? detail::chordal_real_step(gap, h) : detail::strip_real_step(gap, h);
    gap -= xi[i + 1] - xi[i];
    track.gaps.push_back(gap);
    if (sign_of(gap) != side || std::abs(gap) < swallow_radius_) {
      track.swallowed_at = i + 1;
      break;
    }
  }
  return track;
}

std::optional<double> LoewnerChain::real_image(double x, std::size_t k) const {
  const RealTrack track = track_real(x, k);
  if (track.swallowed_at) return std::nullopt;
  return track.gaps.back() + driving_->values[k];
}

// ---- free functions ----

FlowResult chordal_forward_map(const DrivingPath& driving, Complex z, double t) {
  require_geometry(driving, Geometry::Chordal);
  return LoewnerChain(driving).forward(z, t);
}

Complex chordal_inverse_map(const DrivingPath& driving, Complex w, double t) {
  require_geometry(driving, Geometry::Chordal);
  return LoewnerChain(driving).inverse(w, t);
}

TracePath chordal_trace(const DrivingPath& driving, std::optional<double> eps) {
  require_geometry(driving, Geometry::Chordal);
  return trace(driving, eps);
}

FlowResult strip_forward_map(const DrivingPath& driving, Complex z, double t) {
  require_geometry(driving, Geometry::Strip);
  return LoewnerChain(driving).forward(z, t);
}

Complex strip_inverse_map(const DrivingPath& driving, Complex w, double t) {
  require_geometry(driving, Geometry::Strip);
  return LoewnerChain(driving).inverse(w, t);
}

TracePath strip_trace(const DrivingPath& driving, std::optional<double> eps) {
  require_geometry(driving, Geometry::Strip);
  return trace(driving, eps);
}

FlowResult forward_map(const DrivingPath& driving, Complex z, double t) {
  return LoewnerChain(driving).forward(z, t);
}

Complex inverse_map(const DrivingPath& driving, Complex w, double t) {
  return LoewnerChain(driving).inverse(w, t);
}

TracePath trace(const DrivingPath& driving, std::optional<double> eps) {
  const double offset = eps.value_or(default_trace_eps(driving));
  if (!(offset > 0.0)) throw std::invalid_argument("trace: eps must be positive");
  const LoewnerChain chain(driving);
  TracePath out;
  out.geometry = driving.geometry;
  const std::size_t n = driving.steps();
  out.times.reserve(n + 1);
  out.points.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    out.times.push_back(driving.time(k));
    Complex p = chain.trace_point(k, offset);
    if (driving.geometry == Geometry::Strip && p.imag() > kPi) p.imag(kPi);
    out.points.push_back(p);
  }
  return out;
}

double capacity(const DrivingPath& driving, double t) {
  const auto [k, r] = split_time(driving, t);
  (void)k;
  (void)r;
  return driving.geometry == Geometry::Chordal ? 2.0 * t : t;
}

}  // namespace slelab
