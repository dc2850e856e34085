#pragma once

// Single-step kernels shared by the Loewner chain and the SDE sampler.
// All gaps are measured relative to the driving value held over the step.

#include <cmath>
#include <complex>

namespace slelab::detail {

/// Square root of q on the closed upper half-plane. When the root is real
/// (q real and nonnegative) its sign follows tie_sign, which callers set
/// to the side the point came from so the map stays continuous from above.
inline std::complex<double> upper_sqrt(std::complex<double> q, double tie_sign) noexcept {
  const double a = q.real();
  const double b = q.imag();
  const double m = std::sqrt(a * a + b * b);
  double re = 0.0;
  double im = 0.0;
  if (a >= 0.0) {
    re = std::sqrt(0.5 * (m + a));
    im = re > 0.0 ? b / (2.0 * re) : 0.0;
  } else {
    im = std::sqrt(0.5 * (m - a));
    re = b / (2.0 * im);
  }
  if (im < 0.0 || (im == 0.0 && ((re > 0.0 && tie_sign < 0.0) || (re < 0.0 && tie_sign > 0.0)))) {
    re = -re;
    im = -im;
  }
  return {re, im};
}

inline std::complex<double> square(std::complex<double> w) noexcept {
  const double x = w.real();
  const double y = w.imag();
  return {(x - y) * (x + y), 2.0 * x * y};
}

inline std::complex<double> mul(std::complex<double> a, std::complex<double> b) noexcept {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

inline double sign_of(double x) noexcept { return x < 0.0 ? -1.0 : 1.0; }

/// Beyond this |gap| the strip flow is a pure translation by +-h to
/// double precision (corrections are O(exp(-gap))).
inline constexpr double kStripFarGap = 60.0;

/// New gap of a real point under the chordal slit map, same reference.
inline double chordal_real_step(double gap, double h) noexcept {
  return sign_of(gap) * std::sqrt(gap * gap + 4.0 * h);
}

/// Real point on the bottom line of the strip: cosh(g'/2) = e^{h/2} cosh(g/2).
inline double strip_real_step(double gap, double h) noexcept {
  if (std::abs(gap) > kStripFarGap) return gap + sign_of(gap) * h;
  return sign_of(gap) * 2.0 * std::acosh(std::exp(0.5 * h) * std::cosh(0.5 * gap));
}

/// Point on R_pi, stored by its real part: sinh(g'/2) = e^{h/2} sinh(g/2).
inline double strip_top_step(double gap, double h) noexcept {
  if (std::abs(gap) > kStripFarGap) return gap + sign_of(gap) * h;
  return 2.0 * std::asinh(std::exp(0.5 * h) * std::sinh(0.5 * gap));
}

/// Inverse of the two strip line maps.
inline double strip_real_step_inverse(double gap, double h) noexcept {
  if (std::abs(gap) > kStripFarGap) return gap - sign_of(gap) * h;
  const double c = std::exp(-0.5 * h) * std::cosh(0.5 * gap);
  return c <= 1.0 ? 0.0 : sign_of(gap) * 2.0 * std::acosh(c);
}

/// Strip radius below which an image point counts as hitting the driving
/// value: 2 sqrt(2 dt), with an imaginary part below sqrt(dt).
inline double swallow_radius(double dt) noexcept { return 2.0 * std::sqrt(2.0 * dt); }

}  // namespace slelab::detail
