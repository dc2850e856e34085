#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "slelab/loewner.hpp"

namespace testing_support {

using slelab::Complex;

inline slelab::DrivingPath make_path(slelab::Geometry g, double dt, double horizon,
                                     const std::function<double(double)>& xi, double kappa = 0.0) {
  slelab::DrivingPath p;
  p.dt = dt;
  p.geometry = g;
  p.kappa = kappa;
  const auto n = static_cast<std::size_t>(std::llround(horizon / dt));
  for (std::size_t i = 0; i <= n; ++i) p.values.push_back(xi(dt * static_cast<double>(i)));
  return p;
}

inline slelab::DrivingPath constant_path(slelab::Geometry g, double dt, double horizon, double c = 0.0) {
  return make_path(g, dt, horizon, [c](double) { return c; });
}

// Composite Simpson rule on [a, b] with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, std::size_t panels) {
  if (panels % 2) ++panels;
  const double h = (b - a) / static_cast<double>(panels);
  double s = f(a) + f(b);
  for (std::size_t i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
  return s * h / 3.0;
}

// Brute-force O(n^2) proper-intersection test between non-adjacent segments.
inline bool segments_cross(Complex p1, Complex p2, Complex q1, Complex q2) {
  auto cross = [](Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); };
  const double d1 = cross(p2 - p1, q1 - p1);
  const double d2 = cross(p2 - p1, q2 - p1);
  const double d3 = cross(q2 - q1, p1 - q1);
  const double d4 = cross(q2 - q1, p2 - q1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

inline bool brute_force_simple(const std::vector<Complex>& pts) {
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    for (std::size_t j = i + 2; j + 1 < pts.size(); ++j) {
      if (segments_cross(pts[i], pts[i + 1], pts[j], pts[j + 1])) return false;
    }
  }
  return true;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace testing_support
