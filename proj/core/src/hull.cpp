#include "slelab/hull.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "slelab/detail/steps.hpp"

namespace slelab {

namespace {

struct Side {
  double edge;                  // outermost swallowed point, or start when none
  std::optional<double> image;  // image at t_k of a free point just outside
  bool swallowed;
};

// Gap of a real point x to the driving value, tracked without the proximity
// rule. Empty once the driving value overtakes the image, which is the
// discrete form of the point entering the hull.
std::optional<double> raw_gap(const DrivingPath& driving, std::size_t k, double x, double direction) {
  const auto& xi = driving.values;
  const bool chordal = driving.geometry == Geometry::Chordal;
  double gap = x - xi[0];
  for (std::size_t i = 0; i < k; ++i) {
    const double m = std::abs(gap);
    gap = direction * (chordal ? detail::chordal_real_step(m, driving.dt) : detail::strip_real_step(m, driving.dt));
    gap -= xi[i + 1] - xi[i];
    if (gap == 0.0 || detail::sign_of(gap) != direction) return std::nullopt;
  }
  return gap;
}

// Points within two swallow radii of the start are swallowed by the
// proximity rule at the first step, so that band is resolved with raw
// tracking instead: the free side of the base maps to where the boundary
// meets R.
Side locate_side(const LoewnerChain& chain, double start, std::size_t k, double direction) {
  const DrivingPath& driving = chain.driving();
  const double probe = 2.0 * detail::swallow_radius(driving.dt);
  auto swallowed_by = [&](double x) {
    const auto track = chain.track_real(x, k);
    return track.swallowed_at.has_value();
  };
  auto image_of = [&](double x) -> std::optional<double> {
    const auto g = raw_gap(driving, k, x, direction);
    if (!g) return std::nullopt;
    return *g + driving.values[k];
  };

  const double first = start + direction * probe;
  if (!swallowed_by(first)) {
    if (const auto base = image_of(start)) return {start, base, false};
    double inner = 0.0;
    double outer = probe;
    while (outer - inner > kExtentTolerance) {
      const double mid = 0.5 * (inner + outer);
      if (image_of(start + direction * mid)) {
        outer = mid;
      } else {
        inner = mid;
      }
    }
    return {start + direction * inner, image_of(start + direction * outer), true};
  }

  double inner = probe;
  double outer = 2.0 * probe;
  for (int i = 0; i < 80 && swallowed_by(start + direction * outer); ++i) {
    inner = outer;
    outer *= 2.0;
  }
  while (outer - inner > kExtentTolerance) {
    const double mid = 0.5 * (inner + outer);
    if (swallowed_by(start + direction * mid)) {
      inner = mid;
    } else {
      outer = mid;
    }
  }
  const double free_point = start + direction * (inner + kExtentTolerance);
  return {start + direction * inner, chain.real_image(free_point, k), true};
}

struct Window {
  std::size_t k = 0;
  double lo = 0.0;
  double hi = 0.0;
};

Window preimage_window(const LoewnerChain& chain, double t) {
  const DrivingPath& driving = chain.driving();
  const std::size_t k = driving.index_of(t);
  if (k == 0) throw std::invalid_argument("hull boundary: the hull is empty at t = 0");
  const double start = driving.values.front();
  const Side left = locate_side(chain, start, k, -1.0);
  const Side right = locate_side(chain, start, k, 1.0);
  if (!left.image || !right.image) throw std::runtime_error("hull boundary: outer neighbour unexpectedly swallowed");
  return {k, *left.image, *right.image};
}

Complex lifted_inverse(const LoewnerChain& chain, std::size_t k, double u, double lift) {
  Complex z = chain.inverse_from(Complex(u, lift), k);
  if (z.imag() < 0.0) z.imag(0.0);
  return z;
}

std::vector<Complex> sample_interval(const LoewnerChain& chain, std::size_t k, double lo, double hi,
                                     std::size_t count, double lift) {
  std::vector<Complex> out;
  out.reserve(count);
  if (count == 1) {
    out.push_back(lifted_inverse(chain, k, 0.5 * (lo + hi), lift));
    return out;
  }
  for (std::size_t i = 0; i < count; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(count - 1);
    out.push_back(lifted_inverse(chain, k, lo + s * (hi - lo), lift));
  }
  return out;
}

// Preimages approaching c (direction +1 from lo) or d (direction -1 from
// hi) by halving the inset until the image lands within a tenth of the
// reach tolerance of the real line. Returned outermost first.
std::vector<Complex> refine_end(const LoewnerChain& chain, std::size_t k, double edge, double inset,
                                double direction, double lift, Complex inset_image) {
  std::vector<Complex> out;
  if (std::abs(inset_image.imag()) < 0.1 * kBoundaryReach) return out;
  double e = inset;
  for (int m = 0; m < 48; ++m) {
    e *= 0.5;
    const Complex z = lifted_inverse(chain, k, edge + direction * e, std::min(lift, e));
    out.push_back(z);
    if (std::abs(z.imag()) < 0.1 * kBoundaryReach) break;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

Curve drop_repeats(std::vector<Complex> pts) {
  Curve curve;
  curve.points.reserve(pts.size());
  for (const Complex& p : pts) {
    if (curve.points.empty() || curve.points.back() != p) curve.points.push_back(p);
  }
  return curve;
}

double orient(Complex a, Complex b, Complex c) {
  return (b.real() - a.real()) * (c.imag() - a.imag()) - (b.imag() - a.imag()) * (c.real() - a.real());
}

bool on_segment(Complex a, Complex b, Complex p) {
  return std::min(a.real(), b.real()) <= p.real() && p.real() <= std::max(a.real(), b.real()) &&
         std::min(a.imag(), b.imag()) <= p.imag() && p.imag() <= std::max(a.imag(), b.imag());
}

bool segments_intersect(Complex p1, Complex p2, Complex q1, Complex q2) {
  const double d1 = orient(q1, q2, p1);
  const double d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1);
  const double d4 = orient(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

struct CellHash {
  std::size_t operator()(const std::pair<long long, long long>& c) const noexcept {
    return std::hash<long long>()(c.first * 73856093LL ^ c.second * 19349663LL);
  }
};

}  // namespace

SwallowReport swallowing_time(const DrivingPath& driving, double x) {
  const LoewnerChain chain(driving);
  const auto track = chain.track_real(x, driving.steps());
  SwallowReport report;
  report.point = x;
  report.terminal_gap = std::abs(track.gaps.back());
  if (track.swallowed_at) report.time = driving.time(*track.swallowed_at);
  return report;
}

HullExtent hull_extent(const DrivingPath& driving, double t) {
  const LoewnerChain chain(driving);
  const std::size_t k = driving.index_of(t);
  const double start = driving.values.front();
  HullExtent ext;
  ext.t = driving.time(k);
  if (k == 0) {
    ext.a = ext.b = start;
    ext.c = ext.d = start;
    return ext;
  }
  const Side left = locate_side(chain, start, k, -1.0);
  const Side right = locate_side(chain, start, k, 1.0);
  ext.a = left.edge;
  ext.b = right.edge;
  if (!left.swallowed && !right.swallowed) {
    ext.c = ext.d = driving.values[k];
    return ext;
  }
  ext.c = left.image.value_or(driving.values[k]);
  ext.d = right.image.value_or(driving.values[k]);
  return ext;
}

Curve hull_boundary(const DrivingPath& driving, double t, const BoundaryOptions& options) {
  if (options.resolution < 2) throw std::invalid_argument("hull_boundary: resolution must be at least 2");
  const LoewnerChain chain(driving);
  const Window w = preimage_window(chain, t);
  const double delta = (w.hi - w.lo) * 1e-4;
  const double lift = options.lift < 0.0 ? std::sqrt(driving.dt) : options.lift;
  const double lo = w.lo + delta;
  const double hi = w.hi - delta;

  std::vector<double> us(options.resolution);
  for (std::size_t i = 0; i < us.size(); ++i) {
    us[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(us.size() - 1);
  }
  std::vector<Complex> zs;
  zs.reserve(us.size());
  for (double u : us) zs.push_back(lifted_inverse(chain, w.k, u, lift));

  if (options.max_segment > 0.0) {
    bool changed = true;
    while (changed && zs.size() < options.max_points) {
      changed = false;
      std::vector<double> nu;
      std::vector<Complex> nz;
      nu.reserve(2 * us.size());
      nz.reserve(2 * us.size());
      std::size_t added = 0;
      for (std::size_t i = 0; i + 1 < us.size(); ++i) {
        nu.push_back(us[i]);
        nz.push_back(zs[i]);
        const double gap = us[i + 1] - us[i];
        if (std::abs(zs[i + 1] - zs[i]) > options.max_segment && gap > 1e-13 * std::max(1.0, std::abs(us[i])) &&
            zs.size() + added < options.max_points) {
          const double mid = us[i] + 0.5 * gap;
          nu.push_back(mid);
          nz.push_back(lifted_inverse(chain, w.k, mid, lift));
          ++added;
          changed = true;
        }
      }
      nu.push_back(us.back());
      nz.push_back(zs.back());
      us = std::move(nu);
      zs = std::move(nz);
    }
  }
  if (!options.refine_ends) return drop_repeats(std::move(zs));
  std::vector<Complex> pts = refine_end(chain, w.k, w.lo, delta, 1.0, lift, zs.front());
  pts.insert(pts.end(), zs.begin(), zs.end());
  std::vector<Complex> tail = refine_end(chain, w.k, w.hi, delta, -1.0, lift, zs.back());
  pts.insert(pts.end(), tail.rbegin(), tail.rend());
  return drop_repeats(std::move(pts));
}

Curve hull_boundary(const DrivingPath& driving, double t, std::size_t resolution) {
  BoundaryOptions options;
  options.resolution = resolution;
  return hull_boundary(driving, t, options);
}

std::pair<Curve, Curve> left_right_boundaries(const DrivingPath& driving, double t,
                                              const BoundaryOptions& options) {
  if (options.resolution < 2) throw std::invalid_argument("left_right_boundaries: resolution must be at least 2");
  const LoewnerChain chain(driving);
  const Window w = preimage_window(chain, t);
  const double delta = (w.hi - w.lo) * 1e-4;
  const double lift = options.lift < 0.0 ? std::sqrt(driving.dt) : options.lift;
  const double xi = driving.values[w.k];
  std::vector<Complex> left = sample_interval(chain, w.k, w.lo + delta, xi, options.resolution, lift);
  std::vector<Complex> right = sample_interval(chain, w.k, xi, w.hi - delta, options.resolution, lift);
  if (options.refine_ends) {
    std::vector<Complex> head = refine_end(chain, w.k, w.lo, delta, 1.0, lift, left.front());
    left.insert(left.begin(), head.begin(), head.end());
    std::vector<Complex> tail = refine_end(chain, w.k, w.hi, delta, -1.0, lift, right.back());
    right.insert(right.end(), tail.rbegin(), tail.rend());
  }
  return {drop_repeats(std::move(left)), drop_repeats(std::move(right))};
}

std::pair<Curve, Curve> left_right_boundaries(const DrivingPath& driving, double t, std::size_t resolution) {
  BoundaryOptions options;
  options.resolution = resolution;
  options.refine_ends = false;
  return left_right_boundaries(driving, t, options);
}

DimensionEstimate box_counting_dimension(const Curve& curve, std::size_t n_scales) {
  const auto& pts = curve.points;
  if (pts.size() < 100) throw std::invalid_argument("box_counting_dimension: need at least 100 points");
  if (n_scales < 3) throw std::invalid_argument("box_counting_dimension: need at least 3 scales");

  double min_x = pts[0].real(), max_x = min_x, min_y = pts[0].imag(), max_y = min_y;
  std::vector<double> seg;
  seg.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    min_x = std::min(min_x, pts[i].real());
    max_x = std::max(max_x, pts[i].real());
    min_y = std::min(min_y, pts[i].imag());
    max_y = std::max(max_y, pts[i].imag());
    if (i > 0) {
      const double len = std::abs(pts[i] - pts[i - 1]);
      if (len > 0.0) seg.push_back(len);
    }
  }
  if (seg.empty()) throw std::invalid_argument("box_counting_dimension: curve has no extent");
  std::nth_element(seg.begin(), seg.begin() + static_cast<std::ptrdiff_t>(seg.size() / 2), seg.end());
  const double median = seg[seg.size() / 2];
  const double diameter = std::hypot(max_x - min_x, max_y - min_y);
  const double s_max = diameter / 4.0;
  const double s_min = 4.0 * median;
  if (!(s_min < s_max)) {
    throw std::invalid_argument("box_counting_dimension: fewer than 3 usable scales (curve too coarse)");
  }

  DimensionEstimate est;
  for (std::size_t j = 0; j < n_scales; ++j) {
    const double frac = static_cast<double>(j) / static_cast<double>(n_scales - 1);
    const double s = s_max * std::pow(s_min / s_max, frac);
    std::unordered_set<std::pair<long long, long long>, CellHash> boxes;
    auto cell = [&](Complex p) {
      return std::pair<long long, long long>{static_cast<long long>(std::floor((p.real() - min_x) / s)),
                                             static_cast<long long>(std::floor((p.imag() - min_y) / s))};
    };
    boxes.insert(cell(pts[0]));
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const Complex a = pts[i - 1];
      const Complex b = pts[i];
      const auto pieces = static_cast<std::size_t>(std::ceil(4.0 * std::abs(b - a) / s));
      for (std::size_t q = 1; q <= pieces; ++q) {
        boxes.insert(cell(a + (b - a) * (static_cast<double>(q) / static_cast<double>(pieces))));
      }
      boxes.insert(cell(b));
    }
    est.scales.push_back(s);
    est.counts.push_back(static_cast<double>(boxes.size()));
  }

  const auto n = static_cast<double>(n_scales);
  double mx = 0.0, my = 0.0;
  for (std::size_t j = 0; j < n_scales; ++j) {
    mx += std::log(1.0 / est.scales[j]);
    my += std::log(est.counts[j]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t j = 0; j < n_scales; ++j) {
    const double dx = std::log(1.0 / est.scales[j]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(est.counts[j]) - my);
  }
  est.estimate = sxy / sxx;
  double ssr = 0.0;
  for (std::size_t j = 0; j < n_scales; ++j) {
    const double fit = my + est.estimate * (std::log(1.0 / est.scales[j]) - mx);
    const double r = std::log(est.counts[j]) - fit;
    ssr += r * r;
  }
  est.stderr_ = n_scales > 2 ? std::sqrt(ssr / (n - 2.0) / sxx) : 0.0;
  return est;
}

std::pair<double, double> crosscut_endpoints(const Curve& curve) {
  if (curve.points.size() < 2) throw std::invalid_argument("crosscut_endpoints: curve needs two distinct ends");
  const Complex first = curve.points.front();
  const Complex last = curve.points.back();
  if (std::abs(first.imag()) >= kBoundaryReach) {
    throw std::invalid_argument("crosscut_endpoints: first point is not near the real line");
  }
  if (std::abs(last.imag()) >= kBoundaryReach) {
    throw std::invalid_argument("crosscut_endpoints: last point is not near the real line");
  }
  return {first.real(), last.real()};
}

bool is_simple_polyline(const std::vector<Complex>& points) {
  const std::size_t n = points.size();
  if (n < 4) return true;
  std::vector<double> lengths;
  lengths.reserve(n - 1);
  for (std::size_t i = 1; i < n; ++i) lengths.push_back(std::abs(points[i] - points[i - 1]));
  std::vector<double> sorted = lengths;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
  const double cell = std::max(sorted[sorted.size() / 2] * 2.0, 1e-12);

  std::unordered_map<std::pair<long long, long long>, std::vector<std::size_t>, CellHash> grid;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Complex a = points[i];
    const Complex b = points[i + 1];
    const auto x0 = static_cast<long long>(std::floor(std::min(a.real(), b.real()) / cell));
    const auto x1 = static_cast<long long>(std::floor(std::max(a.real(), b.real()) / cell));
    const auto y0 = static_cast<long long>(std::floor(std::min(a.imag(), b.imag()) / cell));
    const auto y1 = static_cast<long long>(std::floor(std::max(a.imag(), b.imag()) / cell));
    for (long long x = x0; x <= x1; ++x) {
      for (long long y = y0; y <= y1; ++y) {
        auto& bucket = grid[{x, y}];
        for (std::size_t j : bucket) {
          if (i - j <= 1) continue;
          if (segments_intersect(points[j], points[j + 1], a, b)) return false;
        }
        bucket.push_back(i);
      }
    }
  }
  return true;
}

}  // namespace slelab
