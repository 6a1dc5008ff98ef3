#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "raceloop/errors.hpp"

namespace raceloop {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
inline Point2 operator*(Point2 p, double s) { return {s * p.x, s * p.y}; }

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double distance(Point2 a, Point2 b) { return norm(b - a); }

// Counter-clockwise quarter turn.
inline Point2 perp(Point2 p) { return {-p.y, p.x}; }

inline Point2 normalized(Point2 p) {
  const double n = norm(p);
  if (n < 1e-15) return {1.0, 0.0};
  return {p.x / n, p.y / n};
}

inline Point2 rotate(Point2 p, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * p.x - s * p.y, s * p.x + c * p.y};
}

// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a) {
  double r = std::fmod(a + M_PI, 2.0 * M_PI);
  if (r <= 0.0) r += 2.0 * M_PI;
  return r - M_PI;
}

struct Pose2 {
  Point2 position;
  double psi = 0.0;  // heading, (-pi, pi]
};

inline Point2 to_world(const Pose2& frame, Point2 local) {
  return frame.position + rotate(local, frame.psi);
}

inline Point2 to_local(const Pose2& frame, Point2 world) {
  return rotate(world - frame.position, -frame.psi);
}

// Pose of a child frame given in `frame` coordinates, expressed in the parent.
inline Pose2 compose(const Pose2& frame, const Pose2& child) {
  return {to_world(frame, child.position), normalize_angle(frame.psi + child.psi)};
}

using Polyline = std::vector<Point2>;

inline double polyline_length(const Polyline& pts) {
  double len = 0.0;
  for (size_t i = 1; i < pts.size(); ++i) len += distance(pts[i - 1], pts[i]);
  return len;
}

// Uniform arc-length resampling; always keeps both endpoints.
inline Polyline resample_polyline(const Polyline& pts, double spacing) {
  if (pts.size() < 2 || spacing <= 0.0) return pts;
  Polyline out;
  out.push_back(pts.front());
  double carried = 0.0;
  for (size_t i = 1; i < pts.size(); ++i) {
    Point2 a = pts[i - 1], b = pts[i];
    double seg = distance(a, b);
    if (seg < 1e-12) continue;
    double along = spacing - carried;
    while (along <= seg) {
      out.push_back(a + (along / seg) * (b - a));
      along += spacing;
    }
    carried = seg - (along - spacing);
  }
  if (distance(out.back(), pts.back()) > 1e-9)
    out.push_back(pts.back());
  return out;
}

// Spatial decimation: keeps points at least `spacing` apart (Euclidean),
// plus both endpoints. Unlike arc resampling this does not let measurement
// jitter inflate the walked length.
inline Polyline decimate_by_distance(const Polyline& pts, double spacing) {
  if (pts.size() < 2) return pts;
  Polyline out{pts.front()};
  for (size_t i = 1; i + 1 < pts.size(); ++i)
    if (distance(out.back(), pts[i]) >= spacing) out.push_back(pts[i]);
  if (distance(out.back(), pts.back()) >= 0.5 * spacing || out.size() == 1)
    out.push_back(pts.back());
  return out;
}

struct SegmentFoot {
  Point2 point;
  double t = 0.0;  // parameter along the segment, [0, 1]
};

inline SegmentFoot closest_point_on_segment(Point2 a, Point2 b, Point2 q) {
  const Point2 d = b - a;
  const double den = dot(d, d);
  if (den < 1e-18) return {a, 0.0};
  double t = std::clamp(dot(q - a, d) / den, 0.0, 1.0);
  return {a + t * d, t};
}

struct PolylineFoot {
  Point2 point;
  double dist = 0.0;
  double arc = 0.0;       // arc length from the first vertex to the foot
  size_t segment = 0;     // index of the segment containing the foot
};

inline PolylineFoot closest_point_on_polyline(const Polyline& pts, Point2 q) {
  PolylineFoot best;
  best.dist = std::numeric_limits<double>::infinity();
  double arc = 0.0;
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    const double seg_len = distance(pts[i], pts[i + 1]);
    const SegmentFoot f = closest_point_on_segment(pts[i], pts[i + 1], q);
    const double d = distance(f.point, q);
    if (d < best.dist) {
      best = {f.point, d, arc + f.t * seg_len, i};
    }
    arc += seg_len;
  }
  return best;
}

// Intersection of segments a0-a1 and b0-b1; touching endpoints count.
// On hit, `ta`/`tb` receive the parameters along each segment.
inline bool segment_intersection(Point2 a0, Point2 a1, Point2 b0, Point2 b1,
                                 double* ta = nullptr, double* tb = nullptr) {
  const Point2 r = a1 - a0;
  const Point2 s = b1 - b0;
  const double denom = cross(r, s);
  const Point2 qp = b0 - a0;
  if (std::abs(denom) < 1e-15) {
    if (std::abs(cross(qp, r)) > 1e-12) return false;  // parallel, disjoint
    // Collinear: project onto r.
    const double rr = dot(r, r);
    if (rr < 1e-18) return false;
    double t0 = dot(qp, r) / rr;
    double t1 = dot(b1 - a0, r) / rr;
    if (t0 > t1) std::swap(t0, t1);
    if (t1 < 0.0 || t0 > 1.0) return false;
    if (ta) *ta = std::clamp(t0, 0.0, 1.0);
    if (tb) *tb = 0.0;
    return true;
  }
  const double t = cross(qp, s) / denom;
  const double u = cross(qp, r) / denom;
  if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return false;
  if (ta) *ta = t;
  if (tb) *tb = u;
  return true;
}

// Self-intersection test for a polyline; `closed` adds the last->first segment.
inline bool polyline_self_intersects(const Polyline& pts, bool closed) {
  const size_t n = pts.size();
  if (n < 3) return false;
  const size_t m = closed ? n : n - 1;
  auto seg = [&](size_t i) {
    return std::pair<Point2, Point2>{pts[i], pts[(i + 1) % n]};
  };
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = i + 2; j < m; ++j) {
      if (i == 0 && closed && j == m - 1) continue;  // adjacent through the wrap
      auto [a0, a1] = seg(i);
      auto [b0, b1] = seg(j);
      if (segment_intersection(a0, a1, b0, b1)) return true;
    }
  }
  return false;
}

inline double signed_area(const Polyline& pts) {
  double a = 0.0;
  const size_t n = pts.size();
  for (size_t i = 0; i < n; ++i) a += cross(pts[i], pts[(i + 1) % n]);
  return 0.5 * a;
}

}  // namespace raceloop
