#pragma once

#include <optional>

#include "raceloop/geometry.hpp"
#include "raceloop/track.hpp"
#include "raceloop/vehicle.hpp"

namespace raceloop {

namespace detail {

// Closed-contact test of a segment against an axis-aligned box centered at
// the origin (half extents hx, hy), in box coordinates.
inline bool segment_hits_box(Point2 a, Point2 b, double hx, double hy) {
  // Liang-Barsky clip of the parametric segment against the slab bounds.
  const double dx = b.x - a.x, dy = b.y - a.y;
  double t0 = 0.0, t1 = 1.0;
  auto clip = [&](double p, double q) {
    if (std::abs(p) < 1e-15) return q >= 0.0;
    const double r = q / p;
    if (p < 0.0) {
      if (r > t1) return false;
      if (r > t0) t0 = r;
    } else {
      if (r < t0) return false;
      if (r < t1) t1 = r;
    }
    return true;
  };
  return clip(-dx, a.x + hx) && clip(dx, hx - a.x) &&
         clip(-dy, a.y + hy) && clip(dy, hy - a.y);
}

inline bool loop_hits_footprint(const Polyline& loop, const Pose2& center,
                                double hx, double hy) {
  const size_t n = loop.size();
  for (size_t i = 0; i < n; ++i) {
    const Point2 a = to_local(center, loop[i]);
    const Point2 b = to_local(center, loop[(i + 1) % n]);
    if (segment_hits_box(a, b, hx, hy)) return true;
  }
  return false;
}

}  // namespace detail

// True iff the rectangular vehicle footprint touches either wall. The
// footprint is centered between the axles; touching contact counts.
inline bool check_collision(const Polyline& left, const Polyline& right,
                            const VehicleState& state, const VehicleParams& params) {
  const Pose2 center{to_world(state.pose, {0.5 * params.wheelbase, 0.0}),
                     state.pose.psi};
  // tiny inflation so exact touching contact is robust to rounding
  const double hx = 0.5 * params.length_footprint + 1e-9;
  const double hy = params.track_halfwidth_footprint + 1e-9;
  return detail::loop_hits_footprint(left, center, hx, hy) ||
         detail::loop_hits_footprint(right, center, hx, hy);
}

struct LapCrossing {
  double fraction = 0.0;  // position of the crossing within the step, [0, 1]
};

// Start-line crossing between two consecutive poses; only forward crossings
// (motion along increasing arc length) count.
inline std::optional<LapCrossing> detect_lap(const StartLine& line,
                                             const Pose2& prev, const Pose2& curr) {
  double t = 0.0, u = 0.0;
  if (!segment_intersection(prev.position, curr.position, line.a, line.b, &t, &u))
    return std::nullopt;
  if (dot(curr.position - prev.position, line.forward) <= 0.0) return std::nullopt;
  if (t <= 1e-12) return std::nullopt;  // started on the line (spawn step)
  return LapCrossing{t};
}

inline std::optional<LapCrossing> detect_lap(const Track& track, const Pose2& prev,
                                             const Pose2& curr) {
  return detect_lap(start_line(track), prev, curr);
}

}  // namespace raceloop
