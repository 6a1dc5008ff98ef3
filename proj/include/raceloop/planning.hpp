#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <vector>

#include "raceloop/geometry.hpp"
#include "raceloop/perception.hpp"
#include "raceloop/spline.hpp"

namespace raceloop {

struct SmoothingParams {
  int laplacian_iterations = 3;
  double laplacian_lambda = 0.5;     // (0, 1)
  double opheim_min_tol = 0.03;      // m, perpendicular ray tolerance
  double opheim_max_tol = 1.0;       // m, anchor reach
  int width_window = 9;              // odd, moving-average span
  double pair_angle_range = 15.0 * M_PI / 180.0;  // cone around the normal
  double resolution = 0.10;          // m, resampling step along the wall
  int centerline_budget = 50;        // approximate point count after decimation
};

// Point-by-point track width estimate along the representative wall, with a
// scalar memory that survives one-sided frames.
struct WidthProfile {
  struct Sample {
    double s = 0.0;      // arc position along the representative side
    double width = 0.0;
    bool valid = false;
  };
  std::vector<Sample> samples;
  std::vector<double> smoothed;  // same length as samples
  double last_valid = 0.0;       // m; 0 means "never estimated"
};

struct Centerline {
  Polyline points;  // vehicle frame
  enum class Side { left, right, both } source_side = Side::both;
};

namespace detail {

// The side the centerline is reconstructed from: the only one present, or
// the one with greater visible arc length (ties: more points, then left).
// A side whose closest point is far from the vehicle cannot anchor the
// local plan, however long it is; sides with nearby support win first.
inline bool representative_is_left(const WallPair& walls) {
  if (!walls.both()) return walls.left.has_value();
  const double near_gate = 2.0;
  double l_near = std::numeric_limits<double>::infinity();
  double r_near = l_near;
  for (const auto& p : walls.left->points) l_near = std::min(l_near, norm(p));
  for (const auto& p : walls.right->points) r_near = std::min(r_near, norm(p));
  if ((l_near <= near_gate) != (r_near <= near_gate)) return l_near <= near_gate;
  if (walls.left->arc_length != walls.right->arc_length)
    return walls.left->arc_length > walls.right->arc_length;
  if (walls.left->points.size() != walls.right->points.size())
    return walls.left->points.size() > walls.right->points.size();
  return true;
}

inline Point2 inward_normal(const Polyline& wall, size_t i, Point2 toward) {
  const size_t j = std::min(i + 1, wall.size() - 1);
  const size_t k = (i == j) ? i - 1 : i;
  const Point2 dir = normalized(wall[j] - wall[k]);
  Point2 n = perp(dir);
  if (dot(n, toward - wall[i]) < 0.0) n = -1.0 * n;
  return n;
}

inline double median_of(std::deque<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

// Pairs resampled points on the longer wall with the opposite wall inside a
// narrow cone around the inward normal; reliable pair distances feed a
// moving-window average. One-sided frames carry the previous memory forward.
inline WidthProfile estimate_track_width(const WallPair& walls, const WidthProfile& prev,
                                         const SmoothingParams& params) {
  WidthProfile profile;
  profile.last_valid = prev.last_valid;
  if (!walls.both()) return profile;

  const bool left_rep = detail::representative_is_left(walls);
  const Polyline& rep = left_rep ? walls.left->points : walls.right->points;
  const Polyline& other = left_rep ? walls.right->points : walls.left->points;
  const Polyline sampled = decimate_by_distance(rep, params.resolution);

  // running median over recent in-band widths gates outliers while still
  // letting a genuine width change migrate through
  std::deque<double> history;
  const size_t history_cap = static_cast<size_t>(std::max(3, params.width_window));
  if (prev.last_valid > 0.0) history.push_back(prev.last_valid);

  double arc = 0.0;
  for (size_t i = 0; i < sampled.size(); ++i) {
    if (i > 0) arc += distance(sampled[i - 1], sampled[i]);
    WidthProfile::Sample sample;
    sample.s = arc;

    const Point2 n = detail::inward_normal(sampled, i, {0.0, 0.0});
    const auto foot = closest_point_on_polyline(other, sampled[i]);
    const Point2 to_pair = foot.point - sampled[i];
    const double w = norm(to_pair);
    const bool in_cone =
        w > 1e-9 &&
        std::abs(normalize_angle(std::atan2(to_pair.y, to_pair.x) -
                                 std::atan2(n.y, n.x))) <= params.pair_angle_range;
    if (in_cone) {
      const bool in_band = w >= 0.3 && w <= 5.0;
      bool consistent = true;
      if (in_band && history.size() >= 3) {
        const double med = detail::median_of(history);
        consistent = std::abs(w - med) <= 0.5 * med;
      }
      sample.width = w;
      sample.valid = in_band && consistent;
      if (in_band) {
        history.push_back(w);
        if (history.size() > history_cap) history.pop_front();
      }
    }
    profile.samples.push_back(sample);
  }

  // centered moving average over valid samples only
  const int half = std::max(0, (params.width_window - 1) / 2);
  profile.smoothed.resize(profile.samples.size(), 0.0);
  double carry = prev.last_valid;
  bool any_valid = false;
  for (size_t i = 0; i < profile.samples.size(); ++i) {
    double acc = 0.0;
    int count = 0;
    for (int k = -half; k <= half; ++k) {
      const long j = static_cast<long>(i) + k;
      if (j < 0 || j >= static_cast<long>(profile.samples.size())) continue;
      if (!profile.samples[j].valid) continue;
      acc += profile.samples[j].width;
      ++count;
    }
    if (count > 0) {
      carry = acc / count;
      any_valid = true;
    }
    profile.smoothed[i] = carry;
  }
  if (any_valid) profile.last_valid = profile.smoothed.back();
  return profile;
}

// Offsets the representative wall inward by half the local width estimate.
inline Centerline generate_centerline(const WallPair& walls, const WidthProfile& width,
                                      const SmoothingParams& params) {
  if (!walls.any()) throw NoWalls("centerline needs at least one wall");
  if (!(width.last_valid > 0.0))
    throw InvalidWidth("no track width estimate available");

  const bool left_rep = detail::representative_is_left(walls);
  const Polyline& rep = left_rep ? walls.left->points : walls.right->points;
  const Polyline sampled = decimate_by_distance(rep, params.resolution);

  Centerline out;
  out.source_side = !walls.both()
                        ? (left_rep ? Centerline::Side::left : Centerline::Side::right)
                        : Centerline::Side::both;

  Polyline pts;
  for (size_t i = 0; i < sampled.size(); ++i) {
    double w = width.last_valid;
    if (i < width.smoothed.size() && width.smoothed[i] > 0.0) w = width.smoothed[i];
    const Point2 n = detail::inward_normal(sampled, i, {0.0, 0.0});
    const Point2 c = sampled[i] + 0.5 * w * n;
    if (pts.empty() || distance(pts.back(), c) > 1e-6) pts.push_back(c);
  }

  // decimate to roughly the configured point budget, keeping the endpoints
  const int budget = std::max(3, params.centerline_budget);
  if (static_cast<int>(pts.size()) > budget) {
    Polyline slim;
    const size_t n = pts.size();
    for (int k = 0; k < budget; ++k)
      slim.push_back(pts[(k * (n - 1)) / (budget - 1)]);
    pts = std::move(slim);
  }
  out.points = std::move(pts);
  return out;
}

// One Jacobi pass per iteration; endpoints stay fixed.
inline Polyline laplacian_smooth(const Polyline& path, const SmoothingParams& params) {
  if (path.size() < 3) throw TooFewPoints("laplacian smoothing needs >= 3 points");
  Polyline cur = path;
  for (int it = 0; it < params.laplacian_iterations; ++it) {
    Polyline next = cur;
    for (size_t i = 1; i + 1 < cur.size(); ++i) {
      const Point2 mid = 0.5 * (cur[i - 1] + cur[i + 1]);
      next[i] = cur[i] + params.laplacian_lambda * (mid - cur[i]);
    }
    cur = std::move(next);
  }
  return cur;
}

// Opheim simplification: from each key, points stay skipped while they lie
// within min_tol of the ray through the first point leaving the key's
// min_tol disc, and within max_tol of the key itself. The last point inside
// the constraints becomes the next key. Output is a subsequence of the input.
inline Polyline opheim_simplify(const Polyline& path, const SmoothingParams& params) {
  if (path.size() <= 2) return path;
  const double min_tol = params.opheim_min_tol;
  const double max_tol = params.opheim_max_tol;

  Polyline out{path.front()};
  size_t key = 0;
  const size_t last = path.size() - 1;
  while (key < last) {
    // first point outside the min_tol disc defines the ray
    size_t ray_pt = key + 1;
    while (ray_pt <= last && distance(path[key], path[ray_pt]) <= min_tol) ++ray_pt;
    if (ray_pt > last) break;  // the tail collapses into the key

    const Point2 dir = normalized(path[ray_pt] - path[key]);
    size_t next_key = ray_pt;
    for (size_t j = ray_pt; j <= last; ++j) {
      const Point2 rel = path[j] - path[key];
      if (std::abs(cross(dir, rel)) > min_tol) break;   // off the ray
      if (dot(rel, dir) < 0.0) break;                   // behind the key
      if (norm(rel) > max_tol) break;                   // too far from the key
      next_key = j;
    }
    key = next_key;
    if (key != last) out.push_back(path[key]);
  }
  // keep the exact final point; a key within half the ray tolerance of it
  // is replaced rather than left as a near-duplicate knot
  if (out.size() >= 2 && distance(out.back(), path.back()) <= 0.5 * min_tol) {
    out.back() = path.back();
  } else if (distance(out.back(), path.back()) > 0.0 || out.size() == 1) {
    out.push_back(path.back());
  }
  return out;
}

struct PlanResult {
  PathSpline spline;
  WidthProfile width;
  // intermediate stages, kept for debugging dumps and tests
  Polyline scan_points;
  std::vector<WallSegment> segments;
  WallPair walls;
  Centerline centerline;
  Polyline smoothed;
  Polyline simplified;
};

struct PlannerParams {
  SegmentationParams segmentation;
  SmoothingParams smoothing;
};

// Full local planning chain: scan -> walls -> width -> centerline -> smooth
// -> simplify -> spline. Throws EmptyScan/NoWalls/TooFewPoints upward; the
// controller treats any of them as "hold the previous plan".
inline PlanResult plan_pipeline(const LidarScan& scan, const WidthProfile& prev,
                                const PlannerParams& params) {
  PlanResult result;
  result.scan_points = scan_to_points(scan);
  result.segments = filter_segments(
      split_straddling_segments(segment_scan(result.scan_points, params.segmentation)),
      params.segmentation);
  result.walls = select_walls(result.segments);
  result.width = estimate_track_width(result.walls, prev, params.smoothing);
  result.centerline = generate_centerline(result.walls, result.width, params.smoothing);
  if (result.centerline.points.size() < 3)
    throw TooFewPoints("centerline too short to plan on");
  result.smoothed = laplacian_smooth(result.centerline.points, params.smoothing);
  result.simplified = opheim_simplify(result.smoothed, params.smoothing);

  // the spline starts at the point nearest the vehicle
  size_t start = 0;
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < result.simplified.size(); ++i) {
    const double d = norm(result.simplified[i]);
    if (d < best) {
      best = d;
      start = i;
    }
  }
  Polyline plan(result.simplified.begin() + start, result.simplified.end());
  result.spline = PathSpline::fit(plan);
  return result;
}

}  // namespace raceloop
