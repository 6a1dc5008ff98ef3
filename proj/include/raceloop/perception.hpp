#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "raceloop/geometry.hpp"
#include "raceloop/lidar.hpp"

namespace raceloop {

struct SegmentationParams {
  double base_break_threshold = 0.10;  // m
  double adaptive_gain = 2.0;          // scales the local spacing mean
  int weight_window = 7;               // odd; points in the weighted mean
  int min_segment_points = 5;
  double min_segment_length = 0.30;    // m
  double max_segment_distance = 10.0;  // m, mean distance gate
  double max_segment_angle = 80.0 * M_PI / 180.0;  // chord vs heading
};

// A contiguous run of scan points believed to belong to one wall.
struct WallSegment {
  Polyline points;            // vehicle frame, x forward / y left
  double chord_angle = 0.0;   // acute angle between chord and heading, [0, pi/2]
  double mean_distance = 0.0; // mean range of the points
  double arc_length = 0.0;
};

struct WallPair {
  std::optional<WallSegment> left;
  std::optional<WallSegment> right;

  bool any() const { return left.has_value() || right.has_value(); }
  bool both() const { return left.has_value() && right.has_value(); }
};

inline WallSegment make_wall_segment(Polyline points) {
  WallSegment seg;
  seg.points = std::move(points);
  if (seg.points.empty()) return seg;
  double dist_acc = 0.0;
  for (const auto& p : seg.points) dist_acc += norm(p);
  seg.mean_distance = dist_acc / seg.points.size();
  seg.arc_length = polyline_length(seg.points);
  const Point2 chord = seg.points.back() - seg.points.front();
  if (norm(chord) > 1e-12) {
    double a = std::abs(std::atan2(chord.y, chord.x));
    if (a > M_PI / 2) a = M_PI - a;  // direction-agnostic
    seg.chord_angle = a;
  }
  return seg;
}

// Polar scan to Cartesian points in the vehicle frame. Sentinels and points
// behind the vehicle are dropped.
inline Polyline scan_to_points(const LidarScan& scan) {
  Polyline pts;
  pts.reserve(scan.ranges.size());
  for (size_t i = 0; i < scan.ranges.size(); ++i) {
    const double r = scan.ranges[i];
    if (!scan.is_return(r)) continue;
    const double a = scan.angle_min + i * scan.angular_increment;
    const Point2 p{r * std::cos(a), r * std::sin(a)};
    if (p.x < 0.0) continue;
    pts.push_back(p);
  }
  if (pts.empty()) throw EmptyScan("no usable returns in scan");
  return pts;
}

// Splits the point sequence where consecutive points jump further than an
// adaptive threshold: base + gain * (triangular-weighted local spacing mean).
inline std::vector<WallSegment> segment_scan(const Polyline& points,
                                             const SegmentationParams& params) {
  std::vector<WallSegment> out;
  if (points.empty()) return out;
  if (points.size() == 1) {
    out.push_back(make_wall_segment(points));
    return out;
  }

  const size_t n_gaps = points.size() - 1;
  std::vector<double> gap(n_gaps);
  for (size_t i = 0; i < n_gaps; ++i) gap[i] = distance(points[i], points[i + 1]);

  const int half = std::max(0, (params.weight_window - 1) / 2);
  auto weighted_mean = [&](size_t i) {
    double acc = 0.0, wsum = 0.0;
    for (int k = -half; k <= half; ++k) {
      const long j = static_cast<long>(i) + k;
      if (j < 0 || j >= static_cast<long>(n_gaps)) continue;
      const double w = half + 1 - std::abs(k);
      acc += w * gap[j];
      wsum += w;
    }
    return acc / wsum;
  };

  Polyline run{points.front()};
  for (size_t i = 0; i < n_gaps; ++i) {
    const double threshold =
        params.base_break_threshold + params.adaptive_gain * weighted_mean(i);
    if (gap[i] > threshold) {
      out.push_back(make_wall_segment(std::move(run)));
      run = Polyline{};
    }
    run.push_back(points[i + 1]);
  }
  out.push_back(make_wall_segment(std::move(run)));
  return out;
}

// Eliminates implausible wall candidates by size, distance and orientation.
inline std::vector<WallSegment> filter_segments(const std::vector<WallSegment>& segments,
                                                const SegmentationParams& params) {
  std::vector<WallSegment> kept;
  for (const auto& seg : segments) {
    if (static_cast<int>(seg.points.size()) < params.min_segment_points) continue;
    if (seg.arc_length < params.min_segment_length) continue;
    if (seg.mean_distance > params.max_segment_distance) continue;
    if (std::abs(seg.chord_angle) > params.max_segment_angle) continue;
    kept.push_back(seg);
  }
  return kept;
}

namespace detail {

// Splits a segment wherever its points cross y = 0 so each piece lies on one
// side; the interpolated crossing point joins both pieces.
// Only physical returns survive the split; a synthetic interpolated crossing
// point would sit mid-air between the walls and corrupt the reconstruction.
inline std::vector<Polyline> split_at_centerline(const Polyline& pts) {
  std::vector<Polyline> pieces;
  auto sign = [](double y) { return (y > 0.0) - (y < 0.0); };
  Polyline cur{pts.front()};
  int cur_sign = sign(pts.front().y);
  for (size_t i = 1; i < pts.size(); ++i) {
    const int sb = sign(pts[i].y);
    if (sb != 0 && cur_sign != 0 && sb != cur_sign) {
      pieces.push_back(std::move(cur));
      cur = Polyline{};
    }
    if (sb != 0) cur_sign = sb;
    cur.push_back(pts[i]);
  }
  pieces.push_back(std::move(cur));
  return pieces;
}

inline double nearest_point_y(const Polyline& pts) {
  double best_d = std::numeric_limits<double>::infinity();
  double y = 0.0;
  for (const auto& p : pts) {
    const double d = norm(p);
    if (d < best_d) {
      best_d = d;
      y = p.y;
    }
  }
  return y;
}

// Walls are consumed downstream in driving order: chord pointing forward.
inline Polyline oriented_forward(Polyline pts) {
  if (pts.size() >= 2 && (pts.back() - pts.front()).x < 0.0)
    std::reverse(pts.begin(), pts.end());
  return pts;
}

}  // namespace detail

// Splits every segment that straddles the vehicle axis into one-sided
// pieces. A scan that merges both walls at the visibility limit arrives as a
// single U-shaped segment; splitting before the elimination gates keeps both
// halves alive.
inline std::vector<WallSegment> split_straddling_segments(
    const std::vector<WallSegment>& segments) {
  std::vector<WallSegment> out;
  for (const auto& seg : segments) {
    if (seg.points.size() < 2) {
      out.push_back(seg);
      continue;
    }
    for (auto& piece : detail::split_at_centerline(seg.points)) {
      if (piece.size() < 2) continue;
      out.push_back(make_wall_segment(detail::oriented_forward(std::move(piece))));
    }
  }
  return out;
}

// Picks the best left/right wall candidate by side of the nearest point;
// segments straddling the vehicle axis are split at the crossing first.
inline WallPair select_walls(const std::vector<WallSegment>& segments) {
  WallPair pair;
  auto consider = [&](const WallSegment& seg) {
    double y = detail::nearest_point_y(seg.points);
    if (std::abs(y) < 1e-12) {
      // nearest point sits on the axis (e.g. the split crossing itself);
      // side of the bulk decides
      for (const auto& p : seg.points)
        if (std::abs(p.y) > std::abs(y)) y = p.y;
    }
    auto better = [&](const std::optional<WallSegment>& cur) {
      if (!cur) return true;
      if (seg.arc_length != cur->arc_length) return seg.arc_length > cur->arc_length;
      return seg.mean_distance < cur->mean_distance;
    };
    if (y >= 0.0 && better(pair.left)) pair.left = seg;
    if (y <= 0.0 && better(pair.right)) pair.right = seg;
  };

  for (const auto& seg : segments) {
    if (seg.points.size() < 2) {
      consider(seg);
      continue;
    }
    for (auto& piece : detail::split_at_centerline(seg.points)) {
      if (piece.size() < 2) continue;
      consider(make_wall_segment(detail::oriented_forward(std::move(piece))));
    }
  }
  if (!pair.any()) throw NoWalls("no wall candidates on either side");
  return pair;
}

}  // namespace raceloop
