#pragma once

// Shared synthetic scenes for the test suites.

#include <cmath>

#include "raceloop/lidar.hpp"

namespace raceloop::testfix {

// Corridor description in the vehicle frame: the track axis runs at `heading`
// through the midline; the vehicle sits `lateral_offset` left of the midline.
struct CorridorSpec {
  double width = 2.0;
  double heading = 0.0;         // corridor axis direction in the vehicle frame
  double lateral_offset = 0.0;  // vehicle offset left of the midline
  double length = 60.0;         // wall strip half-length
};

inline Walls corridor_walls(const CorridorSpec& c) {
  const Point2 axis{std::cos(c.heading), std::sin(c.heading)};
  const Point2 lat = perp(axis);
  auto wall = [&](double offset) {
    Polyline w;
    for (double t = -c.length; t <= c.length + 1e-9; t += 2.0)
      w.push_back(t * axis + offset * lat);
    return w;
  };
  return {wall(0.5 * c.width - c.lateral_offset),
          wall(-0.5 * c.width - c.lateral_offset)};
}

// Open strips are not closed loops; cast against them segment-wise.
inline LidarScan open_wall_scan(const std::vector<Polyline>& strips,
                                const SensorConfig& cfg, uint64_t seed = 0) {
  const int beams = cfg.beam_count();
  LidarScan scan;
  scan.angle_min = -0.5 * cfg.fov;
  scan.angular_increment = cfg.angular_increment;
  scan.max_range = cfg.max_range;
  scan.ranges.resize(beams);
  for (int i = 0; i < beams; ++i) {
    const double a = scan.angle_min + i * cfg.angular_increment;
    const Point2 dir{std::cos(a), std::sin(a)};
    double best = std::numeric_limits<double>::infinity();
    for (const auto& strip : strips) {
      for (size_t k = 0; k + 1 < strip.size(); ++k) {
        double t;
        if (raceloop::detail::ray_segment({0, 0}, dir, strip[k], strip[k + 1], &t))
          best = std::min(best, t);
      }
    }
    if (!(best <= cfg.max_range)) {
      scan.ranges[i] = scan.no_return();
      continue;
    }
    if (cfg.noise_sigma > 0.0) {
      const double g = raceloop::detail::seeded_gaussian(seed, static_cast<uint64_t>(i));
      best += cfg.noise_sigma * std::clamp(g, -3.0, 3.0);
      best = std::clamp(best, 1e-6, cfg.max_range);
    }
    scan.ranges[i] = best;
  }
  return scan;
}

inline LidarScan corridor_scan(const CorridorSpec& c, const SensorConfig& cfg,
                               uint64_t seed = 0) {
  const auto walls = corridor_walls(c);
  return open_wall_scan({walls.left, walls.right}, cfg, seed);
}

inline SensorConfig short_range_sensor(double max_range = 5.0) {
  SensorConfig cfg;
  cfg.max_range = max_range;
  cfg.noise_sigma = 0.0;
  return cfg;
}

}  // namespace raceloop::testfix
