#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "raceloop/geometry.hpp"
#include "raceloop/track.hpp"

namespace raceloop {

struct SensorConfig {
  double fov = 270.0 * M_PI / 180.0;
  double angular_increment = 0.25 * M_PI / 180.0;
  double max_range = 30.0;
  double noise_sigma = 0.01;
  Pose2 mount_offset{};  // relative to the rear axle

  int beam_count() const {
    const double ratio = fov / angular_increment;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-6)
      throw InvalidParams("fov must be an integer multiple of angular_increment");
    return static_cast<int>(rounded) + 1;
  }
};

struct LidarScan {
  double angle_min = 0.0;
  double angular_increment = 0.0;
  std::vector<double> ranges;
  double max_range = 0.0;
  double t = 0.0;

  double no_return() const { return max_range + 1.0; }
  bool is_return(double r) const { return r > 0.0 && r <= max_range; }
};

namespace detail {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline double uniform01(uint64_t bits) {
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

// One Gaussian draw, fully determined by (seed, index). Box-Muller on a
// splitmix64 counter stream.
inline double seeded_gaussian(uint64_t seed, uint64_t index) {
  const uint64_t s = splitmix64(seed ^ splitmix64(index + 0x9E3779B97F4A7C15ull));
  const double u1 = uniform01(s);
  const double u2 = uniform01(splitmix64(s));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// t >= 0 along the ray for the nearest hit of ray (o, dir) with segment a-b.
inline bool ray_segment(Point2 o, Point2 dir, Point2 a, Point2 b, double* t_out) {
  const Point2 s = b - a;
  const double denom = cross(dir, s);
  if (std::abs(denom) < 1e-15) return false;  // parallel (grazing hits ignored)
  const Point2 ao = a - o;
  const double t = cross(ao, s) / denom;
  const double u = cross(ao, dir) / denom;
  if (t < 0.0 || u < 0.0 || u > 1.0) return false;
  *t_out = t;
  return true;
}

}  // namespace detail

// Uniform-grid acceleration structure over wall segments for ray queries.
class WallGrid {
 public:
  WallGrid(const Polyline& left, const Polyline& right, double cell = 0.5)
      : cell_(cell) {
    add_loop(left);
    add_loop(right);
    build_index();
  }

  // Distance to the nearest wall along the ray, or +inf within max_range.
  double raycast(Point2 origin, double angle, double max_range) const {
    const Point2 dir{std::cos(angle), std::sin(angle)};
    double best = std::numeric_limits<double>::infinity();

    // DDA cell walk from the origin.
    double cx = (origin.x - min_.x) / cell_;
    double cy = (origin.y - min_.y) / cell_;
    int ix = static_cast<int>(std::floor(cx));
    int iy = static_cast<int>(std::floor(cy));

    const double inv_dx = (std::abs(dir.x) > 1e-15) ? 1.0 / dir.x : 0.0;
    const double inv_dy = (std::abs(dir.y) > 1e-15) ? 1.0 / dir.y : 0.0;
    const int step_x = dir.x > 0 ? 1 : -1;
    const int step_y = dir.y > 0 ? 1 : -1;

    double t_max_x = (inv_dx != 0.0)
        ? ((std::floor(cx) + (dir.x > 0 ? 1.0 : 0.0)) * cell_ + min_.x - origin.x) * inv_dx
        : std::numeric_limits<double>::infinity();
    double t_max_y = (inv_dy != 0.0)
        ? ((std::floor(cy) + (dir.y > 0 ? 1.0 : 0.0)) * cell_ + min_.y - origin.y) * inv_dy
        : std::numeric_limits<double>::infinity();
    const double t_delta_x = (inv_dx != 0.0) ? std::abs(cell_ * inv_dx)
                                             : std::numeric_limits<double>::infinity();
    const double t_delta_y = (inv_dy != 0.0) ? std::abs(cell_ * inv_dy)
                                             : std::numeric_limits<double>::infinity();

    double t_entry = 0.0;
    while (t_entry <= max_range) {
      if (best <= t_entry) break;  // nothing closer can appear further on
      if (ix >= 0 && iy >= 0 && ix < nx_ && iy < ny_) {
        for (const int si : cells_[iy * nx_ + ix]) {
          double t;
          if (detail::ray_segment(origin, dir, segs_[si].a, segs_[si].b, &t) && t < best)
            best = t;
        }
      } else if (outside_box(origin, dir, t_entry)) {
        break;  // left the indexed region for good
      }
      if (t_max_x < t_max_y) {
        t_entry = t_max_x;
        t_max_x += t_delta_x;
        ix += step_x;
      } else {
        t_entry = t_max_y;
        t_max_y += t_delta_y;
        iy += step_y;
      }
    }
    return best;
  }

  size_t segment_count() const { return segs_.size(); }

 private:
  struct Seg {
    Point2 a, b;
  };

  double cell_;
  Point2 min_{0, 0}, max_{0, 0};
  int nx_ = 0, ny_ = 0;
  std::vector<Seg> segs_;
  std::vector<std::vector<int>> cells_;

  void add_loop(const Polyline& loop) {
    const size_t n = loop.size();
    for (size_t i = 0; i < n; ++i) segs_.push_back({loop[i], loop[(i + 1) % n]});
  }

  bool outside_box(Point2 o, Point2 dir, double t) const {
    const Point2 p = o + t * dir;
    const bool out_x = (p.x < min_.x && dir.x <= 0) || (p.x > max_.x && dir.x >= 0);
    const bool out_y = (p.y < min_.y && dir.y <= 0) || (p.y > max_.y && dir.y >= 0);
    return out_x || out_y;
  }

  void build_index() {
    min_ = {std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
    max_ = {-std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity()};
    for (const auto& s : segs_) {
      min_.x = std::min({min_.x, s.a.x, s.b.x});
      min_.y = std::min({min_.y, s.a.y, s.b.y});
      max_.x = std::max({max_.x, s.a.x, s.b.x});
      max_.y = std::max({max_.y, s.a.y, s.b.y});
    }
    min_ = min_ - Point2{cell_, cell_};
    max_ = max_ + Point2{cell_, cell_};
    nx_ = std::max(1, static_cast<int>(std::ceil((max_.x - min_.x) / cell_)));
    ny_ = std::max(1, static_cast<int>(std::ceil((max_.y - min_.y) / cell_)));
    cells_.assign(static_cast<size_t>(nx_) * ny_, {});
    for (size_t si = 0; si < segs_.size(); ++si) {
      // conservative rasterization: every cell the segment bbox touches
      const auto& s = segs_[si];
      const int x0 = cell_index(std::min(s.a.x, s.b.x), min_.x);
      const int x1 = cell_index(std::max(s.a.x, s.b.x), min_.x);
      const int y0 = cell_index(std::min(s.a.y, s.b.y), min_.y);
      const int y1 = cell_index(std::max(s.a.y, s.b.y), min_.y);
      for (int y = std::max(0, y0); y <= std::min(ny_ - 1, y1); ++y)
        for (int x = std::max(0, x0); x <= std::min(nx_ - 1, x1); ++x)
          if (segment_near_cell(s, x, y)) cells_[y * nx_ + x].push_back(static_cast<int>(si));
    }
  }

  int cell_index(double v, double lo) const {
    return static_cast<int>(std::floor((v - lo) / cell_));
  }

  bool segment_near_cell(const Seg& s, int x, int y) const {
    const Point2 c{min_.x + (x + 0.5) * cell_, min_.y + (y + 0.5) * cell_};
    const auto foot = closest_point_on_segment(s.a, s.b, c);
    const double half = 0.5 * cell_;
    return std::abs(foot.point.x - c.x) <= half + 1e-9 &&
           std::abs(foot.point.y - c.y) <= half + 1e-9;
  }
};

// Ray-cast scan against the walls. Noise is Gaussian per beam, seeded by
// (rng_seed, beam index), clamped to keep ranges in (0, max_range].
inline LidarScan cast_lidar(const WallGrid& grid, const Pose2& sensor_pose,
                            const SensorConfig& cfg, uint64_t rng_seed) {
  const int beams = cfg.beam_count();
  LidarScan scan;
  scan.angle_min = -0.5 * cfg.fov;
  scan.angular_increment = cfg.angular_increment;
  scan.max_range = cfg.max_range;
  scan.ranges.resize(beams);
  for (int i = 0; i < beams; ++i) {
    const double beam_angle = scan.angle_min + i * cfg.angular_increment;
    const double world_angle = sensor_pose.psi + beam_angle;
    double r = grid.raycast(sensor_pose.position, world_angle, cfg.max_range);
    if (!(r <= cfg.max_range)) {
      scan.ranges[i] = scan.no_return();
      continue;
    }
    if (cfg.noise_sigma > 0.0) {
      // truncated at 3 sigma so a return never strays further from the
      // true distance than the stated sensor error bound
      const double g = detail::seeded_gaussian(rng_seed, static_cast<uint64_t>(i));
      r += cfg.noise_sigma * std::clamp(g, -3.0, 3.0);
      r = std::clamp(r, 1e-6, cfg.max_range);
    }
    scan.ranges[i] = r;
  }
  return scan;
}

// Convenience overload matching the module-level signature.
inline LidarScan cast_lidar(const Polyline& left, const Polyline& right,
                            const Pose2& sensor_pose, const SensorConfig& cfg,
                            uint64_t rng_seed) {
  return cast_lidar(WallGrid(left, right), sensor_pose, cfg, rng_seed);
}

}  // namespace raceloop
