#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "raceloop/lidar.hpp"
#include "raceloop/track.hpp"

namespace raceloop {

enum class TrackKind { corridor, slalom, paper_like, random_loop };

inline TrackKind track_kind_from_string(const std::string& s) {
  if (s == "corridor") return TrackKind::corridor;
  if (s == "slalom") return TrackKind::slalom;
  if (s == "paper_like") return TrackKind::paper_like;
  if (s == "random") return TrackKind::random_loop;
  throw InvalidParams("unknown track kind: " + s);
}

struct TrackGenParams {
  double width = 2.0;          // corridor/slalom/random track width
  double straight_length = 10.0;
  double cap_radius = 3.0;     // stadium cap radius
  double vehicle_width = 0.30; // paper_like track width = 7 x this
  double resolution = 0.25;    // centerline vertex spacing
  double random_radius = 6.0;  // base radius of random loops
};

namespace detail {

inline void append_arc(Polyline& pts, Point2 center, double radius, double a0,
                       double a1, double spacing) {
  const int steps = std::max(2, static_cast<int>(std::ceil(std::abs(a1 - a0) * radius / spacing)));
  for (int i = 1; i <= steps; ++i) {
    const double a = a0 + (a1 - a0) * i / steps;
    pts.push_back(center + radius * Point2{std::cos(a), std::sin(a)});
  }
}

// Closed stadium loop: two straights of length L along x, caps of radius R.
// Runs counter-clockwise starting at (0, 0) heading +x.
inline Polyline stadium(double L, double R, double spacing) {
  Polyline pts;
  const int n_straight = std::max(2, static_cast<int>(std::ceil(L / spacing)));
  for (int i = 0; i < n_straight; ++i) pts.push_back({L * i / n_straight, 0.0});
  pts.push_back({L, 0.0});
  append_arc(pts, {L, R}, R, -M_PI / 2, M_PI / 2, spacing);
  for (int i = 1; i <= n_straight; ++i) pts.push_back({L - L * i / n_straight, 2.0 * R});
  append_arc(pts, {0.0, R}, R, M_PI / 2, 3.0 * M_PI / 2, spacing);
  if (distance(pts.back(), pts.front()) < 0.5 * spacing) pts.pop_back();
  return pts;
}

// Segment-wise loop construction.
struct Turtle {
  Polyline pts{{0.0, 0.0}};
  Point2 pos{0.0, 0.0};
  double heading = 0.0;

  void straight(double len, double spacing) {
    const int n = std::max(1, static_cast<int>(std::ceil(len / spacing)));
    const Point2 dir{std::cos(heading), std::sin(heading)};
    for (int i = 1; i <= n; ++i) pts.push_back(pos + (len * i / n) * dir);
    pos = pts.back();
  }

  // positive angle turns left
  void arc(double radius, double angle, double spacing) {
    const int n = std::max(2, static_cast<int>(std::ceil(std::abs(angle) * radius / spacing)));
    const double side = angle >= 0 ? 1.0 : -1.0;
    const Point2 center = pos + radius * Point2{-side * std::sin(heading),
                                                side * std::cos(heading)};
    const double a0 = std::atan2(pos.y - center.y, pos.x - center.x);
    for (int i = 1; i <= n; ++i) {
      const double a = a0 + side * std::abs(angle) * i / n;
      pts.push_back(center + radius * Point2{std::cos(a), std::sin(a)});
    }
    pos = pts.back();
    heading = normalize_angle(heading + angle);
  }
};

// Start/finish belongs on a straight: middle vertex of the longest
// low-curvature run around the loop.
inline int calmest_vertex(const Polyline& loop) {
  const size_t n = loop.size();
  std::vector<bool> calm(n);
  for (size_t i = 0; i < n; ++i) {
    const Point2 a = loop[(i + n - 1) % n], b = loop[i], c = loop[(i + 1) % n];
    const double area2 = std::abs(cross(b - a, c - a));
    const double r = (distance(a, b) * distance(b, c) * distance(a, c)) /
                     std::max(1e-12, 2.0 * area2);
    calm[i] = r > 12.0;
  }
  size_t best_start = 0, best_len = 0;
  for (size_t i = 0; i < n; ++i) {
    if (!calm[i]) continue;
    size_t len = 0;
    while (len < n && calm[(i + len) % n]) ++len;
    if (len > best_len) {
      best_len = len;
      best_start = i;
    }
  }
  return static_cast<int>((best_start + best_len / 2) % n);
}

// Catmull-Rom resampling through closed waypoints.
inline Polyline closed_catmull_rom(const Polyline& wp, double spacing) {
  const size_t n = wp.size();
  Polyline dense;
  for (size_t i = 0; i < n; ++i) {
    const Point2 p0 = wp[(i + n - 1) % n], p1 = wp[i];
    const Point2 p2 = wp[(i + 1) % n], p3 = wp[(i + 2) % n];
    const int steps = std::max(2, static_cast<int>(std::ceil(distance(p1, p2) / (0.25 * spacing))));
    for (int k = 0; k < steps; ++k) {
      const double t = static_cast<double>(k) / steps;
      const double t2 = t * t, t3 = t2 * t;
      const Point2 q =
          0.5 * ((2.0 * t3 - 3.0 * t2 + 1.0) * 2.0 * p1 +
                 (t3 - 2.0 * t2 + t) * (p2 - p0) +
                 (-2.0 * t3 + 3.0 * t2) * 2.0 * p2 +
                 (t3 - t2) * (p3 - p1));
      dense.push_back(q);
    }
  }
  dense.push_back(dense.front());
  Polyline out = resample_polyline(dense, spacing);
  if (!out.empty() && distance(out.back(), out.front()) < 0.5 * spacing) out.pop_back();
  return out;
}

}  // namespace detail

// Deterministic track synthesis for experiments and tests.
inline Track generate_track(TrackKind kind, uint64_t seed, const TrackGenParams& params) {
  Track track;
  switch (kind) {
    case TrackKind::corridor: {
      if (params.width <= 0 || params.straight_length <= 0 || params.cap_radius <= params.width * 0.55)
        throw InvalidParams("corridor needs positive sizes and cap_radius > width/2");
      track.name = "corridor";
      track.centerline =
          detail::stadium(params.straight_length, params.cap_radius, params.resolution);
      track.width.assign(track.centerline.size(), params.width);
      track.start_index = static_cast<int>(track.centerline.size() / 16);
      break;
    }
    case TrackKind::slalom: {
      if (params.width <= 0 || params.straight_length <= 0)
        throw InvalidParams("slalom needs positive sizes");
      track.name = "slalom";
      const double L = params.straight_length;
      const double R = params.cap_radius;
      Polyline base = detail::stadium(L, R, params.resolution);
      // alternating bends: lateral sine offset on the straights, tapered to
      // zero toward the caps so the loop stays smooth
      const double amplitude = 0.9 * params.width;
      const double wavelength = std::max(3.0 * params.width, L / 3.0);
      for (auto& p : base) {
        double along = -1.0, into = 0.0;
        if (p.y < 1e-9 && p.x >= 0.0 && p.x <= L) {
          along = p.x;
          into = 1.0;
        } else if (std::abs(p.y - 2.0 * R) < 1e-9 && p.x >= 0.0 && p.x <= L) {
          along = L - p.x;
          into = -1.0;
        }
        if (along >= 0.0) {
          const double window = std::pow(std::sin(M_PI * along / L), 2.0);
          p.y += into * amplitude * window * std::sin(2.0 * M_PI * along / wavelength);
        }
      }
      track.centerline = base;
      track.width.assign(base.size(), params.width);
      track.start_index = static_cast<int>(base.size() / 16);
      break;
    }
    case TrackKind::paper_like: {
      // ~53 m circuit: chicane on the lower straight, two 180-degree ends of
      // different radii, one long back straight. Eight bends, tightest
      // radius 1.8 m; width is seven vehicle widths everywhere.
      track.name = "paper_like";
      const double res = params.resolution;
      const double r_chicane = 1.8, theta = 50.0 * M_PI / 180.0;
      const double r_right = 2.0, r_left = 2.6;
      const double leg = 7.0, gap = 1.5;

      detail::Turtle t;
      t.straight(leg, res);
      t.arc(r_chicane, -theta, res);
      t.arc(r_chicane, theta, res);
      t.straight(gap, res);
      t.arc(r_chicane, theta, res);
      t.arc(r_chicane, -theta, res);
      t.straight(leg, res);
      t.arc(r_right, M_PI / 2, res);
      t.straight(2.0 * r_left + 0.8 - 2.0 * r_right, res);
      t.arc(r_right, M_PI / 2, res);
      t.straight(2.0 * leg + gap + 4.0 * r_chicane * std::sin(theta), res);
      t.arc(r_left, M_PI / 2, res);
      t.straight(0.8, res);
      t.arc(r_left, M_PI / 2, res);

      track.centerline = t.pts;
      if (distance(track.centerline.back(), track.centerline.front()) < 0.5 * res)
        track.centerline.pop_back();
      track.width.assign(track.centerline.size(), 7.0 * params.vehicle_width);
      track.start_index = detail::calmest_vertex(track.centerline);
      break;
    }
    case TrackKind::random_loop: {
      if (params.width <= 0 || params.random_radius <= params.width)
        throw InvalidParams("random loop needs radius well above width");
      track.name = "random-" + std::to_string(seed);
      uint64_t state = seed;
      for (int attempt = 0; attempt < 32; ++attempt) {
        double amp[4], phase[4];
        for (int k = 0; k < 4; ++k) {
          state = detail::splitmix64(state);
          amp[k] = 0.14 / (k + 2) * detail::uniform01(state);
          state = detail::splitmix64(state);
          phase[k] = 2.0 * M_PI * detail::uniform01(state);
        }
        Polyline loop;
        const int n = std::max(
            48, static_cast<int>(std::ceil(2.0 * M_PI * params.random_radius / params.resolution)));
        for (int i = 0; i < n; ++i) {
          const double a = 2.0 * M_PI * i / n;
          double r = params.random_radius;
          for (int k = 0; k < 4; ++k)
            r *= 1.0 + amp[k] * std::cos((k + 2) * a + phase[k]);
          loop.push_back({r * std::cos(a), r * std::sin(a)});
        }
        Track candidate;
        candidate.name = track.name;
        candidate.centerline = loop;
        candidate.width.assign(loop.size(), params.width);
        candidate.start_index = 0;
        try {
          build_walls(candidate);
          track = candidate;
          break;
        } catch (const SelfIntersectingWalls&) {
          state = detail::splitmix64(state + 1);  // deterministic retry
        }
      }
      if (track.centerline.empty())
        throw InvalidParams("could not generate a valid random loop for this seed");
      break;
    }
  }
  validate_track(track);
  build_walls(track);  // reject degenerate geometry early
  return track;
}

}  // namespace raceloop
