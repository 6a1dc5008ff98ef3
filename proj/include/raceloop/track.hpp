#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "raceloop/geometry.hpp"

namespace raceloop {

// Closed racing track: centerline loop (last vertex joins the first) with a
// per-vertex width and a start/finish cross-section.
struct Track {
  std::string name;
  Polyline centerline;
  std::vector<double> width;  // same size as centerline
  int start_index = 0;

  double width_at(size_t i) const { return width[i % width.size()]; }
};

struct Walls {
  Polyline left, right;  // closed loops, implicit last->first closure
};

namespace detail {

inline Point2 vertex_normal(const Polyline& loop, size_t i) {
  const size_t n = loop.size();
  const Point2 prev = loop[(i + n - 1) % n];
  const Point2 next = loop[(i + 1) % n];
  const Point2 d0 = normalized(loop[i] - prev);
  const Point2 d1 = normalized(next - loop[i]);
  return normalized(perp(d0) + perp(d1));
}

// Offset curves reverse direction where the offset exceeds the local turn
// radius; that is the degenerate case build_walls must reject.
inline bool offset_reverses(const Polyline& base, const Polyline& off) {
  const size_t n = base.size();
  for (size_t i = 0; i < n; ++i) {
    const size_t j = (i + 1) % n;
    if (dot(off[j] - off[i], base[j] - base[i]) <= 0.0) return true;
  }
  return false;
}

}  // namespace detail

// Left/right walls by offsetting the centerline half a width along vertex
// normals. Throws SelfIntersectingWalls when the track geometry degenerates.
inline Walls build_walls(const Track& track) {
  const size_t n = track.centerline.size();
  if (n < 3) throw TrackParseError("track centerline needs at least 3 vertices");
  Walls walls;
  walls.left.resize(n);
  walls.right.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const Point2 normal = detail::vertex_normal(track.centerline, i);
    const double half = 0.5 * track.width_at(i);
    walls.left[i] = track.centerline[i] + half * normal;
    walls.right[i] = track.centerline[i] - half * normal;
  }
  if (detail::offset_reverses(track.centerline, walls.left) ||
      detail::offset_reverses(track.centerline, walls.right) ||
      polyline_self_intersects(walls.left, true) ||
      polyline_self_intersects(walls.right, true)) {
    throw SelfIntersectingWalls("wall offset self-intersects; track rejected");
  }
  return walls;
}

// The start/finish line: the track cross-section at start_index.
struct StartLine {
  Point2 a, b;     // endpoints on the two walls
  Point2 forward;  // unit direction of increasing arc length
};

inline StartLine start_line(const Track& track) {
  const size_t n = track.centerline.size();
  const size_t i = static_cast<size_t>(track.start_index) % n;
  const Point2 normal = detail::vertex_normal(track.centerline, i);
  const double half = 0.5 * track.width_at(i);
  StartLine line;
  line.a = track.centerline[i] + half * normal;
  line.b = track.centerline[i] - half * normal;
  line.forward = normalized(track.centerline[(i + 1) % n] - track.centerline[i]);
  return line;
}

inline void validate_track(const Track& track) {
  const size_t n = track.centerline.size();
  if (n < 3) throw TrackParseError("track centerline needs at least 3 vertices");
  if (track.width.size() != n) throw TrackParseError("width array size mismatch");
  for (double w : track.width)
    if (!(w > 0.0)) throw TrackParseError("track width must be positive");
  if (track.start_index < 0 || static_cast<size_t>(track.start_index) >= n)
    throw TrackParseError("start_index out of range");
  const double gap = distance(track.centerline.back(), track.centerline.front());
  if (gap >= 0.5 * track.width.front() + 0.5 * track.width.back())
    throw TrackParseError("centerline loop is not closed");
}

inline Track track_from_json(const nlohmann::json& j) {
  Track track;
  try {
    track.name = j.value("name", "unnamed");
    for (const auto& v : j.at("centerline"))
      track.centerline.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
    const auto& w = j.at("width");
    if (w.is_number()) {
      track.width.assign(track.centerline.size(), w.get<double>());
    } else {
      for (const auto& v : w) track.width.push_back(v.get<double>());
    }
    track.start_index = j.value("start_index", 0);
  } catch (const nlohmann::json::exception& e) {
    throw TrackParseError(std::string("bad track document: ") + e.what());
  }
  validate_track(track);
  return track;
}

inline Track load_track(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TrackParseError("cannot open track file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw TrackParseError(std::string("bad track document: ") + e.what());
  }
  return track_from_json(j);
}

inline nlohmann::json track_to_json(const Track& track) {
  nlohmann::json j;
  j["name"] = track.name;
  auto& cl = j["centerline"] = nlohmann::json::array();
  for (const auto& p : track.centerline) cl.push_back({p.x, p.y});
  bool uniform = true;
  for (double w : track.width) uniform &= (w == track.width.front());
  if (uniform) {
    j["width"] = track.width.front();
  } else {
    j["width"] = track.width;
  }
  j["start_index"] = track.start_index;
  return j;
}

inline void save_track(const Track& track, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw TrackParseError("cannot write track file: " + path);
  out << track_to_json(track).dump(2) << "\n";
}

}  // namespace raceloop
