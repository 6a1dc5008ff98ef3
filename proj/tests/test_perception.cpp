#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "raceloop/perception.hpp"
#include "fixtures.hpp"

using namespace raceloop;
using namespace raceloop::testfix;

namespace {

LidarScan manual_scan(std::vector<double> ranges, double angle_min,
                      double increment, double max_range) {
  LidarScan scan;
  scan.angle_min = angle_min;
  scan.angular_increment = increment;
  scan.ranges = std::move(ranges);
  scan.max_range = max_range;
  return scan;
}

}  // namespace

TEST_CASE("scan_to_points converts and prunes") {
  auto scan = manual_scan({1.0, 3.0, 1.0}, -M_PI / 2, M_PI / 2, 10.0);
  const auto pts = scan_to_points(scan);
  REQUIRE(pts.size() == 3);
  CHECK(distance(pts[0], {0.0, -1.0}) < 1e-12);
  CHECK(distance(pts[1], {3.0, 0.0}) < 1e-12);
  CHECK(distance(pts[2], {0.0, 1.0}) < 1e-12);

  // behind the vehicle: dropped
  auto rear = manual_scan({2.0, 2.0}, M_PI * 0.75, M_PI / 8, 10.0);
  CHECK_THROWS_AS(scan_to_points(rear), EmptyScan);

  // all sentinels: dropped
  auto blank = manual_scan({11.0, 11.0, 11.0}, -M_PI / 4, M_PI / 4, 10.0);
  CHECK_THROWS_AS(scan_to_points(blank), EmptyScan);
}

TEST_CASE("corridor scan splits into exactly two wall segments") {
  const auto scan = corridor_scan({}, short_range_sensor());
  const auto pts = scan_to_points(scan);
  const auto segs = segment_scan(pts, {});
  REQUIRE(segs.size() == 2);
  // scanning counter-clockwise: right wall first, then left
  CHECK(detail::nearest_point_y(segs[0].points) < 0.0);
  CHECK(detail::nearest_point_y(segs[1].points) > 0.0);
}

TEST_CASE("a doorway gap splits one segment in two") {
  // single right-hand wall with a 1 m hole
  const Polyline before{{-2.0, -1.0}, {3.0, -1.0}};
  const Polyline after{{4.0, -1.0}, {12.0, -1.0}};
  const auto cfg = short_range_sensor(15.0);

  const auto solid = scan_to_points(open_wall_scan({{{-2.0, -1.0}, {12.0, -1.0}}}, cfg));
  const auto holed = scan_to_points(open_wall_scan({before, after}, cfg));

  SegmentationParams params;
  const auto segs_solid = segment_scan(solid, params);
  const auto segs_holed = segment_scan(holed, params);
  CHECK(segs_holed.size() == segs_solid.size() + 1);

  // the split happens at the hole: one segment ends by x=3, next begins by x=4
  REQUIRE(segs_holed.size() >= 2);
  bool found = false;
  for (size_t i = 0; i + 1 < segs_holed.size(); ++i) {
    if (std::abs(segs_holed[i].points.back().x - 3.0) < 0.2 &&
        std::abs(segs_holed[i + 1].points.front().x - 4.0) < 0.2)
      found = true;
  }
  CHECK(found);
}

TEST_CASE("single point yields a single tiny segment") {
  const Polyline pts{{1.0, 0.5}};
  const auto segs = segment_scan(pts, {});
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].points.size() == 1);
  CHECK(filter_segments(segs, {}).empty());
}

TEST_CASE("segmentation partitions the input") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    Polyline pts;
    for (int i = 0; i < 120; ++i) pts.push_back({std::abs(u(rng)), u(rng)});
    const auto segs = segment_scan(pts, {});
    Polyline concat;
    for (const auto& s : segs)
      concat.insert(concat.end(), s.points.begin(), s.points.end());
    REQUIRE(concat.size() == pts.size());
    for (size_t i = 0; i < pts.size(); ++i) CHECK(distance(concat[i], pts[i]) < 1e-15);
  }
}

TEST_CASE("raising the break threshold never adds segments") {
  std::mt19937 rng(29);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  for (int trial = 0; trial < 20; ++trial) {
    Polyline pts;
    for (int i = 0; i < 80; ++i) pts.push_back({u(rng), u(rng) - 2.0});
    SegmentationParams lo, hi;
    lo.base_break_threshold = 0.05;
    hi.base_break_threshold = 0.25;
    CHECK(segment_scan(pts, hi).size() <= segment_scan(pts, lo).size());
  }
}

TEST_CASE("segmentation pipeline is rotation-equivariant") {
  const double theta = 0.05;
  const auto scan = corridor_scan({}, short_range_sensor());
  const auto pts = scan_to_points(scan);
  Polyline rotated;
  for (const auto& p : pts) rotated.push_back(rotate(p, theta));

  SegmentationParams params;
  SegmentationParams params_rot = params;
  params_rot.max_segment_angle += theta;

  const auto base = filter_segments(segment_scan(pts, params), params);
  const auto rot = filter_segments(segment_scan(rotated, params_rot), params_rot);
  REQUIRE(base.size() == rot.size());
  for (size_t s = 0; s < base.size(); ++s) {
    REQUIRE(base[s].points.size() == rot[s].points.size());
    for (size_t i = 0; i < base[s].points.size(); ++i) {
      CHECK(distance(rotate(base[s].points[i], theta), rot[s].points[i]) < 1e-9);
    }
  }
}

TEST_CASE("filters remove short, far and cross segments") {
  SegmentationParams params;

  WallSegment tiny = make_wall_segment({{1.0, 0.0}, {1.05, 0.0}});
  CHECK(filter_segments({tiny}, params).empty());

  Polyline far_pts;
  for (int i = 0; i < 10; ++i) far_pts.push_back({25.0, -2.0 + 0.4 * i});
  WallSegment far_seg = make_wall_segment(far_pts);
  CHECK(filter_segments({far_seg}, params).empty());

  // a wall crossing the heading at ~90 degrees (dead end) is eliminated
  Polyline cross_pts;
  for (int i = 0; i < 10; ++i) cross_pts.push_back({5.0 + 0.001 * i, -2.0 + 0.4 * i});
  WallSegment cross_seg = make_wall_segment(cross_pts);
  CHECK(filter_segments({cross_seg}, params).empty());

  // corridor walls survive every gate
  const auto scan = corridor_scan({}, short_range_sensor());
  const auto segs = segment_scan(scan_to_points(scan), params);
  CHECK(filter_segments(segs, params).size() == 2);
}

TEST_CASE("select_walls labels sides") {
  Polyline upper, lower;
  for (int i = 0; i < 20; ++i) {
    upper.push_back({0.2 * i, 1.0});
    lower.push_back({0.2 * i, -1.0});
  }
  const auto pair = select_walls({make_wall_segment(upper), make_wall_segment(lower)});
  REQUIRE(pair.both());
  CHECK(detail::nearest_point_y(pair.left->points) > 0.0);
  CHECK(detail::nearest_point_y(pair.right->points) < 0.0);
}

TEST_CASE("one-sided detection keeps a single wall") {
  Polyline outer;
  for (int i = 0; i < 30; ++i) outer.push_back({0.2 * i, 1.2});
  const auto pair = select_walls({make_wall_segment(outer)});
  CHECK(pair.left.has_value());
  CHECK_FALSE(pair.right.has_value());
}

TEST_CASE("empty candidate list raises NoWalls") {
  CHECK_THROWS_AS(select_walls({}), NoWalls);
}

TEST_CASE("straddling segments are split at the crossing") {
  // a dead-end wall sweeping from right to left across the axis
  Polyline sweep;
  for (int i = 0; i <= 20; ++i) sweep.push_back({4.0, -1.0 + 0.1 * i});
  const auto pair = select_walls({make_wall_segment(sweep)});
  REQUIRE(pair.both());
  for (const auto& p : pair.left->points) CHECK(p.y >= -1e-9);
  for (const auto& p : pair.right->points) CHECK(p.y <= 1e-9);
}

TEST_CASE("selected walls always lie on their own side") {
  std::mt19937 rng(37);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<WallSegment> segs;
    for (int s = 0; s < 4; ++s) {
      Polyline pts;
      double x = 0.5 + std::abs(u(rng));
      double y = u(rng);
      for (int i = 0; i < 10; ++i) {
        pts.push_back({x, y});
        x += 0.15;
        y += 0.1 * u(rng) / 3.0;
      }
      segs.push_back(make_wall_segment(pts));
    }
    const auto pair = select_walls(segs);
    if (pair.left)
      CHECK(detail::nearest_point_y(pair.left->points) >= -1e-9);
    if (pair.right)
      CHECK(detail::nearest_point_y(pair.right->points) <= 1e-9);
  }
}

TEST_CASE("longer candidate wins its side, ties break on distance") {
  Polyline short_wall, long_wall;
  for (int i = 0; i < 8; ++i) short_wall.push_back({0.2 * i, 0.8});
  for (int i = 0; i < 30; ++i) long_wall.push_back({0.2 * i, 1.6});
  const auto pair = select_walls({make_wall_segment(short_wall), make_wall_segment(long_wall)});
  REQUIRE(pair.left.has_value());
  CHECK(pair.left->points.size() == 30);

  // identical length: closer one wins
  Polyline near_wall, far_wall;
  for (int i = 0; i < 10; ++i) {
    near_wall.push_back({0.2 * i, 0.5});
    far_wall.push_back({0.2 * i, 2.5});
  }
  const auto tied = select_walls({make_wall_segment(far_wall), make_wall_segment(near_wall)});
  REQUIRE(tied.left.has_value());
  CHECK(tied.left->points.front().y == Catch::Approx(0.5));
}
