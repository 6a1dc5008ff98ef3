#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "raceloop/collision.hpp"
#include "raceloop/lidar.hpp"
#include "raceloop/track.hpp"
#include "raceloop/track_gen.hpp"
#include "raceloop/vehicle.hpp"

using namespace raceloop;

namespace {

Track circle_track(double radius, double width, int n = 256) {
  Track t;
  t.name = "circle";
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * M_PI * i / n;
    t.centerline.push_back({radius * std::cos(a), radius * std::sin(a)});
  }
  t.width.assign(n, width);
  return t;
}

// Infinite corridor walls along +x at y = +-half_width (long finite strips).
Walls corridor_walls(double half_width, double length = 200.0) {
  Walls w;
  w.left = {{-length, half_width}, {length, half_width}};
  w.right = {{-length, -half_width}, {length, -half_width}};
  return w;
}

}  // namespace

TEST_CASE("straight corridor walls are constant offsets") {
  TrackGenParams params;
  params.width = 2.0;
  params.straight_length = 10.0;
  const auto track = generate_track(TrackKind::corridor, 0, params);
  const auto walls = build_walls(track);
  // vertices on the first straight (y == 0) sit one half-width away
  for (size_t i = 0; i < track.centerline.size(); ++i) {
    const Point2 c = track.centerline[i];
    if (std::abs(c.y) < 1e-9 && c.x > 0.5 && c.x < 9.5) {
      CHECK(walls.left[i].y == Catch::Approx(1.0).margin(1e-6));
      CHECK(walls.right[i].y == Catch::Approx(-1.0).margin(1e-6));
    }
  }
}

TEST_CASE("circle walls are concentric circles") {
  const auto track = circle_track(5.0, 2.0);
  const auto walls = build_walls(track);
  for (const auto& p : walls.left) CHECK(norm(p) == Catch::Approx(4.0).margin(1e-6));
  for (const auto& p : walls.right) CHECK(norm(p) == Catch::Approx(6.0).margin(1e-6));
}

TEST_CASE("excessive width degenerates the inner wall") {
  auto track = circle_track(5.0, 12.0);
  CHECK_THROWS_AS(build_walls(track), SelfIntersectingWalls);
}

TEST_CASE("vehicle holds a straight line") {
  VehicleParams params;
  VehicleState state;
  state.v = 2.0;
  ControlCommand cmd{0.0, 2.0};
  for (int i = 0; i < 10; ++i) state = step_vehicle(state, cmd, params, 0.01);
  CHECK(state.pose.position.x == Catch::Approx(0.200).margin(1e-12));
  CHECK(state.pose.position.y == Catch::Approx(0.0).margin(1e-12));
  CHECK(state.pose.psi == Catch::Approx(0.0).margin(1e-12));
  CHECK(state.t == Catch::Approx(0.1));
}

TEST_CASE("steady steering yields the kinematic turn radius") {
  VehicleParams params;
  const double delta0 = 0.25;
  VehicleState state;
  state.v = 2.0;
  state.delta_measured = delta0;
  ControlCommand cmd{delta0, 2.0};

  const double radius_expected = params.wheelbase / std::tan(delta0);
  const double yaw_rate = state.v / radius_expected;
  const double period = 2.0 * M_PI / yaw_rate;

  double max_r = 0.0, min_r = std::numeric_limits<double>::infinity();
  const Point2 center{0.0, radius_expected};  // left turn about (0, R)
  double t = 0.0;
  while (t < period) {
    state = step_vehicle(state, cmd, params, 0.005);
    t += 0.005;
    const double r = distance(state.pose.position, center);
    max_r = std::max(max_r, r);
    min_r = std::min(min_r, r);
  }
  CHECK(max_r == Catch::Approx(radius_expected).epsilon(0.01));
  CHECK(min_r == Catch::Approx(radius_expected).epsilon(0.01));
  // back near the start after one revolution
  CHECK(distance(state.pose.position, {0, 0}) < 0.05 * radius_expected);
}

TEST_CASE("invalid physics step is rejected") {
  VehicleParams params;
  VehicleState state;
  CHECK_THROWS_AS(step_vehicle(state, {0, 0}, params, 0.1), InvalidDt);
  CHECK_THROWS_AS(step_vehicle(state, {0, 0}, params, 0.0), InvalidDt);
  CHECK_THROWS_AS(step_vehicle(state, {0, 0}, params, -0.01), InvalidDt);
}

TEST_CASE("at rest with zero command the pose never changes") {
  VehicleParams params;
  VehicleState state;
  state.pose = {{1.0, 2.0}, 0.5};
  ControlCommand cmd{0.3, 0.0};
  for (int i = 0; i < 200; ++i) state = step_vehicle(state, cmd, params, 0.0025);
  CHECK(state.pose.position.x == Catch::Approx(1.0).margin(1e-12));
  CHECK(state.pose.position.y == Catch::Approx(2.0).margin(1e-12));
  CHECK(state.pose.psi == Catch::Approx(0.5).margin(1e-12));
  CHECK(state.v == 0.0);
}

TEST_CASE("lidar measures corridor geometry exactly without noise") {
  const auto walls = corridor_walls(1.0);
  SensorConfig cfg;
  cfg.noise_sigma = 0.0;
  cfg.max_range = 10.0;
  const WallGrid grid(walls.left, walls.right);
  const auto scan = cast_lidar(grid, {{0, 0}, 0.0}, cfg, 0);

  REQUIRE(static_cast<int>(scan.ranges.size()) == cfg.beam_count());
  auto beam_index = [&](double angle_deg) {
    const double a = angle_deg * M_PI / 180.0;
    return static_cast<int>(std::round((a - scan.angle_min) / scan.angular_increment));
  };
  CHECK(scan.ranges[beam_index(90.0)] == Catch::Approx(1.0).margin(1e-9));
  CHECK(scan.ranges[beam_index(-90.0)] == Catch::Approx(1.0).margin(1e-9));
  CHECK(scan.ranges[beam_index(45.0)] ==
        Catch::Approx(1.0 / std::sin(M_PI / 4.0)).margin(1e-9));
  // straight down the corridor: no wall within range
  CHECK(scan.ranges[beam_index(0.0)] == scan.no_return());
}

TEST_CASE("lidar ranges stay within the stated error bound") {
  const auto walls = corridor_walls(1.0);
  SensorConfig cfg;
  cfg.max_range = 10.0;
  cfg.noise_sigma = 0.01;
  const WallGrid grid(walls.left, walls.right);

  SensorConfig clean = cfg;
  clean.noise_sigma = 0.0;
  const Pose2 pose{{0.3, -0.2}, 0.1};
  const auto noisy = cast_lidar(grid, pose, cfg, 1234);
  const auto truth = cast_lidar(grid, pose, clean, 1234);
  REQUIRE(noisy.ranges.size() == truth.ranges.size());
  for (size_t i = 0; i < noisy.ranges.size(); ++i) {
    if (!truth.is_return(truth.ranges[i])) {
      CHECK(noisy.ranges[i] == noisy.no_return());
      continue;
    }
    CHECK(std::abs(noisy.ranges[i] - truth.ranges[i]) <= 3.0 * cfg.noise_sigma + 1e-12);
  }
}

TEST_CASE("lidar scans are deterministic in the seed") {
  const auto walls = corridor_walls(1.0);
  const WallGrid grid(walls.left, walls.right);
  SensorConfig cfg;
  cfg.max_range = 10.0;
  const Pose2 pose{{0.1, 0.2}, -0.05};
  const auto a = cast_lidar(grid, pose, cfg, 42);
  const auto b = cast_lidar(grid, pose, cfg, 42);
  const auto c = cast_lidar(grid, pose, cfg, 43);
  CHECK(a.ranges == b.ranges);
  CHECK(a.ranges != c.ranges);
}

TEST_CASE("grid raycast agrees with brute force") {
  const auto track = circle_track(5.0, 2.0, 64);
  const auto walls = build_walls(track);
  const WallGrid grid(walls.left, walls.right);

  auto brute = [&](Point2 o, double angle) {
    const Point2 dir{std::cos(angle), std::sin(angle)};
    double best = std::numeric_limits<double>::infinity();
    auto probe = [&](const Polyline& loop) {
      for (size_t i = 0; i < loop.size(); ++i) {
        double t;
        if (detail::ray_segment(o, dir, loop[i], loop[(i + 1) % loop.size()], &t))
          best = std::min(best, t);
      }
    };
    probe(walls.left);
    probe(walls.right);
    return best;
  };

  std::mt19937 rng(5);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  std::uniform_real_distribution<double> rad(4.2, 5.8);
  for (int trial = 0; trial < 500; ++trial) {
    const double theta = ang(rng);
    const Point2 origin{rad(rng) * std::cos(theta), rad(rng) * std::sin(theta)};
    const double beam = ang(rng);
    const double expect = brute(origin, beam);
    const double got = grid.raycast(origin, beam, 30.0);
    if (std::isinf(expect)) {
      CHECK(std::isinf(got));
    } else {
      CHECK(got == Catch::Approx(expect).margin(1e-9));
    }
  }
}

TEST_CASE("collision detection against corridor walls") {
  const auto walls = corridor_walls(1.0);
  VehicleParams params;  // footprint 0.5 x 0.3

  VehicleState centered;
  centered.pose = {{0, 0}, 0.0};
  CHECK_FALSE(check_collision(walls.left, walls.right, centered, params));

  VehicleState near_wall;
  near_wall.pose = {{0, 0.95}, 0.0};  // footprint center 0.05 lateral from wall
  // center of footprint sits ahead of the rear axle; lateral gap 0.05 < 0.15
  CHECK(check_collision(walls.left, walls.right, near_wall, params));

  // corner exactly touching the wall counts as contact
  VehicleState touching;
  touching.pose = {{0, 1.0 - params.track_halfwidth_footprint}, 0.0};
  CHECK(check_collision(walls.left, walls.right, touching, params));
}

TEST_CASE("lap detection requires a forward crossing") {
  const auto track = circle_track(5.0, 2.0);
  const auto line = start_line(track);

  // start vertex is at (5, 0); track runs counter-clockwise so forward is +y
  const Pose2 before{{5.0, -0.1}, M_PI / 2};
  const Pose2 after{{5.0, 0.3}, M_PI / 2};
  const auto fwd = detect_lap(line, before, after);
  REQUIRE(fwd.has_value());
  CHECK(fwd->fraction == Catch::Approx(0.25).margin(1e-9));

  CHECK_FALSE(detect_lap(line, after, before).has_value());  // backwards
  const Pose2 far_a{{4.0, 2.0}, 0.0}, far_b{{4.2, 2.5}, 0.0};
  CHECK_FALSE(detect_lap(line, far_a, far_b).has_value());  // no crossing

  // spawn exactly on the line: first step must not count
  const Pose2 on_line{{5.0, 0.0}, M_PI / 2};
  const Pose2 step_fwd{{5.0, 0.2}, M_PI / 2};
  CHECK_FALSE(detect_lap(line, on_line, step_fwd).has_value());
}

TEST_CASE("track json round-trips") {
  auto track = circle_track(5.0, 2.0, 32);
  track.start_index = 3;
  const auto j = track_to_json(track);
  const auto back = track_from_json(j);
  REQUIRE(back.centerline.size() == track.centerline.size());
  for (size_t i = 0; i < back.centerline.size(); ++i)
    CHECK(distance(back.centerline[i], track.centerline[i]) < 1e-12);
  CHECK(back.start_index == 3);
  CHECK(back.width_at(7) == 2.0);
}

TEST_CASE("malformed track documents are rejected") {
  CHECK_THROWS_AS(track_from_json(nlohmann::json::parse(R"({"width": 2.0})")),
                  TrackParseError);
  CHECK_THROWS_AS(track_from_json(nlohmann::json::parse(
                      R"({"centerline": [[0,0],[1,0]], "width": 2.0})")),
                  TrackParseError);
  CHECK_THROWS_AS(track_from_json(nlohmann::json::parse(
                      R"({"centerline": [[0,0],[5,0],[5,5],[0,5]], "width": -1.0})")),
                  TrackParseError);
}
