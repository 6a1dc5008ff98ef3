#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "raceloop/ftg.hpp"
#include "fixtures.hpp"

using namespace raceloop;
using namespace raceloop::testfix;

namespace {

LidarScan scan_from_ranges(std::vector<double> ranges, double fov = 1.5 * M_PI) {
  LidarScan scan;
  scan.angle_min = -0.5 * fov;
  scan.angular_increment = fov / (ranges.size() - 1);
  scan.max_range = 10.0;
  scan.ranges = std::move(ranges);
  return scan;
}

}  // namespace

TEST_CASE("symmetric corridor drives straight") {
  const auto scan = corridor_scan({2.0, 0.0, 0.0}, short_range_sensor(10.0));
  const auto cmd = follow_the_gap(scan, {});
  CHECK(cmd.delta_target == Catch::Approx(0.0).margin(1e-9));
  CHECK(cmd.v_target > 0.0);
}

TEST_CASE("an obstacle on the left steers right") {
  // left half blocked close, right half open
  std::vector<double> ranges(181, 8.0);
  for (int i = 120; i <= 150; ++i) ranges[i] = 0.6;  // left side (positive angles)
  const auto scan = scan_from_ranges(std::move(ranges), M_PI);
  const auto cmd = follow_the_gap(scan, {});
  CHECK(cmd.delta_target < 0.0);
}

TEST_CASE("blocked scan commands a stop") {
  // everything inside the bubble radius
  std::vector<double> ranges(181, 0.2);
  const auto scan = scan_from_ranges(std::move(ranges), M_PI);
  const auto cmd = follow_the_gap(scan, {});
  CHECK(cmd.delta_target == 0.0);
  CHECK(cmd.v_target == 0.0);
}

TEST_CASE("narrow slivers below min_gap_width do not count") {
  FtgParams params;
  params.min_gap_width = 30;
  std::vector<double> ranges(181, 0.2);
  for (int i = 60; i < 80; ++i) ranges[i] = 3.0;  // 20-beam sliver only
  const auto scan = scan_from_ranges(std::move(ranges), M_PI);
  const auto cmd = follow_the_gap(scan, params);
  CHECK(cmd.v_target == 0.0);
}

TEST_CASE("speed interpolates with the target angle") {
  FtgParams params;
  const auto straight = corridor_scan({2.0, 0.0, 0.0}, short_range_sensor(10.0));
  const auto cmd = follow_the_gap(straight, params);
  CHECK(cmd.v_target == Catch::Approx(params.speed_straight).margin(1e-6));
}

TEST_CASE("mirroring the scan negates the steering exactly") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> u(0.3, 3.9);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> ranges(241);
    for (auto& r : ranges) r = u(rng);
    auto mirrored = ranges;
    std::reverse(mirrored.begin(), mirrored.end());

    const auto fwd = follow_the_gap(scan_from_ranges(ranges), {});
    const auto rev = follow_the_gap(scan_from_ranges(mirrored), {});
    CHECK(rev.delta_target == Catch::Approx(-fwd.delta_target).margin(1e-12));
    CHECK(rev.v_target == Catch::Approx(fwd.v_target).margin(1e-12));
  }
}

TEST_CASE("commanded angle lies within the selected gap") {
  std::mt19937 rng(79);
  std::uniform_real_distribution<double> u(0.3, 3.9);
  FtgParams params;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> ranges(241);
    for (auto& r : ranges) r = u(rng);
    const auto scan = scan_from_ranges(ranges);
    const auto cmd = follow_the_gap(scan, params);
    if (cmd.v_target == 0.0) continue;
    // reconstruct the commanded angle and check it points into free space:
    // the beam nearest the target must be farther than the bubble radius
    const double target = cmd.delta_target / params.steer_gain;
    if (std::abs(cmd.delta_target) >= 0.4 - 1e-12) continue;  // clamped
    const int idx = static_cast<int>(std::round((target - scan.angle_min) /
                                                scan.angular_increment));
    REQUIRE(idx >= 0);
    REQUIRE(idx < static_cast<int>(scan.ranges.size()));
    CHECK(scan.ranges[idx] > params.bubble_radius);
  }
}
