#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "raceloop/lidar.hpp"
#include "raceloop/vehicle.hpp"

namespace raceloop {

struct FtgParams {
  double bubble_radius = 0.35;         // clearance inflation around the nearest point
  double max_considered_range = 4.0;   // m
  int min_gap_width = 10;              // beams
  double speed_straight = 3.5;         // m/s
  double speed_turn = 1.5;             // m/s
  double steer_gain = 0.8;
};

// Reactive baseline: steer toward the best point of the largest free gap in
// the forward half of the scan. All beams zeroed -> full stop.
inline ControlCommand follow_the_gap(const LidarScan& scan, const FtgParams& params,
                                     double delta_max = 0.40) {
  // forward half only, clipped to the considered range
  std::vector<double> angle, range;
  for (size_t i = 0; i < scan.ranges.size(); ++i) {
    const double a = scan.angle_min + i * scan.angular_increment;
    if (std::abs(a) > M_PI / 2) continue;
    double r = scan.ranges[i];
    if (!scan.is_return(r)) r = params.max_considered_range;
    angle.push_back(a);
    range.push_back(std::min(r, params.max_considered_range));
  }
  if (range.empty()) return {0.0, 0.0};

  // safety bubble: an angular window around every nearest point, plus any
  // beam already inside the bubble radius
  const double r_min = *std::min_element(range.begin(), range.end());
  const double window =
      std::atan2(params.bubble_radius, std::max(r_min, params.bubble_radius * 0.25));
  std::vector<bool> free(range.size(), true);
  for (size_t i = 0; i < range.size(); ++i) {
    if (range[i] <= params.bubble_radius) free[i] = false;
    if (range[i] <= r_min + 1e-9) {
      for (size_t j = 0; j < range.size(); ++j) {
        if (std::abs(angle[j] - angle[i]) <= window) free[j] = false;
      }
    }
  }

  // largest run of free beams
  size_t best_start = 0, best_len = 0;
  double best_range = -1.0;
  size_t i = 0;
  while (i < range.size()) {
    if (!free[i]) {
      ++i;
      continue;
    }
    size_t j = i;
    double run_max = 0.0;
    while (j < range.size() && free[j]) {
      run_max = std::max(run_max, range[j]);
      ++j;
    }
    const size_t len = j - i;
    if (len >= static_cast<size_t>(params.min_gap_width)) {
      if (len > best_len || (len == best_len && run_max > best_range)) {
        best_start = i;
        best_len = len;
        best_range = run_max;
      }
    }
    i = j;
  }
  if (best_len == 0) return {0.0, 0.0};  // no admissible gap: stop

  // best point: the longest return inside the gap, ties toward the center;
  // a two-way tie straddling the center aims exactly between the beams
  const double center = 0.5 * (angle[best_start] + angle[best_start + best_len - 1]);
  double max_r = -1.0;
  for (size_t k = best_start; k < best_start + best_len; ++k)
    max_r = std::max(max_r, range[k]);
  double best_off = std::numeric_limits<double>::infinity();
  double target_sum = 0.0;
  int target_count = 0;
  for (size_t k = best_start; k < best_start + best_len; ++k) {
    if (range[k] < max_r - 1e-12) continue;
    const double off = std::abs(angle[k] - center);
    if (off < best_off - 1e-12) {
      best_off = off;
      target_sum = angle[k];
      target_count = 1;
    } else if (std::abs(off - best_off) <= 1e-12) {
      target_sum += angle[k];
      ++target_count;
    }
  }
  const double target = target_sum / target_count;

  ControlCommand cmd;
  cmd.delta_target = std::clamp(params.steer_gain * target, -delta_max, delta_max);
  cmd.v_target = std::max(
      0.0, params.speed_turn + (params.speed_straight - params.speed_turn) * std::cos(target));
  return cmd;
}

}  // namespace raceloop
