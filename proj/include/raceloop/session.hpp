#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "raceloop/collision.hpp"
#include "raceloop/config.hpp"
#include "raceloop/control.hpp"
#include "raceloop/ftg.hpp"
#include "raceloop/lidar.hpp"
#include "raceloop/track.hpp"

namespace raceloop {

struct SessionConfig {
  std::string track_path;
  std::string controller = "stanley";  // "stanley" | "ftg"
  std::string config_path;
  int laps = 3;
  uint64_t seed = 0;
  double timeout = 120.0;           // simulated seconds
  std::string trace_path;           // empty: no trace
};

struct LapReport {
  std::vector<double> lap_times;
  int collisions = 0;
  bool completed = false;
  double avg_speed = 0.0;      // total_distance / total time
  double total_distance = 0.0; // odometer, m
  double total_time = 0.0;     // simulated s
};

// Mean over steady-state laps (all laps after the standing-start lap).
inline double steady_state_mean(const std::vector<double>& lap_times) {
  if (lap_times.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (lap_times.size() == 1) return lap_times.front();
  double acc = 0.0;
  for (size_t i = 1; i < lap_times.size(); ++i) acc += lap_times[i];
  return acc / static_cast<double>(lap_times.size() - 1);
}

struct SessionSetup {
  Track track;
  std::variant<ControllerConfig, FtgParams> controller;
  int laps = 3;
  uint64_t seed = 0;
  double timeout = 120.0;
  VehicleParams vehicle{};
  SensorConfig sensor{};
  double control_rate = 40.0;  // Hz
  int physics_substeps = 10;   // per control period
  std::ostream* trace = nullptr;
};

inline const char* kTraceHeader = "t,x,y,psi,v,delta,delta_target,v_target,lap,collision";

namespace detail {

inline void write_trace_row(std::ostream& out, const VehicleState& s,
                            const ControlCommand& cmd, int lap, bool collision) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%d,%d\n",
                s.t, s.pose.position.x, s.pose.position.y, s.pose.psi, s.v,
                s.delta_measured, cmd.delta_target, cmd.v_target, lap,
                collision ? 1 : 0);
  out << buf;
}

}  // namespace detail

// Closed-loop race session: sense -> control -> actuate at the control rate
// with substepped physics, until the lap budget, a collision, or timeout.
inline LapReport run_session(const SessionSetup& setup) {
  validate_track(setup.track);
  const Walls walls = build_walls(setup.track);
  const WallGrid grid(walls.left, walls.right);
  const StartLine line = start_line(setup.track);

  const size_t n = setup.track.centerline.size();
  const size_t i0 = static_cast<size_t>(setup.track.start_index) % n;
  const Point2 spawn = setup.track.centerline[i0];
  const Point2 next = setup.track.centerline[(i0 + 1) % n];

  VehicleState state;
  state.pose = {spawn, std::atan2(next.y - spawn.y, next.x - spawn.x)};

  ControllerMemory memory;
  const double dt_ctrl = 1.0 / setup.control_rate;
  const double dt_phys = dt_ctrl / setup.physics_substeps;
  const long max_steps = static_cast<long>(setup.timeout * setup.control_rate);

  LapReport report;
  if (setup.trace) *setup.trace << kTraceHeader << "\n";

  int lap_count = 0;
  double last_crossing = 0.0;
  bool collided = false;

  for (long step = 0; step < max_steps; ++step) {
    const Pose2 sensor_pose = compose(state.pose, setup.sensor.mount_offset);
    const uint64_t scan_seed =
        detail::splitmix64(setup.seed ^ detail::splitmix64(static_cast<uint64_t>(step)));
    const LidarScan scan = cast_lidar(grid, sensor_pose, setup.sensor, scan_seed);

    ControlCommand cmd;
    if (std::holds_alternative<ControllerConfig>(setup.controller)) {
      auto [c, m] =
          control_step(state, scan, std::move(memory), std::get<ControllerConfig>(setup.controller));
      cmd = c;
      memory = std::move(m);
    } else {
      cmd = follow_the_gap(scan, std::get<FtgParams>(setup.controller),
                           setup.vehicle.delta_max);
    }

    const Pose2 before = state.pose;
    const double t_before = state.t;
    for (int sub = 0; sub < setup.physics_substeps; ++sub) {
      const Point2 prev = state.pose.position;
      state = step_vehicle(state, cmd, setup.vehicle, dt_phys);
      report.total_distance += distance(prev, state.pose.position);
    }

    if (const auto crossing = detect_lap(line, before, state.pose)) {
      const double t_cross = t_before + crossing->fraction * dt_ctrl;
      report.lap_times.push_back(t_cross - last_crossing);
      last_crossing = t_cross;
      ++lap_count;
    }

    if (check_collision(walls.left, walls.right, state, setup.vehicle)) {
      collided = true;
      report.collisions = 1;
    }
    if (setup.trace)
      detail::write_trace_row(*setup.trace, state, cmd, lap_count, collided);
    if (collided || lap_count >= setup.laps) break;
  }

  report.total_time = state.t;
  report.completed = !collided && lap_count >= setup.laps;
  if (state.t > 0.0) report.avg_speed = report.total_distance / state.t;
  return report;
}

// File-based entry point used by the CLI.
inline LapReport run_session(const SessionConfig& cfg) {
  SessionSetup setup;
  setup.track = load_track(cfg.track_path);
  if (cfg.controller == "stanley") {
    setup.controller = load_controller_config(cfg.config_path);
  } else if (cfg.controller == "ftg") {
    setup.controller = load_ftg_config(cfg.config_path);
  } else {
    throw ConfigParseError("unknown controller: " + cfg.controller);
  }
  setup.laps = cfg.laps;
  setup.seed = cfg.seed;
  setup.timeout = cfg.timeout;

  if (!cfg.trace_path.empty()) {
    std::ofstream trace(cfg.trace_path);
    if (!trace) throw ConfigParseError("cannot write trace file: " + cfg.trace_path);
    setup.trace = &trace;
    return run_session(setup);
  }
  return run_session(setup);
}

}  // namespace raceloop
