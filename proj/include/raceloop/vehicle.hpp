#pragma once

#include <algorithm>
#include <cmath>

#include "raceloop/geometry.hpp"

namespace raceloop {

struct VehicleParams {
  double wheelbase = 0.33;
  double track_halfwidth_footprint = 0.15;  // half vehicle width
  double length_footprint = 0.50;
  double delta_max = 0.40;   // steering limit, rad
  double tau_delta = 0.10;   // steering first-order lag, s
  double tau_v = 0.30;       // velocity first-order lag, s
  double a_cmd_max = 6.0;    // drive saturation, m/s^2
};

struct VehicleState {
  Pose2 pose;                  // rear-axle reference
  double v = 0.0;              // m/s, >= 0
  double yaw_rate = 0.0;       // rad/s
  double delta_measured = 0.0; // rad
  double t = 0.0;              // s
};

struct ControlCommand {
  double delta_target = 0.0;  // rad, clamped to +-delta_max by the plant
  double v_target = 0.0;      // m/s
};

inline Point2 front_axle(const VehicleState& state, const VehicleParams& params) {
  return to_world(state.pose, {params.wheelbase, 0.0});
}

namespace detail {

struct Deriv {
  double x, y, psi, v, delta;
};

inline Deriv vehicle_deriv(double psi, double v, double delta,
                           const ControlCommand& cmd, const VehicleParams& p) {
  const double delta_cmd = std::clamp(cmd.delta_target, -p.delta_max, p.delta_max);
  Deriv d;
  d.delta = (delta_cmd - delta) / p.tau_delta;
  d.v = std::clamp((cmd.v_target - v) / p.tau_v, -p.a_cmd_max, p.a_cmd_max);
  d.psi = v * std::tan(delta) / p.wheelbase;
  d.x = v * std::cos(psi);
  d.y = v * std::sin(psi);
  return d;
}

}  // namespace detail

// One physics substep: first-order steering and drive lags around a kinematic
// bicycle, integrated with explicit RK4.
inline VehicleState step_vehicle(const VehicleState& state, const ControlCommand& cmd,
                                 const VehicleParams& params, double dt) {
  if (!(dt > 0.0) || dt > 0.01) throw InvalidDt("physics substep must be in (0, 0.01]");

  const double x0 = state.pose.position.x, y0 = state.pose.position.y;
  const double psi0 = state.pose.psi, v0 = state.v, delta0 = state.delta_measured;

  const auto k1 = detail::vehicle_deriv(psi0, v0, delta0, cmd, params);
  const auto k2 = detail::vehicle_deriv(psi0 + 0.5 * dt * k1.psi, v0 + 0.5 * dt * k1.v,
                                        delta0 + 0.5 * dt * k1.delta, cmd, params);
  const auto k3 = detail::vehicle_deriv(psi0 + 0.5 * dt * k2.psi, v0 + 0.5 * dt * k2.v,
                                        delta0 + 0.5 * dt * k2.delta, cmd, params);
  const auto k4 = detail::vehicle_deriv(psi0 + dt * k3.psi, v0 + dt * k3.v,
                                        delta0 + dt * k3.delta, cmd, params);

  auto mix = [dt](double a, double b, double c, double d) {
    return dt / 6.0 * (a + 2.0 * b + 2.0 * c + d);
  };

  VehicleState next = state;
  next.pose.position.x = x0 + mix(k1.x, k2.x, k3.x, k4.x);
  next.pose.position.y = y0 + mix(k1.y, k2.y, k3.y, k4.y);
  next.pose.psi = normalize_angle(psi0 + mix(k1.psi, k2.psi, k3.psi, k4.psi));
  next.v = std::max(0.0, v0 + mix(k1.v, k2.v, k3.v, k4.v));
  next.delta_measured = std::clamp(delta0 + mix(k1.delta, k2.delta, k3.delta, k4.delta),
                                   -params.delta_max, params.delta_max);
  next.yaw_rate = next.v * std::tan(next.delta_measured) / params.wheelbase;
  next.t = state.t + dt;
  return next;
}

}  // namespace raceloop
