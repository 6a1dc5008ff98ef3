#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "raceloop/planning.hpp"
#include "raceloop/spline.hpp"
#include "raceloop/vehicle.hpp"

namespace raceloop {

// Gains of the improved Stanley law plus the adaptive-lookahead shape.
struct StanleyGains {
  double k_ang = 0.6;    // heading term
  double k_dist = 0.5;   // cross-track term
  double k_soft = 5.0;   // additive softening in the cross-track denominator
  double k_damp = 1.0;   // velocity factor in the denominator
  double k_rate = -0.013;  // yaw-rate error term
  double k_steer = 0.0;  // steering-difference term
  double L_max = 0.2;    // lookahead saturation, m
  double kappa_norm = 1.0;  // curvature that saturates the lookahead, 1/m
};

struct LateralErrors {
  double delta_psi = 0.0;    // heading error, rad
  double delta_d = 0.0;      // cross-track error at the control point, m
  double delta_r = 0.0;      // yaw-rate error, rad/s
  double delta_delta = 0.0;  // steering difference across one step, rad
};

struct VelocityLimits {
  double v_min = 2.0;
  double v_max = 4.0;
  double a_x_max = 6.0;  // forward acceleration, m/s^2
  double a_x_min = 4.5;  // braking magnitude (stored positive), m/s^2
  double a_y_max = 4.0;  // lateral acceleration, m/s^2
  double da_min = -2.5;  // allowed target-velocity change per step, m/s
  double da_max = 2.0;
};

struct VelocityProfile {
  std::vector<double> v;         // min(forward, backward) per point
  std::vector<double> forward;
  std::vector<double> backward;
};

// Control point a curvature-dependent distance ahead of the foot point:
// L = L_max * min(1, kappa_mean / kappa_norm), saturating at L_max.
inline ControlPoint compute_lookahead(const PathSpline& spline, double s_foot,
                                      const StanleyGains& gains) {
  const double L = spline.total_length();
  s_foot = std::clamp(s_foot, 0.0, L);
  const double window_end = std::min(s_foot + gains.L_max, L);
  double kappa_acc = 0.0;
  int count = 0;
  for (double s = s_foot;; s += 0.05) {
    if (s > window_end) s = window_end;
    kappa_acc += std::abs(spline.eval(s).kappa);
    ++count;
    if (s >= window_end) break;
  }
  const double kappa_mean = kappa_acc / count;
  const double ahead = gains.L_max * std::min(1.0, kappa_mean / gains.kappa_norm);
  return spline.eval(std::min(s_foot + ahead, L));
}

// Error set of the steering law, evaluated at the front axle against the
// control point. The heading error is the deviation from the path tangent
// (path minus vehicle), which is what makes the proportional term corrective.
inline LateralErrors lateral_errors(const VehicleState& state, Point2 front_axle,
                                    const ControlPoint& cp, double prev_delta_measured,
                                    double v) {
  LateralErrors e;
  e.delta_psi = normalize_angle(cp.psi_cp - state.pose.psi);
  e.delta_d = std::cos(cp.psi_cp) * (cp.position.y - front_axle.y) -
              std::sin(cp.psi_cp) * (cp.position.x - front_axle.x);
  e.delta_r = state.yaw_rate - v * cp.kappa;
  e.delta_delta = state.delta_measured - prev_delta_measured;
  return e;
}

// Target wheel angle: heading, cross-track, yaw-rate and steering terms.
inline double stanley_steering(const LateralErrors& e, double v,
                               const StanleyGains& gains) {
  const double denom = v * gains.k_damp + gains.k_soft;
  if (!(denom > 0.0))
    throw NonpositiveDenominator("v*k_damp + k_soft must stay positive");
  return gains.k_ang * e.delta_psi +
         std::atan(gains.k_dist * e.delta_d / denom) +
         gains.k_rate * e.delta_r +
         gains.k_steer * e.delta_delta;
}

// Minimum-time velocity profile over the path points: per-point lateral
// cap v_c = sqrt(a_y_max/|kappa|), then a forward pass limited by drive
// acceleration and a backward pass limited by braking, combined pointwise.
inline VelocityProfile fit_velocity_profile(const std::vector<ControlPoint>& pts,
                                            double v_seed, const VelocityLimits& lim) {
  const size_t n = pts.size();
  if (n < 2) throw TooFewPoints("velocity profile needs at least 2 points");

  auto curvature_cap = [&](size_t i) {
    const double k = std::abs(pts[i].kappa);
    return k > 1e-12 ? std::sqrt(lim.a_y_max / k)
                     : std::numeric_limits<double>::infinity();
  };
  auto gap = [&](size_t i, size_t j) {
    return distance(pts[i].position, pts[j].position);
  };

  VelocityProfile prof;
  prof.forward.resize(n);
  prof.backward.resize(n);
  prof.v.resize(n);

  // the seed also honors the local curvature cap; otherwise an over-speed
  // entry would let the forward chain accelerate out of a bound it never
  // actually attained
  prof.forward[0] = std::max(
      lim.v_min, std::min({lim.v_max, std::max(v_seed, lim.v_min), curvature_cap(0)}));
  for (size_t i = 1; i < n; ++i) {
    const double v_gain =
        std::sqrt(prof.forward[i - 1] * prof.forward[i - 1] + 2.0 * gap(i - 1, i) * lim.a_x_max);
    prof.forward[i] =
        std::max(lim.v_min, std::min({lim.v_max, v_gain, curvature_cap(i)}));
  }

  // the horizon is local: always be able to slow to v_min by its end
  prof.backward[n - 1] = lim.v_min;
  for (size_t i = n - 1; i-- > 0;) {
    const double v_loss =
        std::sqrt(prof.backward[i + 1] * prof.backward[i + 1] + 2.0 * gap(i, i + 1) * lim.a_x_min);
    prof.backward[i] =
        std::max(lim.v_min, std::min({lim.v_max, v_loss, curvature_cap(i)}));
  }

  for (size_t i = 0; i < n; ++i) prof.v[i] = std::min(prof.forward[i], prof.backward[i]);
  return prof;
}

// Target velocity continuity: the commanded change per control step stays
// within [da_min, da_max] of the measured velocity.
inline double rate_limit(double v_meas, double v_i, const VelocityLimits& lim) {
  return std::max(v_meas + lim.da_min, std::min(v_meas + lim.da_max, v_i));
}

// Everything the closed-loop controller needs in one bundle.
struct ControllerConfig {
  StanleyGains gains;
  VelocityLimits limits;
  PlannerParams planner;
  double wheelbase = 0.33;
  double delta_max = 0.40;
  int hold_budget = 5;  // frames a stale plan may be reused
};

struct ControllerMemory {
  enum class Status { ok, holding, degraded };

  WidthProfile width;
  Polyline plan_world;   // last good plan in world coordinates
  bool has_plan = false;
  double prev_delta = 0.0;
  int failures = 0;
  Status status = Status::ok;
};

// One sense->plan->steer cycle. Planner errors fall back to the previous
// plan shifted by odometry for up to hold_budget frames, then to a slow
// straight-ahead crawl.
inline std::pair<ControlCommand, ControllerMemory> control_step(
    const VehicleState& state, const LidarScan& scan, ControllerMemory memory,
    const ControllerConfig& config) {
  PathSpline spline;
  bool have_spline = false;

  try {
    auto plan = plan_pipeline(scan, memory.width, config.planner);
    memory.width = plan.width;
    spline = std::move(plan.spline);
    have_spline = true;
    memory.failures = 0;
    memory.status = ControllerMemory::Status::ok;

    // remember the plan in world coordinates for the hold fallback
    memory.plan_world.clear();
    for (const double s : spline.knot_arcs())
      memory.plan_world.push_back(to_world(state.pose, spline.eval(s).position));
    memory.has_plan = true;
  } catch (const std::exception&) {
    memory.failures += 1;
    if (memory.has_plan && memory.failures <= config.hold_budget) {
      Polyline local;
      for (const auto& p : memory.plan_world) local.push_back(to_local(state.pose, p));
      try {
        spline = PathSpline::fit(local);
        have_spline = true;
        memory.status = ControllerMemory::Status::holding;
      } catch (const std::exception&) {
        have_spline = false;
      }
    }
  }

  ControlCommand cmd;
  if (!have_spline) {
    memory.status = ControllerMemory::Status::degraded;
    cmd.delta_target = 0.0;
    cmd.v_target = config.limits.v_min;
    memory.prev_delta = state.delta_measured;
    return {cmd, memory};
  }

  // all control happens in the current vehicle frame
  const Point2 axle{config.wheelbase, 0.0};
  VehicleState local = state;
  local.pose = {{0.0, 0.0}, 0.0};

  const double s_foot = spline.project(axle);
  const ControlPoint cp = compute_lookahead(spline, s_foot, config.gains);
  const LateralErrors errors =
      lateral_errors(local, axle, cp, memory.prev_delta, state.v);
  cmd.delta_target = std::clamp(stanley_steering(errors, state.v, config.gains),
                                -config.delta_max, config.delta_max);

  std::vector<ControlPoint> knots;
  for (const double s : spline.knot_arcs()) knots.push_back(spline.eval(s));
  const auto profile = fit_velocity_profile(knots, state.v, config.limits);

  // velocity from the knot nearest the foot point
  size_t foot_knot = 0;
  double best = std::numeric_limits<double>::infinity();
  const auto& arcs = spline.knot_arcs();
  for (size_t i = 0; i < arcs.size(); ++i) {
    const double d = std::abs(arcs[i] - s_foot);
    if (d < best) {
      best = d;
      foot_knot = i;
    }
  }
  cmd.v_target = rate_limit(state.v, profile.v[foot_knot], config.limits);

  memory.prev_delta = state.delta_measured;
  return {cmd, memory};
}

}  // namespace raceloop
