#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "raceloop/geometry.hpp"

namespace raceloop {

// A point on the reference path with everything the controller needs.
struct ControlPoint {
  Point2 position;
  double psi_cp = 0.0;  // path tangent heading
  double kappa = 0.0;   // signed curvature, positive = left turn
  double s = 0.0;       // arc position
};

namespace detail {

// 32-point Gauss-Legendre nodes/weights on [-1, 1] (positive half; mirrored).
inline constexpr std::array<double, 16> kGaussNodes = {
    0.0483076656877383162348126, 0.1444719615827964934851864,
    0.2392873622521370745446032, 0.3318686022821276497799168,
    0.4213512761306353453641194, 0.5068999089322293900237475,
    0.5877157572407623290407455, 0.6630442669302152009751152,
    0.7321821187402896803874267, 0.7944837959679424069630973,
    0.8493676137325699701336930, 0.8963211557660521239653072,
    0.9349060759377396891709191, 0.9647622555875064307738119,
    0.9856115115452683354001750, 0.9972638618494815635449811};
inline constexpr std::array<double, 16> kGaussWeights = {
    0.0965400885147278005667648, 0.0956387200792748594190820,
    0.0938443990808045656391802, 0.0911738786957638847128686,
    0.0876520930044038111427715, 0.0833119242269467552221991,
    0.0781938957870703064717409, 0.0723457941088485062253994,
    0.0658222227763618468376501, 0.0586840934785355471452836,
    0.0509980592623761761961632, 0.0428358980222266806568786,
    0.0342738629130214331026877, 0.0253920653092620594557526,
    0.0162743947309056706051706, 0.0070186100094700966004071};

}  // namespace detail

// Interpolating cubic C2 spline through a 2D polyline. Natural end conditions,
// chord-length knots, re-indexed so all queries take true arc length.
class PathSpline {
 public:
  static PathSpline fit(const Polyline& points) {
    if (points.size() < 3) throw TooFewPoints("spline fit needs at least 3 points");
    for (size_t i = 1; i < points.size(); ++i) {
      if (distance(points[i - 1], points[i]) <= 1e-9)
        throw DegenerateInput("duplicate consecutive points in spline input");
    }
    PathSpline sp;
    const size_t n = points.size();
    sp.t_.resize(n);
    sp.t_[0] = 0.0;
    for (size_t i = 1; i < n; ++i)
      sp.t_[i] = sp.t_[i - 1] + distance(points[i - 1], points[i]);

    std::vector<double> xs(n), ys(n);
    for (size_t i = 0; i < n; ++i) {
      xs[i] = points[i].x;
      ys[i] = points[i].y;
    }
    sp.x_ = natural_cubic(sp.t_, xs);
    sp.y_ = natural_cubic(sp.t_, ys);

    // Re-index chord parameter to arc length.
    sp.s_.resize(n);
    sp.s_[0] = 0.0;
    for (size_t i = 0; i + 1 < n; ++i)
      sp.s_[i + 1] = sp.s_[i] + sp.arc_between(i, sp.t_[i], sp.t_[i + 1]);
    return sp;
  }

  double total_length() const { return s_.back(); }
  const std::vector<double>& knot_arcs() const { return s_; }
  size_t size() const { return s_.size(); }

  ControlPoint eval(double s) const {
    if (s < -1e-9 || s > total_length() + 1e-9)
      throw OutOfRange("spline query outside [0, total_length]");
    s = std::clamp(s, 0.0, total_length());
    const size_t seg = locate(s);
    const double t = invert_arc(seg, s - s_[seg]);
    return eval_at(t, s);
  }

  // Arc position of the point closest to p: coarse sampling followed by a
  // golden-section refinement. Ties break toward smaller s.
  double project(Point2 p) const {
    const double L = total_length();
    const double step = std::min(0.05, L / 8.0);
    double best_s = 0.0;
    double best_d = std::numeric_limits<double>::infinity();
    const int n = static_cast<int>(std::ceil(L / step));
    for (int i = 0; i <= n; ++i) {
      const double s = std::min(L, i * step);
      const double d = distance(eval(s).position, p);
      if (d < best_d - 1e-15) {
        best_d = d;
        best_s = s;
      }
    }
    double lo = std::max(0.0, best_s - step);
    double hi = std::min(L, best_s + step);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
    double fa = distance(eval(a).position, p), fb = distance(eval(b).position, p);
    while (hi - lo > 1e-6) {
      if (fa <= fb) {
        hi = b; b = a; fb = fa;
        a = hi - phi * (hi - lo);
        fa = distance(eval(a).position, p);
      } else {
        lo = a; a = b; fa = fb;
        b = lo + phi * (hi - lo);
        fb = distance(eval(b).position, p);
      }
    }
    return 0.5 * (lo + hi);
  }

  // Value/derivative continuity probes, used by the test suite.
  struct Probe {
    Point2 value, d1, d2;
  };
  Probe probe_at_chord(size_t seg, double t) const {
    Probe pr;
    pr.value = {poly(x_[seg], t), poly(y_[seg], t)};
    pr.d1 = {dpoly(x_[seg], t), dpoly(y_[seg], t)};
    pr.d2 = {ddpoly(x_[seg], t), ddpoly(y_[seg], t)};
    return pr;
  }
  const std::vector<double>& knot_chords() const { return t_; }

 private:
  // Cubic segment coefficients c0 + c1*(t-t0) + c2*(t-t0)^2 + c3*(t-t0)^3.
  struct Cubic {
    double c0, c1, c2, c3, t0;
  };

  std::vector<double> t_;  // chord-length knots
  std::vector<double> s_;  // arc-length knots
  std::vector<Cubic> x_, y_;

  static double poly(const Cubic& c, double t) {
    const double u = t - c.t0;
    return ((c.c3 * u + c.c2) * u + c.c1) * u + c.c0;
  }
  static double dpoly(const Cubic& c, double t) {
    const double u = t - c.t0;
    return (3.0 * c.c3 * u + 2.0 * c.c2) * u + c.c1;
  }
  static double ddpoly(const Cubic& c, double t) {
    const double u = t - c.t0;
    return 6.0 * c.c3 * u + 2.0 * c.c2;
  }

  static std::vector<Cubic> natural_cubic(const std::vector<double>& t,
                                          const std::vector<double>& v) {
    const size_t n = t.size();
    std::vector<double> h(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) h[i] = t[i + 1] - t[i];

    // Tridiagonal solve for second derivatives (natural: m0 = m_{n-1} = 0).
    std::vector<double> m(n, 0.0), l(n, 0.0), mu(n, 0.0), z(n, 0.0);
    l[0] = 1.0;
    for (size_t i = 1; i + 1 < n; ++i) {
      const double alpha =
          3.0 * ((v[i + 1] - v[i]) / h[i] - (v[i] - v[i - 1]) / h[i - 1]);
      l[i] = 2.0 * (t[i + 1] - t[i - 1]) - h[i - 1] * mu[i - 1];
      mu[i] = h[i] / l[i];
      z[i] = (alpha - h[i - 1] * z[i - 1]) / l[i];
    }
    for (size_t j = n - 1; j-- > 1;) m[j] = z[j] - mu[j] * m[j + 1];

    std::vector<Cubic> out(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) {
      out[i].t0 = t[i];
      out[i].c0 = v[i];
      out[i].c2 = m[i];
      out[i].c1 = (v[i + 1] - v[i]) / h[i] - h[i] * (m[i + 1] + 2.0 * m[i]) / 3.0;
      out[i].c3 = (m[i + 1] - m[i]) / (3.0 * h[i]);
    }
    return out;
  }

  double speed(size_t seg, double t) const {
    return std::hypot(dpoly(x_[seg], t), dpoly(y_[seg], t));
  }

  // Arc length of segment `seg` between chord parameters ta < tb.
  double arc_between(size_t seg, double ta, double tb) const {
    const double mid = 0.5 * (ta + tb), half = 0.5 * (tb - ta);
    double acc = 0.0;
    for (size_t k = 0; k < detail::kGaussNodes.size(); ++k) {
      const double dn = half * detail::kGaussNodes[k];
      acc += detail::kGaussWeights[k] * (speed(seg, mid - dn) + speed(seg, mid + dn));
    }
    return half * acc;
  }

  size_t locate(double s) const {
    size_t lo = 0, hi = s_.size() - 1;
    while (hi - lo > 1) {
      const size_t mid = (lo + hi) / 2;
      (s_[mid] <= s ? lo : hi) = mid;
    }
    return lo;
  }

  // Chord parameter within segment `seg` at local arc offset ds >= 0.
  double invert_arc(size_t seg, double ds) const {
    const double ta = t_[seg], tb = t_[seg + 1];
    if (ds <= 0.0) return ta;
    double lo = ta, hi = tb;
    double t = ta + (tb - ta) * ds / std::max(1e-12, s_[seg + 1] - s_[seg]);
    for (int it = 0; it < 60; ++it) {
      const double f = arc_between(seg, ta, t) - ds;
      if (std::abs(f) < 1e-12) break;
      (f > 0.0 ? hi : lo) = t;
      const double v = speed(seg, t);
      double next = (v > 1e-12) ? t - f / v : 0.5 * (lo + hi);
      if (next <= lo || next >= hi) next = 0.5 * (lo + hi);
      if (std::abs(next - t) < 1e-14) {
        t = next;
        break;
      }
      t = next;
    }
    return std::clamp(t, ta, tb);
  }

  ControlPoint eval_at(double t, double s) const {
    const size_t seg = locate_chord(t);
    const double dx = dpoly(x_[seg], t), dy = dpoly(y_[seg], t);
    const double ddx = ddpoly(x_[seg], t), ddy = ddpoly(y_[seg], t);
    ControlPoint cp;
    cp.position = {poly(x_[seg], t), poly(y_[seg], t)};
    cp.psi_cp = std::atan2(dy, dx);
    const double sp2 = dx * dx + dy * dy;
    cp.kappa = (dx * ddy - dy * ddx) / std::max(1e-18, sp2 * std::sqrt(sp2));
    cp.s = s;
    return cp;
  }

  size_t locate_chord(double t) const {
    size_t lo = 0, hi = t_.size() - 1;
    while (hi - lo > 1) {
      const size_t mid = (lo + hi) / 2;
      (t_[mid] <= t ? lo : hi) = mid;
    }
    return lo;
  }
};

}  // namespace raceloop
