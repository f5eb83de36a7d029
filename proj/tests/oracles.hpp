#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library: fixed-step RK4, closed forms and brute-force sums.

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

namespace oracle {

using State2 = std::array<double, 2>;

struct Pendulum {
  double c1 = 2.0;
  double c2 = 0.5;
  double c3 = 1.5;

  State2 f(const State2& x) const {
    return {x[1], -c1 * std::sin(x[0]) - c2 * x[1] + c3};
  }
};

inline State2 rk4_step(const std::function<State2(const State2&)>& f, const State2& x, double h) {
  auto add = [](const State2& a, const State2& b, double s) {
    return State2{a[0] + s * b[0], a[1] + s * b[1]};
  };
  const State2 k1 = f(x);
  const State2 k2 = f(add(x, k1, h / 2));
  const State2 k3 = f(add(x, k2, h / 2));
  const State2 k4 = f(add(x, k3, h));
  return {x[0] + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
          x[1] + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
}

inline State2 rk4_flow(const std::function<State2(const State2&)>& f, State2 x, double t,
                       double h) {
  const int n = static_cast<int>(std::ceil(t / h));
  const double dt = t / n;
  for (int i = 0; i < n; ++i) x = rk4_step(f, x, dt);
  return x;
}

// Equilibria of the pendulum on (-pi, pi]: asin branch and its mirror.
inline State2 pendulum_sep(double c1, double c3) { return {std::asin(c3 / c1), 0.0}; }
inline State2 pendulum_saddle(double c1, double c3) {
  return {std::numbers::pi - std::asin(c3 / c1), 0.0};
}

// Linear fault dynamics x1' = x2, x2' = -c2 x2 + c3 solved by hand.
inline State2 disturbance(double c1, double c2, double c3, double c4) {
  const double x1e = std::asin(c3 / c1);
  const double e = std::exp(-c2 * c4);
  return {x1e + c3 / c2 * c4 - c3 / (c2 * c2) * (1.0 - e), c3 / c2 * (1.0 - e)};
}

// Riemann sum of time spent in the closed ball, midpoint sampling on a fixed
// RK4 grid. Stops once the orbit settles at `sep` (within tol for 5 time
// units) or at t_max.
struct RiemannTau {
  double tau = 0.0;
  bool settled = false;
};

inline RiemannTau riemann_tau(const Pendulum& sys, State2 y, const State2& center, double radius,
                              const State2& sep, double dt = 1e-4, double t_max = 200.0) {
  RiemannTau out;
  auto f = [&](const State2& x) { return sys.f(x); };
  auto inside = [&](const State2& x) {
    return std::hypot(x[0] - center[0], x[1] - center[1]) <= radius;
  };
  double settled_for = 0.0;
  const int n = static_cast<int>(t_max / dt);
  for (int i = 0; i < n; ++i) {
    const State2 mid = rk4_step(f, y, dt / 2);
    if (inside(mid)) out.tau += dt;
    y = rk4_step(f, y, dt);
    if (std::hypot(y[0] - sep[0], y[1] - sep[1]) < 1e-3) {
      settled_for += dt;
      if (settled_for > 5.0) {
        out.settled = true;
        break;
      }
    } else {
      settled_for = 0.0;
    }
  }
  return out;
}

// The stereographic image of x on S^1 sits at angle 2 atan x from the south
// pole; infinity is the north pole, angle pi.
inline double circle_distance(double x, double y) {
  const double ax = std::isinf(x) ? std::numbers::pi / 2 : std::atan(x);
  const double ay = std::isinf(y) ? std::numbers::pi / 2 : std::atan(y);
  const double d = 2.0 * std::abs(ax - ay);
  return std::min(d, 2.0 * std::numbers::pi - d);
}

inline double directed(const std::vector<double>& a, const std::vector<double>& b,
                       double (*d)(double, double)) {
  double worst = 0.0;
  for (double u : a) {
    double best = std::numeric_limits<double>::infinity();
    for (double v : b) best = std::min(best, d(u, v));
    worst = std::max(worst, best);
  }
  return worst;
}

// 1-D Chabauty distance with infinity appended to both sets.
inline double chabauty_1d(std::vector<double> a, std::vector<double> b) {
  const double inf = std::numeric_limits<double>::infinity();
  a.push_back(inf);
  b.push_back(inf);
  return std::max(directed(a, b, circle_distance), directed(b, a, circle_distance));
}

}  // namespace oracle
