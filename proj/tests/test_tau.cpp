#include <doctest.h>

#include "disturbance.hpp"
#include "equilibria.hpp"
#include "oracles.hpp"
#include "tau.hpp"

#include <cmath>
#include <numbers>

using namespace roa;

namespace {

Vec v2(double a, double b) {
  Vec x(2);
  x << a, b;
  return x;
}

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::kSchema;
}

// Unit ball at the saddle of the c3 = 1.3 pendulum.
Neighborhood reference_ball() {
  const auto s = oracle::pendulum_saddle(2.0, 1.3);
  return {v2(s[0], s[1]), 1.0};
}

struct Case {
  ModelPtr sys = make_system("pendulum");
  ParamPoint p;
  Vec y;
  Vec sep;
  Vec saddle;

  explicit Case(double c3) : p(sys->make_params({{"c3", c3}})) {
    y = disturbance_ic(p);
    const auto s = oracle::pendulum_sep(2.0, c3);
    const auto d = oracle::pendulum_saddle(2.0, c3);
    sep = v2(s[0], s[1]);
    saddle = v2(d[0], d[1]);
  }

  TauResult run(const Neighborhood& ball, const TauPolicy& pol = {}) const {
    return tau_in_neighborhood(*sys, y, p, ball, sep, {saddle}, pol);
  }
};

}  // namespace

TEST_CASE("time in the ball agrees with a Riemann sum") {
  const Neighborhood ball = reference_ball();
  for (double c3 : {1.5, 1.516, 1.532}) {
    const Case c(c3);
    const TauResult r = c.run(ball);
    const auto d = oracle::disturbance(2.0, 0.5, c3, 0.8);
    const auto ref = oracle::riemann_tau({2.0, 0.5, c3}, d, {ball.center[0], ball.center[1]},
                                         ball.radius, oracle::pendulum_sep(2.0, c3));
    REQUIRE(ref.settled);
    CHECK_FALSE(r.diverged);
    CHECK(r.recovered);
    CHECK(std::abs(r.total - ref.tau) <= 1e-3 * ref.tau);
    CHECK_FALSE(r.transversality_warning);
    // entries and exits alternate and bracket the intervals
    REQUIRE(r.crossings.size() == 2 * r.intervals.size());
    for (std::size_t i = 0; i < r.intervals.size(); ++i) {
      CHECK(r.crossings[2 * i].direction == -1);
      CHECK(r.crossings[2 * i + 1].direction == +1);
      CHECK(r.intervals[i].first < r.intervals[i].second);
    }
  }
}

TEST_CASE("frozen values along the fault path") {
  const Neighborhood ball = reference_ball();
  CHECK(Case(1.5).run(ball).total == doctest::Approx(2.490726).epsilon(1e-5));
  CHECK(Case(1.55).run(ball).total == doctest::Approx(3.971562).epsilon(1e-5));
  double prev = 0.0;
  for (double c3 : {1.5, 1.51, 1.52, 1.53, 1.54, 1.55, 1.56}) {
    const double t = Case(c3).run(ball).total;
    CHECK(t > prev);
    prev = t;
  }
}

TEST_CASE("orbit that misses the ball spends no time in it") {
  const Case c(1.5);
  const TauResult r = c.run({v2(-2.0, -3.0), 0.5});
  CHECK(r.total == 0.0);
  CHECK(r.intervals.empty());
  CHECK(r.recovered);
  CHECK(r.stop_reason == "stable equilibrium capture");
}

TEST_CASE("starting inside the ball") {
  const Case c(1.5);
  const Neighborhood ball{c.y, 0.2};
  const TauResult r = c.run(ball);
  CHECK(r.started_inside);
  REQUIRE_FALSE(r.intervals.empty());
  CHECK(r.intervals[0].first == 0.0);
  CHECK(r.total > 0.0);
}

TEST_CASE("ball containing the stable equilibrium gives an unbounded tail") {
  const Case c(1.5);
  TauPolicy pol;
  pol.t_max = 50.0;
  const TauResult r = c.run({c.sep, 0.3}, pol);
  CHECK(r.diverged);
  CHECK(r.truncated);
  CHECK(std::isinf(r.total));
  CHECK(std::isinf(r.intervals.back().second));
}

TEST_CASE("orbit on the stable manifold is captured by the saddle") {
  auto sys = make_system("pendulum");
  const ParamPoint p = sys->make_params({{"c3", 1.5}});
  const Equilibrium sad = find_equilibrium(*sys, v2(2.29, 0.0), p);
  const Window w{v2(-std::numbers::pi, -4.0), v2(std::numbers::pi, 4.0)};
  const BoundarySample b = trace_stable_manifold_2d(*sys, sad, p, 1e-6, w, 0.01);
  Vec y;
  for (std::size_t i = 0; i < b.points.size(); ++i) {
    if (std::abs(b.arclength[i] - 0.3) < 0.006) y = b.points[i];
  }
  REQUIRE(y.size() == 2);
  const Case c(1.5);
  const TauResult r = tau_in_neighborhood(*sys, y, p, {sad.x, 0.5}, c.sep, {sad.x});
  CHECK(r.diverged);
  CHECK_FALSE(r.truncated);
  CHECK(r.stop_reason == "saddle capture");
  CHECK(r.min_saddle_distance < 1e-3);
}

TEST_CASE("grazing orbit raises the transversality warning") {
  const Case c(1.5);
  // closest approach of the orbit to a point beside it
  const Trajectory traj = flow(*c.sys, c.y, c.p, 0.0, 0.5);
  const Vec q = traj.at(0.3);
  const Vec v = eval_field(*c.sys, q, c.p).normalized();
  const Vec n = v2(-v[1], v[0]);
  const double r0 = 0.05;
  const Vec center = q + r0 * n;
  double closest = INFINITY;
  for (int i = 0; i <= 5000; ++i) closest = std::min(closest, (traj.at(0.2 + 0.2 * i / 5000.0) - center).norm());
  TauPolicy pol;
  pol.margin_tol = 1e-2;
  const TauResult r = c.run({center, closest + 1e-7}, pol);
  REQUIRE(r.crossings.size() >= 2);
  CHECK(r.transversality_warning);
  CHECK(r.min_margin < 1e-2);
  const TransversalityReport rep = transversality_report(r, 1e-2);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.suggestion.empty());
  CHECK(transversality_report(Case(1.5).run(reference_ball())).pass);
}

TEST_CASE("tau argument errors") {
  const Case c(1.5);
  CHECK(code_of([&] { c.run({c.y + v2(1.0, 0.0), 1.0}); }) == ErrorCode::kDegenerateStart);
  CHECK(code_of([&] { c.run({c.y, 0.0}); }) == ErrorCode::kDomain);
  TauPolicy bad;
  bad.t_max = 0.0;
  CHECK(code_of([&] { c.run(reference_ball(), bad); }) == ErrorCode::kDomain);
}
