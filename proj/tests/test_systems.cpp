#include <doctest.h>

#include "systems.hpp"

#include <cmath>
#include <random>

using namespace roa;

namespace {

Vec v2(double a, double b) {
  Vec x(2);
  x << a, b;
  return x;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kDomain;
}

}  // namespace

TEST_CASE("catalog lists the three systems") {
  const auto ids = system_ids();
  CHECK(ids.size() == 3);
  for (const auto& id : ids) CHECK(make_system(id)->id() == id);
  CHECK(code_of([] { make_system("lorenz"); }) == ErrorCode::kSchema);
}

TEST_CASE("parameter schema is strict") {
  auto sys = make_system("pendulum");
  const ParamPoint p = sys->make_params();
  CHECK(p.get("c1") == 2.0);
  CHECK(p.get("c2") == 0.5);
  CHECK(p.get("c3") == 1.5);
  CHECK(p.get("c4") == 0.8);
  CHECK(code_of([&] { sys->make_params({{"c9", 1.0}}); }) == ErrorCode::kSchema);
  ParamPoint bad = p;
  bad.set("c3", NAN);
  CHECK(code_of([&] { sys->validate(bad); }) == ErrorCode::kDomain);
  bad.set("c3", 1e9);
  CHECK(code_of([&] { sys->validate(bad); }) == ErrorCode::kDomain);
  CHECK(code_of([&] { eval_field(*sys, v2(NAN, 0), p); }) == ErrorCode::kDomain);
  CHECK(code_of([&] { eval_field(*sys, Vec::Zero(3), p); }) == ErrorCode::kDomain);
}

TEST_CASE("parameter points built from foreign names fail validation") {
  auto sys = make_system("pendulum");
  const ParamPoint p({"c3", "c1", "c2", "c4"}, {1.5, 2.0, 0.5, 0.8});
  CHECK(code_of([&] { sys->validate(p); }) == ErrorCode::kSchema);
}

TEST_CASE("pendulum field matches the closed form") {
  auto sys = make_system("pendulum");
  const ParamPoint p = sys->make_params({{"c3", 1.2}});
  const Vec f = eval_field(*sys, v2(0.7, -0.3), p);
  CHECK(f[0] == doctest::Approx(-0.3).epsilon(1e-15));
  CHECK(f[1] == doctest::Approx(-2.0 * std::sin(0.7) + 0.5 * 0.3 + 1.2).epsilon(1e-15));

  auto fault = make_system("pendulum-fault");
  const Vec g = eval_field(*fault, v2(0.7, -0.3), p);
  CHECK(g[1] == doctest::Approx(0.5 * 0.3 + 1.2).epsilon(1e-15));
}

TEST_CASE("analytic Jacobians agree with finite differences") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (const std::string id : {"pendulum", "pendulum-fault"}) {
    auto sys = make_system(id);
    const ParamPoint p = sys->make_params({{"c3", 1.1}});
    for (int k = 0; k < 50; ++k) {
      const Vec x = v2(u(rng), u(rng));
      const Mat a = eval_jacobian(*sys, x, p);
      const Mat fd = finite_difference_jacobian(*sys, x, p);
      CHECK((a - fd).norm() <= 1e-5 * std::max(1.0, a.norm()));
    }
  }
  auto bump = make_system("bump1d");
  for (double pv : {-0.1, 0.0, 0.05}) {
    const ParamPoint p = bump->make_params({{"p", pv}});
    for (double x : {-2.7, -2.2, -1.2, -0.4, 0.3, 0.9, 1.4, 2.5, 2.9}) {
      const Mat a = eval_jacobian(*bump, Vec::Constant(1, x), p);
      const Mat fd = finite_difference_jacobian(*bump, Vec::Constant(1, x), p);
      CHECK(std::abs(a(0, 0) - fd(0, 0)) <= 1e-5 * std::max(1.0, std::abs(a(0, 0))));
    }
  }
}

TEST_CASE("bump function") {
  CHECK(bump(0.0, 1.5, 0.75) == doctest::Approx(0.5));
  CHECK(bump(0.0, 1.5, -0.1) == 1.0);
  CHECK(bump(0.0, 1.5, 0.0) == 1.0);
  CHECK(bump(0.0, 1.5, 1.5) == 0.0);
  CHECK(bump(0.0, 1.5, 2.0) == 0.0);
  double prev = 1.0;
  for (int i = 1; i < 150; ++i) {
    const double h = bump(0.0, 1.5, i * 0.01);
    CHECK(h <= prev);
    prev = h;
  }
  // log form stays finite where the plain form underflows
  CHECK(bump(2.0, 3.0, 2.9995) == 0.0);
  CHECK(std::isfinite(log_bump(2.0, 3.0, 2.9995)));
  CHECK(log_bump(2.0, 3.0, 2.9995) == doctest::Approx(-1.0 / 0.0005 + 1.0 / 0.9995));
  CHECK(log_bump(2.0, 3.0, 2.5) == doctest::Approx(std::log(bump(2.0, 3.0, 2.5))));
}

TEST_CASE("bump1d field shape") {
  auto sys = make_system("bump1d");
  const ParamPoint p0 = sys->make_params();
  auto f = [&](const ParamPoint& p, double x) {
    return eval_field(*sys, Vec::Constant(1, x), p)[0];
  };
  CHECK(f(p0, 0.0) == 0.0);
  CHECK(f(p0, 0.5) < 0.0);
  CHECK(f(p0, -0.5) > 0.0);
  CHECK(f(p0, 1.7) == 0.0);
  CHECK(f(p0, 2.5) == 0.0);
  const ParamPoint pp = sys->make_params({{"p", 0.01}});
  CHECK(f(pp, 2.5) > 0.0);
  CHECK(f(pp, -2.5) > 0.0);
  // the sign hook resolves what the plain field rounds to zero
  const Vec s = sys->field_sign(Vec::Constant(1, -2.0002), pp);
  CHECK(s[0] > 0.0);
  CHECK(sys->field_sign(Vec::Constant(1, 2.9998), pp)[0] > 0.0);
  CHECK(sys->field_sign(Vec::Constant(1, 1.7), p0)[0] == 0.0);
  CHECK(sys->field_sign(Vec::Constant(1, 3.5), pp)[0] == 0.0);
}

TEST_CASE("assignments parse") {
  const auto [n, v] = parse_assignment("c3=1.25");
  CHECK(n == "c3");
  CHECK(v == 1.25);
  CHECK(code_of([] { parse_assignment("c3"); }) == ErrorCode::kSchema);
  CHECK(code_of([] { parse_assignment("c3=abc"); }) == ErrorCode::kSchema);
}

TEST_CASE("stable equilibrium helper") {
  auto sys = make_system("pendulum");
  CHECK(pendulum_sep(sys->make_params())[0] == doctest::Approx(std::asin(0.75)));
  CHECK(code_of([&] { pendulum_sep(sys->make_params({{"c3", 2.5}})); }) == ErrorCode::kNoSep);
}
