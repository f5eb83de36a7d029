#include <doctest.h>

#include "equilibria.hpp"
#include "oracles.hpp"

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

}  // namespace

TEST_CASE("pendulum equilibria match the asin closed form") {
  auto sys = make_system("pendulum");
  for (double c3 : {0.0, 0.5, 1.3, 1.5, 1.9}) {
    const ParamPoint p = sys->make_params({{"c3", c3}});
    const auto sep = oracle::pendulum_sep(2.0, c3);
    const auto sad = oracle::pendulum_saddle(2.0, c3);
    const Equilibrium a = find_equilibrium(*sys, v2(sep[0] + 0.1, 0.05), p);
    const Equilibrium b = find_equilibrium(*sys, v2(sad[0] - 0.1, -0.05), p);
    CHECK(std::abs(a.x[0] - sep[0]) < 1e-9);
    CHECK(std::abs(a.x[1]) < 1e-9);
    CHECK(std::abs(b.x[0] - sad[0]) < 1e-9);
    CHECK(a.residual < 1e-10);
    CHECK(a.classification.kind == Stability::kStableHyperbolic);
    CHECK(a.classification.unstable_dim == 0);
    CHECK(b.classification.kind == Stability::kSaddle);
    CHECK(b.classification.unstable_dim == 1);
  }
}

TEST_CASE("default pendulum values") {
  auto sys = make_system("pendulum");
  const ParamPoint p = sys->make_params();
  const Equilibrium sep = find_equilibrium(*sys, v2(0.8, 0.0), p);
  const Equilibrium sad = find_equilibrium(*sys, v2(2.3, 0.0), p);
  CHECK(sep.x[0] == doctest::Approx(0.848062078981481).epsilon(1e-12));
  CHECK(sad.x[0] == doctest::Approx(2.293530574608312).epsilon(1e-12));
  // linearization eigenvalues: l^2 + c2 l + c1 cos x1 = 0
  const double k = 2.0 * std::cos(sad.x[0]);
  const double lu = (-0.5 + std::sqrt(0.25 - 4.0 * k)) / 2.0;
  REQUIRE(sad.eigenvalues.size() == 2);
  CHECK(sad.eigenvalues[1].real() == doctest::Approx(lu).epsilon(1e-9));
  CHECK(sad.min_abs_real() > 0.5);
}

TEST_CASE("classification from eigenvalues") {
  using C = std::complex<double>;
  CHECK(classify_eigenvalues({C(-1, 2), C(-1, -2)}).kind == Stability::kStableHyperbolic);
  const auto s = classify_eigenvalues({C(-1, 0), C(2, 0), C(3, 0)});
  CHECK(s.kind == Stability::kSaddle);
  CHECK(s.unstable_dim == 2);
  CHECK(classify_eigenvalues({C(-1, 0), C(1e-12, 0)}).kind == Stability::kNonHyperbolic);
  CHECK(classify_eigenvalues({C(1, 0), C(2, 0)}).kind == Stability::kSaddle);
  CHECK(classify_eigenvalues({C(-1e-7, 0)}, 1e-6).kind == Stability::kNonHyperbolic);
}

TEST_CASE("eigenvalues are sorted") {
  Mat m(3, 3);
  m << 0, 1, 0, -4, 0, 0, 0, 0, -3;
  const auto e = eigenvalues_of(m);
  REQUIRE(e.size() == 3);
  CHECK(e[0].real() == doctest::Approx(-3.0));
  CHECK(e[1].imag() == doctest::Approx(-2.0));
  CHECK(e[2].imag() == doctest::Approx(2.0));
}

TEST_CASE("newton failure and argument errors") {
  auto sys = make_system("pendulum");
  // no equilibria at all once c3 > c1
  CHECK(code_of([&] { find_equilibrium(*sys, v2(1.0, 0.0), sys->make_params({{"c3", 2.5}})); }) ==
        ErrorCode::kNotFound);
  CHECK(code_of([&] { find_equilibrium(*sys, Vec::Zero(3), sys->make_params()); }) ==
        ErrorCode::kDomain);
  NewtonOptions bad;
  bad.tol = -1.0;
  CHECK(code_of([&] { find_equilibrium(*sys, v2(1.0, 0.0), sys->make_params(), bad); }) ==
        ErrorCode::kDomain);
}

TEST_CASE("branch continuation stops at the saddle-node fold") {
  auto sys = make_system("pendulum");
  const ParamPoint p = sys->make_params();
  const Equilibrium sep = find_equilibrium(*sys, v2(0.8, 0.0), p);
  const EquilibriumBranch br = continue_branch(*sys, sep, "c3", 1.5, 2.5, 0.05);
  REQUIRE(br.fold.has_value());
  CHECK(std::abs(br.fold->p_fold - 2.0) < 1e-4);
  CHECK(std::abs(br.fold->x_fold[0] - std::numbers::pi / 2) < 1e-2);
  CHECK(br.fold->min_abs_real < 1e-2);
  CHECK_FALSE(br.incomplete);
  // the branch tracks the closed form up to the fold
  for (const auto& e : br.points) {
    const double c3 = e.p.get("c3");
    CHECK(c3 <= 2.0 + 1e-9);
    // sqrt-type sensitivity right at the fold
    const double tol = c3 < 1.99 ? 1e-8 : 1e-4;
    CHECK(std::abs(e.x[0] - oracle::pendulum_sep(2.0, std::min(c3, 2.0))[0]) < tol);
  }
}

TEST_CASE("branch over a regular range has no fold") {
  auto sys = make_system("pendulum");
  const ParamPoint p = sys->make_params({{"c3", 0.5}});
  const Equilibrium sep = find_equilibrium(*sys, v2(0.2, 0.0), p);
  const EquilibriumBranch br = continue_branch(*sys, sep, "c3", 0.5, 1.5, 0.1);
  CHECK_FALSE(br.fold.has_value());
  CHECK_FALSE(br.incomplete);
  REQUIRE(!br.points.empty());
  CHECK(br.points.back().p.get("c3") == doctest::Approx(1.5));
  // descending direction
  const EquilibriumBranch down = continue_branch(*sys, sep, "c3", 0.5, -0.5, 0.1);
  CHECK(down.points.back().p.get("c3") == doctest::Approx(-0.5));
}

TEST_CASE("branch argument errors") {
  auto sys = make_system("pendulum");
  const Equilibrium sep = find_equilibrium(*sys, v2(0.8, 0.0), sys->make_params());
  CHECK(code_of([&] { continue_branch(*sys, sep, "c9", 1.5, 2.5, 0.05); }) == ErrorCode::kSchema);
  CHECK(code_of([&] { continue_branch(*sys, sep, "c3", 1.5, 2.5, 0.0); }) == ErrorCode::kDomain);
}
