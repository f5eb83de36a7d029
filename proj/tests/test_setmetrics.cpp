#include <doctest.h>

#include "manifolds.hpp"
#include "oracles.hpp"
#include "setmetrics.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace roa;

namespace {

constexpr double kPi = std::numbers::pi;

Vec s1(double a) { return Vec::Constant(1, a); }

Vec v2(double a, double b) {
  Vec x(2);
  x << a, b;
  return x;
}

PointCloud line(std::initializer_list<double> xs, bool inf = false) {
  PointCloud c;
  for (double x : xs) c.points.push_back(s1(x));
  c.includes_infinity = inf;
  return c;
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

PointCloud random_cloud(std::mt19937& rng, int dim) {
  std::uniform_int_distribution<int> count(1, 12);
  std::normal_distribution<double> coord(0.0, 3.0);
  PointCloud c;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    Vec x(dim);
    for (int k = 0; k < dim; ++k) x[k] = coord(rng);
    c.points.push_back(x);
  }
  return c;
}

}  // namespace

TEST_CASE("hausdorff on small examples") {
  CHECK(hausdorff(line({0.0}), line({1.0})) == 1.0);
  CHECK(hausdorff(line({0.0, 1.0}), line({0.0})) == 1.0);
  CHECK(hausdorff(line({0.0, 10.0}), line({0.0, 9.0, 10.0})) == 1.0);
  PointCloud a;
  a.points = {v2(0, 0), v2(1, 0)};
  PointCloud b;
  b.points = {v2(0, 1)};
  CHECK(hausdorff(a, b) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("hausdorff rejects what it cannot measure") {
  CHECK(code_of([] { hausdorff(PointCloud{}, line({1.0})); }) == ErrorCode::kDomain);
  CHECK(code_of([] { hausdorff(line({1.0}, true), line({1.0})); }) == ErrorCode::kDomain);
  PointCloud b;
  b.points = {v2(0, 1)};
  CHECK(code_of([&] { hausdorff(line({1.0}), b); }) == ErrorCode::kDomain);
}

TEST_CASE("stereographic embedding") {
  std::mt19937 rng(11);
  std::normal_distribution<double> g(0.0, 5.0);
  for (int i = 0; i < 50; ++i) {
    const Vec x = v2(g(rng), g(rng));
    const Vec u = chabauty_embed(x);
    CHECK(u.size() == 3);
    CHECK(u.norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
  // origin to the south pole, infinity at the north pole
  const Vec south = chabauty_embed(Vec::Zero(2));
  CHECK(south[2] == doctest::Approx(-1.0));
  const Vec north = chabauty_infinity(2);
  CHECK(north[2] == 1.0);
  CHECK(great_circle(south, north) == doctest::Approx(kPi));
  // far points approach the north pole
  CHECK(great_circle(chabauty_embed(v2(1e8, 0.0)), north) < 1e-7);
}

TEST_CASE("chabauty on the line matches the circle oracle") {
  std::mt19937 rng(5);
  std::normal_distribution<double> g(0.0, 4.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> xs;
    std::vector<double> ys;
    PointCloud a;
    PointCloud b;
    for (int i = 0; i < 1 + trial % 6; ++i) {
      xs.push_back(g(rng));
      a.points.push_back(s1(xs.back()));
    }
    for (int i = 0; i < 1 + trial % 4; ++i) {
      ys.push_back(g(rng));
      b.points.push_back(s1(ys.back()));
    }
    CHECK(chabauty_distance(a, b) == doctest::Approx(oracle::chabauty_1d(xs, ys)).epsilon(1e-12));
  }
}

TEST_CASE("chabauty edge cases") {
  PointCloud empty;
  empty.includes_infinity = true;
  CHECK(chabauty_distance(line({0.0}), empty) == doctest::Approx(kPi));
  CHECK(chabauty_distance(empty, empty) == 0.0);
  CHECK(chabauty_distance(line({1.0}), line({1.0})) == 0.0);
  // distant points are close in the compactification
  CHECK(chabauty_distance(line({1e6}), line({2e6})) < 1e-5);
  CHECK(hausdorff(line({1e6}), line({2e6})) == 1e6);
  CHECK(code_of([] { chabauty_distance(PointCloud{}, line({1.0})); }) == ErrorCode::kDomain);
}

TEST_CASE("metric axioms on random clouds") {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 1 + trial % 3;
    const PointCloud a = random_cloud(rng, dim);
    const PointCloud b = random_cloud(rng, dim);
    const PointCloud c = random_cloud(rng, dim);
    for (Metric m : {Metric::kHausdorff, Metric::kChabauty}) {
      const double ab = set_distance(a, b, m);
      const double ba = set_distance(b, a, m);
      const double ac = set_distance(a, c, m);
      const double bc = set_distance(b, c, m);
      CHECK(set_distance(a, a, m) == 0.0);
      CHECK(ab >= 0.0);
      CHECK(ab == ba);
      CHECK(ac <= ab + bc + 1e-12);
      if (m == Metric::kChabauty) CHECK(ab <= kPi + 1e-12);
    }
  }
}

TEST_CASE("metric names") {
  CHECK(parse_metric("hausdorff") == Metric::kHausdorff);
  CHECK(parse_metric("chabauty") == Metric::kChabauty);
  CHECK(std::string(to_string(Metric::kChabauty)) == "chabauty");
  CHECK(code_of([] { parse_metric("l2"); }) == ErrorCode::kDomain);
}

TEST_CASE("continuity sweep bookkeeping") {
  auto sys = make_system("bump1d");
  const CloudSampler sampler = [&](const ParamPoint& p) {
    const double v = p.get("p");
    if (v > 0.1) throw Error(ErrorCode::kDomain, "sample failed");
    return line({-1.0 - v, 1.0 + v});
  };
  std::vector<ParamPoint> grid;
  for (double v : {0.03, -0.01, 0.01, 0.0, 0.15, -0.03}) grid.push_back(sys->make_params({{"p", v}}));
  const ParamPoint p0 = sys->make_params();
  const MetricReport seq = continuity_sweep(sampler, p0, grid, Metric::kHausdorff, 1);
  const MetricReport par = continuity_sweep(sampler, p0, grid, Metric::kHausdorff, 4);
  REQUIRE(seq.rows.size() == 6);
  CHECK(seq.n_ref == 2);
  // sorted by offset, ties in grid order
  const std::vector<double> order{0.0, -0.01, 0.01, 0.03, -0.03, 0.15};
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(seq.rows[i].p.get("p") == order[i]);
    CHECK(par.rows[i].p.get("p") == order[i]);
    if (seq.rows[i].ok) CHECK(seq.rows[i].distance == par.rows[i].distance);
  }
  CHECK(seq.rows[0].distance == 0.0);
  CHECK(seq.rows[3].distance == doctest::Approx(0.03));
  CHECK_FALSE(seq.rows[5].ok);
  CHECK(std::isnan(seq.rows[5].distance));
  CHECK(seq.rows[5].error.find("sample failed") != std::string::npos);

  const MetricReport one = continuity_sweep(sampler, p0, {p0}, Metric::kChabauty);
  REQUIRE(one.rows.size() == 1);
  CHECK(one.rows[0].distance == 0.0);

  const ParamPoint bad = sys->make_params({{"p", 0.12}});
  CHECK(code_of([&] { continuity_sweep(sampler, bad, grid, Metric::kHausdorff); }) ==
        ErrorCode::kDomain);

  std::ostringstream csv;
  write_metric_csv(csv, seq);
  const std::string text = csv.str();
  CHECK(text.rfind("p,dist,nX,nY,metric,error\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 7);
}

TEST_CASE("bump1d boundary jumps under chabauty but not at the reference") {
  auto sys = make_system("bump1d");
  const Window w{s1(-10.0), s1(10.0)};
  const CloudSampler sampler = [&](const ParamPoint& p) {
    const Equilibrium sep = find_equilibrium(*sys, Vec::Zero(1), p);
    const BoundarySample b = boundary_1d(*sys, sep, p, w, 1e-10);
    PointCloud c;
    c.points = b.points;
    c.includes_infinity = true;
    return c;
  };
  std::vector<ParamPoint> grid;
  for (double v : {-0.02, -0.01, -0.001, 0.0, 0.001, 0.01, 0.02}) {
    grid.push_back(sys->make_params({{"p", v}}));
  }
  const MetricReport r = continuity_sweep(sampler, sys->make_params(), grid, Metric::kChabauty);
  const double floor = 2.0 * (std::atan(3.0) - std::atan(1.5));
  for (const MetricRow& row : r.rows) {
    REQUIRE(row.ok);
    if (row.offset == 0.0) {
      CHECK(row.distance < 1e-9);
    } else {
      CHECK(row.distance == doctest::Approx(floor).epsilon(1e-8));
    }
  }
}
