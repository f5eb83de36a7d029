// Exercises the shared library through its C header only.
#include <doctest.h>

#include <roa/roa.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

namespace {

struct Sys {
  roa_system* s = nullptr;
  roa_params* p = nullptr;
  explicit Sys(const char* id) {
    REQUIRE(roa_system_create(id, &s) == ROA_OK);
    REQUIRE(roa_params_create(s, &p) == ROA_OK);
  }
  ~Sys() {
    roa_params_destroy(p);
    roa_system_destroy(s);
  }
};

}  // namespace

TEST_CASE("version, catalog and status names") {
  CHECK(std::strcmp(roa_version(), "0.1.0") == 0);
  CHECK(std::strcmp(roa_status_name(ROA_OK), "ok") == 0);
  CHECK(roa_system_catalog_size() == 3);
  CHECK(std::strcmp(roa_system_catalog_id(0), "pendulum") == 0);
  roa_system* s = nullptr;
  CHECK(roa_system_create("lorenz", &s) == ROA_E_SCHEMA);
  CHECK(s == nullptr);
  CHECK(std::string(roa_last_error()).find("lorenz") != std::string::npos);
  CHECK(roa_system_create(nullptr, &s) == ROA_E_INVALID_ARGUMENT);
}

TEST_CASE("parameters") {
  Sys sys("pendulum");
  CHECK(roa_system_dim(sys.s) == 2);
  CHECK(roa_system_param_count(sys.s) == 4);
  size_t idx = 9;
  double period = 0.0;
  CHECK(roa_system_angle(sys.s, &idx, &period) == 1);
  CHECK(idx == 0);
  CHECK(period == doctest::Approx(2.0 * M_PI));
  double v = 0.0;
  CHECK(roa_params_get(sys.p, "c3", &v) == ROA_OK);
  CHECK(v == 1.5);
  CHECK(roa_params_assign(sys.p, "c3=1.3") == ROA_OK);
  CHECK(roa_params_get(sys.p, "c3", &v) == ROA_OK);
  CHECK(v == 1.3);
  CHECK(roa_params_set(sys.p, "c9", 1.0) == ROA_E_SCHEMA);
  CHECK(roa_params_assign(sys.p, "c3") == ROA_E_SCHEMA);
  CHECK(roa_params_count(sys.p) == 4);
  CHECK(std::strcmp(roa_params_name(sys.p, 2), "c3") == 0);
  roa_params* q = nullptr;
  REQUIRE(roa_params_copy(sys.p, &q) == ROA_OK);
  CHECK(roa_params_value(q, 2) == 1.3);
  roa_params_destroy(q);
  CHECK(roa_params_validate(sys.s, sys.p) == ROA_OK);
}

TEST_CASE("field, jacobian and flow") {
  Sys sys("pendulum");
  const double x[2] = {0.3, -0.2};
  double f[2];
  REQUIRE(roa_field(sys.s, sys.p, x, f) == ROA_OK);
  CHECK(f[0] == -0.2);
  CHECK(f[1] == doctest::Approx(-2.0 * std::sin(0.3) + 0.1 + 1.5));
  double j[4];
  double jfd[4];
  REQUIRE(roa_jacobian(sys.s, sys.p, x, j) == ROA_OK);
  REQUIRE(roa_jacobian_fd(sys.s, sys.p, x, jfd) == ROA_OK);
  for (int i = 0; i < 4; ++i) CHECK(j[i] == doctest::Approx(jfd[i]).epsilon(1e-6));
  CHECK(j[1] == 1.0);  // row-major

  roa_trajectory* tr = nullptr;
  REQUIRE(roa_flow(sys.s, sys.p, x, 0.0, 2.0, 0.0, 0.0, &tr) == ROA_OK);
  CHECK(roa_trajectory_t_end(tr) == 2.0);
  CHECK(std::strcmp(roa_trajectory_status(tr), "completed") == 0);
  double mid[2];
  CHECK(roa_trajectory_eval(tr, 1.0, mid) == ROA_OK);
  CHECK(roa_trajectory_eval(tr, 3.0, mid) == ROA_E_DOMAIN);
  roa_trajectory* a = nullptr;
  roa_trajectory* b = nullptr;
  REQUIRE(roa_flow(sys.s, sys.p, x, 0.0, 1.0, 0.0, 0.0, &a) == ROA_OK);
  double xa[2];
  roa_trajectory_final(a, xa);
  REQUIRE(roa_flow(sys.s, sys.p, xa, 0.0, 1.0, 0.0, 0.0, &b) == ROA_OK);
  double xb[2];
  double xe[2];
  roa_trajectory_final(b, xb);
  roa_trajectory_final(tr, xe);
  CHECK(std::hypot(xb[0] - xe[0], xb[1] - xe[1]) < 1e-6);
  size_t rejected = 0;
  CHECK(roa_trajectory_steps(tr, &rejected) > 0);
  roa_trajectory_destroy(a);
  roa_trajectory_destroy(b);
  roa_trajectory_destroy(tr);
}

TEST_CASE("equilibria and branch") {
  Sys sys("pendulum");
  const double g[2] = {0.8, 0.0};
  roa_equilibrium* eq = nullptr;
  REQUIRE(roa_equilibrium_find(sys.s, sys.p, g, 0.0, &eq) == ROA_OK);
  double x[2];
  roa_equilibrium_state(eq, x);
  CHECK(x[0] == doctest::Approx(std::asin(0.75)).epsilon(1e-12));
  CHECK(roa_equilibrium_eigen_count(eq) == 2);
  CHECK(std::strcmp(roa_equilibrium_classification(eq), "StableHyperbolic") == 0);
  roa_branch* br = nullptr;
  REQUIRE(roa_branch_continue(sys.s, eq, "c3", 1.5, 2.5, 0.05, &br) == ROA_OK);
  CHECK(roa_branch_has_fold(br) == 1);
  double pf = 0.0;
  double m = 0.0;
  double xf[2];
  roa_branch_fold(br, &pf, &m, xf);
  CHECK(std::abs(pf - 2.0) < 1e-4);
  CHECK(roa_branch_size(br) > 5);
  roa_branch_destroy(br);
  roa_equilibrium_destroy(eq);
}

TEST_CASE("membership and boundaries") {
  Sys sys("pendulum");
  const roa_membership_policy pol = roa_membership_policy_default();
  CHECK(pol.delta == 1e-3);
  const double sep[2] = {std::asin(0.75), 0.0};
  const double x[2] = {0.5, 0.3};
  roa_verdict v = ROA_UNRESOLVED;
  double t = 0.0;
  REQUIRE(roa_classify_point(sys.s, sys.p, x, sep, &pol, &v, &t, nullptr) == ROA_OK);
  CHECK(v == ROA_RECOVERED);
  CHECK(std::strcmp(roa_verdict_name(v), "Recovered") == 0);

  const double g[2] = {2.3, 0.0};
  roa_equilibrium* sad = nullptr;
  REQUIRE(roa_equilibrium_find(sys.s, sys.p, g, 0.0, &sad) == ROA_OK);
  const double lo[2] = {-M_PI, -4.0};
  const double hi[2] = {M_PI, 4.0};
  roa_boundary* b = nullptr;
  REQUIRE(roa_boundary_trace_2d(sys.s, sad, sys.p, 1e-6, lo, hi, 0.01, 0.0, &b) == ROA_OK);
  CHECK(roa_boundary_dim(b) == 2);
  CHECK(roa_boundary_size(b) > 500);
  roa_cloud* c = nullptr;
  REQUIRE(roa_cloud_create(2, 0, &c) == ROA_OK);
  REQUIRE(roa_cloud_add_boundary(c, b) == ROA_OK);
  CHECK(roa_cloud_size(c) == roa_boundary_size(b));
  double d = -1.0;
  CHECK(roa_hausdorff(c, c, &d) == ROA_OK);
  CHECK(d == 0.0);
  roa_cloud_destroy(c);
  roa_boundary_destroy(b);
  roa_equilibrium_destroy(sad);

  Sys bump("bump1d");
  const double z = 0.0;
  roa_equilibrium* e = nullptr;
  REQUIRE(roa_equilibrium_find(bump.s, bump.p, &z, 0.0, &e) == ROA_OK);
  roa_boundary* b1 = nullptr;
  REQUIRE(roa_boundary_1d(bump.s, e, bump.p, -10.0, 10.0, 1e-10, nullptr, &b1) == ROA_OK);
  REQUIRE(roa_boundary_size(b1) == 2);
  double end = 0.0;
  roa_boundary_point(b1, 1, &end);
  CHECK(end == doctest::Approx(1.5).epsilon(1e-8));
  roa_boundary_destroy(b1);
  roa_equilibrium_destroy(e);
}

TEST_CASE("tau and the fault scenario") {
  Sys sys("pendulum");
  REQUIRE(roa_params_set(sys.p, "c3", 1.3) == ROA_OK);
  const char* free[] = {"c3"};
  const double lo = 1.0;
  const double hi = 2.5;
  roa_scenario* sc = nullptr;
  REQUIRE(roa_scenario_fault(sys.p, 1, free, &lo, &hi, &sc) == ROA_OK);
  CHECK(roa_scenario_dim(sc) == 1);
  CHECK(std::strcmp(roa_scenario_free_name(sc, 0), "c3") == 0);

  roa_equilibrium* sad = nullptr;
  REQUIRE(roa_scenario_saddle(sc, sys.p, &sad) == ROA_OK);
  double center[2];
  roa_equilibrium_state(sad, center);
  roa_equilibrium_destroy(sad);

  const double q = 1.5;
  roa_params* p15 = nullptr;
  REQUIRE(roa_scenario_at(sc, &q, &p15) == ROA_OK);
  const roa_tau_policy tp = roa_tau_policy_default();
  roa_tau_result* tr = nullptr;
  REQUIRE(roa_tau_at(sc, p15, center, 1.0, &tp, &tr) == ROA_OK);
  CHECK(roa_tau_total(tr) == doctest::Approx(2.490726).epsilon(1e-5));
  CHECK(roa_tau_diverged(tr) == 0);
  CHECK(roa_tau_recovered(tr) == 1);
  CHECK(roa_tau_crossing_count(tr) == 2 * roa_tau_interval_count(tr));
  roa_tau_destroy(tr);

  // the same through the direct entry point
  double y[2];
  REQUIRE(roa_disturbance_ic(p15, y) == ROA_OK);
  const double sep[2] = {std::asin(0.75), 0.0};
  const double saddle[2] = {M_PI - std::asin(0.75), 0.0};
  REQUIRE(roa_tau(sys.s, p15, y, center, 1.0, sep, saddle, 1, &tp, &tr) == ROA_OK);
  CHECK(roa_tau_total(tr) == doctest::Approx(2.490726).epsilon(1e-5));
  roa_tau_destroy(tr);
  CHECK(roa_tau(sys.s, p15, y, y, 0.0, sep, saddle, 1, &tp, &tr) == ROA_E_DOMAIN);

  roa_verdict v;
  int no_sep = 0;
  CHECK(roa_classify_param(sc, p15, &v, &no_sep, nullptr, nullptr) == ROA_OK);
  CHECK(v == ROA_RECOVERED);

  const double qa = 1.3;
  const double qb = 1.9;
  roa_params* pa = nullptr;
  roa_params* pb = nullptr;
  REQUIRE(roa_scenario_at(sc, &qa, &pa) == ROA_OK);
  REQUIRE(roa_scenario_at(sc, &qb, &pb) == ROA_OK);
  roa_bisect_result* br = nullptr;
  REQUIRE(roa_bisect(sc, pa, pb, 1e-8, &br) == ROA_OK);
  double ps[4];
  roa_bisect_p_star(br, ps);
  CHECK(std::abs(ps[2] - 1.5686679) < 1e-6);
  CHECK(roa_bisect_width(br) <= 1e-8);
  roa_bisect_destroy(br);
  CHECK(roa_bisect(sc, pb, pa, 1e-8, &br) == ROA_E_BRACKET);
  CHECK(std::string(roa_last_error()).find("bracket") != std::string::npos);

  roa_threshold_result* th = nullptr;
  REQUIRE(roa_threshold_search(sc, p15, pb, center, 1.0, 10.0, 0.0, 0.0, nullptr, &th) ==
          ROA_OK);
  CHECK(std::strcmp(roa_threshold_status(th), "threshold-reached") == 0);
  CHECK(roa_threshold_tau(th) >= 10.0);
  roa_threshold_destroy(th);

  const double dirs[2] = {1.0, -1.0};
  roa_recovery* rec = nullptr;
  REQUIRE(roa_recover(sc, &qa, dirs, 2, 1e-6, 2, &rec) == ROA_OK);
  CHECK(roa_recovery_ray_count(rec) == 2);
  CHECK(roa_recovery_ray_hit(rec, 0) == 1);
  CHECK(roa_recovery_ray_hit(rec, 1) == 0);
  CHECK(roa_recovery_nearest(rec) == 0);
  roa_recovery_destroy(rec);

  roa_params_destroy(pa);
  roa_params_destroy(pb);
  roa_params_destroy(p15);
  roa_scenario_destroy(sc);
}

namespace {

struct SampleCtx {
  const roa_system* sys;
};

roa_status sample_bump(const roa_params* p, roa_cloud* out, void* user) {
  const auto* ctx = static_cast<SampleCtx*>(user);
  const double z = 0.0;
  roa_equilibrium* e = nullptr;
  roa_status s = roa_equilibrium_find(ctx->sys, p, &z, 0.0, &e);
  if (s != ROA_OK) return s;
  roa_boundary* b = nullptr;
  s = roa_boundary_1d(ctx->sys, e, p, -10.0, 10.0, 1e-10, nullptr, &b);
  if (s == ROA_OK) s = roa_cloud_add_boundary(out, b);
  roa_cloud_set_infinity(out, 1);
  roa_boundary_destroy(b);
  roa_equilibrium_destroy(e);
  return s;
}

}  // namespace

TEST_CASE("set distances and sweeps") {
  roa_cloud* a = nullptr;
  roa_cloud* b = nullptr;
  REQUIRE(roa_cloud_create(1, 0, &a) == ROA_OK);
  REQUIRE(roa_cloud_create(1, 1, &b) == ROA_OK);
  const double zero = 0.0;
  roa_cloud_add(a, &zero);
  double d = 0.0;
  CHECK(roa_chabauty_distance(a, b, &d) == ROA_OK);
  CHECK(d == doctest::Approx(M_PI));
  CHECK(roa_hausdorff(a, b, &d) == ROA_E_DOMAIN);
  double u[2];
  roa_chabauty_embed(&zero, 1, u);
  CHECK(u[1] == doctest::Approx(-1.0));
  roa_cloud_destroy(a);
  roa_cloud_destroy(b);

  Sys sys("bump1d");
  SampleCtx ctx{sys.s};
  std::vector<roa_params*> grid;
  for (double v : {0.0, 0.01, -0.01}) {
    roa_params* p = nullptr;
    REQUIRE(roa_params_create(sys.s, &p) == ROA_OK);
    roa_params_set(p, "p", v);
    grid.push_back(p);
  }
  roa_metric_report* rep = nullptr;
  REQUIRE(roa_continuity_sweep(sample_bump, &ctx, 1, sys.p, grid.data(), grid.size(),
                               ROA_METRIC_CHABAUTY, 2, &rep) == ROA_OK);
  CHECK(roa_metric_report_rows(rep) == 3);
  CHECK(roa_metric_report_ref_size(rep) == 3);
  double values[1];
  double offset = 0.0;
  size_t nx = 0;
  size_t ny = 0;
  int ok = 0;
  roa_metric_report_row(rep, 1, values, &offset, &d, &nx, &ny, &ok);
  CHECK(ok == 1);
  CHECK(values[0] == 0.01);
  CHECK(d == doctest::Approx(2.0 * (std::atan(3.0) - std::atan(1.5))).epsilon(1e-8));
  const std::string path = "capi_sweep.csv";
  REQUIRE(roa_metric_report_write_csv(rep, path.c_str()) == ROA_OK);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "p,dist,nX,nY,metric,error");
  std::remove(path.c_str());
  roa_metric_report_destroy(rep);
  for (auto* p : grid) roa_params_destroy(p);
}

TEST_CASE("null handles are rejected") {
  double out[2];
  CHECK(roa_field(nullptr, nullptr, nullptr, out) == ROA_E_INVALID_ARGUMENT);
  CHECK(roa_disturbance_ic(nullptr, out) == ROA_E_INVALID_ARGUMENT);
  roa_system_destroy(nullptr);
  roa_params_destroy(nullptr);
}
