#include "roa/roa.h"

#include "disturbance.hpp"
#include "recovery.hpp"
#include "setmetrics.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>

#ifndef ROA_VERSION
#define ROA_VERSION "0.0.0"
#endif

using namespace roa;

struct roa_system {
  ModelPtr model;
};
struct roa_params {
  ParamPoint p;
};
struct roa_trajectory {
  Trajectory traj;
};
struct roa_equilibrium {
  Equilibrium eq;
  std::string cls;
};
struct roa_branch {
  EquilibriumBranch branch;
  std::vector<roa_equilibrium> points;
};
struct roa_boundary {
  BoundarySample sample;
  std::size_t dim = 0;
};
struct roa_tau_result {
  TauResult tau;
  bool no_sep = false;
};
struct roa_scenario {
  Scenario sc;
};
struct roa_bisect_result {
  BisectResult r;
};
struct roa_threshold_result {
  ThresholdResult r;
};
struct roa_recovery {
  RecoveryEstimate r;
};
struct roa_cloud {
  PointCloud cloud;
  std::size_t dim = 0;
};
struct roa_metric_report {
  MetricReport report;
};

namespace {

thread_local std::string last_error;

struct NullArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

roa_status map_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::kSchema: return ROA_E_SCHEMA;
    case ErrorCode::kDomain: return ROA_E_DOMAIN;
    case ErrorCode::kNotFound: return ROA_E_NOT_FOUND;
    case ErrorCode::kFoldSuspected: return ROA_E_FOLD_SUSPECTED;
    case ErrorCode::kPrecondition: return ROA_E_PRECONDITION;
    case ErrorCode::kIntegration: return ROA_E_INTEGRATION;
    case ErrorCode::kEventLocalization: return ROA_E_EVENT_LOCALIZATION;
    case ErrorCode::kNoSep: return ROA_E_NO_SEP;
    case ErrorCode::kDegenerateStart: return ROA_E_DEGENERATE_START;
    case ErrorCode::kParity: return ROA_E_PARITY;
    case ErrorCode::kBracket: return ROA_E_BRACKET;
    case ErrorCode::kInconsistentPolicy: return ROA_E_INCONSISTENT_POLICY;
  }
  return ROA_E_INTERNAL;
}

roa_status fail(roa_status s, std::string msg) {
  last_error = std::move(msg);
  return s;
}

template <typename F>
roa_status guard(F&& f) {
  try {
    f();
    last_error.clear();
    return ROA_OK;
  } catch (const NullArgument& e) {
    return fail(ROA_E_INVALID_ARGUMENT, e.what());
  } catch (const Error& e) {
    return fail(map_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(ROA_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(ROA_E_INTERNAL, e.what());
  }
}

void need(const void* ptr, const char* what) {
  if (ptr == nullptr) throw NullArgument(std::string("null argument: ") + what);
}

Vec vec_of(const double* x, std::size_t n) {
  return Eigen::Map<const Vec>(x, static_cast<Eigen::Index>(n));
}

void copy_out(const Vec& v, double* out) {
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v[i];
}

Tolerance tol_of(double rtol, double atol) {
  Tolerance t;
  if (rtol > 0.0) t.rel = rtol;
  if (atol > 0.0) t.abs = atol;
  return t;
}

MembershipPolicy membership_of(const roa_membership_policy* p) {
  MembershipPolicy m;
  if (p == nullptr) return m;
  m.delta = p->delta;
  m.t_max = p->t_max;
  m.r_escape = p->r_escape;
  m.check_horizon = p->check_horizon;
  m.tol = tol_of(p->rtol, p->atol);
  if (!(m.delta > 0.0) || !(m.t_max > 0.0) || !(m.r_escape > 0.0) || m.check_horizon < 0.0) {
    throw Error(ErrorCode::kDomain, "invalid membership policy");
  }
  return m;
}

TauPolicy tau_policy_of(const roa_tau_policy* p, const TauPolicy& fallback) {
  if (p == nullptr) return fallback;
  TauPolicy t;
  t.delta = p->delta;
  t.t_max = p->t_max;
  t.saddle_capture = p->saddle_capture;
  t.margin_tol = p->margin_tol;
  t.r_escape = p->r_escape;
  t.tol = tol_of(p->rtol, p->atol);
  if (!(t.delta > 0.0) || !(t.t_max > 0.0) || !(t.saddle_capture > 0.0) ||
      !(t.r_escape > 0.0) || t.margin_tol < 0.0) {
    throw Error(ErrorCode::kDomain, "invalid tau policy");
  }
  return t;
}

roa_equilibrium wrap(Equilibrium eq) {
  roa_equilibrium w;
  w.cls = to_string(eq.classification);
  w.eq = std::move(eq);
  return w;
}

}  // namespace

extern "C" {

const char* roa_version(void) { return ROA_VERSION; }

const char* roa_status_name(roa_status status) {
  switch (status) {
    case ROA_OK: return "ok";
    case ROA_E_SCHEMA: return "schema";
    case ROA_E_DOMAIN: return "domain";
    case ROA_E_NOT_FOUND: return "not-found";
    case ROA_E_FOLD_SUSPECTED: return "fold-suspected";
    case ROA_E_PRECONDITION: return "precondition";
    case ROA_E_INTEGRATION: return "integration";
    case ROA_E_EVENT_LOCALIZATION: return "event-localization";
    case ROA_E_NO_SEP: return "no-sep";
    case ROA_E_DEGENERATE_START: return "degenerate-start";
    case ROA_E_PARITY: return "parity";
    case ROA_E_BRACKET: return "bracket";
    case ROA_E_INCONSISTENT_POLICY: return "inconsistent-policy";
    case ROA_E_INVALID_ARGUMENT: return "invalid-argument";
    case ROA_E_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* roa_last_error(void) { return last_error.c_str(); }

/* systems */

size_t roa_system_catalog_size(void) { return system_ids().size(); }

const char* roa_system_catalog_id(size_t index) {
  static const std::vector<std::string> ids = system_ids();
  return index < ids.size() ? ids[index].c_str() : nullptr;
}

roa_status roa_system_create(const char* id, roa_system** out) {
  return guard([&] {
    need(id, "id");
    need(out, "out");
    *out = new roa_system{make_system(id)};
  });
}

void roa_system_destroy(roa_system* system) { delete system; }

const char* roa_system_id(const roa_system* system) { return system->model->id().data(); }

size_t roa_system_dim(const roa_system* system) {
  return static_cast<size_t>(system->model->dim());
}

size_t roa_system_param_count(const roa_system* system) {
  return system->model->schema().size();
}

int roa_system_angle(const roa_system* system, size_t* index, double* period) {
  const auto a = system->model->angle();
  if (!a) return 0;
  if (index) *index = static_cast<size_t>(a->index);
  if (period) *period = a->period;
  return 1;
}

roa_status roa_system_param_info(const roa_system* system, size_t index, const char** name,
                                 double* default_value, double* lo, double* hi) {
  return guard([&] {
    need(system, "system");
    const auto& schema = system->model->schema();
    if (index >= schema.size()) throw Error(ErrorCode::kDomain, "parameter index out of range");
    const ParamSpec& s = schema[index];
    if (name) *name = s.name.c_str();
    if (default_value) *default_value = s.default_value;
    if (lo) *lo = s.lo;
    if (hi) *hi = s.hi;
  });
}

roa_status roa_params_create(const roa_system* system, roa_params** out) {
  return guard([&] {
    need(system, "system");
    need(out, "out");
    *out = new roa_params{system->model->make_params({})};
  });
}

roa_status roa_params_copy(const roa_params* params, roa_params** out) {
  return guard([&] {
    need(params, "params");
    need(out, "out");
    *out = new roa_params{params->p};
  });
}

void roa_params_destroy(roa_params* params) { delete params; }

roa_status roa_params_set(roa_params* params, const char* name, double value) {
  return guard([&] {
    need(params, "params");
    need(name, "name");
    if (!params->p.has(name)) {
      throw Error(ErrorCode::kSchema, std::string("unknown parameter '") + name + "'");
    }
    params->p.set(name, value);
  });
}

roa_status roa_params_assign(roa_params* params, const char* assignment) {
  return guard([&] {
    need(params, "params");
    need(assignment, "assignment");
    const auto [name, value] = parse_assignment(assignment);
    if (!params->p.has(name)) {
      throw Error(ErrorCode::kSchema, "unknown parameter '" + name + "'");
    }
    params->p.set(name, value);
  });
}

roa_status roa_params_get(const roa_params* params, const char* name, double* out) {
  return guard([&] {
    need(params, "params");
    need(name, "name");
    need(out, "out");
    *out = params->p.get(name);
  });
}

size_t roa_params_count(const roa_params* params) { return params->p.size(); }

const char* roa_params_name(const roa_params* params, size_t index) {
  return index < params->p.size() ? params->p.names()[index].c_str() : nullptr;
}

double roa_params_value(const roa_params* params, size_t index) {
  return index < params->p.size() ? params->p[index] : NAN;
}

roa_status roa_params_validate(const roa_system* system, const roa_params* params) {
  return guard([&] {
    need(system, "system");
    need(params, "params");
    system->model->validate(params->p);
  });
}

roa_status roa_field(const roa_system* system, const roa_params* params, const double* x,
                     double* out) {
  return guard([&] {
    need(system, "system");
    need(params, "params");
    need(x, "x");
    need(out, "out");
    copy_out(eval_field(*system->model, vec_of(x, roa_system_dim(system)), params->p), out);
  });
}

namespace {
void copy_matrix(const Mat& m, double* out) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[i * m.cols() + j] = m(i, j);
  }
}
}  // namespace

roa_status roa_jacobian(const roa_system* system, const roa_params* params, const double* x,
                        double* out) {
  return guard([&] {
    need(system, "system");
    need(params, "params");
    need(x, "x");
    need(out, "out");
    copy_matrix(eval_jacobian(*system->model, vec_of(x, roa_system_dim(system)), params->p),
                out);
  });
}

roa_status roa_jacobian_fd(const roa_system* system, const roa_params* params,
                           const double* x, double* out) {
  return guard([&] {
    need(system, "system");
    need(params, "params");
    need(x, "x");
    need(out, "out");
    const Vec xv = vec_of(x, roa_system_dim(system));
    system->model->validate(params->p);
    system->model->validate_state(xv);
    copy_matrix(finite_difference_jacobian(*system->model, xv, params->p), out);
  });
}

/* integration */

roa_status roa_flow(const roa_system* system, const roa_params* params, const double* x0,
                    double t0, double t1, double rtol, double atol, roa_trajectory** out) {
  return guard([&] {
    need(system, "system");
    need(params, "params");
    need(x0, "x0");
    need(out, "out");
    auto traj = flow(*system->model, vec_of(x0, roa_system_dim(system)), params->p, t0, t1,
                     tol_of(rtol, atol));
    *out = new roa_trajectory{std::move(traj)};
  });
}

void roa_trajectory_destroy(roa_trajectory* traj) { delete traj; }

double roa_trajectory_t_end(const roa_trajectory* traj) { return traj->traj.t_end(); }

const char* roa_trajectory_status(const roa_trajectory* traj) {
  return to_string(traj->traj.status);
}

roa_status roa_trajectory_eval(const roa_trajectory* traj, double t, double* out) {
  return guard([&] {
    need(traj, "trajectory");
    need(out, "out");
    copy_out(traj->traj.at(t), out);
  });
}

void roa_trajectory_final(const roa_trajectory* traj, double* out) {
  copy_out(traj->traj.final_state(), out);
}

size_t roa_trajectory_steps(const roa_trajectory* traj, size_t* rejected) {
  if (rejected) *rejected = traj->traj.rejected;
  return traj->traj.accepted;
}

roa_status roa_trajectory_write_csv(const roa_trajectory* traj, const char* path,
                                    double stride) {
  return guard([&] {
    need(traj, "trajectory");
    need(path, "path");
    std::ofstream f(path);
    if (!f) throw Error(ErrorCode::kDomain, std::string("cannot open ") + path);
    write_trajectory_csv(f, traj->traj, stride);
  });
}

roa_status roa_disturbance_ic(const roa_params* params, double* out) {
  return guard([&] {
    need(params, "params");
    need(out, "out");
    copy_out(disturbance_ic(params->p), out);
  });
}

roa_status roa_disturbance_ic_closed_form(const roa_params* params, double* out) {
  return guard([&] {
    need(params, "params");
    need(out, "out");
    copy_out(disturbance_ic_closed_form(params->p), out);
  });
}

/* equilibria */

roa_status roa_equilibrium_find(const roa_system* system, const roa_params* params,
                                const double* guess, double newton_tol,
                                roa_equilibrium** out) {
  return guard([&] {
    need(system, "system");
    need(params, "params");
    need(guess, "guess");
    need(out, "out");
    NewtonOptions opts;
    if (newton_tol > 0.0) opts.tol = newton_tol;
    auto eq = find_equilibrium(*system->model, vec_of(guess, roa_system_dim(system)), params->p,
                               opts);
    *out = new roa_equilibrium(wrap(std::move(eq)));
  });
}

void roa_equilibrium_destroy(roa_equilibrium* eq) { delete eq; }

void roa_equilibrium_state(const roa_equilibrium* eq, double* out) { copy_out(eq->eq.x, out); }

double roa_equilibrium_residual(const roa_equilibrium* eq) { return eq->eq.residual; }

size_t roa_equilibrium_eigen_count(const roa_equilibrium* eq) {
  return eq->eq.eigenvalues.size();
}

void roa_equilibrium_eigenvalue(const roa_equilibrium* eq, size_t index, double* re,
                                double* im) {
  const auto& l = eq->eq.eigenvalues.at(index);
  if (re) *re = l.real();
  if (im) *im = l.imag();
}

const char* roa_equilibrium_classification(const roa_equilibrium* eq) { return eq->cls.c_str(); }

int roa_equilibrium_unstable_dim(const roa_equilibrium* eq) {
  return eq->eq.classification.unstable_dim;
}

roa_status roa_branch_continue(const roa_system* system, const roa_equilibrium* start,
                               const char* p_name, double p_lo, double p_hi, double step,
                               roa_branch** out) {
  return guard([&] {
    need(system, "system");
    need(start, "start");
    need(p_name, "p_name");
    need(out, "out");
    auto b = std::make_unique<roa_branch>();
    b->branch = continue_branch(*system->model, start->eq, p_name, p_lo, p_hi, step);
    for (const auto& e : b->branch.points) b->points.push_back(wrap(e));
    *out = b.release();
  });
}

void roa_branch_destroy(roa_branch* branch) { delete branch; }

size_t roa_branch_size(const roa_branch* branch) { return branch->points.size(); }

const roa_equilibrium* roa_branch_point(const roa_branch* branch, size_t index) {
  return index < branch->points.size() ? &branch->points[index] : nullptr;
}

double roa_branch_param(const roa_branch* branch, size_t index) {
  return branch->branch.points.at(index).p.get(branch->branch.p_name);
}

int roa_branch_has_fold(const roa_branch* branch) { return branch->branch.fold ? 1 : 0; }

void roa_branch_fold(const roa_branch* branch, double* p_fold, double* min_abs_real,
                     double* x_fold) {
  if (!branch->branch.fold) return;
  const Fold& f = *branch->branch.fold;
  if (p_fold) *p_fold = f.p_fold;
  if (min_abs_real) *min_abs_real = f.min_abs_real;
  if (x_fold) copy_out(f.x_fold, x_fold);
}

int roa_branch_incomplete(const roa_branch* branch) { return branch->branch.incomplete ? 1 : 0; }

const char* roa_branch_note(const roa_branch* branch) { return branch->branch.note.c_str(); }

/* membership and boundaries */

roa_membership_policy roa_membership_policy_default(void) {
  const MembershipPolicy m;
  return {m.delta, m.t_max, m.r_escape, m.check_horizon, m.tol.rel, m.tol.abs};
}

const char* roa_verdict_name(roa_verdict verdict) {
  switch (verdict) {
    case ROA_RECOVERED: return "Recovered";
    case ROA_ESCAPED: return "Escaped";
    case ROA_UNRESOLVED: return "Unresolved";
  }
  return "unknown";
}

roa_status roa_classify_point(const roa_system* system, const roa_params* params,
                              const double* x, const double* sep,
                              const roa_membership_policy* policy, roa_verdict* verdict,
                              double* t, double* final_state) {
  return guard([&] {
    need(system, "system");
    need(params, "params");
    need(x, "x");
    need(sep, "sep");
    need(verdict, "verdict");
    const std::size_t n = roa_system_dim(system);
    const auto r = classify_point(*system->model, vec_of(x, n), params->p, vec_of(sep, n),
                                  membership_of(policy));
    *verdict = static_cast<roa_verdict>(static_cast<int>(r.verdict));
    if (t) *t = r.t;
    if (final_state && r.final_state.size() > 0) copy_out(r.final_state, final_state);
  });
}

roa_status roa_boundary_trace_2d(const roa_system* system, const roa_equilibrium* saddle,
                                 const roa_params* params, double eps,
                                 const double* window_lo, const double* window_hi,
                                 double stride, double arclength_budget, roa_boundary** out) {
  return guard([&] {
    need(system, "system");
    need(saddle, "saddle");
    need(params, "params");
    need(window_lo, "window_lo");
    need(window_hi, "window_hi");
    need(out, "out");
    const std::size_t n = roa_system_dim(system);
    Window w{vec_of(window_lo, n), vec_of(window_hi, n)};
    TraceOptions opts;
    if (arclength_budget > 0.0) opts.arclength_budget = arclength_budget;
    auto b = trace_stable_manifold_2d(*system->model, saddle->eq, params->p, eps, w, stride,
                                      opts);
    *out = new roa_boundary{std::move(b), n};
  });
}

roa_status roa_boundary_1d(const roa_system* system, const roa_equilibrium* sep,
                           const roa_params* params, double window_lo, double window_hi,
                           double tol, const roa_membership_policy* policy,
                           roa_boundary** out) {
  return guard([&] {
    need(system, "system");
    need(sep, "sep");
    need(params, "params");
    need(out, "out");
    Window w{Vec::Constant(1, window_lo), Vec::Constant(1, window_hi)};
    auto b = boundary_1d(*system->model, sep->eq, params->p, w, tol, membership_of(policy));
    *out = new roa_boundary{std::move(b), 1};
  });
}

void roa_boundary_destroy(roa_boundary* boundary) { delete boundary; }

size_t roa_boundary_dim(const roa_boundary* boundary) { return boundary->dim; }

size_t roa_boundary_size(const roa_boundary* boundary) { return boundary->sample.points.size(); }

void roa_boundary_point(const roa_boundary* boundary, size_t index, double* out) {
  copy_out(boundary->sample.points.at(index), out);
}

double roa_boundary_arclength(const roa_boundary* boundary, size_t index) {
  const auto& a = boundary->sample.arclength;
  return index < a.size() ? a[index] : NAN;
}

int roa_boundary_partial(const roa_boundary* boundary) {
  return boundary->sample.partial ? 1 : 0;
}

const char* roa_boundary_note(const roa_boundary* boundary) {
  return boundary->sample.note.c_str();
}

/* tau */

roa_tau_policy roa_tau_policy_default(void) {
  const TauPolicy t;
  return {t.delta, t.t_max, t.saddle_capture, t.margin_tol, t.r_escape, t.tol.rel, t.tol.abs};
}

roa_status roa_tau(const roa_system* system, const roa_params* params, const double* y,
                   const double* center, double radius, const double* sep,
                   const double* saddles, size_t n_saddles, const roa_tau_policy* policy,
                   roa_tau_result** out) {
  return guard([&] {
    need(system, "system");
    need(params, "params");
    need(y, "y");
    need(center, "center");
    need(sep, "sep");
    need(out, "out");
    if (n_saddles > 0) need(saddles, "saddles");
    const std::size_t n = roa_system_dim(system);
    std::vector<Vec> s;
    for (std::size_t i = 0; i < n_saddles; ++i) s.push_back(vec_of(saddles + i * n, n));
    auto r = tau_in_neighborhood(*system->model, vec_of(y, n), params->p,
                                 Neighborhood{vec_of(center, n), radius}, vec_of(sep, n), s,
                                 tau_policy_of(policy, TauPolicy{}));
    *out = new roa_tau_result{std::move(r), false};
  });
}

void roa_tau_destroy(roa_tau_result* result) { delete result; }
double roa_tau_total(const roa_tau_result* r) { return r->tau.total; }
int roa_tau_diverged(const roa_tau_result* r) { return r->tau.diverged ? 1 : 0; }
int roa_tau_recovered(const roa_tau_result* r) { return r->tau.recovered ? 1 : 0; }
int roa_tau_truncated(const roa_tau_result* r) { return r->tau.truncated ? 1 : 0; }
int roa_tau_no_sep(const roa_tau_result* r) { return r->no_sep ? 1 : 0; }
int roa_tau_transversality_warning(const roa_tau_result* r) {
  return r->tau.transversality_warning ? 1 : 0;
}
double roa_tau_min_margin(const roa_tau_result* r) { return r->tau.min_margin; }
double roa_tau_min_saddle_distance(const roa_tau_result* r) {
  return r->tau.min_saddle_distance;
}
double roa_tau_t_stop(const roa_tau_result* r) { return r->tau.t_stop; }
const char* roa_tau_stop_reason(const roa_tau_result* r) {
  return r->no_sep ? "no stable equilibrium" : r->tau.stop_reason.c_str();
}
size_t roa_tau_interval_count(const roa_tau_result* r) { return r->tau.intervals.size(); }
void roa_tau_interval(const roa_tau_result* r, size_t index, double* t_in, double* t_out) {
  const auto& iv = r->tau.intervals.at(index);
  if (t_in) *t_in = iv.first;
  if (t_out) *t_out = iv.second;
}
size_t roa_tau_crossing_count(const roa_tau_result* r) { return r->tau.crossings.size(); }
void roa_tau_crossing(const roa_tau_result* r, size_t index, double* t, int* direction,
                      double* margin) {
  const auto& c = r->tau.crossings.at(index);
  if (t) *t = c.t_cross;
  if (direction) *direction = c.direction;
  if (margin) *margin = c.margin;
}

/* recovery */

roa_status roa_scenario_fault(const roa_params* base, size_t n_free, const char* const* free,
                              const double* box_lo, const double* box_hi,
                              roa_scenario** out) {
  return guard([&] {
    need(base, "base");
    need(free, "free");
    need(box_lo, "box_lo");
    need(box_hi, "box_hi");
    need(out, "out");
    std::vector<std::string> names;
    for (size_t i = 0; i < n_free; ++i) {
      need(free[i], "free name");
      names.emplace_back(free[i]);
    }
    auto sc = make_fault_scenario(base->p, names, std::vector<double>(box_lo, box_lo + n_free),
                                  std::vector<double>(box_hi, box_hi + n_free));
    *out = new roa_scenario{std::move(sc)};
  });
}

void roa_scenario_destroy(roa_scenario* scenario) { delete scenario; }

void roa_scenario_set_policy(roa_scenario* scenario, const roa_membership_policy* policy) {
  scenario->sc.policy = membership_of(policy);
}

size_t roa_scenario_dim(const roa_scenario* scenario) { return scenario->sc.dim(); }

const char* roa_scenario_free_name(const roa_scenario* scenario, size_t index) {
  return index < scenario->sc.free.size() ? scenario->sc.free[index].c_str() : nullptr;
}

roa_status roa_scenario_at(const roa_scenario* scenario, const double* q, roa_params** out) {
  return guard([&] {
    need(scenario, "scenario");
    need(q, "q");
    need(out, "out");
    *out = new roa_params{scenario->sc.at(std::vector<double>(q, q + scenario->sc.dim()))};
  });
}

roa_status roa_classify_param(const roa_scenario* scenario, const roa_params* params,
                              roa_verdict* verdict, int* no_sep, double* y, double* sep) {
  return guard([&] {
    need(scenario, "scenario");
    need(params, "params");
    need(verdict, "verdict");
    const auto c = classify_param(scenario->sc, params->p);
    *verdict = c.verdict == ParamVerdict::kRecovered      ? ROA_RECOVERED
               : c.verdict == ParamVerdict::kNotRecovered ? ROA_ESCAPED
                                                          : ROA_UNRESOLVED;
    if (no_sep) *no_sep = c.no_sep ? 1 : 0;
    if (y && c.y.size() > 0) copy_out(c.y, y);
    if (sep && c.sep.size() > 0) copy_out(c.sep, sep);
  });
}

roa_status roa_scenario_sep(const roa_scenario* scenario, const roa_params* params,
                            roa_equilibrium** out) {
  return guard([&] {
    need(scenario, "scenario");
    need(params, "params");
    need(out, "out");
    auto eq = sep_at(scenario->sc, params->p);
    if (!eq) throw Error(ErrorCode::kNoSep, "stable equilibrium cannot be continued");
    *out = new roa_equilibrium(wrap(std::move(*eq)));
  });
}

roa_status roa_scenario_saddle(const roa_scenario* scenario, const roa_params* params,
                               roa_equilibrium** out) {
  return guard([&] {
    need(scenario, "scenario");
    need(params, "params");
    need(out, "out");
    auto s = saddles_at(scenario->sc, params->p);
    if (s.empty()) throw Error(ErrorCode::kNotFound, "no saddle could be continued");
    *out = new roa_equilibrium(wrap(std::move(s.front())));
  });
}

roa_status roa_controlling_element(const roa_scenario* scenario, const roa_params* params,
                                   size_t* index, double* x, double* min_distance) {
  return guard([&] {
    need(scenario, "scenario");
    need(params, "params");
    auto c = controlling_element(scenario->sc, params->p);
    if (!c) throw Error(ErrorCode::kNotFound, "no controlling element");
    if (index) *index = c->index;
    if (x) copy_out(c->x, x);
    if (min_distance) *min_distance = c->min_distance;
  });
}

roa_status roa_bisect(const roa_scenario* scenario, const roa_params* p_a,
                      const roa_params* p_b, double tol, roa_bisect_result** out) {
  return guard([&] {
    need(scenario, "scenario");
    need(p_a, "p_a");
    need(p_b, "p_b");
    need(out, "out");
    *out = new roa_bisect_result{bisect_boundary(scenario->sc, p_a->p, p_b->p, tol)};
  });
}

void roa_bisect_destroy(roa_bisect_result* result) { delete result; }

void roa_bisect_p_star(const roa_bisect_result* r, double* out) {
  for (std::size_t i = 0; i < r->r.p_star.size(); ++i) out[i] = r->r.p_star[i];
}

void roa_bisect_bracket(const roa_bisect_result* r, double* lo, double* hi) {
  for (std::size_t i = 0; i < r->r.p_lo.size(); ++i) {
    if (lo) lo[i] = r->r.p_lo[i];
    if (hi) hi[i] = r->r.p_hi[i];
  }
}

double roa_bisect_width(const roa_bisect_result* r) { return r->r.width; }
int roa_bisect_iterations(const roa_bisect_result* r) { return r->r.iterations; }
int roa_bisect_unresolved_seen(const roa_bisect_result* r) { return r->r.unresolved_seen; }
size_t roa_bisect_warning_count(const roa_bisect_result* r) { return r->r.warnings.size(); }
const char* roa_bisect_warning(const roa_bisect_result* r, size_t index) {
  return index < r->r.warnings.size() ? r->r.warnings[index].c_str() : nullptr;
}

roa_status roa_tau_at(const roa_scenario* scenario, const roa_params* params,
                      const double* center, double radius, const roa_tau_policy* policy,
                      roa_tau_result** out) {
  return guard([&] {
    need(scenario, "scenario");
    need(params, "params");
    need(center, "center");
    need(out, "out");
    const std::size_t n = static_cast<std::size_t>(scenario->sc.system->dim());
    auto s = tau_at(scenario->sc, params->p, Neighborhood{vec_of(center, n), radius},
                    tau_policy_of(policy, TauPolicy{}));
    *out = new roa_tau_result{std::move(s.tau), s.no_sep};
  });
}

roa_status roa_threshold_search(const roa_scenario* scenario, const roa_params* p_start,
                                const roa_params* p_end, const double* center, double radius,
                                double threshold, double initial_ds, double s_tol,
                                const roa_tau_policy* policy, roa_threshold_result** out) {
  return guard([&] {
    need(scenario, "scenario");
    need(p_start, "p_start");
    need(p_end, "p_end");
    need(center, "center");
    need(out, "out");
    ThresholdOptions opts;
    if (initial_ds > 0.0) opts.initial_ds = initial_ds;
    if (s_tol > 0.0) opts.s_tol = s_tol;
    opts.tau = tau_policy_of(policy, opts.tau);
    const std::size_t n = static_cast<std::size_t>(scenario->sc.system->dim());
    auto r = tau_threshold_search(scenario->sc, p_start->p, p_end->p,
                                  Neighborhood{vec_of(center, n), radius}, threshold, opts);
    *out = new roa_threshold_result{std::move(r)};
  });
}

void roa_threshold_destroy(roa_threshold_result* result) { delete result; }
const char* roa_threshold_status(const roa_threshold_result* r) { return to_string(r->r.status); }
double roa_threshold_s(const roa_threshold_result* r) { return r->r.s; }
void roa_threshold_p(const roa_threshold_result* r, double* out) {
  for (std::size_t i = 0; i < r->r.p.size(); ++i) out[i] = r->r.p[i];
}
double roa_threshold_tau(const roa_threshold_result* r) { return r->r.tau; }
double roa_threshold_max_tau(const roa_threshold_result* r) { return r->r.max_tau; }
int roa_threshold_evaluations(const roa_threshold_result* r) { return r->r.evaluations; }
size_t roa_threshold_warning_count(const roa_threshold_result* r) { return r->r.warnings.size(); }
const char* roa_threshold_warning(const roa_threshold_result* r, size_t index) {
  return index < r->r.warnings.size() ? r->r.warnings[index].c_str() : nullptr;
}

roa_status roa_recover(const roa_scenario* scenario, const double* p0, const double* directions,
                       size_t n_dirs, double tol, size_t workers, roa_recovery** out) {
  return guard([&] {
    need(scenario, "scenario");
    need(p0, "p0");
    need(out, "out");
    if (n_dirs > 0) need(directions, "directions");
    const std::size_t d = scenario->sc.dim();
    std::vector<std::vector<double>> dirs;
    for (size_t i = 0; i < n_dirs; ++i) {
      dirs.emplace_back(directions + i * d, directions + (i + 1) * d);
    }
    auto r = estimate_recovery_boundary(scenario->sc, std::vector<double>(p0, p0 + d), dirs, tol,
                                        workers == 0 ? 1 : workers);
    *out = new roa_recovery{std::move(r)};
  });
}

void roa_recovery_destroy(roa_recovery* recovery) { delete recovery; }

size_t roa_recovery_ray_count(const roa_recovery* r) { return r->r.rays.size(); }

int roa_recovery_ray_hit(const roa_recovery* r, size_t index) {
  return r->r.rays.at(index).hit ? 1 : 0;
}

void roa_recovery_ray(const roa_recovery* r, size_t index, double* direction, double* p_star,
                      double* distance, double* bracket, double* edge_distance,
                      int* straddle_ok, int* unresolved_seen) {
  const RayHit& h = r->r.rays.at(index);
  if (direction) std::copy(h.direction.begin(), h.direction.end(), direction);
  if (p_star && h.hit) std::copy(h.p_star.begin(), h.p_star.end(), p_star);
  if (distance) *distance = h.distance;
  if (bracket) *bracket = h.bracket;
  if (edge_distance) *edge_distance = h.edge_distance;
  if (straddle_ok) *straddle_ok = h.straddle_ok ? 1 : 0;
  if (unresolved_seen) *unresolved_seen = h.unresolved_seen ? 1 : 0;
}

long roa_recovery_nearest(const roa_recovery* r) {
  return r->r.nearest ? static_cast<long>(*r->r.nearest) : -1;
}

/* set distances */

roa_status roa_cloud_create(size_t dim, int includes_infinity, roa_cloud** out) {
  return guard([&] {
    need(out, "out");
    if (dim == 0) throw Error(ErrorCode::kDomain, "cloud dimension must be positive");
    auto c = new roa_cloud;
    c->dim = dim;
    c->cloud.includes_infinity = includes_infinity != 0;
    *out = c;
  });
}

void roa_cloud_destroy(roa_cloud* cloud) { delete cloud; }

roa_status roa_cloud_add(roa_cloud* cloud, const double* point) {
  return guard([&] {
    need(cloud, "cloud");
    need(point, "point");
    cloud->cloud.points.push_back(vec_of(point, cloud->dim));
  });
}

roa_status roa_cloud_add_boundary(roa_cloud* cloud, const roa_boundary* boundary) {
  return guard([&] {
    need(cloud, "cloud");
    need(boundary, "boundary");
    if (boundary->dim != cloud->dim) throw Error(ErrorCode::kDomain, "dimension mismatch");
    for (const Vec& p : boundary->sample.points) cloud->cloud.points.push_back(p);
  });
}

void roa_cloud_set_infinity(roa_cloud* cloud, int includes_infinity) {
  cloud->cloud.includes_infinity = includes_infinity != 0;
}

size_t roa_cloud_size(const roa_cloud* cloud) { return cloud->cloud.size(); }

namespace {
void check_dims(const roa_cloud* x, const roa_cloud* y) {
  need(x, "x");
  need(y, "y");
  if (x->dim != y->dim) throw Error(ErrorCode::kDomain, "clouds differ in dimension");
}
}  // namespace

roa_status roa_hausdorff(const roa_cloud* x, const roa_cloud* y, double* out) {
  return guard([&] {
    check_dims(x, y);
    need(out, "out");
    *out = hausdorff(x->cloud, y->cloud);
  });
}

roa_status roa_chabauty_distance(const roa_cloud* x, const roa_cloud* y, double* out) {
  return guard([&] {
    check_dims(x, y);
    need(out, "out");
    *out = chabauty_distance(x->cloud, y->cloud);
  });
}

void roa_chabauty_embed(const double* x, size_t dim, double* out) {
  copy_out(x == nullptr ? chabauty_infinity(dim) : chabauty_embed(vec_of(x, dim)), out);
}

roa_status roa_continuity_sweep(roa_cloud_sampler sampler, void* user, size_t dim,
                                const roa_params* p0, const roa_params* const* grid,
                                size_t n_grid, roa_metric metric, size_t workers,
                                roa_metric_report** out) {
  return guard([&] {
    need(reinterpret_cast<const void*>(sampler), "sampler");
    need(p0, "p0");
    need(out, "out");
    if (n_grid > 0) need(grid, "grid");
    std::vector<ParamPoint> points;
    for (size_t i = 0; i < n_grid; ++i) {
      need(grid[i], "grid point");
      points.push_back(grid[i]->p);
    }
    const CloudSampler wrapped = [&](const ParamPoint& p) {
      roa_params arg{p};
      roa_cloud cloud;
      cloud.dim = dim;
      const roa_status s = sampler(&arg, &cloud, user);
      if (s != ROA_OK) {
        throw Error(ErrorCode::kDomain, std::string("sampler failed (") + roa_status_name(s) +
                                            "): " + roa_last_error());
      }
      return cloud.cloud;
    };
    auto report = continuity_sweep(wrapped, p0->p, points,
                                   metric == ROA_METRIC_CHABAUTY ? Metric::kChabauty
                                                                 : Metric::kHausdorff,
                                   workers == 0 ? 1 : workers);
    *out = new roa_metric_report{std::move(report)};
  });
}

void roa_metric_report_destroy(roa_metric_report* report) { delete report; }

size_t roa_metric_report_rows(const roa_metric_report* r) { return r->report.rows.size(); }

size_t roa_metric_report_ref_size(const roa_metric_report* r) { return r->report.n_ref; }

void roa_metric_report_row(const roa_metric_report* r, size_t index, double* values,
                           double* offset, double* distance, size_t* n_x, size_t* n_y,
                           int* ok) {
  const MetricRow& row = r->report.rows.at(index);
  if (values) {
    for (std::size_t i = 0; i < row.p.size(); ++i) values[i] = row.p[i];
  }
  if (offset) *offset = row.offset;
  if (distance) *distance = row.distance;
  if (n_x) *n_x = row.n_x;
  if (n_y) *n_y = row.n_y;
  if (ok) *ok = row.ok ? 1 : 0;
}

const char* roa_metric_report_error(const roa_metric_report* r, size_t index) {
  return r->report.rows.at(index).error.c_str();
}

roa_status roa_metric_report_write_csv(const roa_metric_report* r, const char* path) {
  return guard([&] {
    need(r, "report");
    need(path, "path");
    std::ofstream f(path);
    if (!f) throw Error(ErrorCode::kDomain, std::string("cannot open ") + path);
    write_metric_csv(f, r->report);
  });
}

}  // extern "C"
