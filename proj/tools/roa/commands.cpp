#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace roacli {

namespace {

std::size_t hardware_workers() {
  return std::max(1u, std::thread::hardware_concurrency());
}

struct Common {
  std::string system = "pendulum";
  std::vector<std::string> params;
};

struct Policy {
  std::string scenario = "fault";
  double delta = 1e-3;
  double t_max = 200.0;
  double r_escape = 1e3;
  double check_horizon = 5.0;
  double rtol = 1e-9;
  double atol = 1e-11;
};

struct TauKnobs {
  std::string ball = "auto:r=1";
  double saddle_capture = 1e-3;
  double margin_tol = 1e-4;
};

struct TraceKnobs {
  std::string window_lo;
  std::string window_hi;
  double eps = 1e-6;
  double stride = 0.01;
  double budget = 60.0;
  double tol = 1e-9;
};

}  // namespace

struct CommandState {
  struct {
    Common common;
    std::vector<std::string> guess;
    std::string window_lo, window_hi;
    int starts = 9;
    double newton_tol = 1e-10;
  } eq;
  struct {
    Common common;
    std::string vary = "c3";
    std::string range = "1.5:2.5";
    double step = 0.05;
    std::string guess;
  } branch;
  struct {
    Common common;
    TraceKnobs trace;
    std::string sep_guess, saddle_guess;
    Policy policy;
  } boundary;
  struct {
    Common common;
    std::vector<std::string> points;
    std::string sep_guess;
    Policy policy;
  } classify;
  struct {
    Common common;
    Policy policy;
    TauKnobs knobs;
  } tau;
  struct {
    Common common;
    Policy policy;
    TauKnobs knobs;
    std::vector<std::string> path;
    int grid = 6;
    std::vector<double> thresholds;
    double threshold_ds = 1.0 / 16.0;
    double threshold_s_tol = 1e-13;
    double threshold_capture = 1e-9;
    std::size_t workers = hardware_workers();
  } sweep;
  struct {
    Common common;
    Policy policy;
    std::vector<std::string> p_a, p_b;
    double tol = 1e-3;
  } bisect;
  struct {
    Common common;
    Policy policy;
    std::vector<std::string> p0, box, dirs;
    double tol = 1e-3;
    std::size_t workers = hardware_workers();
  } recover;
  struct {
    Common common;
    TraceKnobs trace;
    std::string vary = "c3";
    std::string grid;
    std::vector<double> values;
    std::string metric = "hausdorff";
    std::size_t workers = hardware_workers();
  } hausdorff;
  struct {
    std::string grid = "0.01:0.1:5";
    std::string metric = "chabauty";
    double tol = 1e-9;
    double window = 10.0;
    std::size_t workers = hardware_workers();
  } disc;
};

namespace {

void add_common(CLI::App* app, Config& cfg, Common& c) {
  cfg.opt(app, "system", c.system, "system id");
  cfg.opt(app, "param", c.params, "parameter assignment name=value (repeatable)");
}

void add_policy(CLI::App* app, Config& cfg, Policy& p, bool scenario) {
  if (scenario) cfg.opt(app, "scenario", p.scenario, "initial-condition scenario (fault)");
  cfg.opt(app, "delta", p.delta, "capture radius at the stable equilibrium");
  cfg.opt(app, "t-max", p.t_max, "integration horizon");
  cfg.opt(app, "r-escape", p.r_escape, "escape radius");
  cfg.opt(app, "check-horizon", p.check_horizon, "time a capture must persist");
  cfg.opt(app, "rtol", p.rtol, "relative integration tolerance");
  cfg.opt(app, "atol", p.atol, "absolute integration tolerance");
}

void add_tau_knobs(CLI::App* app, Config& cfg, TauKnobs& k) {
  cfg.opt(app, "ball", k.ball, "auto:r=R | saddle@name=v[,name=v]:r=R | center=a,b:r=R");
  cfg.opt(app, "saddle-capture", k.saddle_capture, "distance treated as saddle convergence");
  cfg.opt(app, "margin-tol", k.margin_tol, "transversality warning threshold");
}

void add_trace(CLI::App* app, Config& cfg, TraceKnobs& t) {
  cfg.opt(app, "window-lo", t.window_lo, "window lower corner a,b (default per dimension)");
  cfg.opt(app, "window-hi", t.window_hi, "window upper corner a,b");
  cfg.opt(app, "eps", t.eps, "seed offset from the saddle");
  cfg.opt(app, "stride", t.stride, "arclength between samples");
  cfg.opt(app, "budget", t.budget, "arclength budget per branch");
  cfg.opt(app, "tol", t.tol, "endpoint tolerance for 1-D boundaries");
}

roa_membership_policy membership(const Policy& p) {
  return {p.delta, p.t_max, p.r_escape, p.check_horizon, p.rtol, p.atol};
}

roa_tau_policy tau_policy(const Policy& p, const TauKnobs& k) {
  roa_tau_policy t = roa_tau_policy_default();
  t.delta = p.delta;
  t.t_max = p.t_max;
  t.r_escape = p.r_escape;
  t.rtol = p.rtol;
  t.atol = p.atol;
  t.saddle_capture = k.saddle_capture;
  t.margin_tol = k.margin_tol;
  return t;
}

std::vector<double> eq_state(const roa_equilibrium* e, std::size_t n) {
  std::vector<double> x(n);
  roa_equilibrium_state(e, x.data());
  return x;
}

double min_abs_real(const roa_equilibrium* e) {
  double m = INFINITY;
  for (std::size_t i = 0; i < roa_equilibrium_eigen_count(e); ++i) {
    double re = 0.0;
    roa_equilibrium_eigenvalue(e, i, &re, nullptr);
    m = std::min(m, std::abs(re));
  }
  return m;
}

json eq_json(const roa_equilibrium* e, std::size_t n) {
  json j;
  j["x"] = vec_json(eq_state(e, n));
  j["classification"] = roa_equilibrium_classification(e);
  j["residual"] = num(roa_equilibrium_residual(e));
  json ev = json::array();
  for (std::size_t i = 0; i < roa_equilibrium_eigen_count(e); ++i) {
    double re = 0.0;
    double im = 0.0;
    roa_equilibrium_eigenvalue(e, i, &re, &im);
    ev.push_back(json::array({num(re), num(im)}));
  }
  j["eigenvalues"] = ev;
  return j;
}

std::vector<double> reduce(const roa_system* sys, std::vector<double> x) {
  std::size_t idx = 0;
  double period = 0.0;
  if (roa_system_angle(sys, &idx, &period)) {
    x[idx] -= period * std::round(x[idx] / period);
  }
  return x;
}

struct WindowBox {
  std::vector<double> lo;
  std::vector<double> hi;
};

WindowBox resolve_window(const roa_system* sys, const std::string& lo, const std::string& hi) {
  const std::size_t n = roa_system_dim(sys);
  WindowBox w;
  if (n == 2) {
    w.lo = {-std::numbers::pi, -4.0};
    w.hi = {std::numbers::pi, 4.0};
  } else if (n == 1) {
    w.lo = {-10.0};
    w.hi = {10.0};
  }
  if (!lo.empty()) w.lo = parse_vector(lo);
  if (!hi.empty()) w.hi = parse_vector(hi);
  if (w.lo.size() != n || w.hi.size() != n) usage_error("window corners need one value per state");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(w.lo[i] < w.hi[i])) usage_error("window is empty");
  }
  return w;
}

EquilibriumH find_at(const roa_system* sys, const roa_params* p, const std::vector<double>& x,
                     double newton_tol = 0.0) {
  roa_equilibrium* e = nullptr;
  check(roa_equilibrium_find(sys, p, x.data(), newton_tol, &e));
  return EquilibriumH(e);
}

struct Found {
  std::vector<EquilibriumH> eqs;
  int dropped = 0;  // non-hyperbolic solutions from the default multi-start
};

// Newton from explicit guesses, or from a grid of starts over the window.
Found find_all(const roa_system* sys, const roa_params* p, const WindowBox& w, int starts,
               const std::vector<std::vector<double>>& guesses, double newton_tol) {
  const std::size_t n = roa_system_dim(sys);
  std::vector<std::vector<double>> seeds = guesses;
  const bool multistart = seeds.empty();
  if (multistart) {
    if (starts < 1) usage_error("starts must be positive");
    std::vector<std::size_t> k(n, 0);
    while (true) {
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = starts == 1 ? 0.5 * (w.lo[i] + w.hi[i])
                           : w.lo[i] + (w.hi[i] - w.lo[i]) * k[i] / (starts - 1);
      }
      seeds.push_back(x);
      std::size_t i = 0;
      while (i < n && ++k[i] == static_cast<std::size_t>(starts)) k[i++] = 0;
      if (i == n) break;
    }
  }
  Found out;
  std::vector<std::vector<double>> seen;
  for (const auto& s : seeds) {
    if (s.size() != n) usage_error("guess has the wrong dimension");
    roa_equilibrium* e = nullptr;
    if (roa_equilibrium_find(sys, p, s.data(), newton_tol, &e) != ROA_OK) {
      if (!multistart) check(ROA_E_NOT_FOUND);
      continue;
    }
    EquilibriumH h(e);
    const auto x = reduce(sys, eq_state(e, n));
    bool dup = false;
    for (const auto& y : seen) {
      double d = 0.0;
      for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::abs(x[i] - y[i]));
      dup = dup || d < 1e-7;
    }
    if (dup) continue;
    seen.push_back(x);
    if (multistart && std::string(roa_equilibrium_classification(e)) == "NonHyperbolic") {
      ++out.dropped;
      continue;
    }
    out.eqs.push_back(find_at(sys, p, x, newton_tol));
  }
  std::sort(out.eqs.begin(), out.eqs.end(), [&](const EquilibriumH& a, const EquilibriumH& b) {
    return eq_state(a.get(), n) < eq_state(b.get(), n);
  });
  return out;
}

double dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

EquilibriumH pick(const roa_system* sys, const roa_params* p, const std::string& guess,
                  const std::string& kind, const std::vector<double>& near) {
  const std::size_t n = roa_system_dim(sys);
  if (!guess.empty()) return find_at(sys, p, parse_vector(guess));
  const Found f = find_all(sys, p, resolve_window(sys, "", ""), 9, {}, 0.0);
  const roa_equilibrium* best = nullptr;
  double best_d = INFINITY;
  for (const auto& e : f.eqs) {
    if (roa_equilibrium_classification(e.get()) != kind) continue;
    const double d = dist(eq_state(e.get(), n), near);
    if (d < best_d) {
      best_d = d;
      best = e.get();
    }
  }
  if (best == nullptr) domain_error("no " + kind + " equilibrium found in the default window");
  return find_at(sys, p, eq_state(best, n));
}

EquilibriumH pick_sep(const roa_system* sys, const roa_params* p, const std::string& guess) {
  return pick(sys, p, guess, "StableHyperbolic",
              std::vector<double>(roa_system_dim(sys), 0.0));
}

std::string csv_num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt9(v);
}

// ---- scenario plumbing -------------------------------------------------

ScenarioH make_scenario(const roa_system* sys, const Policy& policy, const roa_params* base,
                        const std::vector<std::string>& free, const std::vector<double>& lo,
                        const std::vector<double>& hi) {
  if (policy.scenario != "fault") usage_error("unknown scenario '" + policy.scenario + "'");
  if (std::string(roa_system_id(sys)) != "pendulum") {
    usage_error("the fault scenario requires --system pendulum");
  }
  std::vector<const char*> names;
  for (const auto& f : free) names.push_back(f.c_str());
  roa_scenario* sc = nullptr;
  check(roa_scenario_fault(base, names.size(), names.data(), lo.data(), hi.data(), &sc));
  ScenarioH out(sc);
  const roa_membership_policy m = membership(policy);
  roa_scenario_set_policy(out.get(), &m);
  return out;
}

struct Ball {
  std::vector<double> center;
  double radius = 1.0;
  std::string source;
};

// auto:r=R | saddle@name=v[,name=v]:r=R | center=a,b:r=R
Ball resolve_ball(const std::string& spec, const roa_system* sys, const roa_scenario* sc,
                  const roa_params* path_start) {
  const auto colon = spec.rfind(":r=");
  if (colon == std::string::npos) usage_error("ball spec needs ':r=R', got '" + spec + "'");
  Ball b;
  b.radius = parse_double(spec.substr(colon + 3));
  if (!(b.radius > 0.0)) usage_error("ball radius must be positive");
  const std::string head = spec.substr(0, colon);
  const std::size_t n = roa_system_dim(sys);
  auto saddle_at = [&](const roa_params* p) {
    roa_equilibrium* e = nullptr;
    check(roa_scenario_saddle(sc, p, &e));
    EquilibriumH h(e);
    return eq_state(h.get(), n);
  };
  if (head == "auto") {
    b.center = saddle_at(path_start);
    b.source = "saddle at path start";
  } else if (head.rfind("saddle@", 0) == 0) {
    Params p = copy_params(path_start);
    std::stringstream ss(head.substr(7));
    std::string item;
    while (std::getline(ss, item, ',')) assign(p.get(), {item});
    b.center = saddle_at(p.get());
    b.source = head;
  } else if (head.rfind("center=", 0) == 0) {
    b.center = parse_vector(head.substr(7));
    if (b.center.size() != n) usage_error("ball center has the wrong dimension");
    b.source = "explicit";
  } else {
    usage_error("unknown ball spec '" + spec + "'");
  }
  return b;
}

json ball_json(const Ball& b) {
  json j;
  j["center"] = vec_json(b.center);
  j["radius"] = b.radius;
  j["source"] = b.source;
  return j;
}

json tau_json(const roa_tau_result* t) {
  json j;
  j["tau"] = num(roa_tau_total(t));
  j["diverged"] = roa_tau_diverged(t) != 0;
  j["recovered"] = roa_tau_recovered(t) != 0;
  j["truncated"] = roa_tau_truncated(t) != 0;
  j["no_sep"] = roa_tau_no_sep(t) != 0;
  j["stop_reason"] = roa_tau_stop_reason(t);
  j["t_stop"] = num(roa_tau_t_stop(t));
  j["min_saddle_distance"] = num(roa_tau_min_saddle_distance(t));
  j["min_margin"] = num(roa_tau_min_margin(t));
  j["transversality_warning"] = roa_tau_transversality_warning(t) != 0;
  json iv = json::array();
  for (std::size_t i = 0; i < roa_tau_interval_count(t); ++i) {
    double a = 0.0;
    double b = 0.0;
    roa_tau_interval(t, i, &a, &b);
    iv.push_back(json::array({num(a), num(b)}));
  }
  j["intervals"] = iv;
  json cr = json::array();
  for (std::size_t i = 0; i < roa_tau_crossing_count(t); ++i) {
    double tc = 0.0;
    double margin = 0.0;
    int dir = 0;
    roa_tau_crossing(t, i, &tc, &dir, &margin);
    json c;
    c["t"] = num(tc);
    c["direction"] = dir > 0 ? "exit" : "entry";
    c["margin"] = num(margin);
    cr.push_back(c);
  }
  j["crossings"] = cr;
  return j;
}

std::pair<std::string, double> split_assignment(const std::string& a) {
  const auto eq = a.find('=');
  if (eq == std::string::npos || eq == 0) usage_error("expected name=value, got '" + a + "'");
  return {a.substr(0, eq), parse_double(a.substr(eq + 1))};
}

// ---- boundary sampling ---------------------------------------------------

struct SamplerContext {
  const roa_system* sys = nullptr;
  std::size_t dim = 0;
  WindowBox window;
  TraceKnobs trace;
  std::vector<double> sep_guess;
  std::vector<double> saddle_guess;
};

roa_status sample_boundary(const roa_params* p, roa_cloud* out, void* user) {
  const auto* ctx = static_cast<const SamplerContext*>(user);
  roa_equilibrium* raw = nullptr;
  roa_status s = ROA_OK;
  roa_boundary* b = nullptr;
  if (ctx->dim == 1) {
    s = roa_equilibrium_find(ctx->sys, p, ctx->sep_guess.data(), 0.0, &raw);
    if (s != ROA_OK) return s;
    EquilibriumH sep(raw);
    s = roa_boundary_1d(ctx->sys, sep.get(), p, ctx->window.lo[0], ctx->window.hi[0],
                        ctx->trace.tol, nullptr, &b);
  } else {
    s = roa_equilibrium_find(ctx->sys, p, ctx->saddle_guess.data(), 0.0, &raw);
    if (s != ROA_OK) return s;
    EquilibriumH saddle(raw);
    s = roa_boundary_trace_2d(ctx->sys, saddle.get(), p, ctx->trace.eps, ctx->window.lo.data(),
                              ctx->window.hi.data(), ctx->trace.stride, ctx->trace.budget, &b);
  }
  if (s != ROA_OK) return s;
  Boundary h(b);
  return roa_cloud_add_boundary(out, h.get());
}

json report_json(const roa_metric_report* r, const roa_params* p0) {
  json rows = json::array();
  std::vector<double> values(roa_params_count(p0));
  for (std::size_t i = 0; i < roa_metric_report_rows(r); ++i) {
    double offset = 0.0;
    double d = 0.0;
    std::size_t nx = 0;
    std::size_t ny = 0;
    int ok = 0;
    roa_metric_report_row(r, i, values.data(), &offset, &d, &nx, &ny, &ok);
    json row;
    json p = json::object();
    for (std::size_t k = 0; k < values.size(); ++k) p[roa_params_name(p0, k)] = values[k];
    row["p"] = p;
    row["offset"] = num(offset);
    row["distance"] = num(d);
    row["n_x"] = nx;
    row["n_y"] = ny;
    row["ok"] = ok != 0;
    if (!ok) row["error"] = roa_metric_report_error(r, i);
    rows.push_back(row);
  }
  return rows;
}

Report run_sweep(SamplerContext& ctx, const roa_params* p0, const std::vector<Params>& grid,
                 const std::string& metric, std::size_t workers) {
  roa_metric m = ROA_METRIC_HAUSDORFF;
  if (metric == "chabauty") m = ROA_METRIC_CHABAUTY;
  else if (metric != "hausdorff") usage_error("metric must be hausdorff or chabauty");
  std::vector<const roa_params*> ptrs;
  for (const auto& g : grid) ptrs.push_back(g.get());
  roa_metric_report* r = nullptr;
  check(roa_continuity_sweep(sample_boundary, &ctx, ctx.dim, p0, ptrs.data(), ptrs.size(), m,
                             workers, &r));
  return Report(r);
}

}  // namespace

std::shared_ptr<CommandState> register_commands(CLI::App& app,
                                                std::map<std::string, Command>& commands) {
  auto st = std::make_shared<CommandState>();
  CommandState& S = *st;

  // ---- equilibria ----
  {
    Command& c = commands["equilibria"];
    c.app = app.add_subcommand("equilibria", "find and classify equilibria");
    add_common(c.app, c.config, S.eq.common);
    c.config.opt(c.app, "guess", S.eq.guess, "Newton start a,b (repeatable; default multi-start)");
    c.config.opt(c.app, "window-lo", S.eq.window_lo, "multi-start window lower corner");
    c.config.opt(c.app, "window-hi", S.eq.window_hi, "multi-start window upper corner");
    c.config.opt(c.app, "starts", S.eq.starts, "multi-start points per axis");
    c.config.opt(c.app, "newton-tol", S.eq.newton_tol, "Newton residual tolerance");
    c.run = [&S](Artifacts& art) {
      auto& o = S.eq;
      System sys = open_system(o.common.system);
      Params p = make_params(sys.get(), o.common.params);
      std::vector<std::vector<double>> guesses;
      for (const auto& g : o.guess) guesses.push_back(parse_vector(g));
      const WindowBox w = resolve_window(sys.get(), o.window_lo, o.window_hi);
      const Found f = find_all(sys.get(), p.get(), w, o.starts, guesses, o.newton_tol);
      json result;
      result["system"] = o.common.system;
      result["params"] = params_json(p.get());
      json list = json::array();
      for (const auto& e : f.eqs) list.push_back(eq_json(e.get(), roa_system_dim(sys.get())));
      result["equilibria"] = list;
      result["dropped_nonhyperbolic"] = f.dropped;
      art.write("equilibria.json", dump_json(result));
      return result;
    };
  }

  // ---- branch ----
  {
    Command& c = commands["branch"];
    c.app = app.add_subcommand("branch", "continue an equilibrium branch in one parameter");
    add_common(c.app, c.config, S.branch.common);
    c.config.opt(c.app, "vary", S.branch.vary, "continuation parameter");
    c.config.opt(c.app, "range", S.branch.range, "lo:hi");
    c.config.opt(c.app, "step", S.branch.step, "nominal step");
    c.config.opt(c.app, "guess", S.branch.guess, "start guess a,b (default: stable equilibrium)");
    c.run = [&S](Artifacts& art) {
      auto& o = S.branch;
      System sys = open_system(o.common.system);
      const std::size_t n = roa_system_dim(sys.get());
      const Range r = parse_range(o.vary + "=" + o.range);
      Params p = make_params(sys.get(), o.common.params);
      check(roa_params_set(p.get(), r.name.c_str(), r.lo));
      EquilibriumH start = pick_sep(sys.get(), p.get(), o.guess);
      roa_branch* raw = nullptr;
      check(roa_branch_continue(sys.get(), start.get(), r.name.c_str(), r.lo, r.hi, o.step, &raw));
      Branch br(raw);
      std::ostringstream csv;
      csv << r.name;
      for (std::size_t i = 0; i < n; ++i) csv << ",x" << (i + 1);
      csv << ",min_abs_re,classification\n";
      for (std::size_t k = 0; k < roa_branch_size(br.get()); ++k) {
        const roa_equilibrium* e = roa_branch_point(br.get(), k);
        csv << csv_num(roa_branch_param(br.get(), k));
        for (double x : eq_state(e, n)) csv << ',' << csv_num(x);
        csv << ',' << csv_num(min_abs_real(e)) << ',' << roa_equilibrium_classification(e) << '\n';
      }
      art.write("branch.csv", csv.str());
      json result;
      result["system"] = o.common.system;
      result["vary"] = r.name;
      result["range"] = json::array({r.lo, r.hi});
      result["step"] = o.step;
      result["points"] = roa_branch_size(br.get());
      if (roa_branch_has_fold(br.get())) {
        double pf = 0.0;
        double m = 0.0;
        std::vector<double> x(n);
        roa_branch_fold(br.get(), &pf, &m, x.data());
        result["fold"] = {{"p", pf}, {"min_abs_re", m}, {"x", vec_json(x)}};
      } else {
        result["fold"] = nullptr;
      }
      result["incomplete"] = roa_branch_incomplete(br.get()) != 0;
      result["note"] = roa_branch_note(br.get());
      art.write("branch.json", dump_json(result));
      return result;
    };
  }

  // ---- boundary ----
  {
    Command& c = commands["boundary"];
    c.app = app.add_subcommand("boundary", "sample the region-of-attraction boundary");
    add_common(c.app, c.config, S.boundary.common);
    add_trace(c.app, c.config, S.boundary.trace);
    c.config.opt(c.app, "sep-guess", S.boundary.sep_guess, "stable equilibrium guess");
    c.config.opt(c.app, "saddle-guess", S.boundary.saddle_guess, "saddle guess (2-D)");
    add_policy(c.app, c.config, S.boundary.policy, false);
    c.run = [&S](Artifacts& art) {
      auto& o = S.boundary;
      System sys = open_system(o.common.system);
      const std::size_t n = roa_system_dim(sys.get());
      Params p = make_params(sys.get(), o.common.params);
      const WindowBox w = resolve_window(sys.get(), o.trace.window_lo, o.trace.window_hi);
      EquilibriumH sep = pick_sep(sys.get(), p.get(), o.sep_guess);
      const auto sep_x = eq_state(sep.get(), n);
      json result;
      result["system"] = o.common.system;
      result["params"] = params_json(p.get());
      result["sep"] = vec_json(sep_x);
      result["window"] = {{"lo", vec_json(w.lo)}, {"hi", vec_json(w.hi)}};
      roa_boundary* raw = nullptr;
      if (n == 1) {
        const roa_membership_policy m = membership(o.policy);
        check(roa_boundary_1d(sys.get(), sep.get(), p.get(), w.lo[0], w.hi[0], o.trace.tol, &m,
                              &raw));
        result["tol"] = o.trace.tol;
      } else if (n == 2) {
        EquilibriumH saddle = pick(sys.get(), p.get(), o.saddle_guess, "Saddle(1)", sep_x);
        check(roa_boundary_trace_2d(sys.get(), saddle.get(), p.get(), o.trace.eps, w.lo.data(),
                                    w.hi.data(), o.trace.stride, o.trace.budget, &raw));
        result["saddle"] = vec_json(eq_state(saddle.get(), n));
        result["eps"] = o.trace.eps;
        result["stride"] = o.trace.stride;
      } else {
        usage_error("boundary sampling supports 1-D and 2-D systems");
      }
      Boundary b(raw);
      std::ostringstream csv;
      if (n == 2) csv << "arclength,";
      csv << (n == 2 ? "x1,x2\n" : "x1\n");
      std::vector<double> x(n);
      json pts = json::array();
      for (std::size_t i = 0; i < roa_boundary_size(b.get()); ++i) {
        roa_boundary_point(b.get(), i, x.data());
        if (n == 2) csv << csv_num(roa_boundary_arclength(b.get(), i)) << ',';
        for (std::size_t k = 0; k < n; ++k) csv << (k ? "," : "") << csv_num(x[k]);
        csv << '\n';
        if (n == 1) pts.push_back(num(x[0]));
      }
      art.write("boundary.csv", csv.str());
      result["points"] = roa_boundary_size(b.get());
      if (n == 1) result["endpoints"] = pts;
      result["partial"] = roa_boundary_partial(b.get()) != 0;
      result["note"] = roa_boundary_note(b.get());
      art.write("boundary.json", dump_json(result));
      return result;
    };
  }

  // ---- classify ----
  {
    Command& c = commands["classify"];
    c.app = app.add_subcommand("classify", "decide region-of-attraction membership of states");
    add_common(c.app, c.config, S.classify.common);
    c.config.opt(c.app, "point", S.classify.points, "state a,b (repeatable)")->required();
    c.config.opt(c.app, "sep-guess", S.classify.sep_guess, "stable equilibrium guess");
    add_policy(c.app, c.config, S.classify.policy, false);
    c.run = [&S](Artifacts& art) {
      auto& o = S.classify;
      System sys = open_system(o.common.system);
      const std::size_t n = roa_system_dim(sys.get());
      Params p = make_params(sys.get(), o.common.params);
      EquilibriumH sep = pick_sep(sys.get(), p.get(), o.sep_guess);
      const auto sep_x = eq_state(sep.get(), n);
      const roa_membership_policy m = membership(o.policy);
      json list = json::array();
      for (const auto& text : o.points) {
        const auto x = parse_vector(text);
        if (x.size() != n) usage_error("point has the wrong dimension");
        roa_verdict v = ROA_UNRESOLVED;
        double t = 0.0;
        std::vector<double> fin(n, NAN);
        check(roa_classify_point(sys.get(), p.get(), x.data(), sep_x.data(), &m, &v, &t,
                                 fin.data()));
        list.push_back({{"x", vec_json(x)},
                        {"verdict", roa_verdict_name(v)},
                        {"t", num(t)},
                        {"final_state", vec_json(fin)}});
      }
      json result;
      result["system"] = o.common.system;
      result["params"] = params_json(p.get());
      result["sep"] = vec_json(sep_x);
      result["results"] = list;
      art.write("classify.json", dump_json(result));
      return result;
    };
  }

  // ---- tau ----
  {
    Command& c = commands["tau"];
    c.app = app.add_subcommand("tau", "time the disturbed orbit spends in a ball");
    add_common(c.app, c.config, S.tau.common);
    add_policy(c.app, c.config, S.tau.policy, true);
    add_tau_knobs(c.app, c.config, S.tau.knobs);
    c.run = [&S](Artifacts& art) {
      auto& o = S.tau;
      System sys = open_system(o.common.system);
      Params p = make_params(sys.get(), o.common.params);
      double c3 = 0.0;
      check(roa_params_get(p.get(), "c3", &c3));
      ScenarioH sc = make_scenario(sys.get(), o.policy, p.get(), {"c3"}, {c3}, {c3});
      const Ball ball = resolve_ball(o.knobs.ball, sys.get(), sc.get(), p.get());
      const roa_tau_policy tp = tau_policy(o.policy, o.knobs);
      roa_tau_result* raw = nullptr;
      check(roa_tau_at(sc.get(), p.get(), ball.center.data(), ball.radius, &tp, &raw));
      TauH t(raw);
      json result;
      result["params"] = params_json(p.get());
      std::vector<double> y(2);
      if (roa_disturbance_ic(p.get(), y.data()) == ROA_OK) result["y"] = vec_json(y);
      result["ball"] = ball_json(ball);
      result.update(tau_json(t.get()));
      art.write("tau.json", dump_json(result));
      return result;
    };
  }

  // ---- tau-sweep ----
  {
    Command& c = commands["tau-sweep"];
    c.app = app.add_subcommand("tau-sweep", "time in ball along a parameter path");
    add_common(c.app, c.config, S.sweep.common);
    add_policy(c.app, c.config, S.sweep.policy, true);
    add_tau_knobs(c.app, c.config, S.sweep.knobs);
    c.config.opt(c.app, "path", S.sweep.path, "name=start:end (repeatable)")->required();
    c.config.opt(c.app, "grid", S.sweep.grid, "number of path samples");
    c.config.opt(c.app, "threshold", S.sweep.thresholds, "search the path for tau >= T (repeatable)");
    c.config.opt(c.app, "threshold-ds", S.sweep.threshold_ds, "coarse path step for the search");
    c.config.opt(c.app, "threshold-s-tol", S.sweep.threshold_s_tol, "path resolution of the search");
    c.config.opt(c.app, "threshold-capture", S.sweep.threshold_capture,
                 "saddle capture radius used by the search");
    c.config.opt(c.app, "workers", S.sweep.workers, "worker threads");
    c.run = [&S](Artifacts& art) {
      auto& o = S.sweep;
      if (o.grid < 1) usage_error("grid must be positive");
      System sys = open_system(o.common.system);
      Params start = make_params(sys.get(), o.common.params);
      Params end = copy_params(start.get());
      std::vector<std::string> names;
      std::vector<double> lo;
      std::vector<double> hi;
      for (const auto& text : o.path) {
        const Range r = parse_range(text);
        check(roa_params_set(start.get(), r.name.c_str(), r.lo));
        check(roa_params_set(end.get(), r.name.c_str(), r.hi));
        names.push_back(r.name);
        lo.push_back(std::min(r.lo, r.hi));
        hi.push_back(std::max(r.lo, r.hi));
      }
      check(roa_params_validate(sys.get(), start.get()));
      check(roa_params_validate(sys.get(), end.get()));
      ScenarioH sc = make_scenario(sys.get(), o.policy, start.get(), names, lo, hi);
      const Ball ball = resolve_ball(o.knobs.ball, sys.get(), sc.get(), start.get());
      const roa_tau_policy tp = tau_policy(o.policy, o.knobs);
      const auto a = params_values(start.get());
      const auto b = params_values(end.get());

      std::vector<double> s(static_cast<std::size_t>(o.grid));
      for (int i = 0; i < o.grid; ++i) s[i] = o.grid == 1 ? 0.0 : double(i) / (o.grid - 1);
      std::vector<Params> points;
      for (double si : s) {
        Params p = copy_params(start.get());
        for (std::size_t k = 0; k < a.size(); ++k) {
          const double v = si == 1.0 ? b[k] : a[k] + si * (b[k] - a[k]);
          check(roa_params_set(p.get(), roa_params_name(p.get(), k), v));
        }
        points.push_back(std::move(p));
      }
      std::vector<TauH> taus(points.size());
      parallel_for(points.size(), o.workers, [&](std::size_t i) {
        roa_tau_result* raw = nullptr;
        check(roa_tau_at(sc.get(), points[i].get(), ball.center.data(), ball.radius, &tp, &raw));
        taus[i] = TauH(raw);
      });

      std::ostringstream csv;
      csv << 's';
      for (std::size_t k = 0; k < a.size(); ++k) csv << ',' << roa_params_name(start.get(), k);
      csv << ",tau,diverged,recovered,truncated,min_saddle_distance,min_margin,stop_reason\n";
      json rows = json::array();
      for (std::size_t i = 0; i < points.size(); ++i) {
        const roa_tau_result* t = taus[i].get();
        csv << csv_num(s[i]);
        for (double v : params_values(points[i].get())) csv << ',' << csv_num(v);
        csv << ',' << csv_num(roa_tau_total(t)) << ',' << roa_tau_diverged(t) << ','
            << roa_tau_recovered(t) << ',' << roa_tau_truncated(t) << ','
            << csv_num(roa_tau_min_saddle_distance(t)) << ',' << csv_num(roa_tau_min_margin(t))
            << ',' << roa_tau_stop_reason(t) << '\n';
        json row = tau_json(t);
        row.erase("crossings");
        row.erase("intervals");
        rows.push_back({{"s", s[i]}, {"p", params_json(points[i].get())}, {"tau", row}});
      }
      art.write("tau_sweep.csv", csv.str());

      json result;
      result["path"] = {{"start", params_json(start.get())}, {"end", params_json(end.get())}};
      result["ball"] = ball_json(ball);
      result["rows"] = rows;
      json thresholds = json::array();
      for (double T : o.thresholds) {
        roa_tau_policy sp = tp;
        sp.saddle_capture = o.threshold_capture;
        roa_threshold_result* raw = nullptr;
        const roa_status st = roa_threshold_search(sc.get(), start.get(), end.get(),
                                                   ball.center.data(), ball.radius, T,
                                                   o.threshold_ds, o.threshold_s_tol, &sp, &raw);
        json e;
        e["threshold"] = T;
        if (st != ROA_OK) {
          if (st != ROA_E_NOT_FOUND) check(st);
          e["status"] = "not-found";
          e["message"] = roa_last_error();
          thresholds.push_back(e);
          continue;
        }
        ThresholdH h(raw);
        std::vector<double> pv(a.size());
        roa_threshold_p(h.get(), pv.data());
        json pj = json::object();
        for (std::size_t k = 0; k < pv.size(); ++k) pj[roa_params_name(start.get(), k)] = pv[k];
        e["status"] = roa_threshold_status(h.get());
        e["s"] = roa_threshold_s(h.get());
        e["p"] = pj;
        e["tau"] = num(roa_threshold_tau(h.get()));
        e["max_tau"] = num(roa_threshold_max_tau(h.get()));
        e["evaluations"] = roa_threshold_evaluations(h.get());
        json w = json::array();
        for (std::size_t k = 0; k < roa_threshold_warning_count(h.get()); ++k) {
          w.push_back(roa_threshold_warning(h.get(), k));
        }
        e["warnings"] = w;
        thresholds.push_back(e);
      }
      result["thresholds"] = thresholds;
      art.write("tau_sweep.json", dump_json(result));
      return result;
    };
  }

  // ---- bisect ----
  {
    Command& c = commands["bisect"];
    c.app = app.add_subcommand("bisect", "bisect for the recovery boundary between two parameters");
    add_common(c.app, c.config, S.bisect.common);
    add_policy(c.app, c.config, S.bisect.policy, true);
    c.config.opt(c.app, "p-a", S.bisect.p_a, "recovered end name=value (repeatable)")->required();
    c.config.opt(c.app, "p-b", S.bisect.p_b, "not-recovered end name=value (repeatable)")->required();
    c.config.opt(c.app, "tol", S.bisect.tol, "bracket width");
    c.run = [&S](Artifacts& art) {
      auto& o = S.bisect;
      System sys = open_system(o.common.system);
      Params base = make_params(sys.get(), o.common.params);
      Params pa = copy_params(base.get());
      Params pb = copy_params(base.get());
      assign(pa.get(), o.p_a);
      assign(pb.get(), o.p_b);
      check(roa_params_validate(sys.get(), pa.get()));
      check(roa_params_validate(sys.get(), pb.get()));
      std::vector<std::string> names;
      std::vector<double> lo;
      std::vector<double> hi;
      for (std::size_t k = 0; k < roa_params_count(pa.get()); ++k) {
        const double va = roa_params_value(pa.get(), k);
        const double vb = roa_params_value(pb.get(), k);
        if (va == vb) continue;
        names.emplace_back(roa_params_name(pa.get(), k));
        lo.push_back(std::min(va, vb));
        hi.push_back(std::max(va, vb));
      }
      if (names.empty()) {
        names.emplace_back(split_assignment(o.p_a.front()).first);
        const double v = split_assignment(o.p_a.front()).second;
        lo.push_back(v);
        hi.push_back(v);
      }
      ScenarioH sc = make_scenario(sys.get(), o.policy, pa.get(), names, lo, hi);
      roa_bisect_result* raw = nullptr;
      check(roa_bisect(sc.get(), pa.get(), pb.get(), o.tol, &raw));
      BisectH r(raw);
      const std::size_t np = roa_params_count(pa.get());
      std::vector<double> star(np);
      std::vector<double> blo(np);
      std::vector<double> bhi(np);
      roa_bisect_p_star(r.get(), star.data());
      roa_bisect_bracket(r.get(), blo.data(), bhi.data());
      auto named = [&](const std::vector<double>& v) {
        json j = json::object();
        for (std::size_t k = 0; k < np; ++k) j[roa_params_name(pa.get(), k)] = v[k];
        return j;
      };
      json result;
      result["p_a"] = params_json(pa.get());
      result["p_b"] = params_json(pb.get());
      result["p_star"] = named(star);
      result["bracket"] = {{"recovered", named(blo)}, {"not_recovered", named(bhi)}};
      result["width"] = num(roa_bisect_width(r.get()));
      result["iterations"] = roa_bisect_iterations(r.get());
      result["unresolved_seen"] = roa_bisect_unresolved_seen(r.get()) != 0;
      json w = json::array();
      for (std::size_t k = 0; k < roa_bisect_warning_count(r.get()); ++k) {
        w.push_back(roa_bisect_warning(r.get(), k));
      }
      result["warnings"] = w;
      Params ps = copy_params(pa.get());
      for (std::size_t k = 0; k < np; ++k) {
        check(roa_params_set(ps.get(), roa_params_name(ps.get(), k), star[k]));
      }
      std::size_t index = 0;
      std::vector<double> x(roa_system_dim(sys.get()));
      double dmin = 0.0;
      if (roa_controlling_element(sc.get(), ps.get(), &index, x.data(), &dmin) == ROA_OK) {
        result["controlling_element"] = {{"index", index}, {"x", vec_json(x)}, {"min_distance", num(dmin)}};
      } else {
        result["controlling_element"] = nullptr;
      }
      art.write("bisect.json", dump_json(result));
      return result;
    };
  }

  // ---- recover ----
  {
    Command& c = commands["recover"];
    c.app = app.add_subcommand("recover", "estimate the recovery-region boundary along rays");
    add_common(c.app, c.config, S.recover.common);
    add_policy(c.app, c.config, S.recover.policy, true);
    c.config.opt(c.app, "box", S.recover.box, "free parameter name=lo:hi (repeatable)")->required();
    c.config.opt(c.app, "p0", S.recover.p0, "start name=value (repeatable)");
    c.config.opt(c.app, "dir", S.recover.dirs, "ray direction a,b (repeatable; default +-axes)");
    c.config.opt(c.app, "tol", S.recover.tol, "bracket width per ray");
    c.config.opt(c.app, "workers", S.recover.workers, "worker threads");
    c.run = [&S](Artifacts& art) {
      auto& o = S.recover;
      System sys = open_system(o.common.system);
      Params base = make_params(sys.get(), o.common.params);
      assign(base.get(), o.p0);
      check(roa_params_validate(sys.get(), base.get()));
      std::vector<std::string> names;
      std::vector<double> lo;
      std::vector<double> hi;
      for (const auto& text : o.box) {
        const Range r = parse_range(text);
        names.push_back(r.name);
        lo.push_back(r.lo);
        hi.push_back(r.hi);
      }
      ScenarioH sc = make_scenario(sys.get(), o.policy, base.get(), names, lo, hi);
      const std::size_t d = names.size();
      std::vector<double> p0(d);
      for (std::size_t i = 0; i < d; ++i) check(roa_params_get(base.get(), names[i].c_str(), &p0[i]));
      std::vector<double> dirs;
      if (o.dirs.empty()) {
        for (std::size_t i = 0; i < d; ++i) {
          for (double sgn : {1.0, -1.0}) {
            for (std::size_t k = 0; k < d; ++k) dirs.push_back(k == i ? sgn : 0.0);
          }
        }
      } else {
        for (const auto& text : o.dirs) {
          const auto v = parse_vector(text);
          if (v.size() != d) usage_error("direction has the wrong dimension");
          dirs.insert(dirs.end(), v.begin(), v.end());
        }
      }
      roa_recovery* raw = nullptr;
      check(roa_recover(sc.get(), p0.data(), dirs.data(), dirs.size() / d, o.tol, o.workers, &raw));
      RecoveryH r(raw);
      std::ostringstream csv;
      for (std::size_t i = 0; i < d; ++i) csv << "dir_" << names[i] << ',';
      csv << "hit";
      for (std::size_t i = 0; i < d; ++i) csv << ",pstar_" << names[i];
      csv << ",distance,bracket,edge_distance,straddle_ok\n";
      json rays = json::array();
      for (std::size_t k = 0; k < roa_recovery_ray_count(r.get()); ++k) {
        std::vector<double> dir(d);
        std::vector<double> ps(d, NAN);
        double distance = 0.0;
        double bracket = 0.0;
        double edge = 0.0;
        int straddle = 0;
        int unresolved = 0;
        roa_recovery_ray(r.get(), k, dir.data(), ps.data(), &distance, &bracket, &edge, &straddle,
                         &unresolved);
        const bool hit = roa_recovery_ray_hit(r.get(), k) != 0;
        for (double v : dir) csv << csv_num(v) << ',';
        csv << hit;
        for (double v : ps) csv << ',' << csv_num(v);
        csv << ',' << csv_num(distance) << ',' << csv_num(bracket) << ',' << csv_num(edge) << ','
            << straddle << '\n';
        rays.push_back({{"direction", vec_json(dir)},
                        {"hit", hit},
                        {"p_star", hit ? vec_json(ps) : json(nullptr)},
                        {"distance", num(distance)},
                        {"bracket", num(bracket)},
                        {"edge_distance", num(edge)},
                        {"straddle_ok", straddle != 0},
                        {"unresolved_seen", unresolved != 0}});
      }
      art.write("recover.csv", csv.str());
      json result;
      result["free"] = names;
      result["p0"] = vec_json(p0);
      result["tol"] = o.tol;
      result["rays"] = rays;
      const long nearest = roa_recovery_nearest(r.get());
      result["nearest"] = nearest < 0 ? json(nullptr) : json(nearest);
      art.write("recover.json", dump_json(result));
      return result;
    };
  }

  // ---- sweep-hausdorff ----
  {
    Command& c = commands["sweep-hausdorff"];
    c.app = app.add_subcommand("sweep-hausdorff", "boundary distance to a reference parameter");
    add_common(c.app, c.config, S.hausdorff.common);
    add_trace(c.app, c.config, S.hausdorff.trace);
    c.config.opt(c.app, "vary", S.hausdorff.vary, "swept parameter");
    c.config.opt(c.app, "grid", S.hausdorff.grid, "lo:hi:n");
    c.config.opt(c.app, "values", S.hausdorff.values, "explicit parameter values (repeatable)");
    c.config.opt(c.app, "metric", S.hausdorff.metric, "hausdorff or chabauty");
    c.config.opt(c.app, "workers", S.hausdorff.workers, "worker threads");
    c.run = [&S](Artifacts& art) {
      auto& o = S.hausdorff;
      System sys = open_system(o.common.system);
      const std::size_t n = roa_system_dim(sys.get());
      Params p0 = make_params(sys.get(), o.common.params);
      std::vector<double> values = o.values;
      if (!o.grid.empty()) {
        for (double v : parse_grid(o.grid)) values.push_back(v);
      }
      if (values.empty()) usage_error("give --grid or --values");
      std::vector<Params> grid;
      for (double v : values) {
        Params p = copy_params(p0.get());
        check(roa_params_set(p.get(), o.vary.c_str(), v));
        check(roa_params_validate(sys.get(), p.get()));
        grid.push_back(std::move(p));
      }
      SamplerContext ctx;
      ctx.sys = sys.get();
      ctx.dim = n;
      ctx.window = resolve_window(sys.get(), o.trace.window_lo, o.trace.window_hi);
      ctx.trace = o.trace;
      EquilibriumH sep = pick_sep(sys.get(), p0.get(), "");
      ctx.sep_guess = eq_state(sep.get(), n);
      if (n == 2) {
        EquilibriumH saddle = pick(sys.get(), p0.get(), "", "Saddle(1)", ctx.sep_guess);
        ctx.saddle_guess = eq_state(saddle.get(), n);
      } else if (n != 1) {
        usage_error("boundary sampling supports 1-D and 2-D systems");
      }
      Report r = run_sweep(ctx, p0.get(), grid, o.metric, o.workers);
      check(roa_metric_report_write_csv(r.get(), art.path("sweep.csv").c_str()));
      json result;
      result["system"] = o.common.system;
      result["p0"] = params_json(p0.get());
      result["metric"] = o.metric;
      result["reference_size"] = roa_metric_report_ref_size(r.get());
      result["rows"] = report_json(r.get(), p0.get());
      art.write("sweep.json", dump_json(result));
      return result;
    };
  }

  // ---- example-discontinuity ----
  {
    Command& c = commands["example-discontinuity"];
    c.app = app.add_subcommand("example-discontinuity",
                               "boundary jump of the 1-D bump system at p = 0");
    c.config.opt(c.app, "grid", S.disc.grid, "lo:hi:n magnitudes; both signs are sampled");
    c.config.opt(c.app, "metric", S.disc.metric, "hausdorff or chabauty");
    c.config.opt(c.app, "tol", S.disc.tol, "endpoint tolerance");
    c.config.opt(c.app, "window", S.disc.window, "half-width of the search window");
    c.config.opt(c.app, "workers", S.disc.workers, "worker threads");
    c.run = [&S](Artifacts& art) {
      auto& o = S.disc;
      System sys = open_system("bump1d");
      Params p0 = make_params(sys.get(), {"p=0"});
      std::vector<double> mags = parse_grid(o.grid);
      std::vector<double> values;
      for (double m : mags) {
        values.push_back(-m);
        values.push_back(m);
      }
      std::vector<Params> grid;
      for (double v : values) {
        Params p = copy_params(p0.get());
        check(roa_params_set(p.get(), "p", v));
        check(roa_params_validate(sys.get(), p.get()));
        grid.push_back(std::move(p));
      }
      SamplerContext ctx;
      ctx.sys = sys.get();
      ctx.dim = 1;
      ctx.window = {{-o.window}, {o.window}};
      ctx.trace.tol = o.tol;
      ctx.sep_guess = {0.0};
      Report r = run_sweep(ctx, p0.get(), grid, o.metric, o.workers);
      check(roa_metric_report_write_csv(r.get(), art.path("discontinuity.csv").c_str()));

      // endpoints for the reference and every grid value
      std::ostringstream csv;
      csv << "p,lower,upper\n";
      json endpoints = json::array();
      std::vector<double> all{0.0};
      all.insert(all.end(), values.begin(), values.end());
      std::sort(all.begin(), all.end());
      for (double v : all) {
        Params p = copy_params(p0.get());
        check(roa_params_set(p.get(), "p", v));
        roa_boundary* braw = nullptr;
        EquilibriumH sep = find_at(sys.get(), p.get(), {0.0});
        check(roa_boundary_1d(sys.get(), sep.get(), p.get(), -o.window, o.window, o.tol, nullptr,
                              &braw));
        Boundary b(braw);
        double lower = NAN;
        double upper = NAN;
        for (std::size_t i = 0; i < roa_boundary_size(b.get()); ++i) {
          double x = 0.0;
          roa_boundary_point(b.get(), i, &x);
          if (x < 0.0) lower = x; else upper = x;
        }
        csv << csv_num(v) << ',' << csv_num(lower) << ',' << csv_num(upper) << '\n';
        endpoints.push_back({{"p", v}, {"lower", num(lower)}, {"upper", num(upper)}});
      }
      art.write("endpoints.csv", csv.str());

      json result;
      result["metric"] = o.metric;
      result["endpoints"] = endpoints;
      const json rows = report_json(r.get(), p0.get());
      double floor = INFINITY;
      bool all_ok = true;
      for (const auto& row : rows) {
        all_ok = all_ok && row["ok"].get<bool>();
        if (row["ok"].get<bool>()) floor = std::min(floor, row["distance"].get<double>());
      }
      result["rows"] = rows;
      result["min_distance"] = num(floor);
      result["all_ok"] = all_ok;
      art.write("discontinuity.json", dump_json(result));
      return result;
    };
  }

  return st;
}

}  // namespace roacli
