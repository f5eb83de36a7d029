#include "recovery.hpp"

#include "disturbance.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace roa {

const char* to_string(ParamVerdict v) {
  switch (v) {
    case ParamVerdict::kRecovered: return "Recovered";
    case ParamVerdict::kNotRecovered: return "NotRecovered";
    case ParamVerdict::kUnresolved: return "Unresolved";
  }
  return "unknown";
}

const char* to_string(ThresholdStatus s) {
  switch (s) {
    case ThresholdStatus::kThresholdReached: return "threshold-reached";
    case ThresholdStatus::kDiverged: return "diverged";
    case ThresholdStatus::kResolutionLimited: return "resolution-limited";
  }
  return "unknown";
}

std::vector<double> Scenario::coords(const ParamPoint& p) const {
  std::vector<double> q;
  q.reserve(free.size());
  for (const auto& name : free) q.push_back(p.get(name));
  return q;
}

ParamPoint Scenario::at(const std::vector<double>& q) const {
  if (q.size() != free.size()) {
    throw Error(ErrorCode::kDomain, "parameter coordinate count does not match scenario");
  }
  ParamPoint p = base;
  for (std::size_t i = 0; i < q.size(); ++i) p.set(free[i], q[i]);
  return p;
}

bool Scenario::in_box(const std::vector<double>& q, double slack) const {
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] < box_lo[i] - slack || q[i] > box_hi[i] + slack) return false;
  }
  return true;
}

Vec Scenario::initial_condition(const ParamPoint& p) const {
  switch (ic_rule) {
    case IcRule::kDisturbance:
      return disturbance_ic(p);
    case IcRule::kAffine: {
      const auto q = coords(p);
      const auto q0 = coords(base);
      Vec dq(static_cast<Eigen::Index>(q.size()));
      for (std::size_t i = 0; i < q.size(); ++i) dq[Eigen::Index(i)] = q[i] - q0[i];
      return affine_y0 + affine_a * dq;
    }
  }
  throw Error(ErrorCode::kDomain, "unknown initial-condition rule");
}

Scenario make_fault_scenario(const ParamPoint& base, std::vector<std::string> free,
                             std::vector<double> box_lo, std::vector<double> box_hi) {
  Scenario sc;
  sc.system = make_system("pendulum");
  sc.system->validate(base);
  if (free.empty() || free.size() != box_lo.size() || free.size() != box_hi.size()) {
    throw Error(ErrorCode::kDomain, "free parameters and box bounds must align");
  }
  for (std::size_t i = 0; i < free.size(); ++i) {
    if (!base.has(free[i])) {
      throw Error(ErrorCode::kSchema, "unknown parameter '" + free[i] + "'");
    }
    if (!(box_lo[i] <= box_hi[i])) throw Error(ErrorCode::kDomain, "empty parameter box");
  }
  sc.base = base;
  sc.free = std::move(free);
  sc.box_lo = std::move(box_lo);
  sc.box_hi = std::move(box_hi);
  sc.ic_rule = IcRule::kDisturbance;
  sc.sep_guess = pendulum_sep(base);
  Vec saddle(2);
  saddle << std::numbers::pi - sc.sep_guess[0], 0.0;
  sc.saddle_guesses = {saddle};
  return sc;
}

namespace {

double param_distance(const ParamPoint& a, const ParamPoint& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

ParamPoint lerp(const ParamPoint& a, const ParamPoint& b, double s) {
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[i] = a[i] + s * (b[i] - a[i]);
  return ParamPoint(a.names(), std::move(v));
}

// Natural continuation of an equilibrium from (x0, base) to target along the
// straight parameter segment; classification must not change.
std::optional<Equilibrium> continue_to(const VectorFieldModel& system, const Vec& x0,
                                       const ParamPoint& base, const ParamPoint& target,
                                       const NewtonOptions& newton,
                                       const Classification* expected) {
  Equilibrium current;
  try {
    current = find_equilibrium(system, x0, base, newton);
  } catch (const Error&) {
    return std::nullopt;
  }
  if (expected != nullptr && !(current.classification == *expected)) return std::nullopt;
  const double dist = param_distance(base, target);
  if (dist == 0.0) return current;
  const double max_step = 0.02;
  double s = 0.0;
  double ds = std::min(1.0, max_step / dist);
  int halvings = 0;
  while (s < 1.0) {
    const double s_next = std::min(1.0, s + ds);
    try {
      Equilibrium eq = find_equilibrium(system, current.x, lerp(base, target, s_next), newton);
      if (expected != nullptr && !(eq.classification == *expected)) {
        throw Error(ErrorCode::kNotFound, "classification changed");
      }
      current = std::move(eq);
      s = s_next;
      halvings = 0;
      ds = std::min(ds * 2.0, max_step / dist);
    } catch (const Error&) {
      if (++halvings > 12) return std::nullopt;
      ds *= 0.5;
    }
  }
  current.p = target;
  return current;
}

}  // namespace

std::optional<Equilibrium> sep_at(const Scenario& scenario, const ParamPoint& p) {
  const Classification stable{Stability::kStableHyperbolic, 0};
  return continue_to(*scenario.system, scenario.sep_guess, scenario.base, p, scenario.newton,
                     &stable);
}

std::vector<Equilibrium> saddles_at(const Scenario& scenario, const ParamPoint& p) {
  std::vector<Equilibrium> out;
  for (const Vec& guess : scenario.saddle_guesses) {
    Equilibrium at_base;
    try {
      at_base = find_equilibrium(*scenario.system, guess, scenario.base, scenario.newton);
    } catch (const Error&) {
      continue;
    }
    const Classification cls = at_base.classification;
    if (auto eq = continue_to(*scenario.system, at_base.x, scenario.base, p, scenario.newton,
                              &cls)) {
      out.push_back(std::move(*eq));
    }
  }
  return out;
}

ParamClassification classify_param(const Scenario& scenario, const ParamPoint& p,
                                   const MembershipPolicy* policy) {
  scenario.system->validate(p);
  ParamClassification out;
  const auto sep = sep_at(scenario, p);
  if (!sep) {
    out.verdict = ParamVerdict::kNotRecovered;
    out.no_sep = true;
    return out;
  }
  out.sep = sep->x;
  try {
    out.y = scenario.initial_condition(p);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoSep) throw;
    out.verdict = ParamVerdict::kNotRecovered;
    out.no_sep = true;
    return out;
  }
  out.outcome = classify_point(*scenario.system, out.y, p, sep->x,
                               policy != nullptr ? *policy : scenario.policy);
  switch (out.outcome.verdict) {
    case Verdict::kRecovered: out.verdict = ParamVerdict::kRecovered; break;
    case Verdict::kEscaped: out.verdict = ParamVerdict::kNotRecovered; break;
    case Verdict::kUnresolved: out.verdict = ParamVerdict::kUnresolved; break;
  }
  return out;
}

BisectResult bisect_boundary(const Scenario& scenario, const ParamPoint& p_a,
                             const ParamPoint& p_b, double tol_p) {
  if (!(tol_p > 0.0)) throw Error(ErrorCode::kDomain, "tolerance must be positive");
  scenario.system->validate(p_a);
  scenario.system->validate(p_b);
  const double length = param_distance(p_a, p_b);
  BisectResult out;
  if (length <= tol_p) {
    out.p_lo = p_a;
    out.p_hi = p_b;
    out.p_star = lerp(p_a, p_b, 0.5);
    out.width = length;
    return out;
  }
  const auto ca = classify_param(scenario, p_a);
  if (ca.verdict != ParamVerdict::kRecovered) {
    throw Error(ErrorCode::kBracket, std::string("bracket start classifies ") +
                                         to_string(ca.verdict) + ", expected Recovered");
  }
  const auto cb = classify_param(scenario, p_b);
  if (cb.verdict == ParamVerdict::kRecovered) {
    throw Error(ErrorCode::kBracket, "bracket end classifies Recovered");
  }
  if (cb.verdict == ParamVerdict::kUnresolved) {
    out.unresolved_seen = true;
    out.warnings.push_back("bracket end is Unresolved; treated as NotRecovered");
  }

  double lo = 0.0;
  double hi = 1.0;
  while ((hi - lo) * length > tol_p) {
    const double mid = 0.5 * (lo + hi);
    const auto c = classify_param(scenario, lerp(p_a, p_b, mid));
    out.history.push_back({lo, hi, mid, c.verdict});
    if (c.verdict == ParamVerdict::kRecovered) {
      lo = mid;
    } else {
      if (c.verdict == ParamVerdict::kUnresolved) {
        out.unresolved_seen = true;
        std::ostringstream msg;
        msg << "Unresolved at s=" << mid << "; treated as NotRecovered";
        out.warnings.push_back(msg.str());
      }
      hi = mid;
    }
    ++out.iterations;
  }
  out.p_lo = lerp(p_a, p_b, lo);
  out.p_hi = lerp(p_a, p_b, hi);
  out.p_star = lerp(p_a, p_b, 0.5 * (lo + hi));
  out.width = (hi - lo) * length;
  return out;
}

std::optional<ControllingElement> controlling_element(const Scenario& scenario,
                                                      const ParamPoint& p) {
  const auto sep = sep_at(scenario, p);
  if (!sep) return std::nullopt;
  const auto saddles = saddles_at(scenario, p);
  if (saddles.empty()) return std::nullopt;
  std::vector<Vec> watch;
  for (const auto& s : saddles) watch.push_back(s.x);
  const auto outcome = classify_point(*scenario.system, scenario.initial_condition(p), p,
                                      sep->x, scenario.policy, watch);
  ControllingElement best;
  for (std::size_t i = 0; i < watch.size(); ++i) {
    if (outcome.watch_min_distance[i] < best.min_distance) {
      best.index = i;
      best.x = watch[i];
      best.min_distance = outcome.watch_min_distance[i];
    }
  }
  return best;
}

Neighborhood ball_at_saddle(const Scenario& scenario, const ParamPoint& p, double radius) {
  const auto saddles = saddles_at(scenario, p);
  if (saddles.empty()) {
    throw Error(ErrorCode::kNotFound, "no saddle could be continued to the ball parameter");
  }
  return Neighborhood{saddles.front().x, radius};
}

TauSample tau_at(const Scenario& scenario, const ParamPoint& p, const Neighborhood& ball,
                 const TauPolicy& policy) {
  TauSample out;
  out.p = p;
  const auto sep = sep_at(scenario, p);
  if (!sep) {
    out.no_sep = true;
    return out;
  }
  std::vector<Vec> saddles;
  for (const auto& s : saddles_at(scenario, p)) saddles.push_back(s.x);
  out.tau = tau_in_neighborhood(*scenario.system, scenario.initial_condition(p), p, ball,
                                sep->x, saddles, policy);
  return out;
}

ThresholdResult tau_threshold_search(const Scenario& scenario, const ParamPoint& p_start,
                                     const ParamPoint& p_end, const Neighborhood& ball,
                                     double threshold, const ThresholdOptions& options) {
  if (!(options.initial_ds > 0.0) || !(options.s_tol > 0.0)) {
    throw Error(ErrorCode::kDomain, "step policy must be positive");
  }
  ThresholdResult out;
  auto check_assumptions = [&](const TauSample& sample) {
    std::ostringstream msg;
    if (sample.no_sep) return;
    bool saddle_inside = false;
    for (const auto& s : saddles_at(scenario, sample.p)) {
      saddle_inside = saddle_inside || ball.contains(s.x);
    }
    if (!saddle_inside) msg << "no continued saddle inside the ball at s=" << sample.s << "; ";
    if (ball.contains(scenario.initial_condition(sample.p))) {
      msg << "initial condition inside the ball at s=" << sample.s << "; ";
    }
    if (sample.tau.transversality_warning) {
      msg << "transversality margin " << sample.tau.min_margin << " at s=" << sample.s << "; ";
    }
    if (!msg.str().empty()) out.warnings.push_back(msg.str());
  };
  auto eval = [&](double s) {
    TauSample sample = tau_at(scenario, lerp(p_start, p_end, s), ball, options.tau);
    sample.s = s;
    ++out.evaluations;
    if (!sample.no_sep && std::isfinite(sample.tau.total)) {
      out.max_tau = std::max(out.max_tau, sample.tau.total);
    }
    check_assumptions(sample);
    out.samples.push_back(sample);
    return sample;
  };
  auto reached = [&](const TauSample& t) {
    return !t.no_sep && (t.tau.diverged || t.tau.total >= threshold);
  };
  auto beyond = [&](const TauSample& t) { return t.no_sep || !t.tau.recovered; };
  auto finish = [&](const TauSample& t) {
    out.s = t.s;
    out.p = t.p;
    out.tau = t.no_sep ? 0.0 : t.tau.total;
    if (reached(t)) {
      out.status = t.tau.diverged ? ThresholdStatus::kDiverged
                                  : ThresholdStatus::kThresholdReached;
    } else {
      out.status = ThresholdStatus::kResolutionLimited;
    }
    return out;
  };

  const TauSample first = eval(0.0);
  if (reached(first)) return finish(first);
  if (beyond(first)) {
    throw Error(ErrorCode::kPrecondition, "path start is not recovered");
  }
  double s = 0.0;
  while (s < 1.0) {
    const double s_next = std::min(1.0, s + options.initial_ds);
    TauSample next = eval(s_next);
    if (!reached(next) && !beyond(next)) {
      s = s_next;
      continue;
    }
    // The first crossing lies in (s, s_next]; halve the step until resolved.
    double lo = s;
    double hi = s_next;
    TauSample at_hi = std::move(next);
    while (hi - lo > options.s_tol) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      TauSample m = eval(mid);
      if (reached(m) || beyond(m)) {
        hi = mid;
        at_hi = std::move(m);
      } else {
        lo = mid;
      }
    }
    return finish(at_hi);
  }
  std::ostringstream msg;
  msg << "tau never reached " << threshold << " along the path (max tau " << out.max_tau
      << ")";
  throw Error(ErrorCode::kNotFound, msg.str());
}

RecoveryEstimate estimate_recovery_boundary(const Scenario& scenario,
                                            const std::vector<double>& p0,
                                            const std::vector<std::vector<double>>& directions,
                                            double tol_p, std::size_t workers) {
  if (directions.empty()) throw Error(ErrorCode::kPrecondition, "no ray directions given");
  if (!(tol_p > 0.0)) throw Error(ErrorCode::kDomain, "tolerance must be positive");
  if (p0.size() != scenario.dim() || !scenario.in_box(p0)) {
    throw Error(ErrorCode::kDomain, "p0 must lie in the parameter box");
  }
  const ParamPoint base = scenario.at(p0);
  if (classify_param(scenario, base).verdict != ParamVerdict::kRecovered) {
    throw Error(ErrorCode::kPrecondition, "p0 is not recovered");
  }
  auto along = [&](const std::vector<double>& dir, double t) {
    std::vector<double> q(p0.size());
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = p0[i] + t * dir[i];
    return q;
  };
  auto recovered = [&](const std::vector<double>& q, bool* unresolved) {
    const auto c = classify_param(scenario, scenario.at(q));
    if (c.verdict == ParamVerdict::kUnresolved && unresolved != nullptr) *unresolved = true;
    return c.verdict == ParamVerdict::kRecovered;
  };

  const std::function<RayHit(std::size_t)> run_ray = [&](std::size_t k) {
    RayHit ray;
    std::vector<double> dir = directions[k];
    if (dir.size() != p0.size()) throw Error(ErrorCode::kDomain, "direction has wrong length");
    double norm = 0.0;
    for (double d : dir) norm += d * d;
    norm = std::sqrt(norm);
    if (!(norm > 0.0)) throw Error(ErrorCode::kDomain, "zero direction");
    for (double& d : dir) d /= norm;
    ray.direction = dir;

    double t_edge = INFINITY;
    for (std::size_t i = 0; i < dir.size(); ++i) {
      if (dir[i] > 0.0) t_edge = std::min(t_edge, (scenario.box_hi[i] - p0[i]) / dir[i]);
      if (dir[i] < 0.0) t_edge = std::min(t_edge, (scenario.box_lo[i] - p0[i]) / dir[i]);
    }
    ray.edge_distance = t_edge;
    if (!(t_edge > 0.0)) return ray;

    double t_in = 0.0;
    double t = std::max(4.0 * tol_p, t_edge / 64.0);
    double t_out = -1.0;
    while (true) {
      t = std::min(t, t_edge);
      if (!recovered(along(dir, t), &ray.unresolved_seen)) {
        t_out = t;
        break;
      }
      t_in = t;
      if (t >= t_edge) break;
      t *= 2.0;
    }
    if (t_out < 0.0) return ray;
    while (t_out - t_in > tol_p) {
      const double mid = 0.5 * (t_in + t_out);
      if (recovered(along(dir, mid), &ray.unresolved_seen)) t_in = mid; else t_out = mid;
    }
    const double t_star = 0.5 * (t_in + t_out);
    ray.hit = true;
    ray.p_star = along(dir, t_star);
    ray.bracket = t_out - t_in;
    ray.distance = t_star;
    const bool inner = recovered(along(dir, std::max(0.0, t_star - tol_p)), nullptr);
    const bool outer = !recovered(along(dir, std::min(t_edge, t_star + tol_p)), nullptr);
    ray.straddle_ok = inner && outer;
    return ray;
  };

  RecoveryEstimate out;
  out.p0 = p0;
  out.tol_p = tol_p;
  out.rays = parallel_map<RayHit>(directions.size(), workers, run_ray);
  for (std::size_t i = 0; i < out.rays.size(); ++i) {
    if (out.rays[i].hit && out.rays[i].distance < out.nearest_distance) {
      out.nearest_distance = out.rays[i].distance;
      out.nearest = i;
    }
  }
  return out;
}

}  // namespace roa
