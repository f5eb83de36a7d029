#include "manifolds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace roa {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kRecovered: return "Recovered";
    case Verdict::kEscaped: return "Escaped";
    case Verdict::kUnresolved: return "Unresolved";
  }
  return "unknown";
}

double cell_distance(const VectorFieldModel& system, const Vec& x, const Vec& target,
                     int* shift) {
  const auto angle = system.angle();
  if (!angle) {
    if (shift != nullptr) *shift = 0;
    return (x - target).norm();
  }
  const double offset = x[angle->index] - target[angle->index];
  const int k = static_cast<int>(std::lround(offset / angle->period));
  Vec d = x - target;
  d[angle->index] -= k * angle->period;
  if (shift != nullptr) *shift = k;
  return d.norm();
}

Vec reduce_angles(const VectorFieldModel& system, Vec x) {
  if (const auto angle = system.angle()) {
    const double half = 0.5 * angle->period;
    double& a = x[angle->index];
    a = std::remainder(a, angle->period);
    if (a <= -half) a += angle->period;
  }
  return x;
}

ClassifyOutcome classify_point(const VectorFieldModel& system, const Vec& x,
                               const ParamPoint& p, const Vec& sep,
                               const MembershipPolicy& policy,
                               const std::vector<Vec>& watch) {
  system.validate(p);
  system.validate_state(x);
  if (!(policy.delta > 0.0) || !(policy.t_max > 0.0) || !(policy.check_horizon >= 0.0) ||
      !(policy.r_escape > 0.0) || !(policy.tol.rel > 0.0) || !(policy.tol.abs > 0.0)) {
    throw Error(ErrorCode::kDomain, "membership policy values must be positive");
  }
  if (sep.size() != x.size()) throw Error(ErrorCode::kDomain, "stable equilibrium dimension");
  const auto angle = system.angle();
  const double delta = policy.delta;

  ClassifyOutcome out;
  out.watch_min_distance.assign(watch.size(), INFINITY);
  auto update_watch = [&](const Vec& y) {
    for (std::size_t i = 0; i < watch.size(); ++i) {
      out.watch_min_distance[i] = std::min(out.watch_min_distance[i], (y - watch[i]).norm());
    }
  };
  update_watch(x);

  bool captured = false;
  double t_capture = 0.0;
  Verdict stop_verdict = Verdict::kUnresolved;
  double stop_time = 0.0;
  std::string stop_note;

  // Returns true when a verdict has been reached at state y, time t.
  auto inspect = [&](const Vec& y, double t) {
    if (angle && std::abs(y[angle->index] - sep[angle->index]) > angle->period) {
      stop_verdict = Verdict::kEscaped;
      stop_time = t;
      stop_note = "rotated a full period away from the stable equilibrium";
      return true;
    }
    int k = 0;
    const double d = cell_distance(system, y, sep, &k);
    if (d < delta && k != 0) {
      stop_verdict = Verdict::kEscaped;
      stop_time = t;
      stop_note = "captured by a translated copy of the stable equilibrium";
      return true;
    }
    if (captured && !(d < 2.0 * delta)) captured = false;
    if (!captured && d < delta && t <= policy.t_max) {
      captured = true;
      t_capture = t;
    }
    if (captured && t - t_capture >= policy.check_horizon) {
      stop_verdict = Verdict::kRecovered;
      stop_time = t_capture;
      return true;
    }
    return false;
  };

  if (inspect(x, 0.0)) {
    out.verdict = stop_verdict;
    out.t = stop_time;
    out.final_state = x;
    out.note = stop_note;
    return out;
  }

  IntegrateOptions opt;
  opt.tol = policy.tol;
  opt.r_escape = policy.r_escape;
  opt.keep_segments = false;
  const Rhs rhs = [&](const Vec& y) { return system.field(y, p); };
  const StepObserver observer = [&](const Segment& seg, const std::vector<EventCrossing>&) {
    if (!watch.empty()) {
      for (int k = 1; k < 8; ++k) update_watch(seg.eval(seg.t0 + seg.h * k / 8.0));
      update_watch(seg.y1);
    }
    return inspect(seg.y1, seg.t1());
  };
  const EventTrace trace =
      integrate(rhs, x, 0.0, policy.t_max + policy.check_horizon, opt, nullptr, observer);
  const Trajectory& traj = trace.trajectory;
  out.final_state = traj.final_state();
  switch (traj.status) {
    case FlowStatus::kStopped:
      out.verdict = stop_verdict;
      out.t = stop_time;
      out.note = stop_note;
      break;
    case FlowStatus::kDiverged:
      out.verdict = Verdict::kEscaped;
      out.t = traj.t_end();
      out.note = traj.message;
      break;
    case FlowStatus::kFailed:
      out.verdict = Verdict::kUnresolved;
      out.t = traj.t_end();
      out.note = "integration failure: " + traj.message;
      break;
    case FlowStatus::kCompleted:
      out.verdict = Verdict::kUnresolved;
      out.t = policy.t_max;
      out.note = "no verdict within t_max";
      break;
  }
  return out;
}

bool Window::contains(const Vec& x) const {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lo[i] && x[i] <= hi[i])) return false;
  }
  return true;
}

namespace {

Vec stable_direction(const Equilibrium& saddle) {
  Eigen::EigenSolver<Mat> solver(saddle.jacobian, true);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kDomain, "eigenvector computation failed");
  }
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    if (solver.eigenvalues()[i].real() < 0.0) {
      Vec v = solver.eigenvectors().col(i).real();
      v.normalize();
      // Fix the orientation so results do not depend on the solver's sign.
      Eigen::Index j = 0;
      v.cwiseAbs().maxCoeff(&j);
      if (v[j] < 0.0) v = -v;
      return v;
    }
  }
  throw Error(ErrorCode::kPrecondition, "saddle has no stable eigenvalue");
}

struct HalfBranch {
  std::vector<Vec> points;
  std::vector<double> arclength;
  bool partial = false;
  std::string note;
};

HalfBranch trace_half(const VectorFieldModel& system, const ParamPoint& p, const Vec& seed,
                      const Window& window, double stride, const TraceOptions& options) {
  const Rhs rhs = [&](const Vec& x) -> Vec {
    Vec v = system.field(x, p);
    const double n = v.norm();
    if (n == 0.0) return Vec::Zero(x.size());
    return -v / n;
  };
  IntegrateOptions opt;
  opt.tol = options.tol;
  opt.h_max = stride;
  const StepObserver leave = [&](const Segment& seg, const std::vector<EventCrossing>&) {
    return !window.contains(seg.y1);
  };
  const EventTrace trace = integrate(rhs, seed, 0.0, options.arclength_budget, opt,
                                     nullptr, leave);
  const Trajectory& traj = trace.trajectory;
  HalfBranch out;
  if (traj.status == FlowStatus::kDiverged || traj.status == FlowStatus::kFailed) {
    out.partial = true;
    out.note = traj.message;
  }
  const auto count = static_cast<long long>(std::floor(traj.t_end() / stride));
  for (long long k = 0; k <= count; ++k) {
    const double s = double(k) * stride;
    const Vec x = traj.at(s);
    if (!window.contains(x)) break;
    out.points.push_back(x);
    out.arclength.push_back(s);
  }
  return out;
}

}  // namespace

BoundarySample trace_stable_manifold_2d(const VectorFieldModel& system,
                                        const Equilibrium& saddle, const ParamPoint& p,
                                        double eps, const Window& window, double stride,
                                        const TraceOptions& options) {
  if (system.dim() != 2) {
    throw Error(ErrorCode::kPrecondition, "stable manifold tracing needs a 2-D system");
  }
  if (!(saddle.classification.kind == Stability::kSaddle &&
        saddle.classification.unstable_dim == 1)) {
    throw Error(ErrorCode::kPrecondition,
                "equilibrium is " + to_string(saddle.classification) + ", not Saddle(1)");
  }
  if (!(eps > 0.0) || !(stride > 0.0)) {
    throw Error(ErrorCode::kDomain, "eps and stride must be positive");
  }
  system.validate(p);
  const Vec v = stable_direction(saddle);

  BoundarySample out;
  out.p = p;
  out.saddle = saddle.x;
  out.eps = eps;
  out.stride = stride;
  out.window = window;

  const HalfBranch minus = trace_half(system, p, saddle.x - eps * v, window, stride, options);
  const HalfBranch plus = trace_half(system, p, saddle.x + eps * v, window, stride, options);
  for (std::size_t i = minus.points.size(); i-- > 0;) {
    out.points.push_back(minus.points[i]);
    out.arclength.push_back(-(eps + minus.arclength[i]));
  }
  if (window.contains(saddle.x)) {
    out.points.push_back(saddle.x);
    out.arclength.push_back(0.0);
  }
  for (std::size_t i = 0; i < plus.points.size(); ++i) {
    out.points.push_back(plus.points[i]);
    out.arclength.push_back(eps + plus.arclength[i]);
  }
  out.partial = minus.partial || plus.partial;
  if (out.partial) out.note = "reverse-time blow-up: " + minus.note + plus.note;
  return out;
}

BoundarySample boundary_1d(const VectorFieldModel& system, const Equilibrium& sep,
                           const ParamPoint& p, const Window& window, double tol,
                           const MembershipPolicy& policy) {
  if (system.dim() != 1) {
    throw Error(ErrorCode::kPrecondition, "boundary_1d needs a 1-D system");
  }
  if (!(tol > 0.0)) throw Error(ErrorCode::kDomain, "tolerance must be positive");
  system.validate(p);
  if (classify_point(system, sep.x, p, sep.x, policy).verdict != Verdict::kRecovered) {
    throw Error(ErrorCode::kInconsistentPolicy,
                "stable equilibrium does not classify as recovered at its own location");
  }
  const double xs = sep.x[0];
  const double lo = window.lo[0];
  const double hi = window.hi[0];
  if (!(xs > lo && xs < hi)) {
    throw Error(ErrorCode::kDomain, "stable equilibrium lies outside the window");
  }

  // x is in the basin along side `dir` while the field points back to xs.
  auto toward = [&](double x, double dir) {
    Vec v(1);
    v[0] = x;
    return system.field_sign(v, p)[0] == -dir;
  };

  BoundarySample out;
  out.p = p;
  out.window = window;
  out.saddle = sep.x;
  const double max_step = (hi - lo) / 1000.0;
  double ends[2] = {lo, hi};
  bool found[2] = {false, false};
  for (int side = 0; side < 2; ++side) {
    const double dir = side == 0 ? -1.0 : 1.0;
    const double limit = side == 0 ? lo : hi;
    double inside = xs;
    double step = std::min(10.0 * tol, max_step);
    while (true) {
      double next = inside + dir * step;
      if (dir * (next - limit) >= 0.0) next = limit;
      if (!toward(next, dir)) {
        double a = inside;
        double b = next;
        while (std::abs(b - a) > tol) {
          const double m = 0.5 * (a + b);
          if (toward(m, dir)) a = m; else b = m;
        }
        ends[side] = 0.5 * (a + b);
        found[side] = true;
        break;
      }
      if (next == limit) break;
      inside = next;
      step = std::min(2.0 * step, max_step);
    }
  }
  out.has_lower = found[0];
  out.has_upper = found[1];
  Vec a(1);
  a[0] = ends[0];
  Vec b(1);
  b[0] = ends[1];
  out.points = {a, b};
  std::ostringstream note;
  if (!found[0]) note << "no lower endpoint inside window; ";
  if (!found[1]) note << "no upper endpoint inside window; ";

  // Cross-check the phase-line answer with the trajectory oracle well inside.
  for (int side = 0; side < 2; ++side) {
    Vec probe(1);
    probe[0] = xs + 0.5 * (ends[side] - xs);
    const auto verdict = classify_point(system, probe, p, sep.x, policy).verdict;
    if (verdict != Verdict::kRecovered) {
      note << "trajectory oracle disagrees at x=" << probe[0] << " (" << to_string(verdict)
           << "); ";
    }
  }
  out.note = note.str();
  return out;
}

}  // namespace roa
