#include "integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace roa {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense output.
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

constexpr int kEventSamples = 8;

double error_norm(const Vec& err, const Vec& y0, const Vec& y1, const Tolerance& tol) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sc = tol.abs + tol.rel * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = err[i] / sc;
    sum += r * r;
  }
  return std::sqrt(sum / double(err.size()));
}

double scaled_norm(const Vec& v, const Vec& y, const Tolerance& tol) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double r = v[i] / (tol.abs + tol.rel * std::abs(y[i]));
    sum += r * r;
  }
  return std::sqrt(sum / double(v.size()));
}

double initial_step(const Rhs& rhs, const Vec& y0, const Vec& f0, double h_max,
                    const Tolerance& tol) {
  const double d0 = scaled_norm(y0, y0, tol);
  const double d1n = scaled_norm(f0, y0, tol);
  double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
  h0 = std::min(h0, h_max);
  const Vec f1 = rhs(y0 + h0 * f0);
  const double d2 = scaled_norm(f1 - f0, y0, tol) / h0;
  const double dm = std::max(d1n, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
  return std::min({100.0 * h0, h1, h_max});
}

struct Bracket {
  double ta;
  double tb;
};

// Locates the sign change of g along the interpolant inside [ta, tb].
EventCrossing polish(const Segment& seg, const EventFunction& event, const Rhs& rhs,
                     Bracket br) {
  auto g_at = [&](double t) { return event.value(seg.eval(t)); };
  double ga = g_at(br.ta);
  const bool side_a = ga > 0.0;
  const double width0 = br.tb - br.ta;

  auto dgdt = [&](double t) {
    const Vec x = seg.eval(t);
    if (event.gradient) return event.gradient(x).dot(rhs(x));
    const double dt = std::max(1e-9 * std::abs(seg.h), 1e-14);
    return (g_at(std::min(t + dt, seg.t1())) - g_at(std::max(t - dt, seg.t0))) /
           (std::min(t + dt, seg.t1()) - std::max(t - dt, seg.t0));
  };

  // Coarse bisection first, then Newton guarded by the bracket.
  for (int i = 0; i < 8; ++i) {
    const double tm = 0.5 * (br.ta + br.tb);
    const double gm = g_at(tm);
    if ((gm > 0.0) == side_a) {
      br.ta = tm;
      ga = gm;
    } else {
      br.tb = tm;
    }
  }
  double t = 0.5 * (br.ta + br.tb);
  double g = g_at(t);
  for (int iter = 0; iter < 200; ++iter) {
    if (std::abs(g) < 0.1 * kEventTolerance) break;
    if (br.tb - br.ta <= 4.0 * std::numeric_limits<double>::epsilon() *
                             std::max(1.0, std::abs(br.tb))) {
      break;
    }
    if ((g > 0.0) == side_a) {
      br.ta = t;
    } else {
      br.tb = t;
    }
    const double d = dgdt(t);
    double next = (d != 0.0 && std::isfinite(d)) ? t - g / d : br.ta - 1.0;
    if (!(next > br.ta && next < br.tb)) next = 0.5 * (br.ta + br.tb);
    t = next;
    g = g_at(t);
  }
  if (!(std::abs(g) < kEventTolerance)) {
    std::ostringstream msg;
    msg << "event near t=" << t << " could not be polished (|g|=" << std::abs(g)
        << ", bracket width " << width0 << ")";
    throw Error(ErrorCode::kEventLocalization, msg.str());
  }
  EventCrossing c;
  c.t_cross = t;
  c.state = seg.eval(t);
  c.direction = side_a ? -1 : +1;
  c.margin = std::abs(dgdt(t));
  return c;
}

double golden_extremum(const std::function<double(double)>& f, double a, double b,
                       bool minimum) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  auto obj = [&](double t) { return minimum ? f(t) : -f(t); };
  double x1 = b - r * (b - a);
  double x2 = a + r * (b - a);
  double f1 = obj(x1);
  double f2 = obj(x2);
  for (int i = 0; i < 80 && (b - a) > 1e-15 * std::max(1.0, std::abs(b)); ++i) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = obj(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = obj(x2);
    }
  }
  return f1 < f2 ? x1 : x2;
}

// All sign changes of g on one segment, in time order. Samples the interpolant
// and refines interior extrema so that grazing pairs are not missed.
std::vector<Bracket> find_brackets(const Segment& seg, const EventFunction& event) {
  std::array<double, kEventSamples + 1> ts{};
  std::array<double, kEventSamples + 1> gs{};
  for (int k = 0; k <= kEventSamples; ++k) {
    ts[k] = k == kEventSamples ? seg.t1() : seg.t0 + seg.h * double(k) / kEventSamples;
    gs[k] = event.value(k == 0 ? seg.y0 : (k == kEventSamples ? seg.y1 : seg.eval(ts[k])));
  }
  std::vector<double> knots{ts[0]};
  std::vector<double> values{gs[0]};
  auto g_at = [&](double t) { return event.value(seg.eval(t)); };
  for (int k = 1; k <= kEventSamples; ++k) {
    if (k < kEventSamples) {
      const bool is_min = gs[k] <= gs[k - 1] && gs[k] <= gs[k + 1];
      const bool is_max = gs[k] >= gs[k - 1] && gs[k] >= gs[k + 1];
      const bool same_side =
          (gs[k - 1] > 0.0) == (gs[k] > 0.0) && (gs[k] > 0.0) == (gs[k + 1] > 0.0);
      if ((is_min || is_max) && same_side && !(is_min && is_max)) {
        const double te = golden_extremum(g_at, ts[k - 1], ts[k + 1], is_min);
        const double ge = g_at(te);
        if ((ge > 0.0) != (gs[k] > 0.0)) {
          // Insert the extremum in time order relative to sample k.
          if (te < ts[k]) {
            knots.push_back(te);
            values.push_back(ge);
            knots.push_back(ts[k]);
            values.push_back(gs[k]);
          } else {
            knots.push_back(ts[k]);
            values.push_back(gs[k]);
            knots.push_back(te);
            values.push_back(ge);
          }
          continue;
        }
      }
    }
    if (knots.back() < ts[k]) {
      knots.push_back(ts[k]);
      values.push_back(gs[k]);
    }
  }
  std::vector<Bracket> out;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if ((values[i - 1] > 0.0) != (values[i] > 0.0) && knots[i] > knots[i - 1]) {
      out.push_back({knots[i - 1], knots[i]});
    }
  }
  return out;
}

}  // namespace

const char* to_string(FlowStatus status) {
  switch (status) {
    case FlowStatus::kCompleted: return "completed";
    case FlowStatus::kStopped: return "stopped";
    case FlowStatus::kDiverged: return "diverged";
    case FlowStatus::kFailed: return "failed";
  }
  return "unknown";
}

Vec Segment::eval(double t) const {
  const double theta = h == 0.0 ? 0.0 : (t - t0) / h;
  const double theta1 = 1.0 - theta;
  return coef[0] +
         theta * (coef[1] + theta1 * (coef[2] + theta * (coef[3] + theta1 * coef[4])));
}

Vec Trajectory::final_state() const { return last_.size() == 0 ? x0_ : last_; }

Vec Trajectory::at(double t) const {
  if (!(t >= t0_ && t <= t_end_)) {
    std::ostringstream msg;
    msg << "t=" << t << " outside trajectory span [" << t0_ << ", " << t_end_ << "]";
    throw Error(ErrorCode::kDomain, msg.str());
  }
  if (t == t_end_) return final_state();
  if (segments_.empty()) {
    if (t == t0_) return x0_;
    throw Error(ErrorCode::kDomain, "trajectory has no stored segments");
  }
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double v, const Segment& s) { return v < s.t0; });
  if (it == segments_.begin()) return x0_;
  --it;
  return it->eval(t);
}

void Trajectory::append(Segment seg, bool keep) {
  t_end_ = seg.t1();
  last_ = seg.y1;
  if (keep) segments_.push_back(std::move(seg));
}

EventTrace integrate(const Rhs& rhs, const Vec& x0, double t0, double t1,
                     const IntegrateOptions& options, const EventFunction* event,
                     const StepObserver& observer) {
  if (!(t1 > t0)) throw Error(ErrorCode::kDomain, "integration span must have t1 > t0");
  if (!(options.tol.rel > 0.0) || !(options.tol.abs > 0.0)) {
    throw Error(ErrorCode::kDomain, "tolerances must be positive");
  }
  if (!x0.allFinite()) throw Error(ErrorCode::kDomain, "initial state is not finite");

  EventTrace out{Trajectory(t0, x0), {}};
  Trajectory& traj = out.trajectory;
  const Tolerance& tol = options.tol;
  const double h_max = options.h_max > 0.0 ? options.h_max : (t1 - t0);

  Vec y = x0;
  Vec k1 = rhs(y);
  if (!k1.allFinite()) {
    traj.status = FlowStatus::kDiverged;
    traj.message = "non-finite field at initial state";
    return out;
  }
  double t = t0;
  double h = initial_step(rhs, y, k1, h_max, tol);
  double facmax = 10.0;
  const double eps = std::numeric_limits<double>::epsilon();

  while (t < t1) {
    if (traj.accepted + traj.rejected >= options.max_steps) {
      traj.status = FlowStatus::kFailed;
      traj.message = "step budget exhausted";
      return out;
    }
    bool last = false;
    if (t + h >= t1 || t + 1.01 * h >= t1) {
      h = t1 - t;
      last = true;
    }
    if (h < 10.0 * eps * std::max(1.0, std::abs(t))) {
      traj.status = FlowStatus::kFailed;
      std::ostringstream msg;
      msg << "step size underflow at t=" << t;
      traj.message = msg.str();
      return out;
    }
    const Vec k2 = rhs(y + h * a21 * k1);
    const Vec k3 = rhs(y + h * (a31 * k1 + a32 * k2));
    const Vec k4 = rhs(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec k5 = rhs(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec k6 = rhs(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Vec y_new = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const Vec k7 = rhs(y_new);
    const Vec err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double en = error_norm(err, y, y_new, tol);
    if (!std::isfinite(en)) en = 1e10;

    if (en > 1.0) {
      ++traj.rejected;
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
      facmax = 1.0;
      continue;
    }
    ++traj.accepted;

    Segment seg;
    seg.t0 = t;
    seg.h = h;
    seg.y0 = y;
    seg.y1 = y_new;
    const Vec ydiff = y_new - y;
    const Vec bspl = h * k1 - ydiff;
    seg.coef[0] = y;
    seg.coef[1] = ydiff;
    seg.coef[2] = bspl;
    seg.coef[3] = ydiff - h * k7 - bspl;
    seg.coef[4] = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);

    const bool escaped = !y_new.allFinite() || y_new.norm() > options.r_escape;
    if (event != nullptr && y_new.allFinite()) {
      for (const Bracket& br : find_brackets(seg, *event)) {
        out.crossings.push_back(polish(seg, *event, rhs, br));
      }
    }
    t = last ? t1 : t + h;
    const bool stop = !escaped && observer && observer(seg, out.crossings);
    traj.append(std::move(seg), options.keep_segments);
    if (escaped) {
      traj.status = FlowStatus::kDiverged;
      std::ostringstream msg;
      msg << "escape at t=" << t;
      traj.message = msg.str();
      return out;
    }
    if (stop) {
      traj.status = FlowStatus::kStopped;
      return out;
    }
    y = y_new;
    k1 = k7;
    const double fac = std::min(facmax, std::max(0.2, 0.9 * std::pow(std::max(en, 1e-12), -0.2)));
    h = std::min(h * fac, h_max);
    facmax = 10.0;
  }
  traj.status = FlowStatus::kCompleted;
  return out;
}

namespace {

IntegrateOptions options_for(const Tolerance& tol, double r_escape) {
  IntegrateOptions opt;
  opt.tol = tol;
  opt.r_escape = r_escape;
  return opt;
}

}  // namespace

Trajectory flow(const VectorFieldModel& system, const Vec& x0, const ParamPoint& p,
                double t0, double t1, const Tolerance& tol) {
  system.validate(p);
  system.validate_state(x0);
  const Rhs rhs = [&](const Vec& x) { return system.field(x, p); };
  return integrate(rhs, x0, t0, t1, options_for(tol, 1e6)).trajectory;
}

EventTrace flow_events(const VectorFieldModel& system, const Vec& x0, const ParamPoint& p,
                       double t0, double t1, const Tolerance& tol,
                       const EventFunction& event, const StepObserver& observer,
                       double r_escape) {
  system.validate(p);
  system.validate_state(x0);
  const Rhs rhs = [&](const Vec& x) { return system.field(x, p); };
  return integrate(rhs, x0, t0, t1, options_for(tol, r_escape), &event, observer);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, double stride) {
  if (!(stride > 0.0)) throw Error(ErrorCode::kDomain, "stride must be positive");
  const auto n = traj.initial_state().size();
  out << "t";
  for (Eigen::Index i = 0; i < n; ++i) out << ",x" << (i + 1);
  out << "\n";
  out.precision(9);
  auto row = [&](double t) {
    const Vec x = traj.at(t);
    out << t;
    for (Eigen::Index i = 0; i < n; ++i) out << "," << x[i];
    out << "\n";
  };
  const auto count = static_cast<long long>(std::floor((traj.t_end() - traj.t0()) / stride));
  for (long long k = 0; k <= count; ++k) {
    const double t = traj.t0() + double(k) * stride;
    if (t < traj.t_end()) row(t);
  }
  row(traj.t_end());
}

}  // namespace roa
