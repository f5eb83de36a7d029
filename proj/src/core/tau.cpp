#include "tau.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace roa {

TauResult tau_in_neighborhood(const VectorFieldModel& system, const Vec& y,
                              const ParamPoint& p, const Neighborhood& ball, const Vec& sep,
                              const std::vector<Vec>& saddles, const TauPolicy& policy) {
  system.validate(p);
  system.validate_state(y);
  if (!(ball.radius > 0.0)) throw Error(ErrorCode::kDomain, "ball radius must be positive");
  if (ball.center.size() != y.size() || sep.size() != y.size()) {
    throw Error(ErrorCode::kDomain, "ball center and equilibrium must match the state dimension");
  }
  if (!(policy.delta > 0.0) || !(policy.t_max > 0.0) || !(policy.saddle_capture >= 0.0) ||
      !(policy.margin_tol >= 0.0) || !(policy.r_escape > 0.0)) {
    throw Error(ErrorCode::kDomain, "tau policy values must be positive");
  }
  const double g0 = ball.signed_distance(y);
  if (std::abs(g0) < 1e-12) {
    throw Error(ErrorCode::kDegenerateStart, "initial condition lies on the ball boundary");
  }

  TauResult out;
  out.started_inside = g0 < 0.0;

  // Stopping at SEP capture is only safe when the capture ball cannot reach N.
  const bool sep_clear = ball.signed_distance(sep) > 2.0 * policy.delta;
  std::vector<Vec> inner_saddles;
  for (const Vec& s : saddles) {
    if (ball.signed_distance(s) < 0.0) inner_saddles.push_back(s);
  }
  const auto angle = system.angle();

  enum class Stop { kNone, kSep, kSaddle, kEscape } stop = Stop::kNone;
  const StepObserver observer = [&](const Segment& seg, const std::vector<EventCrossing>&) {
    for (const Vec& s : inner_saddles) {
      double d = (seg.y1 - s).norm();
      for (int k = 1; k < 8; ++k) d = std::min(d, (seg.eval(seg.t0 + seg.h * k / 8.0) - s).norm());
      out.min_saddle_distance = std::min(out.min_saddle_distance, d);
      if (d < policy.saddle_capture) {
        stop = Stop::kSaddle;
        return true;
      }
    }
    if (angle && std::abs(seg.y1[angle->index] - sep[angle->index]) > angle->period &&
        !ball.contains(seg.y1)) {
      stop = Stop::kEscape;
      return true;
    }
    if (sep_clear && (seg.y1 - sep).norm() < policy.delta) {
      stop = Stop::kSep;
      return true;
    }
    return false;
  };

  EventFunction event;
  event.value = [&](const Vec& x) { return ball.signed_distance(x); };
  event.gradient = [&](const Vec& x) -> Vec {
    Vec d = x - ball.center;
    const double n = d.norm();
    return n > 0.0 ? Vec(d / n) : Vec(Vec::Zero(x.size()));
  };
  const EventTrace trace = flow_events(system, y, p, 0.0, policy.t_max, policy.tol, event,
                                       observer, policy.r_escape);
  const Trajectory& traj = trace.trajectory;
  out.crossings = trace.crossings;
  out.t_stop = traj.t_end();
  if (traj.status == FlowStatus::kFailed) {
    throw Error(ErrorCode::kIntegration, "tau integration failed: " + traj.message);
  }

  // Assemble intervals from crossing parity.
  bool inside = out.started_inside;
  double t_in = 0.0;
  for (const EventCrossing& c : out.crossings) {
    const int expected = inside ? +1 : -1;
    if (c.direction != expected) {
      std::ostringstream msg;
      msg << "crossing at t=" << c.t_cross << " has direction " << c.direction
          << " but the orbit is " << (inside ? "inside" : "outside") << " the ball";
      throw Error(ErrorCode::kParity, msg.str());
    }
    if (inside) {
      out.intervals.emplace_back(t_in, c.t_cross);
    } else {
      t_in = c.t_cross;
    }
    inside = !inside;
    out.min_margin = std::min(out.min_margin, c.margin);
  }
  const bool ends_inside = ball.contains(traj.final_state());
  if (inside != ends_inside && std::abs(ball.signed_distance(traj.final_state())) > 1e-9) {
    throw Error(ErrorCode::kParity, "crossing parity disagrees with the final state");
  }

  switch (stop) {
    case Stop::kSaddle: out.stop_reason = "saddle capture"; break;
    case Stop::kSep: out.stop_reason = "stable equilibrium capture"; break;
    case Stop::kEscape: out.stop_reason = "escaped"; break;
    case Stop::kNone:
      out.stop_reason = traj.status == FlowStatus::kDiverged ? "diverged" : "t_max";
      break;
  }
  out.recovered = stop == Stop::kSep ||
                  (stop == Stop::kNone && (traj.final_state() - sep).norm() < policy.delta);
  if (inside) {
    out.intervals.emplace_back(t_in, INFINITY);
    out.diverged = true;
    out.truncated = stop != Stop::kSaddle;
  }
  out.total = 0.0;
  for (const auto& [a, b] : out.intervals) out.total += b - a;
  out.transversality_warning = out.min_margin < policy.margin_tol;
  return out;
}

TransversalityReport transversality_report(const TauResult& result, double margin_tol) {
  TransversalityReport r;
  for (const EventCrossing& c : result.crossings) {
    r.margins.push_back(c.margin);
    r.min_margin = std::min(r.min_margin, c.margin);
  }
  r.pass = r.margins.empty() || r.min_margin >= margin_tol;
  if (!r.pass) {
    std::ostringstream msg;
    msg << "orbit meets the ball boundary almost tangentially (margin " << r.min_margin
        << " < " << margin_tol << "); perturb the radius";
    r.suggestion = msg.str();
  }
  return r;
}

}  // namespace roa
