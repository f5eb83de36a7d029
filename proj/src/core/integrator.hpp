#pragma once

#include "common.hpp"
#include "systems.hpp"

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace roa {

struct Tolerance {
  double rel = 1e-9;
  double abs = 1e-11;
};

// One accepted Dormand-Prince step with its 4th-order continuous extension.
struct Segment {
  double t0 = 0.0;
  double h = 0.0;
  Vec y0;
  Vec y1;
  std::array<Vec, 5> coef;  // Hairer's rcont1..rcont5

  double t1() const { return t0 + h; }
  Vec eval(double t) const;
};

enum class FlowStatus {
  kCompleted,  // reached the end of the requested span
  kStopped,    // an observer asked to stop
  kDiverged,   // |x| exceeded the escape radius or became non-finite
  kFailed,     // step size underflow
};

const char* to_string(FlowStatus status);

class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(double t0, Vec x0) : t0_(t0), t_end_(t0), x0_(std::move(x0)) {}

  double t0() const { return t0_; }
  double t_end() const { return t_end_; }
  const Vec& initial_state() const { return x0_; }
  Vec final_state() const;
  // Dense-output state; throws a domain error outside [t0, t_end].
  Vec at(double t) const;

  const std::vector<Segment>& segments() const { return segments_; }
  void append(Segment seg, bool keep);

  std::size_t accepted = 0;
  std::size_t rejected = 0;
  FlowStatus status = FlowStatus::kCompleted;
  std::string message;

 private:
  double t0_ = 0.0;
  double t_end_ = 0.0;
  Vec x0_;
  Vec last_;
  std::vector<Segment> segments_;
};

struct EventCrossing {
  double t_cross = 0.0;
  Vec state;
  int direction = 0;  // +1: event function turns positive, -1: turns non-positive
  double margin = 0.0;  // |dg/dt| at the crossing
};

struct EventFunction {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;  // optional
};

using Rhs = std::function<Vec(const Vec&)>;
// Called after every accepted step; returning true stops the integration.
using StepObserver =
    std::function<bool(const Segment&, const std::vector<EventCrossing>&)>;

struct IntegrateOptions {
  Tolerance tol;
  double r_escape = 1e6;
  double h_max = 0.0;  // 0: span length
  std::size_t max_steps = 5'000'000;
  bool keep_segments = true;
};

struct EventTrace {
  Trajectory trajectory;
  std::vector<EventCrossing> crossings;
};

constexpr double kEventTolerance = 1e-10;

// Autonomous Dormand-Prince 5(4) from t0 to t1 > t0. Divergence and step
// underflow are reported through Trajectory::status, not thrown.
EventTrace integrate(const Rhs& rhs, const Vec& x0, double t0, double t1,
                     const IntegrateOptions& options, const EventFunction* event = nullptr,
                     const StepObserver& observer = {});

Trajectory flow(const VectorFieldModel& system, const Vec& x0, const ParamPoint& p,
                double t0, double t1, const Tolerance& tol = {});

EventTrace flow_events(const VectorFieldModel& system, const Vec& x0, const ParamPoint& p,
                       double t0, double t1, const Tolerance& tol,
                       const EventFunction& event, const StepObserver& observer = {},
                       double r_escape = 1e6);

// CSV with header t,x1,...,xn sampled every `stride` plus the final time.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, double stride);

}  // namespace roa
