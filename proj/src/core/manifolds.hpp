#pragma once

#include "equilibria.hpp"
#include "integrator.hpp"
#include "systems.hpp"

#include <string>
#include <vector>

namespace roa {

// The Recovered/Escaped split depends on these values; they are echoed in
// every result record.
struct MembershipPolicy {
  double delta = 1e-3;        // capture radius around the stable equilibrium
  double t_max = 200.0;       // integration horizon
  double r_escape = 1e3;      // |x| beyond this is an escape
  double check_horizon = 5.0; // after capture the orbit must stay within 2*delta
  Tolerance tol;
};

enum class Verdict { kRecovered, kEscaped, kUnresolved };
const char* to_string(Verdict v);

struct ClassifyOutcome {
  Verdict verdict = Verdict::kUnresolved;
  double t = 0.0;  // t_conv, t_escape or t_max
  Vec final_state;
  // Closest approach to each of the `watch` points passed to classify_point.
  std::vector<double> watch_min_distance;
  std::string note;
};

// Distance from x to the nearest translate of `target` along the angle
// coordinate (plain distance for systems without one). `shift` receives the
// translate index.
double cell_distance(const VectorFieldModel& system, const Vec& x, const Vec& target,
                     int* shift = nullptr);

ClassifyOutcome classify_point(const VectorFieldModel& system, const Vec& x,
                               const ParamPoint& p, const Vec& sep,
                               const MembershipPolicy& policy = {},
                               const std::vector<Vec>& watch = {});

struct Window {
  Vec lo;
  Vec hi;
  bool contains(const Vec& x) const;
};

struct BoundarySample {
  ParamPoint p;
  std::vector<Vec> points;
  std::vector<double> arclength;  // signed arclength from the saddle (2-D traces)
  Vec saddle;
  double eps = 0.0;
  double stride = 0.0;
  Window window;
  bool partial = false;  // a half-branch stopped before leaving the window
  // 1-D only: which ends were found inside the window.
  bool has_lower = false;
  bool has_upper = false;
  std::string note;
};

struct TraceOptions {
  double arclength_budget = 60.0;
  Tolerance tol{1e-10, 1e-12};
};

BoundarySample trace_stable_manifold_2d(const VectorFieldModel& system,
                                        const Equilibrium& saddle, const ParamPoint& p,
                                        double eps, const Window& window, double stride,
                                        const TraceOptions& options = {});

// RoA interval endpoints of a 1-D system from the phase-line sign structure.
BoundarySample boundary_1d(const VectorFieldModel& system, const Equilibrium& sep,
                           const ParamPoint& p, const Window& window, double tol,
                           const MembershipPolicy& policy = {});

// Angle coordinate reduced into (-period/2, period/2].
Vec reduce_angles(const VectorFieldModel& system, Vec x);

}  // namespace roa
