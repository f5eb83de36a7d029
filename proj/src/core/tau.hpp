#pragma once

#include "integrator.hpp"
#include "manifolds.hpp"
#include "systems.hpp"

#include <string>
#include <utility>
#include <vector>

namespace roa {

// Closed ball {x : |x - center| <= radius}.
struct Neighborhood {
  Vec center;
  double radius = 1.0;

  double signed_distance(const Vec& x) const { return (x - center).norm() - radius; }
  bool contains(const Vec& x) const { return signed_distance(x) <= 0.0; }
};

struct TauPolicy {
  double delta = 1e-3;           // capture radius at the stable equilibrium
  double t_max = 200.0;
  // An orbit that comes this close to a saddle inside the ball is treated as
  // converging to it: the time in the ball is reported as unbounded.
  double saddle_capture = 1e-3;
  double margin_tol = 1e-4;      // transversality threshold on |d/dt (|x-c| - r)|
  double r_escape = 1e3;
  Tolerance tol;
};

struct TauResult {
  // Closed intervals [t_in, t_out]; t_out is +inf only on an unbounded tail.
  std::vector<std::pair<double, double>> intervals;
  double total = 0.0;
  std::vector<EventCrossing> crossings;
  double min_margin = INFINITY;
  bool diverged = false;
  bool started_inside = false;
  bool recovered = false;  // orbit captured by the stable equilibrium
  bool truncated = false;  // still inside the ball at t_max without saddle capture
  bool transversality_warning = false;
  double t_stop = 0.0;
  double min_saddle_distance = INFINITY;
  std::string stop_reason;
};

TauResult tau_in_neighborhood(const VectorFieldModel& system, const Vec& y,
                              const ParamPoint& p, const Neighborhood& ball, const Vec& sep,
                              const std::vector<Vec>& saddles, const TauPolicy& policy = {});

struct TransversalityReport {
  double min_margin = INFINITY;
  std::vector<double> margins;
  bool pass = true;
  std::string suggestion;
};

TransversalityReport transversality_report(const TauResult& result, double margin_tol = 1e-4);

}  // namespace roa
