#pragma once

#include "equilibria.hpp"
#include "manifolds.hpp"
#include "systems.hpp"
#include "tau.hpp"

#include <optional>
#include <string>
#include <vector>

namespace roa {

enum class IcRule {
  kDisturbance,  // y_p from the fault dynamics (pendulum only)
  kAffine,       // y_p = y0 + A (q - q_base) over the free coordinates q
};

// A parametrized initial condition together with the bookkeeping needed to
// decide recovery: the free parameter box, equilibrium guesses at the base
// point and the membership policy.
struct Scenario {
  ModelPtr system;
  ParamPoint base;
  std::vector<std::string> free;
  std::vector<double> box_lo;
  std::vector<double> box_hi;
  IcRule ic_rule = IcRule::kDisturbance;
  Vec affine_y0;
  Mat affine_a;
  Vec sep_guess;                 // stable equilibrium at `base`
  std::vector<Vec> saddle_guesses;  // saddles at `base`
  MembershipPolicy policy;
  NewtonOptions newton;

  std::size_t dim() const { return free.size(); }
  std::vector<double> coords(const ParamPoint& p) const;
  ParamPoint at(const std::vector<double>& q) const;
  bool in_box(const std::vector<double>& q, double slack = 1e-12) const;
  Vec initial_condition(const ParamPoint& p) const;
};

// Pendulum with the disturbance initial condition. `free` names the varied
// parameters; the box bounds follow the same order.
Scenario make_fault_scenario(const ParamPoint& base, std::vector<std::string> free,
                             std::vector<double> box_lo, std::vector<double> box_hi);

// Equilibria at p obtained by continuation from the scenario's base guesses.
std::optional<Equilibrium> sep_at(const Scenario& scenario, const ParamPoint& p);
std::vector<Equilibrium> saddles_at(const Scenario& scenario, const ParamPoint& p);

enum class ParamVerdict { kRecovered, kNotRecovered, kUnresolved };
const char* to_string(ParamVerdict v);

struct ParamClassification {
  ParamVerdict verdict = ParamVerdict::kUnresolved;
  bool no_sep = false;
  Vec y;
  Vec sep;
  ClassifyOutcome outcome;
};

ParamClassification classify_param(const Scenario& scenario, const ParamPoint& p,
                                   const MembershipPolicy* policy = nullptr);

struct BisectStep {
  double s_lo;
  double s_hi;
  double s_mid;
  ParamVerdict verdict;
};

struct BisectResult {
  ParamPoint p_star;  // bracket midpoint
  ParamPoint p_lo;    // recovered side
  ParamPoint p_hi;    // not-recovered side
  double width = 0.0; // bracket width in parameter distance
  int iterations = 0;
  std::vector<BisectStep> history;
  bool unresolved_seen = false;
  std::vector<std::string> warnings;
};

BisectResult bisect_boundary(const Scenario& scenario, const ParamPoint& p_a,
                             const ParamPoint& p_b, double tol_p);

// Saddle (among those continued from the scenario guesses) that the orbit of
// y_p approaches most closely: the controlling critical element at a boundary
// parameter.
struct ControllingElement {
  std::size_t index = 0;
  Vec x;
  double min_distance = INFINITY;
};
std::optional<ControllingElement> controlling_element(const Scenario& scenario,
                                                      const ParamPoint& p);

// Ball specification resolved against a path.
Neighborhood ball_at_saddle(const Scenario& scenario, const ParamPoint& p, double radius);

struct TauSample {
  double s = 0.0;
  ParamPoint p;
  TauResult tau;
  bool no_sep = false;
};

// tau at a single parameter, with the SEP and saddles continued to p.
TauSample tau_at(const Scenario& scenario, const ParamPoint& p, const Neighborhood& ball,
                 const TauPolicy& policy);

struct ThresholdOptions {
  double initial_ds = 1.0 / 16.0;
  double s_tol = 1e-13;
  // Large thresholds are only reached by orbits passing within ~1e-8 of the
  // saddle, so capture must be much tighter than for a single tau query.
  TauPolicy tau = [] {
    TauPolicy t;
    t.saddle_capture = 1e-9;
    return t;
  }();
};

enum class ThresholdStatus {
  kThresholdReached,
  kDiverged,
  // Refinement reached the recovery boundary at resolution s_tol before tau
  // reached the threshold on the recovered side.
  kResolutionLimited,
};
const char* to_string(ThresholdStatus s);

struct ThresholdResult {
  ThresholdStatus status = ThresholdStatus::kThresholdReached;
  double s = 0.0;
  ParamPoint p;
  double tau = 0.0;
  double max_tau = 0.0;
  int evaluations = 0;
  std::vector<TauSample> samples;
  std::vector<std::string> warnings;
};

// Walks the affine path p_start -> p_end until tau reaches `threshold` (or the
// orbit is captured by the saddle), refining the first crossing by bisection.
ThresholdResult tau_threshold_search(const Scenario& scenario, const ParamPoint& p_start,
                                     const ParamPoint& p_end, const Neighborhood& ball,
                                     double threshold, const ThresholdOptions& options = {});

struct RayHit {
  std::vector<double> direction;
  bool hit = false;
  std::vector<double> p_star;
  double bracket = 0.0;
  double distance = INFINITY;   // |p_star - p0| when hit
  double edge_distance = 0.0;   // distance to the box edge along the ray
  bool straddle_ok = false;     // recovered at -tol, not recovered at +tol
  bool unresolved_seen = false;
};

struct RecoveryEstimate {
  std::vector<double> p0;
  std::vector<RayHit> rays;
  std::optional<std::size_t> nearest;
  double nearest_distance = INFINITY;
  double tol_p = 0.0;
};

RecoveryEstimate estimate_recovery_boundary(const Scenario& scenario,
                                            const std::vector<double>& p0,
                                            const std::vector<std::vector<double>>& directions,
                                            double tol_p, std::size_t workers = 1);

}  // namespace roa
