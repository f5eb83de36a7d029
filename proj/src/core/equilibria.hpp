#pragma once

#include "common.hpp"
#include "systems.hpp"

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace roa {

enum class Stability { kStableHyperbolic, kSaddle, kNonHyperbolic };

struct Classification {
  Stability kind = Stability::kNonHyperbolic;
  int unstable_dim = 0;  // count of eigenvalues with Re > margin

  friend bool operator==(const Classification&, const Classification&) = default;
};

std::string to_string(const Classification& c);

struct Equilibrium {
  Vec x;
  ParamPoint p;
  double residual = 0.0;
  std::vector<std::complex<double>> eigenvalues;
  Mat jacobian;
  Classification classification;

  // Smallest |Re lambda|; the hyperbolicity margin actually observed.
  double min_abs_real() const;
};

struct NewtonOptions {
  double tol = 1e-10;
  int max_iterations = 100;
  double margin = 1e-8;
};

Equilibrium find_equilibrium(const VectorFieldModel& system, const Vec& x_guess,
                             const ParamPoint& p, const NewtonOptions& options = {});

Classification classify_eigenvalues(const std::vector<std::complex<double>>& eigenvalues,
                                    double margin = 1e-8);
Classification classify_equilibrium(const Equilibrium& eq, double margin = 1e-8);

// Eigenvalues of a dense real matrix sorted by (real, imag).
std::vector<std::complex<double>> eigenvalues_of(const Mat& m);

struct Fold {
  double p_fold = 0.0;
  Vec x_fold;
  double min_abs_real = 0.0;
};

struct EquilibriumBranch {
  std::string p_name;
  std::vector<Equilibrium> points;
  std::optional<Fold> fold;
  // Continuation stopped before the range end without a collapsed margin.
  bool incomplete = false;
  std::string note;
};

struct ContinuationOptions {
  NewtonOptions newton;
  int max_halvings = 12;
  // A failure counts as a fold when min |Re lambda| at the last converged point
  // has dropped below this fraction of its value at the branch start.
  double collapse_ratio = 0.05;
  double fold_tol = 1e-10;
};

// Natural-parameter continuation of eq0 in `p_name` from p_lo to p_hi.
EquilibriumBranch continue_branch(const VectorFieldModel& system, const Equilibrium& eq0,
                                  const std::string& p_name, double p_lo, double p_hi,
                                  double step, const ContinuationOptions& options = {});

}  // namespace roa
