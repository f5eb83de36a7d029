#include "equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace roa {

std::string to_string(const Classification& c) {
  switch (c.kind) {
    case Stability::kStableHyperbolic: return "StableHyperbolic";
    case Stability::kSaddle: return "Saddle(" + std::to_string(c.unstable_dim) + ")";
    case Stability::kNonHyperbolic: return "NonHyperbolic";
  }
  return "unknown";
}

double Equilibrium::min_abs_real() const {
  double m = INFINITY;
  for (const auto& l : eigenvalues) m = std::min(m, std::abs(l.real()));
  return m;
}

std::vector<std::complex<double>> eigenvalues_of(const Mat& m) {
  Eigen::EigenSolver<Mat> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kDomain, "eigenvalue computation failed");
  }
  std::vector<std::complex<double>> out(solver.eigenvalues().begin(),
                                        solver.eigenvalues().end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

Classification classify_eigenvalues(const std::vector<std::complex<double>>& eigenvalues,
                                    double margin) {
  Classification c;
  bool marginal = false;
  for (const auto& l : eigenvalues) {
    if (std::abs(l.real()) <= margin) marginal = true;
    if (l.real() > margin) ++c.unstable_dim;
  }
  if (marginal) {
    c.kind = Stability::kNonHyperbolic;
  } else if (c.unstable_dim == 0) {
    c.kind = Stability::kStableHyperbolic;
  } else {
    c.kind = Stability::kSaddle;
  }
  return c;
}

Classification classify_equilibrium(const Equilibrium& eq, double margin) {
  return classify_eigenvalues(eq.eigenvalues, margin);
}

Equilibrium find_equilibrium(const VectorFieldModel& system, const Vec& x_guess,
                             const ParamPoint& p, const NewtonOptions& options) {
  system.validate(p);
  system.validate_state(x_guess);
  if (!(options.tol > 0.0) || options.max_iterations < 1 || !(options.margin >= 0.0)) {
    throw Error(ErrorCode::kDomain, "newton options must be positive");
  }
  auto jac = [&](const Vec& x) {
    return system.has_analytic_jacobian() ? system.analytic_jacobian(x, p)
                                          : finite_difference_jacobian(system, x, p);
  };

  Vec x = x_guess;
  Vec f = system.field(x, p);
  double res = f.norm();
  int iter = 0;
  while (!(res < options.tol)) {
    if (iter++ >= options.max_iterations || !std::isfinite(res)) {
      std::ostringstream msg;
      msg << "Newton did not converge in " << options.max_iterations
          << " iterations (residual " << res << ")";
      throw Error(ErrorCode::kNotFound, msg.str());
    }
    const Mat j = jac(x);
    Eigen::FullPivLU<Mat> lu(j);
    if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-300) {
      throw Error(ErrorCode::kFoldSuspected, "singular Jacobian during Newton solve");
    }
    const Vec dx = lu.solve(-f);
    // Halving line search on |V|.
    double alpha = 1.0;
    Vec x_try = x + dx;
    Vec f_try = system.field(x_try, p);
    for (int k = 0; k < 30 && !(f_try.norm() < res); ++k) {
      alpha *= 0.5;
      x_try = x + alpha * dx;
      f_try = system.field(x_try, p);
    }
    if (!(f_try.norm() < res)) {
      // Line search stalled: accept the full step once more only if it reached
      // round-off level; otherwise report non-convergence.
      if (f_try.norm() <= res * (1.0 + 1e-12) && res < 1e3 * options.tol) break;
      throw Error(ErrorCode::kNotFound, "line search failed to reduce the residual");
    }
    x = x_try;
    f = f_try;
    res = f.norm();
  }
  if (!(res < options.tol)) {
    throw Error(ErrorCode::kNotFound, "residual above tolerance");
  }

  Equilibrium eq;
  eq.x = x;
  eq.p = p;
  eq.residual = res;
  eq.jacobian = jac(x);
  eq.eigenvalues = eigenvalues_of(eq.jacobian);
  eq.classification = classify_eigenvalues(eq.eigenvalues, options.margin);
  return eq;
}

namespace {

struct Attempt {
  bool ok = false;
  Equilibrium eq;
};

Attempt try_correct(const VectorFieldModel& system, const Equilibrium& from,
                    const std::string& p_name, double value, const NewtonOptions& opt) {
  ParamPoint p = from.p;
  p.set(p_name, value);
  try {
    Equilibrium eq = find_equilibrium(system, from.x, p, opt);
    // Landing on another branch counts as a failed correction.
    if (eq.classification.kind != Stability::kNonHyperbolic &&
        from.classification.kind != Stability::kNonHyperbolic &&
        !(eq.classification == from.classification)) {
      return {};
    }
    return {true, std::move(eq)};
  } catch (const Error&) {
    return {};
  }
}

}  // namespace

EquilibriumBranch continue_branch(const VectorFieldModel& system, const Equilibrium& eq0,
                                  const std::string& p_name, double p_lo, double p_hi,
                                  double step, const ContinuationOptions& options) {
  if (!(eq0.residual < options.newton.tol) || eq0.x.size() == 0) {
    throw Error(ErrorCode::kPrecondition, "starting equilibrium is not converged");
  }
  if (!(step > 0.0)) throw Error(ErrorCode::kDomain, "continuation step must be positive");
  if (std::abs(eq0.p.get(p_name) - p_lo) > 1e-12 * std::max(1.0, std::abs(p_lo))) {
    throw Error(ErrorCode::kPrecondition, "starting equilibrium is not at the range start");
  }

  EquilibriumBranch branch;
  branch.p_name = p_name;
  branch.points.push_back(eq0);
  const double dir = p_hi >= p_lo ? 1.0 : -1.0;
  const double span = std::abs(p_hi - p_lo);
  const double margin0 = eq0.min_abs_real();

  // On the nominal step, positions are snapped to k*step so the grid does not
  // accumulate rounding.
  double pos = 0.0;  // distance travelled from p_lo
  double h = step;
  int halvings = 0;
  while (pos < span - 1e-12 * step) {
    const double next_pos =
        std::min(h == step ? (std::round(pos / step) + 1.0) * step : pos + h, span);
    const double value = p_lo + dir * next_pos;
    Attempt a = try_correct(system, branch.points.back(), p_name, value, options.newton);
    const bool thin_margin =
        a.ok && a.eq.min_abs_real() < 10.0 * options.newton.margin;
    if (a.ok && !thin_margin) {
      branch.points.push_back(std::move(a.eq));
      pos = next_pos;
      // Return to the nominal step once back on a grid multiple.
      const double ratio = pos / step;
      if (h < step && std::abs(ratio - std::round(ratio)) < 1e-9) {
        h = step;
        halvings = 0;
      }
      continue;
    }
    if (halvings < options.max_halvings) {
      h *= 0.5;
      ++halvings;
      continue;
    }
    // Continuation failed; decide between fold and a plain breakdown.
    const Equilibrium& last = branch.points.back();
    const double collapsed = last.min_abs_real();
    if (collapsed < options.collapse_ratio * margin0) {
      // Bisect between the last converged value and the failed one.
      double good = pos;
      double bad = next_pos;
      Equilibrium best = last;
      while (bad - good > options.fold_tol) {
        const double mid = 0.5 * (good + bad);
        Attempt m = try_correct(system, best, p_name, p_lo + dir * mid, options.newton);
        if (m.ok) {
          good = mid;
          best = std::move(m.eq);
        } else {
          bad = mid;
        }
      }
      Fold fold;
      fold.p_fold = best.p.get(p_name);
      fold.x_fold = best.x;
      fold.min_abs_real = best.min_abs_real();
      if (good > pos) branch.points.push_back(best);
      branch.fold = fold;
      std::ostringstream msg;
      msg << "fold at " << p_name << "=" << fold.p_fold << ", min |Re lambda| "
          << fold.min_abs_real;
      branch.note = msg.str();
    } else {
      branch.incomplete = true;
      std::ostringstream msg;
      msg << "continuation failed at " << p_name << "=" << value
          << " without eigenvalue collapse";
      branch.note = msg.str();
    }
    break;
  }
  return branch;
}

}  // namespace roa
