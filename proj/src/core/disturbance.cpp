#include "disturbance.hpp"

#include <cmath>

namespace roa {

Vec disturbance_ic(const ParamPoint& p, const Tolerance& tol) {
  static const ModelPtr fault = make_system("pendulum-fault");
  fault->validate(p);
  const Vec sep = pendulum_sep(p);
  const double duration = p.get("c4");
  if (duration == 0.0) return sep;
  return flow(*fault, sep, p, 0.0, duration, tol).final_state();
}

Vec disturbance_ic_closed_form(const ParamPoint& p) {
  const Vec sep = pendulum_sep(p);
  const double c2 = p.get("c2");
  const double c3 = p.get("c3");
  const double t = p.get("c4");
  Vec z(2);
  if (c2 == 0.0) {
    z << sep[0] + 0.5 * c3 * t * t, c3 * t;
    return z;
  }
  const double decay = -std::expm1(-c2 * t);
  z << sep[0] + (c3 / c2) * t - (c3 / (c2 * c2)) * decay, (c3 / c2) * decay;
  return z;
}

}  // namespace roa
