#include "systems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace roa {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSchema: return "schema";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kNotFound: return "not-found";
    case ErrorCode::kFoldSuspected: return "fold-suspected";
    case ErrorCode::kPrecondition: return "precondition";
    case ErrorCode::kIntegration: return "integration-failure";
    case ErrorCode::kEventLocalization: return "event-localization";
    case ErrorCode::kNoSep: return "no-sep";
    case ErrorCode::kDegenerateStart: return "degenerate-start";
    case ErrorCode::kParity: return "parity";
    case ErrorCode::kBracket: return "bracket";
    case ErrorCode::kInconsistentPolicy: return "inconsistent-policy";
  }
  return "unknown";
}

ParamPoint::ParamPoint(std::vector<std::string> names, std::vector<double> values)
    : names_(std::move(names)), values_(std::move(values)) {
  if (names_.size() != values_.size()) {
    throw Error(ErrorCode::kSchema, "parameter names and values differ in length");
  }
}

double ParamPoint::get(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return values_[i];
  }
  throw Error(ErrorCode::kSchema, "unknown parameter '" + std::string(name) + "'");
}

void ParamPoint::set(std::string_view name, double value) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) {
      values_[i] = value;
      return;
    }
  }
  throw Error(ErrorCode::kSchema, "unknown parameter '" + std::string(name) + "'");
}

bool ParamPoint::has(std::string_view name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

std::map<std::string, double> ParamPoint::as_map() const {
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < names_.size(); ++i) out[names_[i]] = values_[i];
  return out;
}

Mat VectorFieldModel::analytic_jacobian(const Vec&, const ParamPoint&) const {
  throw Error(ErrorCode::kDomain, std::string(id()) + " has no analytic Jacobian");
}

Vec VectorFieldModel::field_sign(const Vec& x, const ParamPoint& p) const {
  Vec v = field(x, p);
  return v.unaryExpr([](double c) { return double((c > 0) - (c < 0)); });
}

ParamPoint VectorFieldModel::make_params(
    const std::map<std::string, double>& overrides) const {
  std::vector<std::string> names;
  std::vector<double> values;
  for (const auto& spec : schema()) {
    names.push_back(spec.name);
    values.push_back(spec.default_value);
  }
  ParamPoint p(std::move(names), std::move(values));
  for (const auto& [name, value] : overrides) {
    if (!p.has(name)) {
      throw Error(ErrorCode::kSchema, "system '" + std::string(id()) +
                                          "' has no parameter '" + name + "'");
    }
    p.set(name, value);
  }
  validate(p);
  return p;
}

void VectorFieldModel::validate(const ParamPoint& p) const {
  const auto& s = schema();
  if (p.size() != s.size()) {
    throw Error(ErrorCode::kSchema, "parameter set does not match schema of '" +
                                        std::string(id()) + "'");
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (p.names()[i] != s[i].name) {
      throw Error(ErrorCode::kSchema, "unexpected parameter '" + p.names()[i] + "'");
    }
    const double v = p[i];
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kDomain, "parameter '" + s[i].name + "' is not finite");
    }
    if (v < s[i].lo || v > s[i].hi) {
      std::ostringstream msg;
      msg << "parameter '" << s[i].name << "'=" << v << " outside [" << s[i].lo << ", "
          << s[i].hi << "]";
      throw Error(ErrorCode::kDomain, msg.str());
    }
  }
}

void VectorFieldModel::validate_state(const Vec& x) const {
  if (x.size() != dim()) {
    throw Error(ErrorCode::kDomain, "state has dimension " + std::to_string(x.size()) +
                                        ", expected " + std::to_string(dim()));
  }
  if (!x.allFinite()) throw Error(ErrorCode::kDomain, "state is not finite");
}

// --- bump ------------------------------------------------------------------

namespace {

void check_bump_args(double a, double b) {
  if (!(a >= 0.0) || !(a < b)) {
    throw Error(ErrorCode::kDomain, "bump requires 0 <= a < b");
  }
}

// Exponent u with bump = 1 / (1 + exp(u)) on (a, b).
double bump_exponent(double a, double b, double s) {
  return 1.0 / (b - s) - 1.0 / (s - a);
}

double softplus(double u) {
  return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

}  // namespace

double bump(double a, double b, double s) {
  check_bump_args(a, b);
  if (s <= a) return 1.0;
  if (s >= b) return 0.0;
  return 1.0 / (1.0 + std::exp(bump_exponent(a, b, s)));
}

double bump_derivative(double a, double b, double s) {
  check_bump_args(a, b);
  if (s <= a || s >= b) return 0.0;
  const double h = bump(a, b, s);
  if (h == 0.0 || h == 1.0) return 0.0;
  const double du = 1.0 / ((s - a) * (s - a)) + 1.0 / ((b - s) * (b - s));
  return -h * (1.0 - h) * du;
}

double log_bump(double a, double b, double s) {
  check_bump_args(a, b);
  if (s <= a) return 0.0;
  if (s >= b) return -std::numeric_limits<double>::infinity();
  return -softplus(bump_exponent(a, b, s));
}

// --- built-in systems ------------------------------------------------------

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Damped pendulum with constant torque. c4 is the fault duration used by the
// disturbance scenario and does not enter the field.
class Pendulum final : public VectorFieldModel {
 public:
  std::string_view id() const override { return "pendulum"; }
  int dim() const override { return 2; }
  const std::vector<ParamSpec>& schema() const override { return schema_; }

  Vec field(const Vec& x, const ParamPoint& p) const override {
    Vec v(2);
    v[0] = x[1];
    v[1] = -p[0] * std::sin(x[0]) - p[1] * x[1] + p[2];
    return v;
  }
  bool has_analytic_jacobian() const override { return true; }
  Mat analytic_jacobian(const Vec& x, const ParamPoint& p) const override {
    Mat j(2, 2);
    j << 0.0, 1.0, -p[0] * std::cos(x[0]), -p[1];
    return j;
  }
  std::optional<AngleCoordinate> angle() const override {
    return AngleCoordinate{0, kTwoPi};
  }

  static inline const std::vector<ParamSpec> schema_ = {
      {"c1", 2.0, 0.0, 100.0},
      {"c2", 0.5, 0.0, 100.0},
      {"c3", 1.5, -100.0, 100.0},
      {"c4", 0.8, 0.0, 100.0},
  };
};

// The pendulum with the restoring torque removed (c1 = 0) while the fault is on.
class PendulumFault final : public VectorFieldModel {
 public:
  std::string_view id() const override { return "pendulum-fault"; }
  int dim() const override { return 2; }
  const std::vector<ParamSpec>& schema() const override { return Pendulum::schema_; }

  Vec field(const Vec& x, const ParamPoint& p) const override {
    Vec v(2);
    v[0] = x[1];
    v[1] = -p[1] * x[1] + p[2];
    return v;
  }
  bool has_analytic_jacobian() const override { return true; }
  Mat analytic_jacobian(const Vec&, const ParamPoint& p) const override {
    Mat j(2, 2);
    j << 0.0, 1.0, 0.0, -p[1];
    return j;
  }
  std::optional<AngleCoordinate> angle() const override {
    return AngleCoordinate{0, kTwoPi};
  }
};

// V_p(x) = -x h_(0,1.5)(|x|) + p h_(2,3)(|x|) on the line.
class Bump1d final : public VectorFieldModel {
 public:
  static constexpr double kInnerEdge = 1.5;
  static constexpr double kOuterPlateau = 2.0;
  static constexpr double kOuterEdge = 3.0;

  std::string_view id() const override { return "bump1d"; }
  int dim() const override { return 1; }
  const std::vector<ParamSpec>& schema() const override { return schema_; }

  Vec field(const Vec& x, const ParamPoint& p) const override {
    const double s = std::abs(x[0]);
    Vec v(1);
    v[0] = -x[0] * bump(0.0, kInnerEdge, s) + p[0] * bump(kOuterPlateau, kOuterEdge, s);
    return v;
  }
  bool has_analytic_jacobian() const override { return true; }
  Mat analytic_jacobian(const Vec& x, const ParamPoint& p) const override {
    const double s = std::abs(x[0]);
    const double sgn = double((x[0] > 0) - (x[0] < 0));
    Mat j(1, 1);
    j(0, 0) = -bump(0.0, kInnerEdge, s) - s * bump_derivative(0.0, kInnerEdge, s) +
              p[0] * sgn * bump_derivative(kOuterPlateau, kOuterEdge, s);
    return j;
  }

  // Both bump terms underflow long before their support edges; the sign is
  // decided on log magnitudes instead.
  Vec field_sign(const Vec& x, const ParamPoint& p) const override {
    const double s = std::abs(x[0]);
    const double sign_a = -double((x[0] > 0) - (x[0] < 0));
    const double sign_b = double((p[0] > 0) - (p[0] < 0));
    const double log_a = sign_a == 0.0 ? -INFINITY
                                       : std::log(s) + log_bump(0.0, kInnerEdge, s);
    const double log_b = sign_b == 0.0 ? -INFINITY
                                       : std::log(std::abs(p[0])) +
                                             log_bump(kOuterPlateau, kOuterEdge, s);
    const bool a_zero = std::isinf(log_a);
    const bool b_zero = std::isinf(log_b);
    Vec out(1);
    if (a_zero && b_zero) {
      out[0] = 0.0;
    } else if (a_zero) {
      out[0] = sign_b;
    } else if (b_zero || sign_a == sign_b) {
      out[0] = sign_a;
    } else if (log_a == log_b) {
      out[0] = 0.0;
    } else {
      out[0] = log_a > log_b ? sign_a : sign_b;
    }
    return out;
  }

  static inline const std::vector<ParamSpec> schema_ = {{"p", 0.0, -0.2, 0.2}};
};

}  // namespace

ModelPtr make_system(std::string_view id) {
  if (id == "pendulum") return std::make_shared<Pendulum>();
  if (id == "pendulum-fault") return std::make_shared<PendulumFault>();
  if (id == "bump1d") return std::make_shared<Bump1d>();
  throw Error(ErrorCode::kSchema, "unknown system '" + std::string(id) + "'");
}

std::vector<std::string> system_ids() { return {"pendulum", "pendulum-fault", "bump1d"}; }

Vec eval_field(const VectorFieldModel& system, const Vec& x, const ParamPoint& p) {
  system.validate(p);
  system.validate_state(x);
  return system.field(x, p);
}

Mat finite_difference_jacobian(const VectorFieldModel& system, const Vec& x,
                               const ParamPoint& p) {
  const int n = system.dim();
  Mat j(n, n);
  Vec xp = x;
  Vec xm = x;
  for (int i = 0; i < n; ++i) {
    const double h = std::max(1e-6, 1e-6 * std::abs(x[i]));
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    j.col(i) = (system.field(xp, p) - system.field(xm, p)) / (2.0 * h);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return j;
}

Mat eval_jacobian(const VectorFieldModel& system, const Vec& x, const ParamPoint& p) {
  system.validate(p);
  system.validate_state(x);
  if (system.has_analytic_jacobian()) return system.analytic_jacobian(x, p);
  return finite_difference_jacobian(system, x, p);
}

Vec pendulum_sep(const ParamPoint& p) {
  const double c1 = p.get("c1");
  const double c3 = p.get("c3");
  if (!(c1 > 0.0) || std::abs(c3) > c1) {
    throw Error(ErrorCode::kNoSep, "no stable equilibrium: |c3| > c1");
  }
  Vec x(2);
  x << std::asin(c3 / c1), 0.0;
  return x;
}

std::pair<std::string, double> parse_assignment(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw Error(ErrorCode::kSchema, "expected name=value, got '" + std::string(text) + "'");
  }
  std::string name(text.substr(0, eq));
  std::string rest(text.substr(eq + 1));
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(rest, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != rest.size()) {
    throw Error(ErrorCode::kSchema, "bad value in '" + std::string(text) + "'");
  }
  return {name, value};
}

}  // namespace roa
