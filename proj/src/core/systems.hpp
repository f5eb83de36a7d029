#pragma once

#include "common.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace roa {

struct ParamSpec {
  std::string name;
  double default_value;
  double lo;
  double hi;
};

// Parameter assignment bound to a system schema. Values are kept in schema
// order so models can read them by index on the hot path.
class ParamPoint {
 public:
  ParamPoint() = default;
  ParamPoint(std::vector<std::string> names, std::vector<double> values);

  double get(std::string_view name) const;
  void set(std::string_view name, double value);
  bool has(std::string_view name) const;

  const std::vector<std::string>& names() const { return names_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  std::map<std::string, double> as_map() const;

  friend bool operator==(const ParamPoint&, const ParamPoint&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<double> values_;
};

// Angle coordinate that lives on a circle; the state space is handled on the
// covering space and reported modulo the period.
struct AngleCoordinate {
  int index;
  double period;
};

class VectorFieldModel {
 public:
  virtual ~VectorFieldModel() = default;

  virtual std::string_view id() const = 0;
  virtual int dim() const = 0;
  virtual const std::vector<ParamSpec>& schema() const = 0;

  // Unchecked evaluation; callers are expected to have validated (x, p).
  virtual Vec field(const Vec& x, const ParamPoint& p) const = 0;
  virtual bool has_analytic_jacobian() const { return false; }
  virtual Mat analytic_jacobian(const Vec& x, const ParamPoint& p) const;

  // Sign of each field component. The default is the sign of field(); models
  // whose values underflow while the exact sign is still known override it.
  virtual Vec field_sign(const Vec& x, const ParamPoint& p) const;

  virtual std::optional<AngleCoordinate> angle() const { return std::nullopt; }

  // Defaults overridden by `overrides`; unknown names raise a schema error.
  ParamPoint make_params(const std::map<std::string, double>& overrides = {}) const;
  // Throws unless `p` carries exactly this schema with finite, in-range values.
  void validate(const ParamPoint& p) const;
  void validate_state(const Vec& x) const;
};

using ModelPtr = std::shared_ptr<const VectorFieldModel>;

// Catalog lookup: "pendulum", "pendulum-fault", "bump1d".
ModelPtr make_system(std::string_view id);
std::vector<std::string> system_ids();

Vec eval_field(const VectorFieldModel& system, const Vec& x, const ParamPoint& p);
Mat eval_jacobian(const VectorFieldModel& system, const Vec& x, const ParamPoint& p);
Mat finite_difference_jacobian(const VectorFieldModel& system, const Vec& x,
                               const ParamPoint& p);

// Smooth transition: 1 on [0,a], 0 on [b,inf), strictly decreasing between.
double bump(double a, double b, double s);
double bump_derivative(double a, double b, double s);
// log of bump(a,b,s); -inf on the support edge and beyond.
double log_bump(double a, double b, double s);

// Stable equilibrium of the pendulum, (asin(c3/c1), 0).
Vec pendulum_sep(const ParamPoint& p);

// "name=value" into (name, value); throws a schema error when malformed.
std::pair<std::string, double> parse_assignment(std::string_view text);

}  // namespace roa
