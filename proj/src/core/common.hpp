#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace roa {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class ErrorCode {
  kSchema,
  kDomain,
  kNotFound,
  kFoldSuspected,
  kPrecondition,
  kIntegration,
  kEventLocalization,
  kNoSep,
  kDegenerateStart,
  kParity,
  kBracket,
  kInconsistentPolicy,
};

const char* to_string(ErrorCode code);

// Every failure raised by the core carries a code so the C layer can map it
// onto a status value without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline bool all_finite(const Vec& v) { return v.allFinite(); }

}  // namespace roa
