#pragma once
// Shared aliases and the error convention used across the library: every
// failure is a std::runtime_error whose message starts with a stable code
// word ("NonPositiveDefinite: ..."), so callers (and the CLI exit-code
// mapping) can dispatch on the prefix without an exception taxonomy.
#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace caprig {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Eigen::ArrayXXd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] inline void fail(const std::string& code, const std::string& what) {
  throw std::runtime_error(code + ": " + what);
}

inline void require(bool ok, const std::string& code, const std::string& what) {
  if (!ok) fail(code, what);
}

// Error code word of a thrown runtime_error ("Code: detail" -> "Code").
inline std::string error_code(const std::exception& e) {
  std::string s = e.what();
  auto colon = s.find(':');
  return colon == std::string::npos ? s : s.substr(0, colon);
}

inline double sqr(double x) { return x * x; }

}  // namespace caprig
