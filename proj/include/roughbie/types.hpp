#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace roughbie {

using cd = std::complex<double>;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using Mat3 = Eigen::Matrix3d;
using CMat3 = Eigen::Matrix3cd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cd kI{0.0, 1.0};

// Error taxonomy shared by all modules. The CLI maps ConfigError to exit
// code 2 and every other Error to exit code 3.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : Error {
  using Error::Error;
};
struct ValidationError : Error {
  using Error::Error;
};
struct GeometryError : Error {
  using Error::Error;
};
struct RefinementError : Error {
  using Error::Error;
};
struct SingularQuadratureError : Error {
  using Error::Error;
};
struct AssemblyError : Error {
  using Error::Error;
};
struct ResourceError : Error {
  using Error::Error;
};
struct SingularSystemError : Error {
  using Error::Error;
};
struct ConvergenceError : Error {
  using Error::Error;
};
struct PreconditionError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  ConfigError(std::string key_, const std::string& what)
      : Error(what), key(std::move(key_)) {}
  std::string key;
};

inline CMat3 cross_matrix(const CVec3& a) {
  CMat3 m;
  m << 0.0, -a.z(), a.y(), a.z(), 0.0, -a.x(), -a.y(), a.x(), 0.0;
  return m;
}

inline CVec3 to_complex(const Vec3& v) { return v.cast<cd>(); }

// Plain bilinear cross product. Eigen's cross() conjugates complex results.
inline CVec3 ccross(const CVec3& a, const CVec3& b) {
  return {a.y() * b.z() - a.z() * b.y(), a.z() * b.x() - a.x() * b.z(),
          a.x() * b.y() - a.y() * b.x()};
}

}  // namespace roughbie
