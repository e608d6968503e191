#pragma once

// Finite-difference helpers shared by the unit tests. They only sample the
// field they are given, so they serve as independent oracles for analytic
// derivatives in the library.

#include <functional>

#include "roughbie/types.hpp"

namespace testsupport {

using roughbie::CVec3;
using roughbie::Vec3;
using Field = std::function<CVec3(const Vec3&)>;

inline CVec3 fd_curl(const Field& f, const Vec3& x, double h) {
  CVec3 d[3];
  for (int k = 0; k < 3; ++k) {
    Vec3 e = Vec3::Zero();
    e(k) = h;
    d[k] = (f(x + e) - f(x - e)) / (2.0 * h);
  }
  return {d[1](2) - d[2](1), d[2](0) - d[0](2), d[0](1) - d[1](0)};
}

inline std::complex<double> fd_div(const Field& f, const Vec3& x, double h) {
  std::complex<double> s = 0.0;
  for (int k = 0; k < 3; ++k) {
    Vec3 e = Vec3::Zero();
    e(k) = h;
    s += (f(x + e)(k) - f(x - e)(k)) / (2.0 * h);
  }
  return s;
}

// curl curl u = grad div u - laplacian u with second-order central differences.
inline CVec3 fd_curl_curl(const Field& f, const Vec3& x, double h) {
  CVec3 graddiv = CVec3::Zero(), lap = CVec3::Zero();
  const CVec3 f0 = f(x);
  for (int i = 0; i < 3; ++i) {
    Vec3 ei = Vec3::Zero();
    ei(i) = h;
    lap += (f(x + ei) - 2.0 * f0 + f(x - ei)) / (h * h);
    for (int j = 0; j < 3; ++j) {
      Vec3 ej = Vec3::Zero();
      ej(j) = h;
      const CVec3 v = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) /
                      (4.0 * h * h);
      graddiv(i) += v(j);
    }
  }
  return graddiv - lap;
}

// Fourth-order variant (five-point stencils) for interior Maxwell residuals.
inline CVec3 fd4_curl_curl(const Field& f, const Vec3& x, double h) {
  auto d1 = [&](const Field& g, const Vec3& p, int k) {
    Vec3 e = Vec3::Zero();
    e(k) = h;
    return CVec3((-g(p + 2 * e) + 8.0 * g(p + e) - 8.0 * g(p - e) + g(p - 2 * e)) / (12.0 * h));
  };
  const Field curl = [&](const Vec3& p) {
    const CVec3 a = d1(f, p, 0), b = d1(f, p, 1), c = d1(f, p, 2);
    return CVec3(b(2) - c(1), c(0) - a(2), a(1) - b(0));
  };
  const CVec3 a = d1(curl, x, 0), b = d1(curl, x, 1), c = d1(curl, x, 2);
  return {b(2) - c(1), c(0) - a(2), a(1) - b(0)};
}

}  // namespace testsupport
