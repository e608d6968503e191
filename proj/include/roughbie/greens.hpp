#pragma once

#include "roughbie/types.hpp"

namespace roughbie {

// One homogeneous half-space. All parameters strictly positive.
struct Medium {
  double epsilon = 1.0;
  double mu = 1.0;
  double sigma = 1.0;
  double omega = 1.0;

  void validate() const;
  // epsilon + i sigma / omega
  cd complex_permittivity() const { return {epsilon, sigma / omega}; }
};

struct Dipole {
  Vec3 position = Vec3::Zero();
  Vec3 polarization = Vec3::UnitZ();
};

using DyadicValue = CMat3;

cd wave_number(const Medium& m);

// exp(i kappa r) / (4 pi r). Throws DomainError when |x - y| <= min_separation
// (and always for coincident points).
cd scalar_green(cd kappa, const Vec3& x, const Vec3& y, double min_separation = 0.0);
DyadicValue dyadic_green(cd kappa, const Vec3& x, const Vec3& y, double min_separation = 0.0);
DyadicValue curl_dyadic_green(cd kappa, const Vec3& x, const Vec3& y,
                              double min_separation = 0.0);

struct EHPair {
  CVec3 E;
  CVec3 H;
};

EHPair incident_field(const Dipole& d, const Medium& m, const Vec3& x);

namespace kernel {

// Everything the discretisation needs at one separation vector d = x - y,
// computed from a single exponential.
struct Point {
  double r;
  Vec3 rhat;
  cd g;      // scalar kernel
  cd a, b;   // dyadic coefficients: G = g (a I + b rhat rhat^T)
  cd c;      // grad_x g = c g rhat
};

inline Point eval(cd kappa, const Vec3& d) {
  Point p;
  p.r = d.norm();
  p.rhat = d / p.r;
  const cd z = kappa * p.r;
  const cd iz = kI / z;
  const cd z2 = 1.0 / (z * z);
  p.g = std::exp(kI * z) / (4.0 * kPi * p.r);
  p.a = 1.0 + iz - z2;
  p.b = -1.0 - 3.0 * iz + 3.0 * z2;
  p.c = kI * kappa * (1.0 + iz);
  return p;
}

inline CVec3 grad(const Point& p) { return (p.c * p.g) * to_complex(p.rhat); }

// G v for a complex vector v.
inline CVec3 apply_dyadic(const Point& p, const CVec3& v) {
  const CVec3 rh = to_complex(p.rhat);
  return p.g * (p.a * v + p.b * rh * rh.dot(v));
}

inline CMat3 dyadic(const Point& p) {
  const Mat3 rr = p.rhat * p.rhat.transpose();
  return p.g * (p.a * CMat3::Identity() + p.b * rr.cast<cd>());
}

}  // namespace kernel
}  // namespace roughbie
