#include "roughbie/greens.hpp"

#include <cmath>

namespace roughbie {

void Medium::validate() const {
  if (!(epsilon > 0.0) || !(mu > 0.0) || !(sigma > 0.0) || !(omega > 0.0))
    throw ValidationError("medium parameters must be strictly positive");
}

cd wave_number(const Medium& m) {
  m.validate();
  // radicand lies in the open upper half plane, so the principal root has
  // positive real and imaginary parts
  return m.omega * std::sqrt(m.complex_permittivity() * m.mu);
}

namespace {

Vec3 separation(const Vec3& x, const Vec3& y, double min_separation) {
  Vec3 d = x - y;
  const double r = d.norm();
  if (!(r > 0.0) || r <= min_separation)
    throw DomainError("singular kernel evaluation: |x - y| = " + std::to_string(r));
  return d;
}

}  // namespace

cd scalar_green(cd kappa, const Vec3& x, const Vec3& y, double min_separation) {
  const double r = separation(x, y, min_separation).norm();
  return std::exp(kI * kappa * r) / (4.0 * kPi * r);
}

DyadicValue dyadic_green(cd kappa, const Vec3& x, const Vec3& y, double min_separation) {
  return kernel::dyadic(kernel::eval(kappa, separation(x, y, min_separation)));
}

DyadicValue curl_dyadic_green(cd kappa, const Vec3& x, const Vec3& y,
                              double min_separation) {
  const auto p = kernel::eval(kappa, separation(x, y, min_separation));
  return cross_matrix(kernel::grad(p));
}

EHPair incident_field(const Dipole& d, const Medium& m, const Vec3& x) {
  const cd kappa = wave_number(m);
  const auto p = kernel::eval(kappa, separation(x, d.position, 0.0));
  const CVec3 q = to_complex(d.polarization);
  EHPair out;
  out.E = kernel::apply_dyadic(p, q);
  out.H = ccross(kernel::grad(p), q) / (kI * m.omega * m.mu);
  return out;
}

}  // namespace roughbie
