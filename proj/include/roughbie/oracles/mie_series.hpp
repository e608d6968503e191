#pragma once

#include <vector>

#include "roughbie/types.hpp"

namespace roughbie::oracle {

// Field scattered by a PEC sphere in a homogeneous lossy medium, illuminated
// by an electric dipole. Vector spherical wave expansion; the incident
// tangential field on the sphere is projected numerically onto the vector
// spherical harmonics, so any source outside the sphere works.
class MieDipole {
 public:
  MieDipole(cd kappa, const Vec3& center, double radius, const Vec3& source,
            const Vec3& polarization, int nmax = 40);

  CVec3 incident(const Vec3& x) const;
  CVec3 scattered(const Vec3& x) const;
  CVec3 total(const Vec3& x) const { return incident(x) + scattered(x); }
  int nmax() const { return nmax_; }
  // Largest |coefficient| of the last retained degree relative to the largest overall.
  double tail() const;

 private:
  cd kappa_;
  Vec3 center_;
  double radius_;
  Vec3 source_, q_;
  int nmax_;
  std::vector<cd> a_, b_;  // index n*n + n + m - 1 for 1 <= n, |m| <= n
};

// Spherical Hankel functions of the first kind h_0..h_nmax at complex z.
std::vector<cd> spherical_hankel1(int nmax, cd z);

// Orthonormal tangential harmonics on the unit sphere at (theta, phi):
// X = L Y / sqrt(n(n+1)) with L = -i r x grad, and rhat x X.
void vector_harmonics(int n, int m, double theta, double phi, CVec3& X, CVec3& rX);

}  // namespace roughbie::oracle
