#pragma once

#include <iosfwd>
#include <vector>

#include "roughbie/solver.hpp"

namespace roughbie {

enum class Region { Omega1, Omega2 };

struct FieldSample {
  Vec3 point;
  CVec3 E;
  CVec3 H;
  Region region;
};

struct FieldOptions {
  // Without adaptive refinement, points closer than `guard` panel diameters
  // to any panel are rejected.
  bool adaptive = true;
  double guard = 2.0;
  QuadratureOptions quadrature;
};

// Representation formulas for both regions from solved boundary traces.
// Immutable after construction; safe to call from several threads.
class FieldEvaluator {
 public:
  FieldEvaluator(const Scene& scene, const PanelMesh& mesh, Densities dens, FieldOptions opts = {});

  // Total fields (incident part included when the densities say so).
  EHPair upper(const Vec3& x) const;
  EHPair lower(const Vec3& x) const;
  CVec3 E1(const Vec3& x) const { return upper(x).E; }
  CVec3 E2(const Vec3& x) const { return lower(x).E; }
  // Upper field minus the incident field.
  EHPair scattered(const Vec3& x) const;
  // Dispatches on the region of x.
  FieldSample sample(const Vec3& x) const;
  Region region(const Vec3& x) const;

  // Tangential trace nu x E from one side of a boundary point, extrapolated
  // from off-surface evaluations at distances delta and 2 delta.
  CVec3 one_sided_trace_E(const Vec3& x, const Vec3& normal, Region side, double delta) const;
  CVec3 one_sided_trace_H(const Vec3& x, const Vec3& normal, Region side, double delta) const;

  const Scene& scene() const { return scene_; }
  const PanelMesh& mesh() const { return mesh_; }
  const Densities& densities() const { return dens_; }

 private:
  enum class Side { upper, lower };
  EHPair integrate(const Vec3& x, Side side) const;
  void check_clearance(const Vec3& x) const;

  Scene scene_;
  const PanelMesh& mesh_;
  Densities dens_;
  FieldOptions opts_;
  cd k1_, k2_;
  // nodal surface divergences of the E and H traces as seen from each side
  std::vector<cd> div_a1_, div_b1_, div_a2_, div_b2_;
};

enum class Hemisphere { upper, lower };

// Largest |x| over the obstacle and the perturbed part of the interface.
double scene_radius(const Scene& scene);

// Integral of |E|^2 (or |H|^2) of the scattered field (upper) or the
// transmitted field (lower) over the part of the origin-centred sphere of
// radius r on that side of S. Gauss-Legendre in the polar angle up to the
// interface crossing, trapezoid in azimuth.
double radiation_energy(const FieldEvaluator& f, double r, Hemisphere h, int order,
                        bool magnetic = false);

struct PlaneTrace {
  MeasurementPlane plane;
  std::vector<CVec3> values;  // nu x E1 at plane.node(i, j), index i * ny + j
  double sup = 0.0;
  double holder = 0.0;
  double alpha = 0.5;
  int cutoff = 10;  // grid steps
};

// sup |u| + max over node pairs within `cutoff` steps of |u(x)-u(y)| / |x-y|^alpha.
void trace_norms(PlaneTrace& t);
PlaneTrace plane_trace(const FieldEvaluator& f, const MeasurementPlane& plane, double alpha = 0.5,
                       int cutoff = 10);
PlaneTrace trace_difference(const PlaneTrace& a, const PlaneTrace& b);
PlaneTrace scale_trace(const PlaneTrace& a, cd s);

std::vector<FieldSample> evaluate_points(const FieldEvaluator& f, const std::vector<Vec3>& pts);

void write_field_csv(const std::vector<FieldSample>& samples, std::ostream& os);
void write_trace_csv(const PlaneTrace& t, std::ostream& os);
void write_trace_json(const PlaneTrace& t, std::ostream& os);

}  // namespace roughbie
