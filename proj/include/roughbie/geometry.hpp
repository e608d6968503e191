#pragma once

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "roughbie/greens.hpp"
#include "roughbie/types.hpp"

namespace roughbie {

// Position and parametric tangents of a surface chart at one parameter point.
struct SurfacePoint {
  Vec3 x;
  Vec3 xu;
  Vec3 xv;
  Vec3 normal() const { return xu.cross(xv).normalized(); }
  double jacobian() const { return xu.cross(xv).norm(); }
};

enum class SurfaceFamily { flat, gaussian_bump, sinusoid };

// Graph x3 = f(x1, x2) from a builtin family. `offset` shifts the whole graph.
struct RoughSurface {
  SurfaceFamily family = SurfaceFamily::flat;
  double offset = 0.0;
  double amplitude = 0.0;
  double width = 1.0;
  Vec2 center = Vec2::Zero();
  Vec2 wavevector = Vec2::Zero();

  double f(double y1, double y2) const;
  Vec2 grad(double y1, double y2) const;
  double max_abs_slope() const;
};

enum class ObstacleFamily { sphere, ellipsoid, perturbed_sphere };

// Star-shaped closed surface about `center`, described along unit directions.
// perturbed_sphere: radius * (1 + amplitude * P_degree(d . axis)).
struct Obstacle {
  ObstacleFamily family = ObstacleFamily::sphere;
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
  Vec3 semi_axes = Vec3::Ones();
  double amplitude = 0.0;
  int degree = 2;
  Vec3 axis = Vec3::UnitZ();

  void validate() const;
  // Point on the surface in unit direction d, and its derivative w.r.t. d.
  Vec3 point(const Vec3& d) const;
  Mat3 point_jacobian(const Vec3& d) const;
  // Level function, negative inside.
  double level(const Vec3& x) const;
  double max_extent() const;
  double min_extent() const;
};

// Scalar field used as a normal displacement amplitude. `bump` is the
// compactly supported C-infinity bump exp(1 - 1/(1 - (r/R)^2)), equal to one
// at `center`. On S the radius r is measured horizontally.
struct ScalarField {
  enum class Kind { zero, constant, bump };
  Kind kind = Kind::zero;
  double value = 1.0;
  Vec3 center = Vec3::Zero();
  double radius = 1.0;

  double operator()(const Vec3& x, bool horizontal) const;
  bool vanishes() const { return kind == Kind::zero || value == 0.0; }
};

struct SurfacePerturbation {
  ScalarField gamma;
  ScalarField surface;
};

// Chart of the (possibly perturbed) interface, parametrised by the horizontal
// coordinates of the unperturbed graph.
class InterfaceGeometry {
 public:
  virtual ~InterfaceGeometry() = default;
  virtual SurfacePoint eval(double y1, double y2) const = 0;
  // x3 of the interface above (x1, x2).
  virtual double height(double x1, double x2) const = 0;
  virtual const RoughSurface& base() const = 0;
};

// Six cube-sphere charts of the (possibly perturbed) obstacle boundary; the
// chart maps extend smoothly slightly beyond [-1,1]^2.
class ObstacleGeometry {
 public:
  virtual ~ObstacleGeometry() = default;
  virtual SurfacePoint eval(int face, double u, double v) const = 0;
  virtual const Obstacle& base() const = 0;
  virtual double max_extent() const = 0;
  virtual double min_extent() const = 0;
  // Closed-domain membership; the default projects onto the charts.
  virtual bool contains(const Vec3& x) const;
  Vec3 center() const { return base().center; }
  double diameter() const { return 2.0 * max_extent(); }
};

std::shared_ptr<const InterfaceGeometry> make_interface(const RoughSurface& s);
std::shared_ptr<const ObstacleGeometry> make_obstacle(const Obstacle& o);
std::shared_ptr<const InterfaceGeometry> displace(std::shared_ptr<const InterfaceGeometry> base,
                                                  const ScalarField& p, double h);
std::shared_ptr<const ObstacleGeometry> displace(std::shared_ptr<const ObstacleGeometry> base,
                                                 const ScalarField& p, double h);

// Unit direction of the cube-sphere chart point (face, u, v).
Vec3 cube_sphere_direction(int face, double u, double v);

struct Scene {
  std::shared_ptr<const InterfaceGeometry> surface;
  std::shared_ptr<const ObstacleGeometry> obstacle;
  Medium upper;
  Medium lower;
  Dipole dipole;

  // Obstacle strictly above the interface with margin 1e-3 * diameter,
  // dipole inside the upper region, media valid.
  void validate() const;
  double obstacle_clearance() const;
  bool in_upper_region(const Vec3& x) const;
  bool inside_obstacle(const Vec3& x) const;
  double top() const;
};

Scene make_scene(const RoughSurface& s, const Obstacle& o, const Medium& upper,
                 const Medium& lower, const Dipole& d);

Scene perturb_scene(const Scene& scene, const SurfacePerturbation& p, double h);

// Closest point on a chart by Gauss-Newton from an initial parameter guess.
struct Projection {
  Vec2 param;
  Vec3 point;
  Vec3 normal;
  double distance;
};
Projection project_to_interface(const InterfaceGeometry& s, const Vec3& x);
Projection project_to_obstacle(const ObstacleGeometry& o, const Vec3& x);

struct MeasurementPlane {
  double height = 3.0;
  double x0 = -1.0, x1 = 1.0, y0 = -1.0, y1 = 1.0;
  int nx = 21, ny = 21;
  Vec3 node(int i, int j) const;
  double spacing_x() const { return nx > 1 ? (x1 - x0) / (nx - 1) : 0.0; }
  double spacing_y() const { return ny > 1 ? (y1 - y0) / (ny - 1) : 0.0; }
  void validate(const Scene& scene, double half_width) const;
};

using PointCloud = std::vector<Vec3>;

double hausdorff_distance(const PointCloud& a, const PointCloud& b);

// Sampling of the upper domain restricted to a horizontal window: boundary
// charts sampled on a parameter grid.
struct DomainSampling {
  double window = 2.0;      // half-width of the sampled part of S
  int per_unit = 40;        // S samples per unit length
  int per_face = 60;        // obstacle samples per chart side
};

// Hausdorff distance between the closed upper domains of two scenes that
// differ by a small boundary perturbation. Evaluated as the supremum, over
// boundary samples of one domain lying outside the other, of the distance to
// the other boundary (closest points refined on the charts).
double domain_distance(const Scene& a, const Scene& b, const DomainSampling& sampling);

}  // namespace roughbie
