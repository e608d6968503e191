#include "roughbie/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace roughbie {

// ---------------------------------------------------------------- families

double RoughSurface::f(double y1, double y2) const {
  switch (family) {
    case SurfaceFamily::flat:
      return offset;
    case SurfaceFamily::gaussian_bump: {
      const double r2 = (Vec2(y1, y2) - center).squaredNorm() / (width * width);
      return offset + amplitude * std::exp(-r2);
    }
    case SurfaceFamily::sinusoid:
      return offset + amplitude * std::sin(wavevector.dot(Vec2(y1, y2)));
  }
  return offset;
}

Vec2 RoughSurface::grad(double y1, double y2) const {
  switch (family) {
    case SurfaceFamily::flat:
      return Vec2::Zero();
    case SurfaceFamily::gaussian_bump: {
      const Vec2 d = Vec2(y1, y2) - center;
      const double e = amplitude * std::exp(-d.squaredNorm() / (width * width));
      return -2.0 * e / (width * width) * d;
    }
    case SurfaceFamily::sinusoid:
      return amplitude * std::cos(wavevector.dot(Vec2(y1, y2))) * wavevector;
  }
  return Vec2::Zero();
}

double RoughSurface::max_abs_slope() const {
  switch (family) {
    case SurfaceFamily::flat:
      return 0.0;
    case SurfaceFamily::gaussian_bump:
      return std::abs(amplitude) * std::sqrt(2.0) * std::exp(-0.5) / width;
    case SurfaceFamily::sinusoid:
      return std::abs(amplitude) * wavevector.norm();
  }
  return 0.0;
}

namespace {

// Legendre polynomial and derivative.
std::pair<double, double> legendre(int l, double x) {
  double p0 = 1.0, p1 = x;
  if (l == 0) return {1.0, 0.0};
  for (int k = 2; k <= l; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  const double dp = (std::abs(x) < 1.0 - 1e-14)
                        ? l * (x * p1 - p0) / (x * x - 1.0)
                        : 0.5 * l * (l + 1) * (x > 0 ? 1.0 : ((l % 2) ? 1.0 : -1.0));
  return {p1, dp};
}

}  // namespace

void Obstacle::validate() const {
  switch (family) {
    case ObstacleFamily::sphere:
      if (!(radius > 0.0)) throw ValidationError("obstacle radius must be positive");
      break;
    case ObstacleFamily::ellipsoid:
      if (!(semi_axes.minCoeff() > 0.0))
        throw ValidationError("ellipsoid semi-axes must be positive");
      break;
    case ObstacleFamily::perturbed_sphere:
      if (!(radius > 0.0)) throw ValidationError("obstacle radius must be positive");
      if (!(std::abs(amplitude) < 0.5))
        throw ValidationError("perturbed sphere amplitude must satisfy |a| < 0.5");
      if (degree < 0) throw ValidationError("perturbed sphere degree must be >= 0");
      if (!(axis.norm() > 0.0)) throw ValidationError("perturbed sphere axis must be nonzero");
      break;
  }
}

Vec3 Obstacle::point(const Vec3& d) const {
  switch (family) {
    case ObstacleFamily::sphere:
      return center + radius * d;
    case ObstacleFamily::ellipsoid:
      return center + semi_axes.cwiseProduct(d);
    case ObstacleFamily::perturbed_sphere: {
      const double rho = radius * (1.0 + amplitude * legendre(degree, d.dot(axis.normalized())).first);
      return center + rho * d;
    }
  }
  return center;
}

Mat3 Obstacle::point_jacobian(const Vec3& d) const {
  switch (family) {
    case ObstacleFamily::sphere:
      return radius * Mat3::Identity();
    case ObstacleFamily::ellipsoid:
      return semi_axes.asDiagonal();
    case ObstacleFamily::perturbed_sphere: {
      const Vec3 a = axis.normalized();
      const auto [pl, dpl] = legendre(degree, d.dot(a));
      const double rho = radius * (1.0 + amplitude * pl);
      return rho * Mat3::Identity() + d * (radius * amplitude * dpl * a).transpose();
    }
  }
  return Mat3::Identity();
}

double Obstacle::level(const Vec3& x) const {
  const Vec3 r = x - center;
  switch (family) {
    case ObstacleFamily::sphere:
      return r.norm() - radius;
    case ObstacleFamily::ellipsoid:
      return r.cwiseQuotient(semi_axes).squaredNorm() - 1.0;
    case ObstacleFamily::perturbed_sphere: {
      const double n = r.norm();
      if (n == 0.0) return -radius;
      const double rho =
          radius * (1.0 + amplitude * legendre(degree, r.dot(axis.normalized()) / n).first);
      return n - rho;
    }
  }
  return 0.0;
}

double Obstacle::max_extent() const {
  switch (family) {
    case ObstacleFamily::sphere:
      return radius;
    case ObstacleFamily::ellipsoid:
      return semi_axes.maxCoeff();
    case ObstacleFamily::perturbed_sphere:
      return radius * (1.0 + std::abs(amplitude));
  }
  return radius;
}

double Obstacle::min_extent() const {
  switch (family) {
    case ObstacleFamily::sphere:
      return radius;
    case ObstacleFamily::ellipsoid:
      return semi_axes.minCoeff();
    case ObstacleFamily::perturbed_sphere:
      return radius * (1.0 - std::abs(amplitude));
  }
  return radius;
}

double ScalarField::operator()(const Vec3& x, bool horizontal) const {
  switch (kind) {
    case Kind::zero:
      return 0.0;
    case Kind::constant:
      return value;
    case Kind::bump: {
      Vec3 d = x - center;
      if (horizontal) d.z() = 0.0;
      const double q = d.squaredNorm() / (radius * radius);
      if (q >= 1.0) return 0.0;
      return value * std::exp(1.0 - 1.0 / (1.0 - q));
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------- charts

namespace {

const int kFaceAxes[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 2, 0}, {1, 0, 2}, {2, 0, 1}, {2, 1, 0}};
const double kFaceSign[6] = {1, -1, 1, -1, 1, -1};

struct CubePoint {
  Vec3 d, du, dv;
};

CubePoint cube_point(int face, double u, double v) {
  const double tu = std::tan(0.25 * kPi * u), tv = std::tan(0.25 * kPi * v);
  Vec3 c = Vec3::Zero(), cu = Vec3::Zero(), cv = Vec3::Zero();
  c[kFaceAxes[face][0]] = kFaceSign[face];
  c[kFaceAxes[face][1]] = tu;
  c[kFaceAxes[face][2]] = tv;
  cu[kFaceAxes[face][1]] = 0.25 * kPi * (1.0 + tu * tu);
  cv[kFaceAxes[face][2]] = 0.25 * kPi * (1.0 + tv * tv);
  const double n = c.norm();
  CubePoint p;
  p.d = c / n;
  const Mat3 proj = (Mat3::Identity() - p.d * p.d.transpose()) / n;
  p.du = proj * cu;
  p.dv = proj * cv;
  return p;
}

}  // namespace

Vec3 cube_sphere_direction(int face, double u, double v) { return cube_point(face, u, v).d; }

namespace {

// initial chart coordinates for a direction
std::pair<int, Vec2> cube_chart_of(const Vec3& d) {
  int axis = 0;
  d.cwiseAbs().maxCoeff(&axis);
  int face = 0;
  for (int f = 0; f < 6; ++f)
    if (kFaceAxes[f][0] == axis && kFaceSign[f] * d[axis] > 0) face = f;
  const double da = std::abs(d[axis]);
  const double u = 4.0 / kPi * std::atan(d[kFaceAxes[face][1]] / da);
  const double v = 4.0 / kPi * std::atan(d[kFaceAxes[face][2]] / da);
  return {face, Vec2(u, v)};
}

class GraphInterface final : public InterfaceGeometry {
 public:
  explicit GraphInterface(RoughSurface s) : s_(std::move(s)) {}
  SurfacePoint eval(double y1, double y2) const override {
    const Vec2 g = s_.grad(y1, y2);
    return {Vec3(y1, y2, s_.f(y1, y2)), Vec3(1.0, 0.0, g.x()), Vec3(0.0, 1.0, g.y())};
  }
  double height(double x1, double x2) const override { return s_.f(x1, x2); }
  const RoughSurface& base() const override { return s_; }

 private:
  RoughSurface s_;
};

class AnalyticObstacle final : public ObstacleGeometry {
 public:
  explicit AnalyticObstacle(Obstacle o) : o_(std::move(o)) { o_.validate(); }
  SurfacePoint eval(int face, double u, double v) const override {
    const CubePoint c = cube_point(face, u, v);
    const Mat3 J = o_.point_jacobian(c.d);
    return {o_.point(c.d), J * c.du, J * c.dv};
  }
  const Obstacle& base() const override { return o_; }
  bool contains(const Vec3& x) const override { return o_.level(x) < 0.0; }
  double max_extent() const override { return o_.max_extent(); }
  double min_extent() const override { return o_.min_extent(); }

 private:
  Obstacle o_;
};

// Fourth-order central differences of a displaced chart.
template <class F>
SurfacePoint displaced_point(F&& pos, double u, double v) {
  constexpr double d = 1e-3;
  auto du = [&](double s) { return pos(u + s, v); };
  auto dv = [&](double s) { return pos(u, v + s); };
  SurfacePoint p;
  p.x = pos(u, v);
  p.xu = (du(-2 * d) - 8.0 * du(-d) + 8.0 * du(d) - du(2 * d)) / (12.0 * d);
  p.xv = (dv(-2 * d) - 8.0 * dv(-d) + 8.0 * dv(d) - dv(2 * d)) / (12.0 * d);
  return p;
}

class DisplacedInterface final : public InterfaceGeometry {
 public:
  DisplacedInterface(std::shared_ptr<const InterfaceGeometry> base, ScalarField p, double h)
      : base_(std::move(base)), p_(std::move(p)), h_(h) {}

  Vec3 position(double y1, double y2) const {
    const SurfacePoint b = base_->eval(y1, y2);
    return b.x + h_ * p_(b.x, true) * b.normal();
  }
  SurfacePoint eval(double y1, double y2) const override {
    return displaced_point([this](double a, double b) { return position(a, b); }, y1, y2);
  }
  double height(double x1, double x2) const override {
    Vec2 y(x1, x2);
    for (int it = 0; it < 100; ++it) {
      const Vec3 q = position(y.x(), y.y());
      const Vec2 r = Vec2(x1, x2) - q.head<2>();
      y += r;
      if (r.norm() < 1e-14) break;
    }
    return position(y.x(), y.y()).z();
  }
  const RoughSurface& base() const override { return base_->base(); }

 private:
  std::shared_ptr<const InterfaceGeometry> base_;
  ScalarField p_;
  double h_;
};

class DisplacedObstacle final : public ObstacleGeometry {
 public:
  DisplacedObstacle(std::shared_ptr<const ObstacleGeometry> base, ScalarField p, double h)
      : base_(std::move(base)), p_(std::move(p)), h_(h) {
    double pmax = 0.0;
    if (p_.kind == ScalarField::Kind::constant) pmax = std::abs(p_.value);
    if (p_.kind == ScalarField::Kind::bump) pmax = std::abs(p_.value);
    slack_ = std::abs(h_) * pmax;
  }
  Vec3 position(int face, double u, double v) const {
    const SurfacePoint b = base_->eval(face, u, v);
    return b.x + h_ * p_(b.x, false) * b.normal();
  }
  SurfacePoint eval(int face, double u, double v) const override {
    return displaced_point([&](double a, double b) { return position(face, a, b); }, u, v);
  }
  const Obstacle& base() const override { return base_->base(); }
  double max_extent() const override { return base_->max_extent() + slack_; }
  double min_extent() const override { return base_->min_extent() - slack_; }

 private:
  std::shared_ptr<const ObstacleGeometry> base_;
  ScalarField p_;
  double h_;
  double slack_ = 0.0;
};

}  // namespace

std::shared_ptr<const InterfaceGeometry> make_interface(const RoughSurface& s) {
  if (!(s.width > 0.0)) throw ValidationError("surface width must be positive");
  return std::make_shared<GraphInterface>(s);
}

std::shared_ptr<const ObstacleGeometry> make_obstacle(const Obstacle& o) {
  return std::make_shared<AnalyticObstacle>(o);
}

std::shared_ptr<const InterfaceGeometry> displace(std::shared_ptr<const InterfaceGeometry> base,
                                                  const ScalarField& p, double h) {
  if (h == 0.0 || p.vanishes()) return base;
  return std::make_shared<DisplacedInterface>(std::move(base), p, h);
}

std::shared_ptr<const ObstacleGeometry> displace(std::shared_ptr<const ObstacleGeometry> base,
                                                 const ScalarField& p, double h) {
  if (h == 0.0 || p.vanishes()) return base;
  return std::make_shared<DisplacedObstacle>(std::move(base), p, h);
}

// ---------------------------------------------------------------- projections

Projection project_to_interface(const InterfaceGeometry& s, const Vec3& x) {
  Vec2 y = x.head<2>();
  SurfacePoint p = s.eval(y.x(), y.y());
  for (int it = 0; it < 50; ++it) {
    const Vec3 r = p.x - x;
    Eigen::Matrix<double, 3, 2> J;
    J << p.xu, p.xv;
    const Vec2 step = -(J.transpose() * J).ldlt().solve(J.transpose() * r);
    y += step;
    p = s.eval(y.x(), y.y());
    if (step.norm() < 1e-13) break;
  }
  return {y, p.x, p.normal(), (p.x - x).norm()};
}

Projection project_to_obstacle(const ObstacleGeometry& o, const Vec3& x) {
  Vec3 d = x - o.center();
  if (d.norm() == 0.0) d = Vec3::UnitZ();
  auto [face, uv] = cube_chart_of(d.normalized());
  SurfacePoint p = o.eval(face, uv.x(), uv.y());
  for (int it = 0; it < 60; ++it) {
    const Vec3 r = p.x - x;
    Eigen::Matrix<double, 3, 2> J;
    J << p.xu, p.xv;
    Vec2 step = -(J.transpose() * J).ldlt().solve(J.transpose() * r);
    const double n = step.norm();
    if (n > 0.25) step *= 0.25 / n;
    uv += step;
    if (uv.cwiseAbs().maxCoeff() > 1.5) {
      // wandered onto a neighbouring chart: restart there
      const Vec3 dir = (o.eval(face, uv.x(), uv.y()).x - o.center()).normalized();
      std::tie(face, uv) = cube_chart_of(dir);
    }
    p = o.eval(face, uv.x(), uv.y());
    if (n < 1e-13) break;
  }
  return {uv, p.x, p.normal(), (p.x - x).norm()};
}

// ---------------------------------------------------------------- scene

bool ObstacleGeometry::contains(const Vec3& x) const {
  const Projection pr = project_to_obstacle(*this, x);
  return (x - pr.point).dot(pr.normal) < 0.0;
}

bool Scene::inside_obstacle(const Vec3& x) const { return obstacle->contains(x); }

bool Scene::in_upper_region(const Vec3& x) const {
  return x.z() > surface->height(x.x(), x.y()) && !inside_obstacle(x);
}

double Scene::obstacle_clearance() const {
  constexpr int m = 24;
  double clearance = std::numeric_limits<double>::infinity();
  for (int face = 0; face < 6; ++face)
    for (int i = 0; i <= m; ++i)
      for (int j = 0; j <= m; ++j) {
        const Vec3 x = obstacle->eval(face, -1.0 + 2.0 * i / m, -1.0 + 2.0 * j / m).x;
        clearance = std::min(clearance, x.z() - surface->height(x.x(), x.y()));
      }
  return clearance;
}

double Scene::top() const {
  constexpr int m = 24;
  double t = -std::numeric_limits<double>::infinity();
  for (int face = 0; face < 6; ++face)
    for (int i = 0; i <= m; ++i)
      for (int j = 0; j <= m; ++j)
        t = std::max(t, obstacle->eval(face, -1.0 + 2.0 * i / m, -1.0 + 2.0 * j / m).x.z());
  const RoughSurface& s = surface->base();
  double smax = s.offset;
  if (s.family != SurfaceFamily::flat) smax += std::abs(s.amplitude);
  return std::max(t, smax);
}

void Scene::validate() const {
  if (!surface || !obstacle) throw ValidationError("scene needs a surface and an obstacle");
  upper.validate();
  lower.validate();
  if (upper.omega != lower.omega) throw ValidationError("both media must share omega");
  const double margin = 1e-3 * obstacle->diameter();
  const double c = obstacle_clearance();
  if (!(c >= margin))
    throw ValidationError("obstacle intersects surface (clearance " + std::to_string(c) + ")");
  if (!in_upper_region(dipole.position))
    throw ValidationError("dipole must lie above the surface and outside the obstacle");
}

Scene make_scene(const RoughSurface& s, const Obstacle& o, const Medium& upper,
                 const Medium& lower, const Dipole& d) {
  Scene sc;
  sc.surface = make_interface(s);
  sc.obstacle = make_obstacle(o);
  sc.upper = upper;
  sc.lower = lower;
  sc.dipole = d;
  sc.validate();
  return sc;
}

Scene perturb_scene(const Scene& scene, const SurfacePerturbation& p, double h) {
  Scene out = scene;
  out.surface = displace(scene.surface, p.surface, h);
  out.obstacle = displace(scene.obstacle, p.gamma, h);
  if (h == 0.0) return out;

  // charts must stay regular and keep their orientation
  constexpr int m = 16;
  for (int face = 0; face < 6; ++face)
    for (int i = 0; i <= m; ++i)
      for (int j = 0; j <= m; ++j) {
        const double u = -1.0 + 2.0 * i / m, v = -1.0 + 2.0 * j / m;
        const SurfacePoint a = scene.obstacle->eval(face, u, v);
        const SurfacePoint b = out.obstacle->eval(face, u, v);
        if (a.xu.cross(a.xv).dot(b.xu.cross(b.xv)) <= 0.0)
          throw GeometryError("perturbed obstacle self-intersects");
      }
  if (out.obstacle->min_extent() <= 0.0) throw GeometryError("perturbed obstacle collapses");
  if (!p.surface.vanishes()) {
    const Vec3 c = p.surface.center;
    const double R = p.surface.kind == ScalarField::Kind::bump ? p.surface.radius : 4.0;
    for (int i = 0; i <= 2 * m; ++i)
      for (int j = 0; j <= 2 * m; ++j) {
        const double y1 = c.x() - R + R * i / m, y2 = c.y() - R + R * j / m;
        const SurfacePoint b = out.surface->eval(y1, y2);
        if (b.xu.cross(b.xv).z() <= 0.0) throw GeometryError("perturbed surface folds over");
      }
  }
  try {
    out.validate();
  } catch (const ValidationError& e) {
    throw GeometryError(std::string("perturbation causes collision: ") + e.what());
  }
  return out;
}

// ---------------------------------------------------------------- plane

Vec3 MeasurementPlane::node(int i, int j) const {
  return {x0 + i * spacing_x(), y0 + j * spacing_y(), height};
}

void MeasurementPlane::validate(const Scene& scene, double) const {
  if (nx < 2 || ny < 2 || !(x1 > x0) || !(y1 > y0))
    throw ValidationError("measurement plane grid is degenerate");
  if (!(height > scene.top())) throw GeometryError("measurement plane intersects the scene");
}

// ---------------------------------------------------------------- Hausdorff

namespace {

class KdTree {
 public:
  explicit KdTree(const PointCloud& pts) : pts_(pts), idx_(pts.size()) {
    std::iota(idx_.begin(), idx_.end(), 0);
    build(0, idx_.size(), 0);
  }
  double nearest(const Vec3& q) const {
    double best = std::numeric_limits<double>::infinity();
    search(0, idx_.size(), 0, q, best);
    return std::sqrt(best);
  }

 private:
  void build(size_t lo, size_t hi, int axis) {
    if (hi - lo <= 8) return;
    const size_t mid = (lo + hi) / 2;
    std::nth_element(idx_.begin() + lo, idx_.begin() + mid, idx_.begin() + hi,
                     [&](size_t a, size_t b) { return pts_[a][axis] < pts_[b][axis]; });
    build(lo, mid, (axis + 1) % 3);
    build(mid + 1, hi, (axis + 1) % 3);
  }
  void search(size_t lo, size_t hi, int axis, const Vec3& q, double& best) const {
    if (hi - lo <= 8) {
      for (size_t k = lo; k < hi; ++k) best = std::min(best, (pts_[idx_[k]] - q).squaredNorm());
      return;
    }
    const size_t mid = (lo + hi) / 2;
    const Vec3& p = pts_[idx_[mid]];
    best = std::min(best, (p - q).squaredNorm());
    const double diff = q[axis] - p[axis];
    const int next = (axis + 1) % 3;
    if (diff < 0) {
      search(lo, mid, next, q, best);
      if (diff * diff < best) search(mid + 1, hi, next, q, best);
    } else {
      search(mid + 1, hi, next, q, best);
      if (diff * diff < best) search(lo, mid, next, q, best);
    }
  }
  const PointCloud& pts_;
  std::vector<size_t> idx_;
};

double directed(const PointCloud& a, const PointCloud& b) {
  KdTree tree(b);
  double d = 0.0;
  for (const Vec3& x : a) d = std::max(d, tree.nearest(x));
  return d;
}

std::vector<Vec3> boundary_samples(const Scene& s, const DomainSampling& ds) {
  std::vector<Vec3> out;
  const int ns = std::max(2, static_cast<int>(std::ceil(2.0 * ds.window * ds.per_unit)));
  for (int i = 0; i <= ns; ++i)
    for (int j = 0; j <= ns; ++j)
      out.push_back(s.surface
                        ->eval(-ds.window + 2.0 * ds.window * i / ns,
                               -ds.window + 2.0 * ds.window * j / ns)
                        .x);
  const int m = ds.per_face;
  for (int face = 0; face < 6; ++face)
    for (int i = 0; i <= m; ++i)
      for (int j = 0; j <= m; ++j)
        out.push_back(s.obstacle->eval(face, -1.0 + 2.0 * i / m, -1.0 + 2.0 * j / m).x);
  return out;
}

double directed_domain(const Scene& a, const Scene& b, const DomainSampling& ds) {
  double d = 0.0;
  for (const Vec3& x : boundary_samples(a, ds)) {
    const bool below = x.z() < b.surface->height(x.x(), x.y());
    const bool inside = b.inside_obstacle(x);
    if (!below && !inside) continue;
    const double ds_ = project_to_interface(*b.surface, x).distance;
    const double dg = project_to_obstacle(*b.obstacle, x).distance;
    d = std::max(d, std::min(ds_, dg));
  }
  return d;
}

}  // namespace

double hausdorff_distance(const PointCloud& a, const PointCloud& b) {
  if (a.empty() || b.empty()) throw DomainError("hausdorff_distance: empty point cloud");
  return std::max(directed(a, b), directed(b, a));
}

double domain_distance(const Scene& a, const Scene& b, const DomainSampling& sampling) {
  return std::max(directed_domain(a, b, sampling), directed_domain(b, a, sampling));
}

}  // namespace roughbie
