#include <doctest.h>

#include <cmath>
#include <random>

#include "roughbie/mesh.hpp"
#include "support/scenes.hpp"

using namespace roughbie;

TEST_CASE("surface gradients agree with central differences for every family") {
  RoughSurface fams[3];
  fams[1].family = SurfaceFamily::gaussian_bump;
  fams[1].amplitude = 0.3;
  fams[1].width = 0.7;
  fams[1].center = {0.2, -0.1};
  fams[2].family = SurfaceFamily::sinusoid;
  fams[2].amplitude = 0.1;
  fams[2].wavevector = {1.3, 0.4};
  const double h = 1e-5;
  for (const auto& s : fams)
    for (auto [x, y] : {std::pair{0.1, 0.3}, std::pair{-0.7, 0.5}, std::pair{1.2, -0.9}}) {
      const Vec2 g = s.grad(x, y);
      CHECK(std::abs(g.x() - (s.f(x + h, y) - s.f(x - h, y)) / (2 * h)) < 1e-8);
      CHECK(std::abs(g.y() - (s.f(x, y + h) - s.f(x, y - h)) / (2 * h)) < 1e-8);
    }
}

TEST_CASE("cube-sphere charts cover the sphere with outward orientation and matching seams") {
  for (int face = 0; face < 6; ++face) {
    const Vec3 d = cube_sphere_direction(face, 0.3, -0.4);
    CHECK(std::abs(d.norm() - 1.0) < 1e-14);
    Obstacle o;
    o.radius = 0.7;
    auto g = make_obstacle(o);
    const SurfacePoint sp = g->eval(face, 0.3, -0.4);
    CHECK(std::abs(sp.x.norm() - 0.7) < 1e-14);
    CHECK(sp.normal().dot(sp.x) > 0.0);
  }
  // each face edge coincides with an edge of another face
  for (int face = 0; face < 6; ++face)
    for (double t : {-0.6, 0.1, 0.9}) {
      const Vec3 e[4] = {cube_sphere_direction(face, 1.0, t), cube_sphere_direction(face, -1.0, t),
                         cube_sphere_direction(face, t, 1.0), cube_sphere_direction(face, t, -1.0)};
      for (const Vec3& p : e) {
        int matches = 0;
        for (int f = 0; f < 6; ++f) {
          if (f == face) continue;
          for (double s : {-1.0, 1.0}) {
            // search along the matching edge of face f
            for (int k = 0; k <= 2000; ++k) {
              const double r = -1.0 + k / 1000.0;
              if ((cube_sphere_direction(f, s, r) - p).norm() < 2e-3 ||
                  (cube_sphere_direction(f, r, s) - p).norm() < 2e-3) {
                ++matches;
                k = 2001;
              }
            }
          }
        }
        CHECK(matches >= 1);
      }
    }
}

TEST_CASE("obstacle level function and extents") {
  Obstacle o;
  o.family = ObstacleFamily::ellipsoid;
  o.semi_axes = {0.5, 0.3, 0.2};
  o.center = {1.0, 0.0, 2.0};
  CHECK(o.level(o.center) < 0.0);
  CHECK(o.level(o.center + Vec3(0.6, 0, 0)) > 0.0);
  CHECK(std::abs(o.level(o.point(Vec3(1, 1, 1).normalized()))) < 1e-12);
  CHECK(o.max_extent() == doctest::Approx(0.5));
  CHECK(o.min_extent() == doctest::Approx(0.2));
  o.semi_axes.z() = -1.0;
  CHECK_THROWS_AS(o.validate(), ValidationError);
}

TEST_CASE("chart tangents match finite differences of the chart") {
  Obstacle o;
  o.family = ObstacleFamily::perturbed_sphere;
  o.radius = 0.5;
  o.amplitude = 0.2;
  o.degree = 3;
  auto g = make_obstacle(o);
  const double h = 1e-6;
  const SurfacePoint p = g->eval(2, 0.2, 0.6);
  CHECK((p.xu - (g->eval(2, 0.2 + h, 0.6).x - g->eval(2, 0.2 - h, 0.6).x) / (2 * h)).norm() < 1e-7);
  CHECK((p.xv - (g->eval(2, 0.2, 0.6 + h).x - g->eval(2, 0.2, 0.6 - h).x) / (2 * h)).norm() < 1e-7);
}

TEST_CASE("scene validation rejects collisions and misplaced dipoles") {
  RoughSurface s;
  Obstacle o;
  o.radius = 0.5;
  o.center = {0, 0, 0.4};
  const Medium m = testsupport::upper_medium();
  CHECK_THROWS_AS(make_scene(s, o, m, m, Dipole{{0, 0, 2}, Vec3::UnitZ()}), ValidationError);
  o.center.z() = 1.0;
  CHECK_THROWS_AS(make_scene(s, o, m, m, Dipole{{0, 0, -1}, Vec3::UnitZ()}), ValidationError);
  CHECK_THROWS_AS(make_scene(s, o, m, m, Dipole{{0, 0, 1}, Vec3::UnitZ()}), ValidationError);
  const Scene sc = make_scene(s, o, m, m, Dipole{{0, 0, 2}, Vec3::UnitZ()});
  CHECK(sc.obstacle_clearance() == doctest::Approx(0.5));
  CHECK(sc.top() == doctest::Approx(1.5));
}

TEST_CASE("closest-point projections") {
  const Scene sc = testsupport::bump_scene();
  const Vec3 x(0.3, 0.2, 0.9);
  const Projection p = project_to_interface(*sc.surface, x);
  // the residual vector is normal to the surface
  CHECK(((x - p.point).normalized().cross(p.normal)).norm() < 1e-8);
  // brute-force minimum over a fine grid is not smaller
  double best = 1e9;
  for (int i = -100; i <= 100; ++i)
    for (int j = -100; j <= 100; ++j) {
      const double y1 = 0.3 + i * 0.01, y2 = 0.2 + j * 0.01;
      best = std::min(best, (x - Vec3(y1, y2, sc.surface->height(y1, y2))).norm());
    }
  CHECK(p.distance <= best + 1e-12);
  CHECK(p.distance > best - 1e-3);
  const Projection q = project_to_obstacle(*sc.obstacle, Vec3(0.3, 0.4, 2.5));
  CHECK(q.distance == doctest::Approx((Vec3(0.3, 0.4, 1.3)).norm() - 0.5).epsilon(1e-10));
}

TEST_CASE("Hausdorff distance of point clouds") {
  PointCloud a{{0, 0, 0}, {1, 0, 0}}, b{{0, 0, 0}, {1, 0, 0}, {1, 2, 0}};
  CHECK(hausdorff_distance(a, b) == doctest::Approx(2.0));
  CHECK(hausdorff_distance(b, a) == doctest::Approx(2.0));
  CHECK(hausdorff_distance(a, a) == 0.0);
  CHECK_THROWS_AS(hausdorff_distance(a, {}), DomainError);
}

TEST_CASE("uniform normal displacement of the obstacle moves the domain by h") {
  const Scene sc = testsupport::bump_scene();
  SurfacePerturbation p;
  p.gamma.kind = ScalarField::Kind::constant;
  for (double h : {0.02, 0.05}) {
    const Scene moved = perturb_scene(sc, p, h);
    CHECK(moved.obstacle->max_extent() == doctest::Approx(0.5 + h).epsilon(1e-6));
    CHECK(domain_distance(sc, moved, {}) == doctest::Approx(h).epsilon(1e-3));
  }
  CHECK_THROWS_AS(perturb_scene(sc, p, 0.8), GeometryError);
}

TEST_CASE("bump field is one at the centre and vanishes outside its support") {
  ScalarField b;
  b.kind = ScalarField::Kind::bump;
  b.center = {0, 0, 1.7};
  b.radius = 0.8;
  CHECK(b(b.center, false) == doctest::Approx(1.0));
  CHECK(b(Vec3(0, 0, 0.85), false) == 0.0);
  CHECK(b(Vec3(0, 0, 1.2), false) > 0.0);
  CHECK(b(Vec3(0.5, 0, 0), true) > 0.0);
}

TEST_CASE("panel quadrature reproduces areas") {
  const Scene sc = testsupport::bump_scene();
  const PanelMesh m = mesh_scene(sc, 1.0, 6.0, 6);
  double sphere = 0.0, patch = 0.0;
  for (const Node& n : m.nodes) (n.tag == Tag::Gamma ? sphere : patch) += n.weight;
  CHECK(std::abs(sphere - kPi) < 1e-6);
  // flat reference: the bump only adds area
  CHECK(patch > 4.0);
  RoughSurface flat;
  Obstacle o;
  o.radius = 0.5;
  o.center = {0, 0, 1.2};
  const Medium med = testsupport::upper_medium();
  const Scene fs = make_scene(flat, o, med, med, Dipole{{0, 0, 2.2}, Vec3::UnitZ()});
  const PanelMesh fm = mesh_scene(fs, 1.0, 6.0, 6);
  double fa = 0.0;
  for (int i = 0; i < fm.num_s; ++i) fa += fm.nodes[i].weight;
  CHECK(std::abs(fa - 4.0) < 1e-12);
  CHECK_THROWS_AS(mesh_scene(sc, 1.0, 0.5, 6), RefinementError);
  CHECK_THROWS_AS(mesh_scene(sc, -1.0, 6.0, 6), ValidationError);
}

TEST_CASE("spectral surface divergence on the sphere converges at high order") {
  // div_S (e_z x x) = 0 and div_S of the tangential part of e_z is -2 z / R^2
  RoughSurface flat;
  flat.offset = -2.0;
  Obstacle o;
  o.radius = 0.5;
  const Medium med = testsupport::upper_medium();
  const Scene sc = make_scene(flat, o, med, med, Dipole{{0, 0, 1.0}, Vec3::UnitZ()});
  auto errors = [&](double gd) {
    const PanelMesh m = mesh_scene(sc, 1.0, 6.0, 6, gd);
    std::vector<CVec3> rot(m.size()), grad(m.size());
    for (int i = 0; i < m.size(); ++i) {
      const Node& n = m.nodes[i];
      rot[i] = to_complex(Vec3::UnitZ().cross(n.x));
      grad[i] = to_complex(Vec3::UnitZ() - n.normal * n.normal.z());
    }
    const auto d1 = surface_divergence(m, rot);
    const auto d2 = surface_divergence(m, grad);
    double e1 = 0.0, e2 = 0.0;
    for (int i = m.num_s; i < m.size(); ++i) {
      e1 = std::max(e1, std::abs(d1[i]));
      e2 = std::max(e2, std::abs(d2[i] + 2.0 * m.nodes[i].x.z() / 0.25));
    }
    return std::pair{e1, e2};
  };
  const auto [r1, g1] = errors(12.0);
  const auto [r2, g2] = errors(24.0);
  MESSAGE("divergence errors ", r1, " ", g1, " -> ", r2, " ", g2);
  CHECK(r2 < r1 / 8.0);
  CHECK(g2 < g1 / 8.0);
  CHECK(g2 < 2e-4);
}
