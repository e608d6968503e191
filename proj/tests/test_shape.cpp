#include <doctest.h>

#include <cmath>
#include <sstream>

#include "roughbie/shape.hpp"
#include "support/scenes.hpp"

using namespace roughbie;

namespace {

PerturbationField gamma_bump() {
  PerturbationField p;
  p.p.gamma.kind = ScalarField::Kind::bump;
  p.p.gamma.center = {0.0, 0.0, 1.7};
  p.p.gamma.radius = 0.8;
  return p;
}

const ForwardSolution& coarse_forward() {
  static const ForwardSolution f = [] {
    Discretization d;
    d.half_width = 1.0;
    d.gamma_density = 12.0;
    return solve_forward(testsupport::bump_scene(), d);
  }();
  return f;
}

double sup_norm(const std::vector<CVec3>& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, x.norm());
  return m;
}

}  // namespace

TEST_CASE("perturbation fields: sampling, sup and support checks") {
  const ForwardSolution& f = coarse_forward();
  const PerturbationField p = gamma_bump();
  CHECK(p.sup() == 1.0);
  const auto v = p.on_nodes(*f.mesh);
  for (int i = 0; i < f.mesh->num_s; ++i) CHECK(v[i] == 0.0);
  double top = 0.0;
  for (int i = f.mesh->num_s; i < f.mesh->size(); ++i) top = std::max(top, v[i]);
  CHECK(top > 0.9);
  PerturbationField wide;
  wide.p.surface.kind = ScalarField::Kind::bump;
  wide.p.surface.radius = 1.2;
  CHECK_THROWS_AS(wide.validate(*f.mesh), ValidationError);
  wide.p.surface.kind = ScalarField::Kind::constant;
  CHECK_THROWS_AS(wide.validate(*f.mesh), ValidationError);
}

TEST_CASE("derivative data and solution are linear in the perturbation") {
  const ForwardSolution& f = coarse_forward();
  const auto p = gamma_bump().on_nodes(*f.mesh);
  std::vector<double> p2(p), zero(p.size(), 0.0);
  for (auto& x : p2) x *= 2.0;
  const auto d1 = derivative_boundary_data(f.densities, f.scene, *f.mesh, p);
  const auto d2 = derivative_boundary_data(f.densities, f.scene, *f.mesh, p2);
  const auto d0 = derivative_boundary_data(f.densities, f.scene, *f.mesh, zero);
  CHECK(sup_norm(d0.gamma) == 0.0);
  CHECK(sup_norm(d0.jump_e) == 0.0);
  double diff = 0.0;
  for (std::size_t i = 0; i < d1.gamma.size(); ++i)
    diff = std::max(diff, (d2.gamma[i] - 2.0 * d1.gamma[i]).norm());
  CHECK(diff <= 1e-12 * sup_norm(d2.gamma));
  // a Gamma-only perturbation leaves the interface jumps at zero
  CHECK(sup_norm(d1.jump_e) == 0.0);
  CHECK(sup_norm(d1.jump_h) == 0.0);

  const Densities s0 = solve_derivative_problem(f, d0);
  CHECK(s0.x.norm() == 0.0);
  CHECK_FALSE(s0.include_incident);

  // a vector field enters through its normal part only
  std::vector<Vec3> pv(f.mesh->size());
  for (int i = 0; i < f.mesh->size(); ++i) {
    const Node& n = f.mesh->nodes[i];
    pv[i] = p[i] * n.normal + 0.7 * n.t1;
  }
  const auto dv = derivative_boundary_data(f.densities, f.scene, *f.mesh, pv);
  double dd = 0.0;
  for (std::size_t i = 0; i < d1.gamma.size(); ++i) dd = std::max(dd, (dv.gamma[i] - d1.gamma[i]).norm());
  CHECK(dd <= 1e-12 * sup_norm(d1.gamma));
  CHECK_THROWS_AS(derivative_boundary_data(f.densities, f.scene, *f.mesh, std::vector<double>(3)),
                  ValidationError);
}

TEST_CASE("derivative matches finite differences of the obstacle perturbation") {
  const ForwardSolution& f = coarse_forward();
  MeasurementPlane plane;
  plane.height = 2.5;
  plane.nx = plane.ny = 9;
  const FdStudy st = derivative_fd_study(f, gamma_bump(), {0.04, 0.02}, plane);
  REQUIRE(st.rows.size() == 2);
  MESSAGE("fd errors ", st.rows[0].error, " ", st.rows[1].error);
  CHECK(st.rows[1].error < 0.75 * st.rows[0].error);
  CHECK(st.rows[1].error < 0.2);
  CHECK(st.derivative_trace.sup > 0.0);
}

TEST_CASE("stability table: h = 0 row, slope and sequence checks") {
  const ForwardSolution& f = coarse_forward();
  MeasurementPlane plane;
  plane.height = 2.5;
  plane.nx = plane.ny = 7;
  const StabilityTable t = stability_experiment(f, gamma_bump(), {0.02, 0.01, 0.0}, plane);
  REQUIRE(t.complete);
  REQUIRE(t.rows.size() == 3);
  CHECK(std::isnan(t.rows[2].ratio));
  CHECK(t.rows[2].hausdorff == 0.0);
  CHECK(t.rows[0].hausdorff == doctest::Approx(0.02).epsilon(0.05));
  CHECK(t.distance_slope == doctest::Approx(1.0).epsilon(0.05));
  std::ostringstream os;
  write_stability_csv(t, os);
  CHECK(os.str().rfind("h,hausdorff,trace_sup,trace_holder,ratio\n", 0) == 0);
  CHECK_THROWS_AS(stability_experiment(f, gamma_bump(), {0.01, 0.02}, plane), ValidationError);
  CHECK_THROWS_AS(stability_experiment(f, gamma_bump(), {-0.01}, plane), ValidationError);
}

TEST_CASE("a perturbation that collides with the interface ends the table early") {
  const ForwardSolution& f = coarse_forward();
  PerturbationField p;
  p.p.gamma.kind = ScalarField::Kind::constant;
  MeasurementPlane plane;
  plane.height = 3.5;
  plane.nx = plane.ny = 5;
  const StabilityTable t = stability_experiment(f, p, {1.5, 0.01}, plane);
  CHECK_FALSE(t.complete);
  CHECK(t.rows.empty());
  CHECK_FALSE(t.error.empty());
}

TEST_CASE("log-log slope") {
  CHECK(loglog_slope({1, 2, 4}, {3, 12, 48}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(loglog_slope({1}, {1}), ValidationError);
  CHECK_THROWS_AS(loglog_slope({1, 2}, {1, 0}), DomainError);
}
