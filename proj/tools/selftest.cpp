#include "selftest.hpp"

#include <cmath>
#include <iostream>
#include <random>

#include "roughbie/io.hpp"
#include "roughbie/oracles/mie_series.hpp"

namespace roughbie::cli {

namespace {

struct SuiteResult {
  std::string name;
  bool pass;
  double value;
  double tolerance;
};

// Column of G by dyadic_green, used as a plain vector field in x.
CVec3 column(cd k, const Vec3& x, const Vec3& y, int c) { return dyadic_green(k, x, y).col(c); }

SuiteResult green_residuals() {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double h = 1e-3;
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const cd k(1.0 + 1.5 * (u(rng) + 1.0), 0.2 + 0.5 * (u(rng) + 1.0));
    const Vec3 y(u(rng), u(rng), u(rng));
    Vec3 d(u(rng), u(rng), u(rng));
    d = d.normalized() * (0.5 + 2.25 * (u(rng) + 1.0));
    const Vec3 x = y + d;
    for (int c = 0; c < 3; ++c) {
      auto f = [&](const Vec3& p) { return column(k, p, y, c); };
      // curl curl u = grad div u - laplacian u, by central differences
      CMat3 hess[3];
      CVec3 lap = CVec3::Zero();
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          Vec3 ei = Vec3::Zero(), ej = Vec3::Zero();
          ei(i) = h;
          ej(j) = h;
          const CVec3 v = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) /
                          (4.0 * h * h);
          for (int comp = 0; comp < 3; ++comp) hess[comp](i, j) = v(comp);
        }
      CVec3 graddiv = CVec3::Zero();
      for (int comp = 0; comp < 3; ++comp) {
        lap(comp) = hess[comp].trace();
        for (int i = 0; i < 3; ++i) graddiv(i) += hess[comp](i, comp);
      }
      const CVec3 val = f(x);
      const CVec3 res = graddiv - lap - k * k * val;
      worst = std::max(worst, res.norm() / (k * k * val).norm());
    }
  }
  return {"green_residuals", worst <= 1e-4, worst, 1e-4};
}

Scene isolated_sphere(const Medium& m, double radius, const Vec3& source) {
  RoughSurface s;
  s.offset = -3.0;
  Obstacle o;
  o.radius = radius;
  return make_scene(s, o, m, m, Dipole{source, Vec3(1.0, 0.5, 0.3).normalized()});
}

SuiteResult sphere_area(const Medium& m) {
  const Scene sc = isolated_sphere(m, 0.5, Vec3(0.8, 0.3, 1.0));
  const PanelMesh mesh = mesh_scene(sc, 1.0, 6.0, 6);
  double area = 0.0;
  for (const Node& n : mesh.nodes)
    if (n.tag == Tag::Gamma) area += n.weight;
  const double err = std::abs(area - kPi) / kPi;
  return {"sphere_area", err <= 1e-6, err, 1e-6};
}

SuiteResult no_contrast(const Medium& m) {
  RoughSurface s;
  Obstacle o;
  o.radius = 0.02;
  o.center = Vec3(0.0, 0.0, 0.6);
  const Dipole d{Vec3(0.3, 0.2, 1.0), Vec3(1.0, 0.5, 0.3).normalized()};
  const Scene sc = make_scene(s, o, m, m, d);
  Discretization disc;
  disc.half_width = 1.5;
  disc.density = 6.0;
  disc.gamma_density = 300.0;
  const ForwardSolution f = solve_forward(sc, disc);
  const FieldEvaluator ev = f.evaluator();
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const double a = 2.0 * kPi * t / 10.0;
    const Vec3 x(0.4 * std::cos(a), 0.4 * std::sin(a), 0.3 + 0.05 * t);
    const CVec3 es = ev.scattered(x).E;
    worst = std::max(worst, es.norm() / incident_field(d, m, x).E.norm());
  }
  return {"no_contrast", worst <= 1e-2, worst, 1e-2};
}

SuiteResult mie(const Medium& m) {
  const Vec3 src(0.8, 0.3, 1.0);
  const Scene sc = isolated_sphere(m, 0.5, src);
  Discretization disc;
  disc.half_width = 1.0;
  disc.density = 6.0;
  const ForwardSolution f = solve_forward(sc, disc);
  const FieldEvaluator ev = f.evaluator();
  const oracle::MieDipole ref(wave_number(m), Vec3::Zero(), 0.5, src, sc.dipole.polarization);
  double worst = 0.0;
  for (int t = 0; t < 12; ++t) {
    const double th = kPi * (t + 0.5) / 12.0, ph = 2.4 * t;
    const Vec3 u(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
    const Vec3 x = (0.8 + 0.05 * t) * u;
    if ((x - src).norm() < 0.2) continue;
    const CVec3 r = ref.total(x);
    worst = std::max(worst, (ev.E1(x) - r).norm() / r.norm());
  }
  return {"mie", worst <= 2e-2, worst, 2e-2};
}

}  // namespace

bool run_selftest(const ScenarioConfig& cfg, const std::filesystem::path& out, bool verbose) {
  std::vector<SuiteResult> results;
  results.push_back(green_residuals());
  results.push_back(sphere_area(cfg.upper));
  results.push_back(no_contrast(cfg.upper));
  results.push_back(mie(cfg.upper));
  bool all = true;
  nlohmann::json j;
  for (const auto& r : results) {
    all = all && r.pass;
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << "  value=" << r.value
              << "  tol=" << r.tolerance << '\n';
    j["suites"].push_back(
        {{"name", r.name}, {"pass", r.pass}, {"value", r.value}, {"tolerance", r.tolerance}});
  }
  if (verbose) std::cout << (all ? "all suites passed\n" : "some suites failed\n");
  j["pass"] = all;
  j["config"] = cfg.resolved;
  write_json(out / "selftest.json", j);
  return all;
}

}  // namespace roughbie::cli
