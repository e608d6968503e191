// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <iostream>
#include <random>
#include <sstream>

#include "roughbie/oracles/mie_series.hpp"
#include "roughbie/shape.hpp"
#include "support/fd.hpp"
#include "support/scenes.hpp"

using namespace roughbie;

namespace {

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail, double seconds) {
  if (!pass) ++failures;
  std::printf("%s  %2d  %-28s %s  (%.1f s)\n", pass ? "PASS" : "FAIL", id, name, detail.c_str(),
              seconds);
  std::fflush(stdout);
}

template <class F>
void run(int id, const char* name, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool pass = false;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("error: ") + e.what();
  }
  report(id, name, pass, detail,
         std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double max_norm(const std::vector<CVec3>& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, x.norm());
  return m;
}

// ---------------------------------------------------------------- 1, 2

bool green_residual(std::string& out) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0, min_order = 1e9;
  for (int t = 0; t < 20; ++t) {
    const cd k(1.0 + 2.0 * u(rng), 0.05 + 1.2 * u(rng));
    const Vec3 y(u(rng) - 0.5, u(rng) - 0.5, u(rng) - 0.5);
    Vec3 dir(u(rng) - 0.5, u(rng) - 0.5, u(rng) - 0.5);
    const Vec3 x = y + dir.normalized() * (0.5 + 4.5 * u(rng));
    for (int c = 0; c < 3; ++c) {
      const testsupport::Field f = [&](const Vec3& p) { return CVec3(dyadic_green(k, p, y).col(c)); };
      const CVec3 ref = k * k * f(x);
      const double e1 = (testsupport::fd_curl_curl(f, x, 1e-3) - ref).norm() / ref.norm();
      const double e2 = (testsupport::fd_curl_curl(f, x, 5e-4) - ref).norm() / ref.norm();
      worst = std::max(worst, e1);
      min_order = std::min(min_order, std::log2(e1 / e2));
    }
  }
  out = fmt("max residual %.2e (tol 1e-4), min observed order %.2f (tol >= 1.5)", worst, min_order);
  return worst <= 1e-4 && min_order >= 1.5;
}

bool green_decay(std::string& out) {
  const cd k(2.0, 1.0);
  double spread_g = 1.0, spread_c = 1.0;
  for (const Vec3& d : {Vec3(1, 0, 0), Vec3(1, 2, 2).normalized(), Vec3(-0.3, 0.2, -1).normalized()}) {
    double gmin = 1e300, gmax = 0, cmin = 1e300, cmax = 0;
    for (double r : {3.0, 6.0, 9.0, 12.0}) {
      const double s = r * std::exp(k.imag() * r);
      const double g = dyadic_green(k, r * d, Vec3::Zero()).norm() * s;
      const double c = curl_dyadic_green(k, r * d, Vec3::Zero()).norm() * s;
      gmin = std::min(gmin, g), gmax = std::max(gmax, g);
      cmin = std::min(cmin, c), cmax = std::max(cmax, c);
    }
    spread_g = std::max(spread_g, gmax / gmin);
    spread_c = std::max(spread_c, cmax / cmin);
  }
  out = fmt("variation G %.3f, curl G %.3f (tol < 2)", spread_g, spread_c);
  return spread_g < 2.0 && spread_c < 2.0;
}

// ---------------------------------------------------------------- 3

bool truncation_rate(std::string& out) {
  const Scene sc = testsupport::bump_scene();
  const cd k = wave_number(sc.upper);
  // smooth tangential density supported in the disc of radius 16
  ScalarField bump;
  bump.kind = ScalarField::Kind::bump;
  bump.radius = 16.0;
  const Vec3 v(1.0, 0.5, 0.0);
  std::vector<Vec3> probes;
  auto tail_field = [&](double n) {
    // density = order = 6 gives unit panels, so every mesh shares the nodes of the smaller ones
    const PanelMesh mesh = mesh_scene(sc, n, 6.0, 6);
    std::vector<CVec3> psi(mesh.num_s);
    for (int i = 0; i < mesh.num_s; ++i) {
      const Node& nd = mesh.nodes[i];
      psi[i] = to_complex(bump(nd.x, true) * (v - nd.normal * nd.normal.dot(v)));
    }
    if (probes.empty())
      for (int i = 0; i < mesh.num_s; i += 7)
        if (mesh.nodes[i].x.head<2>().lpNorm<Eigen::Infinity>() < 0.5) probes.push_back(mesh.nodes[i].x);
    std::vector<int> targets;
    for (const Vec3& p : probes)
      for (int i = 0; i < mesh.num_s; ++i)
        if ((mesh.nodes[i].x - p).norm() < 1e-12) {
          targets.push_back(i);
          break;
        }
    if (targets.size() != probes.size()) throw Error("meshes are not nested");
    return apply_operators(mesh, Tag::S, targets, Tag::S, k, {}, 1.0, &psi, 0.0, nullptr);
  };
  const std::vector<double> ns{2, 4, 6, 8};
  std::vector<std::vector<CVec3>> tn;
  for (double n : ns) tn.push_back(tail_field(n));
  const auto ref = tail_field(16.0);
  std::vector<double> tails, logs;
  for (const auto& t : tn) {
    std::vector<CVec3> d(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) d[i] = ref[i] - t[i];
    tails.push_back(max_norm(d));
    logs.push_back(std::log(tails.back()));
  }
  // least-squares rate of log tail against n
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) mx += ns[i] / 4.0, my += logs[i] / 4.0;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) sxy += (ns[i] - mx) * (logs[i] - my), sxx += (ns[i] - mx) * (ns[i] - mx);
  const double rate = -sxy / sxx;
  const double need = 0.6 * k.imag() / 2.0;
  out = fmt("tails %.2e .. %.2e, rate %.3f (tol >= %.3f)", tails.front(), tails.back(), rate, need);
  return rate >= need;
}

// ---------------------------------------------------------------- 4, 5

bool no_contrast(std::string& out) {
  const Medium m = testsupport::upper_medium();
  RoughSurface flat;
  Obstacle o;
  o.radius = 0.02;  // 1e-2 of the scene scale (patch width 2)
  o.center = {0.0, 0.0, 0.6};
  const Dipole d{{0.3, 0.2, 1.0}, Vec3(1.0, 0.5, 0.3).normalized()};
  const Scene sc = make_scene(flat, o, m, m, d);
  auto worst = [&](double density) {
    Discretization disc;
    disc.half_width = 1.5;
    disc.density = density;
    disc.gamma_density = 300.0;
    const ForwardSolution f = solve_forward(sc, disc);
    const FieldEvaluator ev = f.evaluator();
    double w = 0.0;
    for (int t = 0; t < 10; ++t) {
      const double a = 2.0 * kPi * t / 10.0;
      const Vec3 x(0.4 * std::cos(a), 0.4 * std::sin(a), 0.3 + 0.05 * t);
      w = std::max(w, ev.scattered(x).E.norm() / incident_field(d, m, x).E.norm());
    }
    return w;
  };
  const double coarse = worst(6.0), fine = worst(8.0);
  // diagnostic only: scattered field of the same sphere alone in the medium
  const oracle::MieDipole alone(wave_number(m), o.center, o.radius, d.position, d.polarization, 12);
  double floor = 0.0;
  for (int t = 0; t < 10; ++t) {
    const double a = 2.0 * kPi * t / 10.0;
    const Vec3 x(0.4 * std::cos(a), 0.4 * std::sin(a), 0.3 + 0.05 * t);
    floor = std::max(floor, alone.scattered(x).norm() / alone.incident(x).norm());
  }
  out = fmt("max |Es|/|Ei| %.2e at density 6, %.2e at density 8 (tol 1e-2, must improve); ", coarse,
            fine) +
        fmt("isolated-sphere Mie value %.2e", floor);
  return coarse <= 1e-2 && fine < coarse;
}

bool mie(std::string& out) {
  const Medium m = testsupport::upper_medium();
  const Vec3 src(0.8, 0.3, 1.0);
  const Scene sc = testsupport::isolated_sphere(m, src);
  Discretization disc;
  disc.half_width = 1.0;
  const ForwardSolution f = solve_forward(sc, disc);
  const FieldEvaluator ev = f.evaluator();
  const oracle::MieDipole ref(wave_number(m), Vec3::Zero(), 0.5, src, sc.dipole.polarization);
  double worst = 0.0;
  int used = 0;
  for (int t = 0; used < 12; ++t) {
    const double th = kPi * (t + 0.5) / 13.0, ph = 2.4 * t;
    const Vec3 x = (0.8 + 0.05 * t) * Vec3(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
    if ((x - src).norm() < 0.2) continue;
    const CVec3 r = ref.total(x);
    worst = std::max(worst, (ev.E1(x) - r).norm() / r.norm());
    ++used;
  }
  out = fmt("max relative error %.2e over 12 probes (tol 2e-2)", worst);
  return worst <= 2e-2;
}

// ---------------------------------------------------------------- 6

struct Residuals {
  double pec, jump_e, jump_h;
};

Residuals two_layer_residuals(double density) {
  const Scene sc = testsupport::bump_scene();
  Discretization disc;
  disc.density = density;
  const ForwardSolution f = solve_forward(sc, disc);
  const FieldEvaluator ev = f.evaluator();
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double delta = 1e-3;
  Residuals r{0, 0, 0};
  double inc = 0.0;
  // Gamma probes at random chart points, so generically off the nodes
  for (int t = 0; t < 12; ++t) {
    const SurfacePoint sp = sc.obstacle->eval(t % 6, 0.9 * u(rng), 0.9 * u(rng));
    r.pec = std::max(r.pec, ev.one_sided_trace_E(sp.x, sp.normal(), Region::Omega1, delta).norm());
    inc = std::max(inc, incident_field(sc.dipole, sc.upper, sp.x).E.norm());
  }
  r.pec /= inc;
  double me = 0, mh = 0;
  const double window = 0.3 * disc.half_width;
  for (int t = 0; t < 12; ++t) {
    const SurfacePoint sp = sc.surface->eval(window * u(rng), window * u(rng));
    const Vec3 nu = sp.normal();
    const CVec3 e1 = ev.one_sided_trace_E(sp.x, nu, Region::Omega1, delta);
    const CVec3 e2 = ev.one_sided_trace_E(sp.x, nu, Region::Omega2, delta);
    const CVec3 h1 = ev.one_sided_trace_H(sp.x, nu, Region::Omega1, delta);
    const CVec3 h2 = ev.one_sided_trace_H(sp.x, nu, Region::Omega2, delta);
    r.jump_e = std::max(r.jump_e, (e1 - e2).norm());
    r.jump_h = std::max(r.jump_h, (h1 - h2).norm());
    me = std::max(me, e1.norm());
    mh = std::max(mh, h1.norm());
  }
  r.jump_e /= me;
  r.jump_h /= mh;
  return r;
}

bool pec_and_interface(std::string& out) {
  const Residuals c = two_layer_residuals(6.0), f = two_layer_residuals(12.0);
  const double rp = f.pec / c.pec, re = f.jump_e / c.jump_e, rh = f.jump_h / c.jump_h;
  out = fmt("density 12: PEC %.2e (tol 1e-2), jumps E %.2e H %.2e (tol 2e-2); ", f.pec, f.jump_e,
            f.jump_h) +
        fmt("ratios vs density 6: PEC %.2f E %.2f H %.2f (tol <= 0.65)", rp, re, rh);
  return f.pec <= 1e-2 && f.jump_e <= 2e-2 && f.jump_h <= 2e-2 && rp <= 0.65 && re <= 0.65 &&
         rh <= 0.65;
}

// ---------------------------------------------------------------- 7, 8, 9

const ForwardSolution& default_forward() {
  static const ForwardSolution f = [] {
    Discretization d;
    d.gamma_density = 12.0;
    return solve_forward(testsupport::bump_scene(), d);
  }();
  return f;
}

PerturbationField gamma_bump() {
  PerturbationField p;
  p.p.gamma.kind = ScalarField::Kind::bump;
  p.p.gamma.center = {0.0, 0.0, 1.7};
  p.p.gamma.radius = 0.8;
  return p;
}

MeasurementPlane default_plane() {
  MeasurementPlane pl;
  pl.height = 2.5;
  return pl;
}

bool energy_decay(std::string& out) {
  const ForwardSolution& f = default_forward();
  const FieldEvaluator ev = f.evaluator();
  const std::vector<double> radii{4.0, 6.0, 8.0};
  bool pass = true;
  std::string detail;
  for (Hemisphere h : {Hemisphere::upper, Hemisphere::lower}) {
    std::vector<double> w;
    for (double r : radii) w.push_back(radiation_energy(ev, r, h, 12));
    const bool monotone = w[1] < w[0] && w[2] < w[1];
    // least-squares slope of log W against r (equally spaced radii)
    const double slope = (std::log(w[2]) - std::log(w[0])) / (radii[2] - radii[0]);
    const double target = -(h == Hemisphere::upper ? wave_number(f.scene.upper)
                                                   : wave_number(f.scene.lower)).imag();
    const bool ok = monotone && std::abs(slope / target - 1.0) <= 0.3;
    pass = pass && ok;
    detail += std::string(h == Hemisphere::upper ? "upper" : "lower") +
              fmt(": W %.2e %.2e %.2e ", w[0], w[1], w[2]);
    detail += fmt("slope %.3f vs %.3f; ", slope, target);
  }
  out = detail + "(tol: monotone, slope within 30%)";
  return pass;
}

bool domain_derivative(std::string& out) {
  const FdStudy st = derivative_fd_study(default_forward(), gamma_bump(), {0.04, 0.02, 0.01}, default_plane());
  const bool decreasing = st.rows[1].error < st.rows[0].error && st.rows[2].error < st.rows[1].error;
  out = fmt("errors %.3f %.3f %.3f, fitted order %.2f (tol >= 0.7, decreasing)", st.rows[0].error,
            st.rows[1].error, st.rows[2].error, st.order);
  return decreasing && st.order >= 0.7;
}

bool local_stability(std::string& out) {
  const StabilityTable t =
      stability_experiment(default_forward(), gamma_bump(), {0.08, 0.04, 0.02, 0.01}, default_plane());
  if (!t.complete) {
    out = "table incomplete: " + t.error;
    return false;
  }
  std::vector<double> ratios;
  for (const auto& r : t.rows) ratios.push_back(r.ratio);
  std::vector<double> sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  const double median = 0.5 * (sorted[1] + sorted[2]);
  const double mx = sorted.back();
  out = fmt("ratios %.1f %.1f %.1f %.1f, ", ratios[0], ratios[1], ratios[2], ratios[3]) +
        fmt("max/median %.2f (tol <= 2), distance slope %.3f (tol [0.9, 1.1])", mx / median,
            t.distance_slope);
  return mx <= 2.0 * median && t.distance_slope >= 0.9 && t.distance_slope <= 1.1;
}

// ---------------------------------------------------------------- 10

// Gauss-Jordan elimination with partial pivoting, written independently of the library.
CVector gauss_jordan(CMatrix A, CVector b) {
  const int n = static_cast<int>(A.rows());
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(A(i, k)) > std::abs(A(p, k))) p = i;
    A.row(k).swap(A.row(p));
    std::swap(b(k), b(p));
    const cd piv = A(k, k);
    A.row(k) /= piv;
    b(k) /= piv;
    for (int i = 0; i < n; ++i) {
      if (i == k) continue;
      const cd f = A(i, k);
      A.row(i) -= f * A.row(k);
      b(i) -= f * b(k);
    }
  }
  return b;
}

bool solver_contracts(std::string& out) {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> N;
  CMatrix A(50, 50);
  CVector b(50);
  for (int i = 0; i < 50; ++i) {
    b(i) = cd(N(rng), N(rng));
    for (int j = 0; j < 50; ++j) A(i, j) = cd(N(rng), N(rng));
  }
  SolveOptions o;
  o.tol = 1e-13;
  SolveReport rep;
  const CVector x = solve_dense(A, b, o, rep);
  const CVector ref = gauss_jordan(A, b);
  const double err = (x - ref).norm() / ref.norm();
  const CVector z = solve_dense(A, CVector::Zero(50), o, rep);

  const Scene sc = testsupport::bump_scene();
  const PanelMesh mesh = mesh_scene(sc, 1.0, 6.0, 6);
  CVector runs[2];
  for (auto& r : runs) {
    const BieSystem sys = assemble(sc, mesh, sc.dipole);
    r = solve(sys, mesh).first.x;
  }
  const bool same = runs[0].size() == runs[1].size() &&
                    std::memcmp(runs[0].data(), runs[1].data(), sizeof(cd) * runs[0].size()) == 0;
  out = fmt("random 50x50 error %.2e (tol 1e-10), homogeneous |x| %.1e, reruns ", err, z.norm()) +
        (same ? "identical" : "differ");
  return err <= 1e-10 && z.norm() == 0.0 && same;
}

}  // namespace

int main() {
  std::cout << "roughbie acceptance suite\n";
  run(1, "green_maxwell_residual", green_residual);
  run(2, "green_asymptotic_decay", green_decay);
  run(3, "truncation_rate", truncation_rate);
  run(4, "no_contrast_null", no_contrast);
  run(5, "mie_oracle", mie);
  run(6, "pec_and_interface_residuals", pec_and_interface);
  run(7, "energy_decay", energy_decay);
  run(8, "domain_derivative", domain_derivative);
  run(9, "local_stability", local_stability);
  run(10, "solver_contracts", solver_contracts);
  std::cout << (failures == 0 ? "all criteria passed\n" : std::to_string(failures) + " criteria failed\n");
  return failures;
}
