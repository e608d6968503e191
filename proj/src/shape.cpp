#include "roughbie/shape.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include <json.hpp>

namespace roughbie {

FieldEvaluator ForwardSolution::evaluator(FieldOptions opts) const {
  opts.quadrature = assembly.quadrature;
  return FieldEvaluator(scene, *mesh, densities, opts);
}

ForwardSolution solve_forward(const Scene& scene, const Discretization& disc,
                              const AssemblyOptions& aopts, const SolveOptions& sopts) {
  ForwardSolution f;
  f.scene = scene;
  f.assembly = aopts;
  f.solver = sopts;
  auto mesh = std::make_shared<PanelMesh>(
      mesh_scene(scene, disc.half_width, disc.density, disc.order, disc.gamma_density));
  f.mesh = mesh;
  BieSystem sys = assemble(scene, *mesh, scene.dipole, aopts);
  if (sopts.method == SolveMethod::direct) {
    // same contract as solve_dense, but the factorization is kept
    if (!(sopts.tol > 1e-14 && sopts.tol < 1e-2))
      throw ValidationError("solver tolerance must lie in (1e-14, 1e-2)");
    CMatrix A = sys.A;
    auto lu = std::make_shared<DenseFactorization>(std::move(sys.A));
    CVector x = lu->solve(sys.rhs);
    const double nb = sys.rhs.norm();
    auto rel = [&](const CVector& v) { return (A * v - sys.rhs).norm() / (nb > 0.0 ? nb : 1.0); };
    if (rel(x) > sopts.tol) x += lu->solve(sys.rhs - A * x);
    f.report.method = "direct";
    f.report.unknowns = static_cast<int>(x.size());
    f.report.residual = rel(x);
    if (sopts.estimate_condition) f.report.condition_estimate = lu->condition_estimate();
    if (!(f.report.residual <= sopts.tol))
      throw ConvergenceError("residual " + std::to_string(f.report.residual) + " above tolerance");
    f.lu = lu;
    f.densities = unpack_densities(*mesh, sys.layout, x);
  } else {
    auto [d, rep] = solve(sys, *mesh, sopts);
    f.densities = std::move(d);
    f.report = rep;
    f.matrix = std::make_shared<CMatrix>(std::move(sys.A));
  }
  return f;
}

std::vector<double> PerturbationField::on_nodes(const PanelMesh& mesh) const {
  std::vector<double> out(mesh.size());
  for (int i = 0; i < mesh.size(); ++i) {
    const Node& n = mesh.nodes[i];
    out[i] = n.tag == Tag::S ? p.surface(n.x, true) : p.gamma(n.x, false);
  }
  return out;
}

double PerturbationField::sup() const {
  auto s = [](const ScalarField& f) { return f.vanishes() ? 0.0 : std::abs(f.value); };
  return std::max(s(p.gamma), s(p.surface));
}

void PerturbationField::validate(const PanelMesh& mesh) const {
  const ScalarField& s = p.surface;
  if (s.kind == ScalarField::Kind::constant && !s.vanishes())
    throw ValidationError("perturbation of S must be compactly supported");
  if (s.kind == ScalarField::Kind::bump && !s.vanishes()) {
    const double reach = std::max(std::abs(s.center.x()), std::abs(s.center.y())) + s.radius;
    if (reach > mesh.half_width) throw ValidationError("S perturbation leaves the truncated patch");
  }
}

namespace {

std::vector<CVec3> full_field(const PanelMesh& mesh, const std::vector<CVec3>& on_s,
                              const std::vector<CVec3>& on_g) {
  std::vector<CVec3> f(mesh.size(), CVec3::Zero());
  std::copy(on_s.begin(), on_s.end(), f.begin());
  std::copy(on_g.begin(), on_g.end(), f.begin() + mesh.num_s);
  return f;
}

}  // namespace

DerivativeBoundaryData derivative_boundary_data(const Densities& fw, const Scene& scene,
                                                const PanelMesh& mesh,
                                                const std::vector<double>& p) {
  const std::size_t ns = mesh.num_s, ng = mesh.num_gamma();
  if (fw.a1.size() != ns || fw.a2.size() != ns || fw.b1.size() != ns || fw.b2.size() != ns ||
      fw.c.size() != ng)
    throw PreconditionError("forward solution lacks one-sided traces for this mesh");
  if (p.size() != static_cast<std::size_t>(mesh.size()))
    throw ValidationError("perturbation must be sampled on every mesh node");

  const Medium& m1 = scene.upper;
  const Medium& m2 = scene.lower;
  const double w = m1.omega;
  const double wmu1 = w * m1.mu;
  const cd eps1 = m1.complex_permittivity(), eps2 = m2.complex_permittivity();
  const std::vector<cd> div_a1 = surface_divergence(mesh, full_field(mesh, fw.a1, {}));
  const std::vector<cd> div_a2 = surface_divergence(mesh, full_field(mesh, fw.a2, {}));
  const std::vector<cd> div_b1 = surface_divergence(mesh, full_field(mesh, fw.b1, fw.c));
  const std::vector<cd> div_b2 = surface_divergence(mesh, full_field(mesh, fw.b2, {}));

  // p times the normal-component jumps (S) and p E_nu (Gamma), one array
  std::vector<cd> pe(mesh.size()), ph(mesh.size());
  for (int i = 0; i < mesh.size(); ++i) {
    if (mesh.nodes[i].tag == Tag::S) {
      const cd en1 = div_b1[i] / (kI * w * w * eps1 * m1.mu);
      const cd en2 = div_b2[i] / (kI * w * w * eps2 * m1.mu);
      const cd hn1 = -div_a1[i] / (kI * w * m1.mu);
      const cd hn2 = -div_a2[i] / (kI * w * m2.mu);
      pe[i] = p[i] * (en1 - en2);
      ph[i] = p[i] * (hn1 - hn2);
    } else {
      pe[i] = p[i] * div_b1[i] / (kI * w * w * eps1 * m1.mu);
      ph[i] = 0.0;
    }
  }
  const std::vector<CVec3> ge = surface_gradient(mesh, pe);
  const std::vector<CVec3> gh = surface_gradient(mesh, ph);

  DerivativeBoundaryData d;
  d.jump_e.resize(ns);
  d.jump_h.resize(ns);
  d.gamma.resize(ng);
  for (std::size_t i = 0; i < ns; ++i) {
    const CVec3 nu = to_complex(mesh.nodes[i].normal);
    const CVec3 ht1 = ccross(fw.b1[i], nu) / wmu1, ht2 = ccross(fw.b2[i], nu) / wmu1;
    const CVec3 et1 = ccross(fw.a1[i], nu), et2 = ccross(fw.a2[i], nu);
    d.jump_e[i] = -kI * w * p[i] * (m1.mu * ht1 - m2.mu * ht2) - ccross(nu, ge[i]);
    d.jump_h[i] = wmu1 * (kI * w * p[i] * (eps1 * et1 - eps2 * et2) - ccross(nu, gh[i]));
  }
  for (std::size_t k = 0; k < ng; ++k) {
    const std::size_t i = ns + k;
    const CVec3 nu = to_complex(mesh.nodes[i].normal);
    d.gamma[k] = -ccross(nu, ge[i]) - kI * p[i] * ccross(fw.c[k], nu);
  }
  return d;
}

DerivativeBoundaryData derivative_boundary_data(const Densities& forward, const Scene& scene,
                                                const PanelMesh& mesh,
                                                const std::vector<Vec3>& p_vector) {
  if (p_vector.size() != static_cast<std::size_t>(mesh.size()))
    throw ValidationError("perturbation must be sampled on every mesh node");
  std::vector<double> pn(mesh.size());
  for (int i = 0; i < mesh.size(); ++i) pn[i] = p_vector[i].dot(mesh.nodes[i].normal);
  return derivative_boundary_data(forward, scene, mesh, pn);
}

Densities solve_derivative_problem(const ForwardSolution& fwd, const DerivativeBoundaryData& data,
                                   SolveReport* report) {
  const PanelMesh& mesh = *fwd.mesh;
  const Layout& L = fwd.densities.layout;
  if (data.gamma.size() != static_cast<std::size_t>(mesh.num_gamma()) ||
      data.jump_e.size() != static_cast<std::size_t>(mesh.num_s) ||
      data.jump_h.size() != static_cast<std::size_t>(mesh.num_s))
    throw PreconditionError("derivative data does not match the mesh");
  const Scene& sc = fwd.scene;
  const cd k1 = wave_number(sc.upper), k2 = wave_number(sc.lower);
  const QuadratureOptions& q = fwd.assembly.quadrature;

  std::vector<int> s_nodes(mesh.num_s), g_nodes(mesh.num_gamma());
  std::iota(s_nodes.begin(), s_nodes.end(), 0);
  std::iota(g_nodes.begin(), g_nodes.end(), mesh.num_s);

  CVector rhs = CVector::Zero(L.size());
  // upper equation on S: double layer of the Gamma data
  {
    const auto v = apply_operators(mesh, Tag::S, s_nodes, Tag::Gamma, k1, q, 0.0, nullptr, 1.0,
                                   &data.gamma);
    pack_tangential(mesh, Tag::S, v, rhs, L.a0());
  }
  // lower equation on S: written for the lower traces, which differ by the jumps
  {
    auto v = apply_operators(mesh, Tag::S, s_nodes, Tag::S, k2, q,
                             kI * sc.lower.mu / sc.upper.mu, &data.jump_h, 1.0, &data.jump_e);
    for (int i = 0; i < mesh.num_s; ++i) v[i] += 0.5 * data.jump_e[i];
    pack_tangential(mesh, Tag::S, v, rhs, L.b0());
  }
  // PEC equation: jump of the Gamma double layer plus its principal value
  {
    auto v = apply_operators(mesh, Tag::Gamma, g_nodes, Tag::Gamma, k1, q, 0.0, nullptr, 1.0,
                             &data.gamma);
    for (int k = 0; k < mesh.num_gamma(); ++k) v[k] -= 0.5 * data.gamma[k];
    pack_tangential(mesh, Tag::Gamma, v, rhs, L.c0());
  }

  CVector x;
  SolveReport rep;
  rep.unknowns = static_cast<int>(L.size());
  if (fwd.lu) {
    x = fwd.lu->solve(rhs);
    rep.method = "direct";
  } else if (fwd.matrix) {
    rep.method = "iterative";
    x = gmres(*fwd.matrix, rhs, fwd.solver.tol, fwd.solver.restart, fwd.solver.max_iterations,
              rep.history);
    rep.iterations = static_cast<int>(rep.history.size()) - 1;
  } else {
    throw PreconditionError("forward solution holds neither a factorization nor a matrix");
  }
  if (report) *report = rep;

  Densities d = unpack_densities(mesh, L, x);
  for (int i = 0; i < mesh.num_s; ++i) {
    d.a2[i] = d.a1[i] - data.jump_e[i];
    d.b2[i] = d.b1[i] - data.jump_h[i];
  }
  d.d = data.gamma;
  d.include_incident = false;
  return d;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("slope needs two or more points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("log-log slope of non-positive data");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

ForwardSolution perturbed_solve(const ForwardSolution& fwd, const PerturbationField& p, double h) {
  const Scene ph = perturb_scene(fwd.scene, p.p, h);
  Discretization disc;
  disc.half_width = fwd.mesh->half_width;
  disc.density = fwd.mesh->density;
  disc.order = fwd.mesh->order;
  disc.gamma_density = fwd.mesh->gamma_density;
  SolveOptions so = fwd.solver;
  so.estimate_condition = false;
  return solve_forward(ph, disc, fwd.assembly, so);
}

}  // namespace

FdStudy derivative_fd_study(const ForwardSolution& fwd, const PerturbationField& p,
                            const std::vector<double>& hs, const MeasurementPlane& plane) {
  p.validate(*fwd.mesh);
  const auto data = derivative_boundary_data(fwd.densities, fwd.scene, *fwd.mesh,
                                             p.on_nodes(*fwd.mesh));
  const Densities dd = solve_derivative_problem(fwd, data);
  FieldOptions fo;
  fo.quadrature = fwd.assembly.quadrature;
  const FieldEvaluator fe(fwd.scene, *fwd.mesh, dd, fo);
  FdStudy st;
  st.derivative_trace = plane_trace(fe, plane);
  const PlaneTrace base = plane_trace(fwd.evaluator(), plane);
  for (double h : hs) {
    if (!(h > 0.0)) throw ValidationError("finite-difference steps must be positive");
    const ForwardSolution fh = perturbed_solve(fwd, p, h);
    const PlaneTrace th = plane_trace(fh.evaluator(), plane);
    const PlaneTrace fd = scale_trace(trace_difference(th, base), 1.0 / h);
    const PlaneTrace err = trace_difference(fd, st.derivative_trace);
    st.rows.push_back({h, err.sup / st.derivative_trace.sup});
  }
  if (st.rows.size() >= 2) {
    std::vector<double> x, y;
    for (const auto& r : st.rows) {
      x.push_back(r.h);
      y.push_back(r.error);
    }
    st.order = loglog_slope(x, y);
  }
  return st;
}

StabilityTable stability_experiment(const ForwardSolution& fwd, const PerturbationField& p,
                                    const std::vector<double>& hs, const MeasurementPlane& plane,
                                    double alpha, const DomainSampling& sampling) {
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (!(hs[i] >= 0.0)) throw ValidationError("h-sequence entries must be non-negative");
    if (i > 0 && !(hs[i] < hs[i - 1])) throw ValidationError("h-sequence must be decreasing");
  }
  p.validate(*fwd.mesh);
  StabilityTable t;
  t.alpha = alpha;
  const PlaneTrace base = plane_trace(fwd.evaluator(), plane, alpha);
  for (double h : hs) {
    try {
      StabilityRow r{h, 0.0, 0.0, 0.0, std::numeric_limits<double>::quiet_NaN()};
      if (h > 0.0) {
        const ForwardSolution fh = perturbed_solve(fwd, p, h);
        const PlaneTrace d = trace_difference(plane_trace(fh.evaluator(), plane, alpha), base);
        r.hausdorff = domain_distance(fwd.scene, fh.scene, sampling);
        r.trace_sup = d.sup;
        r.trace_holder = d.holder;
        if (d.holder > 0.0) r.ratio = r.hausdorff / d.holder;
      }
      t.rows.push_back(r);
    } catch (const Error& e) {
      t.complete = false;
      t.error = e.what();
      break;
    }
  }
  std::vector<double> x, y;
  for (const auto& r : t.rows)
    if (r.h > 0.0 && r.hausdorff > 0.0) {
      x.push_back(r.h);
      y.push_back(r.hausdorff);
    }
  if (x.size() >= 2) t.distance_slope = loglog_slope(x, y);
  return t;
}

void write_stability_csv(const StabilityTable& t, std::ostream& os) {
  os << "h,hausdorff,trace_sup,trace_holder,ratio\n";
  os.precision(17);
  for (const auto& r : t.rows) {
    os << r.h << ',' << r.hausdorff << ',' << r.trace_sup << ',' << r.trace_holder << ',';
    if (!std::isnan(r.ratio)) os << r.ratio;
    os << '\n';
  }
}

void write_stability_json(const StabilityTable& t, const MeasurementPlane& plane,
                          const PanelMesh& mesh, std::ostream& os) {
  nlohmann::json j;
  j["alpha"] = t.alpha;
  j["complete"] = t.complete;
  if (!t.complete) j["error"] = t.error;
  j["distance_slope"] = t.distance_slope;
  j["grid"] = {{"height", plane.height}, {"x0", plane.x0}, {"x1", plane.x1}, {"y0", plane.y0},
               {"y1", plane.y1},         {"nx", plane.nx}, {"ny", plane.ny}};
  j["mesh"] = {{"half_width", mesh.half_width},
               {"density", mesh.density},
               {"order", mesh.order},
               {"nodes", mesh.size()}};
  os << j.dump(2) << '\n';
}

}  // namespace roughbie
