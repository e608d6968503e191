// Command-line driver: roughbie <command> --config FILE --out DIR
#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "roughbie/config.hpp"
#include "roughbie/io.hpp"
#include "selftest.hpp"

namespace fs = std::filesystem;
using namespace roughbie;

namespace {

struct Context {
  ScenarioConfig cfg;
  fs::path out;
  bool verbose = false;

  void log(const std::string& s) const {
    if (verbose) std::cerr << "[roughbie] " << s << '\n';
  }
  nlohmann::json sidecar(nlohmann::json j) const {
    j["config"] = cfg.resolved;
    if (!cfg.warnings.empty()) j["warnings"] = cfg.warnings;
    return j;
  }
};

ForwardSolution forward(const Context& c, const Scene& sc, const Discretization& disc) {
  c.log("meshing and solving (half-width " + std::to_string(disc.half_width) + ", density " +
        std::to_string(disc.density) + ")");
  ForwardSolution f = solve_forward(sc, disc, c.cfg.assembly, c.cfg.solver);
  c.log("solved " + std::to_string(f.report.unknowns) + " unknowns, residual " +
        std::to_string(f.report.residual));
  return f;
}

void cmd_solve(const Context& c) {
  const Scene sc = c.cfg.scene();
  const ForwardSolution f = forward(c, sc, c.cfg.discretization);
  const double wmu = sc.upper.omega * sc.upper.mu;
  write_file(c.out / "densities.csv",
             [&](std::ostream& os) { write_densities_csv(*f.mesh, f.densities, wmu, os); });
  write_file(c.out / "mesh.csv", [&](std::ostream& os) { write_mesh_csv(*f.mesh, os); });
  nlohmann::json j = report_json(f.report);
  j["nodes"] = f.mesh->size();
  write_json(c.out / "report.json", c.sidecar(j));
  if (c.cfg.dump_system) {
    const BieSystem sys = assemble(sc, *f.mesh, sc.dipole, c.cfg.assembly);
    write_file(c.out / "system.bin", [&](std::ostream& os) { write_system_binary(sys, os); });
  }
  std::cout << "solve: " << f.report.unknowns << " unknowns, residual " << f.report.residual
            << ", condition ~" << f.report.condition_estimate << '\n';
}

void cmd_fields(const Context& c) {
  const Scene sc = c.cfg.scene();
  const ForwardSolution f = forward(c, sc, c.cfg.discretization);
  const FieldEvaluator ev = f.evaluator();
  const FieldGrid& g = c.cfg.field_grid;
  std::vector<Vec3> pts;
  int skipped = 0;
  for (int i = 0; i < g.n[0]; ++i)
    for (int j = 0; j < g.n[1]; ++j)
      for (int k = 0; k < g.n[2]; ++k) {
        Vec3 x;
        for (int a = 0; a < 3; ++a) {
          const int idx = a == 0 ? i : a == 1 ? j : k;
          x(a) = g.n[a] > 1 ? g.lo(a) + (g.hi(a) - g.lo(a)) * idx / (g.n[a] - 1) : g.lo(a);
        }
        // no field inside the conductor, and the dipole itself is singular
        if (sc.inside_obstacle(x) || (x - sc.dipole.position).norm() < 1e-9) {
          ++skipped;
          continue;
        }
        pts.push_back(x);
      }
  const auto samples = evaluate_points(ev, pts);
  write_file(c.out / "fields.csv", [&](std::ostream& os) { write_field_csv(samples, os); });
  nlohmann::json j;
  j["points"] = samples.size();
  j["skipped_inside_obstacle"] = skipped;
  j["solve"] = report_json(f.report);
  write_json(c.out / "fields.json", c.sidecar(j));

  const PlaneTrace t = plane_trace(ev, c.cfg.plane, c.cfg.alpha, c.cfg.holder_cutoff);
  write_file(c.out / "plane_trace.csv", [&](std::ostream& os) { write_trace_csv(t, os); });
  nlohmann::json tj = nlohmann::json::parse([&] {
    std::ostringstream os;
    write_trace_json(t, os);
    return os.str();
  }());
  write_json(c.out / "plane_trace.json", c.sidecar(tj));

  nlohmann::json ej;
  for (double r : c.cfg.energy_radii) {
    try {
      ej.push_back({{"r", r},
                    {"upper", radiation_energy(ev, r, Hemisphere::upper, 16)},
                    {"lower", radiation_energy(ev, r, Hemisphere::lower, 16)}});
    } catch (const DomainError& e) {
      c.log(std::string("energy at r=") + std::to_string(r) + " skipped: " + e.what());
    }
  }
  write_json(c.out / "energy.json", c.sidecar({{"energies", ej}}));
  std::cout << "fields: " << samples.size() << " points, trace sup " << t.sup << ", holder "
            << t.holder << '\n';
}

void cmd_converge(const Context& c) {
  const Scene sc = c.cfg.scene();
  const cd k1 = wave_number(sc.upper);
  struct Run {
    double n, density;
    int unknowns;
    PlaneTrace trace;
  };
  std::vector<Run> runs;
  for (double n : c.cfg.converge.half_widths)
    for (double d : c.cfg.converge.densities) {
      Discretization disc = c.cfg.discretization;
      disc.half_width = n;
      disc.density = d;
      const ForwardSolution f = forward(c, sc, disc);
      runs.push_back({n, d, f.report.unknowns,
                      plane_trace(f.evaluator(), c.cfg.plane, c.cfg.alpha, c.cfg.holder_cutoff)});
    }
  // the reference is the largest patch at the finest density
  std::size_t ref = 0;
  for (std::size_t i = 1; i < runs.size(); ++i)
    if (runs[i].n > runs[ref].n || (runs[i].n == runs[ref].n && runs[i].density > runs[ref].density))
      ref = i;
  write_file(c.out / "converge.csv", [&](std::ostream& os) {
    os << "half_width,density,unknowns,trace_sup,error,truncation_bound\n";
    os.precision(17);
    for (const Run& r : runs) {
      const double err = trace_difference(r.trace, runs[ref].trace).sup / runs[ref].trace.sup;
      os << r.n << ',' << r.density << ',' << r.unknowns << ',' << r.trace.sup << ',' << err << ','
         << std::exp(-0.5 * r.n * k1.imag()) / r.n << '\n';
    }
  });
  write_json(c.out / "converge.json",
             c.sidecar({{"reference", {{"half_width", runs[ref].n}, {"density", runs[ref].density}}},
                        {"error", "sup-norm plane-trace difference relative to the reference"}}));
  std::cout << "converge: " << runs.size() << " runs\n";
}

void cmd_derivative(const Context& c) {
  const Scene sc = c.cfg.scene();
  const ForwardSolution f = forward(c, sc, c.cfg.discretization);
  const FdStudy st = derivative_fd_study(f, c.cfg.perturbation, c.cfg.derivative_h, c.cfg.plane);
  write_file(c.out / "derivative.csv", [&](std::ostream& os) {
    os << "h,relative_error\n";
    os.precision(17);
    for (const auto& r : st.rows) os << r.h << ',' << r.error << '\n';
  });
  write_file(c.out / "derivative_trace.csv",
             [&](std::ostream& os) { write_trace_csv(st.derivative_trace, os); });
  write_json(c.out / "derivative.json",
             c.sidecar({{"fitted_order", st.order}, {"trace_sup", st.derivative_trace.sup}}));
  std::cout << "derivative: fitted order " << st.order << '\n';
}

void cmd_stability(const Context& c) {
  const Scene sc = c.cfg.scene();
  const ForwardSolution f = forward(c, sc, c.cfg.discretization);
  const StabilityTable t =
      stability_experiment(f, c.cfg.perturbation, c.cfg.stability_h, c.cfg.plane, c.cfg.alpha);
  write_file(c.out / "stability.csv", [&](std::ostream& os) { write_stability_csv(t, os); });
  nlohmann::json j = nlohmann::json::parse([&] {
    std::ostringstream os;
    write_stability_json(t, c.cfg.plane, *f.mesh, os);
    return os.str();
  }());
  write_json(c.out / "stability.json", c.sidecar(j));
  if (!t.complete) throw Error("stability experiment aborted: " + t.error);
  std::cout << "stability: " << t.rows.size() << " rows, distance slope " << t.distance_slope
            << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary-integral Maxwell solver for an obstacle above a rough interface"};
  app.require_subcommand(1, 1);
  std::string config, out = "out";
  int threads = 0;
  bool verbose = false;
  app.add_option("--config", config, "scenario configuration (JSON)")->required();
  app.add_option("--out", out, "output directory");
  app.add_option("--threads", threads, "worker threads (0: runtime default)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--verbose", verbose, "progress messages on stderr");
  const std::pair<const char*, const char*> commands[] = {
      {"solve", "assemble and solve; write densities, mesh and report"},
      {"fields", "evaluate fields on a grid, the plane trace and hemisphere energies"},
      {"converge", "plane-trace sweep over truncation half-widths and densities"},
      {"derivative", "domain derivative with a finite-difference check"},
      {"stability", "Hausdorff distance against trace-difference norm table"},
      {"selftest", "built-in consistency suites"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();
  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    Context c;
    c.cfg = load_config(config);
    c.out = out;
    c.verbose = verbose;
    for (const auto& w : c.cfg.warnings) std::cerr << "warning: " << w << '\n';
    ensure_directory(c.out);
    if (cmd == "solve") cmd_solve(c);
    else if (cmd == "fields") cmd_fields(c);
    else if (cmd == "converge") cmd_converge(c);
    else if (cmd == "derivative") cmd_derivative(c);
    else if (cmd == "stability") cmd_stability(c);
    else if (!cli::run_selftest(c.cfg, c.out, verbose)) return 3;
  } catch (const ConfigError& e) {
    std::cerr << "config error [" << e.key << "]: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
