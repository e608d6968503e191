#pragma once

#include <memory>
#include <string>
#include <vector>

#include "roughbie/fields.hpp"

namespace roughbie {

// Forward solution kept together with everything a derivative solve reuses.
struct ForwardSolution {
  Scene scene;
  std::shared_ptr<const PanelMesh> mesh;
  std::shared_ptr<const DenseFactorization> lu;  // direct method
  std::shared_ptr<const CMatrix> matrix;         // iterative method
  Densities densities;
  SolveReport report;
  AssemblyOptions assembly;
  SolveOptions solver;

  FieldEvaluator evaluator(FieldOptions opts = {}) const;
};

struct Discretization {
  double half_width = 1.5;
  double density = 6.0;
  int order = 6;
  double gamma_density = 0.0;  // 0: same as density
};

ForwardSolution solve_forward(const Scene& scene, const Discretization& disc,
                              const AssemblyOptions& aopts = {}, const SolveOptions& sopts = {});

// Normal displacement amplitudes x -> x + h p nu. The S part is measured
// horizontally and must be compactly supported inside the truncated patch.
struct PerturbationField {
  SurfacePerturbation p;

  std::vector<double> on_nodes(const PanelMesh& mesh) const;
  // sup |p| over both boundaries (bump and constant families peak at `value`).
  double sup() const;
  void validate(const PanelMesh& mesh) const;
};

struct DerivativeBoundaryData {
  std::vector<CVec3> gamma;   // nu x E' on Gamma
  std::vector<CVec3> jump_e;  // [nu x E'] on S (upper minus lower)
  std::vector<CVec3> jump_h;  // omega mu_1 [nu x H'] on S
};

// Boundary and jump data of the derivative problem from the forward traces.
// Normal components on either side of S and on Gamma follow from the
// surface divergence of the tangential traces; only the normal part of a
// vector-valued p enters.
DerivativeBoundaryData derivative_boundary_data(const Densities& forward, const Scene& scene,
                                                const PanelMesh& mesh,
                                                const std::vector<double>& p_normal);
DerivativeBoundaryData derivative_boundary_data(const Densities& forward, const Scene& scene,
                                                const PanelMesh& mesh,
                                                const std::vector<Vec3>& p_vector);

// Same system as the forward problem, data on the right-hand side. The
// returned densities describe E'_1, E'_2 (no incident part).
Densities solve_derivative_problem(const ForwardSolution& fwd, const DerivativeBoundaryData& data,
                                   SolveReport* report = nullptr);

struct FdRow {
  double h;
  double error;  // ||trace(E') - trace((E_h - E)/h)||_inf / ||trace(E')||_inf
};

struct FdStudy {
  std::vector<FdRow> rows;
  double order = 0.0;  // least-squares log-log slope
  PlaneTrace derivative_trace;
};

FdStudy derivative_fd_study(const ForwardSolution& fwd, const PerturbationField& p,
                            const std::vector<double>& hs, const MeasurementPlane& plane);

struct StabilityRow {
  double h;
  double hausdorff;
  double trace_sup;
  double trace_holder;
  double ratio;  // NaN when the trace difference vanishes (h = 0)
};

struct StabilityTable {
  std::vector<StabilityRow> rows;
  double alpha = 0.5;
  bool complete = true;
  std::string error;  // first failure when incomplete
  double distance_slope = 0.0;
};

StabilityTable stability_experiment(const ForwardSolution& fwd, const PerturbationField& p,
                                    const std::vector<double>& hs, const MeasurementPlane& plane,
                                    double alpha = 0.5, const DomainSampling& sampling = {});

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

void write_stability_csv(const StabilityTable& t, std::ostream& os);
void write_stability_json(const StabilityTable& t, const MeasurementPlane& plane,
                          const PanelMesh& mesh, std::ostream& os);

}  // namespace roughbie
