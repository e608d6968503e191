#pragma once

#include <string>
#include <vector>

#include "roughbie/operators.hpp"

namespace roughbie {

enum class SolveMethod { direct, iterative };

struct SolveOptions {
  SolveMethod method = SolveMethod::direct;
  double tol = 1e-10;
  int restart = 200;
  int max_iterations = 4000;
  bool estimate_condition = true;
};

struct SolveReport {
  double residual = 0.0;            // ||Ax - b|| / ||b|| (0 when b = 0)
  double condition_estimate = 0.0;  // 1-norm estimate, 0 when not computed
  int iterations = 0;               // 0 for the direct method
  double wall_time = 0.0;           // seconds
  int unknowns = 0;
  std::string method;
  std::vector<double> history;      // relative residuals of the iterative method
};

// Boundary traces: region-1 and region-2 traces on S (equal for the forward
// problem), nu x H on Gamma, and nu x E on Gamma (zero for a PEC forward
// solve). H traces carry the omega * mu_1 scaling of the layout.
struct Densities {
  std::vector<CVec3> a1, b1, a2, b2;
  std::vector<CVec3> c, d;
  bool include_incident = true;
  CVector x;
  Layout layout;
};

Densities unpack_densities(const PanelMesh& mesh, const Layout& layout, const CVector& x);

// Partial-pivoting LU kept for repeated right-hand sides.
class DenseFactorization {
 public:
  // Takes the matrix by value so callers can move it in and avoid a copy.
  explicit DenseFactorization(CMatrix A);
  CVector solve(const CVector& b) const;
  double norm1() const { return norm1_; }
  // Hager-Higham estimate of ||A^-1||_1 ||A||_1 (5 sweeps).
  double condition_estimate() const;
  int size() const { return static_cast<int>(lu_.rows()); }

 private:
  Eigen::PartialPivLU<CMatrix> lu_;
  double norm1_ = 0.0;
};

// Generic dense solve with the residual contract; used for BIE systems and
// plain matrices alike.
CVector solve_dense(const CMatrix& A, const CVector& b, const SolveOptions& opts,
                    SolveReport& report);

std::pair<Densities, SolveReport> solve(const BieSystem& sys, const PanelMesh& mesh,
                                        const SolveOptions& opts = {});

// Restarted GMRES with right Jacobi scaling on an explicit matrix.
CVector gmres(const CMatrix& A, const CVector& b, double tol, int restart, int max_iterations,
              std::vector<double>& history);

}  // namespace roughbie
