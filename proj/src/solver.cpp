#include "roughbie/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace roughbie {

namespace {

double col_norm1(const CMatrix& A) {
  double m = 0.0;
  for (Eigen::Index j = 0; j < A.cols(); ++j) m = std::max(m, A.col(j).cwiseAbs().sum());
  return m;
}

void check_tol(double tol) {
  if (!(tol > 1e-14 && tol < 1e-2)) throw ValidationError("solver tolerance must lie in (1e-14, 1e-2)");
}

double relative_residual(const CMatrix& A, const CVector& x, const CVector& b) {
  const double nb = b.norm();
  const double r = (A * x - b).norm();
  return nb > 0.0 ? r / nb : r;
}

}  // namespace

Densities unpack_densities(const PanelMesh& mesh, const Layout& layout, const CVector& x) {
  if (x.size() != layout.size()) throw PreconditionError("solution size does not match layout");
  Densities d;
  d.a1 = unpack_tangential(mesh, Tag::S, x, layout.a0());
  d.b1 = unpack_tangential(mesh, Tag::S, x, layout.b0());
  d.a2 = d.a1;
  d.b2 = d.b1;
  d.c = unpack_tangential(mesh, Tag::Gamma, x, layout.c0());
  d.d.assign(d.c.size(), CVec3::Zero());
  d.x = x;
  d.layout = layout;
  return d;
}

DenseFactorization::DenseFactorization(CMatrix A) {
  if (A.rows() != A.cols()) throw ValidationError("system matrix must be square");
  norm1_ = col_norm1(A);
  lu_.compute(A);
  // PartialPivLU never fails outright; look at the pivots instead
  const auto& U = lu_.matrixLU();
  double umax = 0.0, umin = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < U.rows(); ++i) {
    const double v = std::abs(U(i, i));
    umax = std::max(umax, v);
    umin = std::min(umin, v);
  }
  if (U.rows() > 0 && !(umin > 1e3 * std::numeric_limits<double>::epsilon() * umax))
    throw SingularSystemError("factorization found a (numerically) zero pivot");
}

CVector DenseFactorization::solve(const CVector& b) const { return lu_.solve(b); }

double DenseFactorization::condition_estimate() const {
  const int n = size();
  if (n == 0) return 0.0;
  CVector x = CVector::Constant(n, cd(1.0 / n));
  double est = 0.0;
  for (int it = 0; it < 5; ++it) {
    const CVector y = lu_.solve(x);
    est = std::max(est, y.cwiseAbs().sum());
    CVector xi(n);
    for (int i = 0; i < n; ++i) xi(i) = std::abs(y(i)) > 0.0 ? y(i) / std::abs(y(i)) : cd(1.0);
    // z = A^-H xi
    const CVector z = lu_.adjoint().solve(xi);
    Eigen::Index j = 0;
    const double zmax = z.cwiseAbs().maxCoeff(&j);
    if (it > 0 && zmax <= std::real(z.dot(x))) break;
    x.setZero();
    x(j) = 1.0;
  }
  return est * norm1_;
}

CVector gmres(const CMatrix& A, const CVector& b, double tol, int restart, int max_iterations,
              std::vector<double>& history) {
  const Eigen::Index n = A.rows();
  Eigen::VectorXd scale(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = std::abs(A(i, i));
    scale(i) = d > 0.0 ? 1.0 / d : 1.0;
  }
  const double nb = b.norm();
  CVector x = CVector::Zero(n);
  history.clear();
  if (nb == 0.0) return x;
  int total = 0;
  const int m = std::max(1, std::min<int>(restart, static_cast<int>(n)));
  double best = std::numeric_limits<double>::infinity();
  int stall = 0;
  while (total < max_iterations) {
    const CVector r = b - A * x;
    double beta = r.norm();
    history.push_back(beta / nb);
    if (beta / nb <= tol) return x;
    CMatrix V(n, m + 1);
    CMatrix H = CMatrix::Zero(m + 1, m);
    std::vector<Eigen::JacobiRotation<cd>> rot(m);
    CVector g = CVector::Zero(m + 1);
    g(0) = beta;
    V.col(0) = r / beta;
    int k = 0;
    for (; k < m && total < max_iterations; ++k, ++total) {
      CVector w = A * (scale.cast<cd>().asDiagonal() * V.col(k));
      for (int j = 0; j <= k; ++j) {  // modified Gram-Schmidt, twice
        const cd h = V.col(j).dot(w);
        H(j, k) += h;
        w -= h * V.col(j);
      }
      for (int j = 0; j <= k; ++j) {
        const cd h = V.col(j).dot(w);
        H(j, k) += h;
        w -= h * V.col(j);
      }
      H(k + 1, k) = w.norm();
      if (std::abs(H(k + 1, k)) > 0.0) V.col(k + 1) = w / H(k + 1, k);
      for (int j = 0; j < k; ++j) H.col(k).applyOnTheLeft(j, j + 1, rot[j].adjoint());
      rot[k].makeGivens(H(k, k), H(k + 1, k));
      H.col(k).applyOnTheLeft(k, k + 1, rot[k].adjoint());
      g.applyOnTheLeft(k, k + 1, rot[k].adjoint());
      const double res = std::abs(g(k + 1)) / nb;
      history.push_back(res);
      if (res <= tol || std::abs(H(k + 1, k)) == 0.0) {
        ++k;
        ++total;
        break;
      }
    }
    const CVector y =
        H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    x += scale.cast<cd>().asDiagonal() * (V.leftCols(k) * y);
    const double now = (b - A * x).norm() / nb;
    if (now <= tol) {
      history.push_back(now);
      return x;
    }
    if (now > 0.99 * best) {
      if (++stall >= 3) break;
    } else {
      stall = 0;
    }
    best = std::min(best, now);
  }
  std::string msg = "GMRES stagnated; residual history:";
  for (std::size_t i = 0; i < history.size(); i += std::max<std::size_t>(1, history.size() / 20))
    msg += " " + std::to_string(history[i]);
  throw ConvergenceError(msg);
}

CVector solve_dense(const CMatrix& A, const CVector& b, const SolveOptions& opts,
                    SolveReport& report) {
  check_tol(opts.tol);
  if (A.rows() != A.cols() || A.rows() != b.size())
    throw ValidationError("system must be square and match the right-hand side");
  const auto t0 = std::chrono::steady_clock::now();
  report = SolveReport{};
  report.unknowns = static_cast<int>(A.rows());
  CVector x;
  if (opts.method == SolveMethod::direct) {
    report.method = "direct";
    DenseFactorization lu(A);
    x = lu.solve(b);
    // one step of refinement keeps the contract on mildly ill-conditioned systems
    if (relative_residual(A, x, b) > opts.tol) x += lu.solve(b - A * x);
    if (opts.estimate_condition) report.condition_estimate = lu.condition_estimate();
  } else {
    report.method = "iterative";
    x = gmres(A, b, opts.tol, opts.restart, opts.max_iterations, report.history);
    report.iterations = static_cast<int>(report.history.size()) - 1;
  }
  report.residual = relative_residual(A, x, b);
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!(report.residual <= opts.tol))
    throw ConvergenceError("residual " + std::to_string(report.residual) + " above tolerance");
  return x;
}

std::pair<Densities, SolveReport> solve(const BieSystem& sys, const PanelMesh& mesh,
                                        const SolveOptions& opts) {
  if (sys.A.rows() != sys.layout.size()) throw ValidationError("system does not match its layout");
  SolveReport rep;
  const CVector x = solve_dense(sys.A, sys.rhs, opts, rep);
  return {unpack_densities(mesh, sys.layout, x), rep};
}

}  // namespace roughbie
