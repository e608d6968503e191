#pragma once

#include <vector>

#include "roughbie/types.hpp"

namespace roughbie::quad {

struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;
};

// Gauss-Legendre rule on [-1, 1]. Cached, thread safe.
const Rule1D& gauss_legendre(int n);

// Lagrange interpolation on a fixed node set (barycentric form).
class Lagrange1D {
 public:
  explicit Lagrange1D(std::vector<double> nodes);
  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const { return nodes_; }
  // basis values l_j(t) written to out[0..n)
  void values(double t, double* out) const;
  // D(i, j) = l_j'(t_i)
  const Eigen::MatrixXd& diff() const { return D_; }

 private:
  std::vector<double> nodes_;
  std::vector<double> bw_;
  Eigen::MatrixXd D_;
};

// Lagrange basis on the p Gauss-Legendre nodes. Cached.
const Lagrange1D& gl_lagrange(int p);

struct RefPoint {
  double s, t, w;
};

// Rule on the reference square [-1,1]^2 for integrands with a 1/r type
// singularity at (s0, t0), which must lie in the closed square. The square is
// split into right triangles with the apex at the singular point; each
// triangle uses a radial Gauss rule and a sinh-graded rule along its far edge.
std::vector<RefPoint> singular_square_rule(double s0, double t0, int order);

// Tensor Gauss rule on [s0,s1] x [t0,t1] appended to out.
void append_tensor_rule(double s0, double s1, double t0, double t1, int order,
                        std::vector<RefPoint>& out);

}  // namespace roughbie::quad
