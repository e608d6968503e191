#pragma once

#include <iosfwd>
#include <vector>

#include "roughbie/mesh.hpp"

namespace roughbie {

struct QuadratureOptions {
  int singular_order = 10;   // per right triangle of the self-panel rule
  int near_order = 0;        // Gauss order on accepted sub-panels, 0 -> panel order + 3
  double near_factor = 2.0;  // source panels closer than this many diameters are refined
  double accept_factor = 1.0;
  int max_depth = 12;
  bool singular_correction = true;
  int resolved_near_order(int panel_order) const {
    return near_order > 0 ? near_order : panel_order + 3;
  }
};

enum class DensityKind { nu_cross_E, nu_cross_H };

// Cartesian tangential field sampled at the nodes of one surface of a mesh.
struct SurfaceDensity {
  DensityKind kind = DensityKind::nu_cross_E;
  Tag region = Tag::S;
  std::vector<CVec3> values;
};

// Unknowns: a = nu_S x E (S), b = omega mu_1 nu_S x H (S), c = omega mu_1
// nu_Gamma x H (Gamma); two tangential coefficients per node. Equation rows
// follow the same order: upper-region equation on S, lower-region equation
// on S, PEC equation on Gamma.
struct Layout {
  int ns = 0;
  int ng = 0;
  double h_scale = 1.0;  // omega * mu_1
  int a0() const { return 0; }
  int b0() const { return 2 * ns; }
  int c0() const { return 4 * ns; }
  int size() const { return 4 * ns + 2 * ng; }
};

struct BieSystem {
  CMatrix A;
  CVector rhs;
  Layout layout;
  cd kappa1, kappa2;
  double half_width = 0.0;
  double density = 0.0;
  int panel_order = 0;
  QuadratureOptions quadrature;
};

struct AssemblyOptions {
  QuadratureOptions quadrature;
  double memory_cap_bytes = 4.0 * 1024 * 1024 * 1024;
};

// Bytes needed to assemble and factor a system for this mesh.
double assembly_memory_estimate(const PanelMesh& mesh);

BieSystem assemble(const Scene& scene, const PanelMesh& mesh, const Dipole& dipole,
                   const AssemblyOptions& opts = {});

// Adds coef_t * T + coef_k * K between two surfaces of the mesh into A, where
// T b = nu x int G b and K a = nu x int grad g x a (principal value on the
// same surface), both projected on the target tangent bases. Rows start at
// row0, T columns at col_t0, K columns at col_k0.
void add_operator_blocks(const PanelMesh& mesh, Tag target, Tag source, cd kappa,
                         const QuadratureOptions& q, CMatrix& A, int row0, cd coef_t, int col_t0,
                         cd coef_k, int col_k0);

// Matrix-free version returning Cartesian fields at selected target nodes.
std::vector<CVec3> apply_operators(const PanelMesh& mesh, Tag target,
                                   const std::vector<int>& target_nodes, Tag source, cd kappa,
                                   const QuadratureOptions& q, cd coef_t,
                                   const std::vector<CVec3>* dens_t, cd coef_k,
                                   const std::vector<CVec3>* dens_k);

// i omega mu nu x int_S G psi at S target nodes.
SurfaceDensity apply_T(const PanelMesh& mesh, cd kappa, double mu, double omega,
                       const SurfaceDensity& psi, const std::vector<int>& targets,
                       const QuadratureOptions& q = {});
// nu x int_S curl G phi (principal value) at S target nodes.
SurfaceDensity apply_K(const PanelMesh& mesh, cd kappa, const SurfaceDensity& phi,
                       const std::vector<int>& targets, const QuadratureOptions& q = {});

// Conversions between unknown vectors and Cartesian nodal fields.
std::vector<CVec3> unpack_tangential(const PanelMesh& mesh, Tag tag, const CVector& x,
                                     int offset);
void pack_tangential(const PanelMesh& mesh, Tag tag, const std::vector<CVec3>& f, CVector& x,
                     int offset);

// Little-endian dump: int64 rows, int64 cols, row-major (re, im) doubles of A,
// then int64 length and (re, im) doubles of the right-hand side.
void write_system_binary(const BieSystem& sys, std::ostream& os);

namespace detail {

struct Sample {
  Vec3 y;
  double w;
  double s, t;
};

// Quadrature samples on panel `pan` for a kernel singular or nearly singular
// at x. With `self` the point x is the chart image of (s0, t0) on the panel.
void near_samples(const PanelMesh& mesh, const Panel& pan, const Vec3& x, bool self, double s0,
                  double t0, const QuadratureOptions& q, std::vector<Sample>& out);

struct EdgeSample {
  Vec3 y;
  Vec3 m;    // outward conormal of the panel
  double w;  // weight times line element
  double s, t;
};

// Gauss samples on the four edges of a panel, refined towards x.
void edge_samples(const PanelMesh& mesh, const Panel& pan, const Vec3& x,
                  const QuadratureOptions& q, std::vector<EdgeSample>& out);

bool is_near(const Panel& pan, const Vec3& x, const QuadratureOptions& q);

// Principal-value correction for the self term of int L_i grad_x g over the
// panel holding node i at reference (s0, t0): exact value of the leading
// static singularity minus what the self-panel rule of `order` produces.
Vec3 self_pv_correction(const PanelMesh& mesh, const Panel& pan, double s0, double t0, int order);

}  // namespace detail

}  // namespace roughbie
