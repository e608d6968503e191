#pragma once

#include <iosfwd>
#include <vector>

#include "roughbie/geometry.hpp"

namespace roughbie {

enum class Tag : unsigned char { S = 0, Gamma = 1 };

struct Node {
  Vec3 x;
  Vec3 normal;
  Vec3 t1, t2;      // orthonormal tangent basis, t1 x t2 = normal
  Vec3 as, at;      // contravariant basis w.r.t. panel reference coordinates
  double weight;    // Gauss weight times area element
  Tag tag;
  int panel;
};

// Chart rectangle [u0,u1] x [v0,v1] carrying a p x p Gauss-Legendre grid.
// Node (a, b) of the panel has index first + a * p + b.
struct Panel {
  Tag tag;
  int face;  // cube-sphere chart for Gamma, -1 for S
  double u0, u1, v0, v1;
  int first;
  Vec3 center;
  double diameter;
};

struct PanelMesh {
  int order = 6;
  double half_width = 0.0;
  double density = 0.0;
  double gamma_density = 0.0;
  int s_panels_per_side = 0;
  int gamma_panels_per_side = 0;
  int num_s = 0;  // S nodes come first, Gamma nodes after
  std::vector<Node> nodes;
  std::vector<Panel> panels;
  std::shared_ptr<const InterfaceGeometry> surface;
  std::shared_ptr<const ObstacleGeometry> obstacle;

  int size() const { return static_cast<int>(nodes.size()); }
  int num_gamma() const { return size() - num_s; }
  int nodes_per_panel() const { return order * order; }
  int first_gamma_panel() const { return s_panels_per_side * s_panels_per_side; }
  // Chart point at panel reference coordinates (s, t) in [-1,1]^2; tangents
  // are taken w.r.t. the reference coordinates.
  SurfacePoint chart(const Panel& p, double s, double t) const;
  double max_panel_diameter(Tag tag) const;
};

// S covers [-n, n]^2 with round(2 n density / order) panels per side; each
// cube-sphere chart of the obstacle gets enough panels for the same density,
// or for `gamma_density` when that is positive (small obstacles).
PanelMesh mesh_scene(const Scene& scene, double half_width, double density, int order,
                     double gamma_density = 0.0);

// Values of the p*p tensor Lagrange basis of a panel at reference (s, t).
void panel_basis(int order, double s, double t, double* out);

// Surface calculus on nodal data, panel by panel (spectral differentiation
// of the Gauss-Legendre interpolant).
std::vector<cd> surface_divergence(const PanelMesh& mesh, const std::vector<CVec3>& field);
std::vector<CVec3> surface_gradient(const PanelMesh& mesh, const std::vector<cd>& f);

void write_mesh_csv(const PanelMesh& mesh, std::ostream& os);

}  // namespace roughbie
