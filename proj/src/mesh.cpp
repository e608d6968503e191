#include "roughbie/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "roughbie/quadrature.hpp"

namespace roughbie {

SurfacePoint PanelMesh::chart(const Panel& p, double s, double t) const {
  const double hu = 0.5 * (p.u1 - p.u0), hv = 0.5 * (p.v1 - p.v0);
  const double u = p.u0 + hu * (s + 1.0), v = p.v0 + hv * (t + 1.0);
  SurfacePoint sp = (p.tag == Tag::S) ? surface->eval(u, v) : obstacle->eval(p.face, u, v);
  sp.xu *= hu;
  sp.xv *= hv;
  return sp;
}

double PanelMesh::max_panel_diameter(Tag tag) const {
  double d = 0.0;
  for (const Panel& p : panels)
    if (p.tag == tag) d = std::max(d, p.diameter);
  return d;
}

namespace {

void add_panel(PanelMesh& m, Tag tag, int face, double u0, double u1, double v0, double v1) {
  Panel p{tag, face, u0, u1, v0, v1, m.size(), Vec3::Zero(), 0.0};
  const auto& g = quad::gauss_legendre(m.order);
  const int pid = static_cast<int>(m.panels.size());
  for (int a = 0; a < m.order; ++a)
    for (int b = 0; b < m.order; ++b) {
      const SurfacePoint sp = m.chart(p, g.x[a], g.x[b]);
      const Vec3 c = sp.xu.cross(sp.xv);
      Node n;
      n.x = sp.x;
      n.normal = c.normalized();
      n.t1 = sp.xu.normalized();
      n.t2 = n.normal.cross(n.t1);
      const double guu = sp.xu.squaredNorm(), gvv = sp.xv.squaredNorm(), guv = sp.xu.dot(sp.xv);
      const double det = guu * gvv - guv * guv;
      n.as = (gvv * sp.xu - guv * sp.xv) / det;
      n.at = (guu * sp.xv - guv * sp.xu) / det;
      n.weight = g.w[a] * g.w[b] * c.norm();
      n.tag = tag;
      n.panel = pid;
      m.nodes.push_back(n);
    }
  p.center = m.chart(p, 0.0, 0.0).x;
  const Vec3 c00 = m.chart(p, -1, -1).x, c11 = m.chart(p, 1, 1).x;
  const Vec3 c01 = m.chart(p, -1, 1).x, c10 = m.chart(p, 1, -1).x;
  p.diameter = std::max((c00 - c11).norm(), (c01 - c10).norm());
  m.panels.push_back(p);
}

}  // namespace

PanelMesh mesh_scene(const Scene& scene, double half_width, double density, int order,
                     double gamma_density) {
  if (!(half_width > 0.0)) throw ValidationError("truncation half-width must be positive");
  if (!(density > 0.0)) throw ValidationError("mesh density must be positive");
  if (order < 2 || order > 20) throw ValidationError("panel order must lie in [2, 20]");
  scene.validate();
  const double gd = gamma_density > 0.0 ? gamma_density : density;
  const double rmin = scene.obstacle->min_extent();
  if (gd * 2.0 * kPi * rmin < 6.0)
    throw RefinementError("density too low for obstacle curvature (< 6 nodes per great circle)");

  PanelMesh m;
  m.order = order;
  m.half_width = half_width;
  m.density = density;
  m.gamma_density = gamma_density;
  m.surface = scene.surface;
  m.obstacle = scene.obstacle;

  const int ms = std::max(1, static_cast<int>(std::lround(2.0 * half_width * density / order)));
  m.s_panels_per_side = ms;
  const double L = 2.0 * half_width / ms;
  for (int i = 0; i < ms; ++i)
    for (int j = 0; j < ms; ++j)
      add_panel(m, Tag::S, -1, -half_width + i * L, -half_width + (i + 1) * L,
                -half_width + j * L, -half_width + (j + 1) * L);
  m.num_s = m.size();

  const double quarter = 0.5 * kPi * scene.obstacle->max_extent();
  const int mg = std::max(1, static_cast<int>(std::ceil(quarter * gd / order - 1e-9)));
  m.gamma_panels_per_side = mg;
  for (int face = 0; face < 6; ++face)
    for (int i = 0; i < mg; ++i)
      for (int j = 0; j < mg; ++j)
        add_panel(m, Tag::Gamma, face, -1.0 + 2.0 * i / mg, -1.0 + 2.0 * (i + 1) / mg,
                  -1.0 + 2.0 * j / mg, -1.0 + 2.0 * (j + 1) / mg);
  return m;
}

void panel_basis(int order, double s, double t, double* out) {
  const auto& L = quad::gl_lagrange(order);
  double ls[32], lt[32];
  L.values(s, ls);
  L.values(t, lt);
  for (int a = 0; a < order; ++a)
    for (int b = 0; b < order; ++b) out[a * order + b] = ls[a] * lt[b];
}

std::vector<cd> surface_divergence(const PanelMesh& mesh, const std::vector<CVec3>& field) {
  const int p = mesh.order;
  const Eigen::MatrixXd& D = quad::gl_lagrange(p).diff();
  std::vector<cd> out(mesh.size());
  for (const Panel& pan : mesh.panels)
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b) {
        CVec3 fs = CVec3::Zero(), ft = CVec3::Zero();
        for (int c = 0; c < p; ++c) {
          fs += D(a, c) * field[pan.first + c * p + b];
          ft += D(b, c) * field[pan.first + a * p + c];
        }
        const Node& n = mesh.nodes[pan.first + a * p + b];
        out[pan.first + a * p + b] = to_complex(n.as).dot(fs) + to_complex(n.at).dot(ft);
      }
  return out;
}

std::vector<CVec3> surface_gradient(const PanelMesh& mesh, const std::vector<cd>& f) {
  const int p = mesh.order;
  const Eigen::MatrixXd& D = quad::gl_lagrange(p).diff();
  std::vector<CVec3> out(mesh.size());
  for (const Panel& pan : mesh.panels)
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b) {
        cd fs = 0.0, ft = 0.0;
        for (int c = 0; c < p; ++c) {
          fs += D(a, c) * f[pan.first + c * p + b];
          ft += D(b, c) * f[pan.first + a * p + c];
        }
        const Node& n = mesh.nodes[pan.first + a * p + b];
        out[pan.first + a * p + b] = fs * to_complex(n.as) + ft * to_complex(n.at);
      }
  return out;
}

void write_mesh_csv(const PanelMesh& mesh, std::ostream& os) {
  os << "x,y,z,nx,ny,nz,weight,tag\n";
  os.precision(17);
  for (const Node& n : mesh.nodes)
    os << n.x.x() << ',' << n.x.y() << ',' << n.x.z() << ',' << n.normal.x() << ','
       << n.normal.y() << ',' << n.normal.z() << ',' << n.weight << ','
       << (n.tag == Tag::S ? "on_S" : "on_Gamma") << '\n';
}

}  // namespace roughbie
