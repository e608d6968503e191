#include "roughbie/operators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <ostream>
#include <set>
#include <tuple>

#include "roughbie/quadrature.hpp"

namespace roughbie {

namespace {

inline cd cdot(const CVec3& a, const Vec3& b) { return a.x() * b.x() + a.y() * b.y() + a.z() * b.z(); }

std::pair<int, int> node_range(const PanelMesh& m, Tag t) {
  return t == Tag::S ? std::pair{0, m.num_s} : std::pair{m.num_s, m.size()};
}

std::pair<int, int> panel_range(const PanelMesh& m, Tag t) {
  const int ps = m.first_gamma_panel();
  return t == Tag::S ? std::pair{0, ps} : std::pair{ps, static_cast<int>(m.panels.size())};
}

// Symmetric 3x3 complex matrix stored as xx, yy, zz, xy, xz, yz.
using Sym = std::array<cd, 6>;

inline CVec3 sym_apply(const Sym& m, const Vec3& v) {
  return {m[0] * v.x() + m[3] * v.y() + m[4] * v.z(), m[3] * v.x() + m[1] * v.y() + m[5] * v.z(),
          m[4] * v.x() + m[5] * v.y() + m[2] * v.z()};
}

inline CVec3 sym_apply(const Sym& m, const CVec3& v) {
  return {m[0] * v.x() + m[3] * v.y() + m[4] * v.z(), m[3] * v.x() + m[1] * v.y() + m[5] * v.z(),
          m[4] * v.x() + m[5] * v.y() + m[2] * v.z()};
}

using detail::EdgeSample;
using detail::edge_samples;

// Interaction of one target point with every node of a source surface.
//
// With `split` the same-surface T kernel is prepared in the form
//   int G b = SL b + grad_x [ int g div_s b - sum_edges int g (b . m) ] / kappa^2
// on the self and near panels (phi, grad, edge), and as the plain dyadic on
// far panels. Both forms agree for a smooth panel density; the split one
// avoids the hypersingular kernel and sees the line charges that a
// piecewise interpolant carries across panel edges.
struct Row {
  std::vector<cd> phi;
  std::vector<CVec3> grad;
  std::vector<Sym> dyad;
  std::vector<CMat3> edge;  // int grad_x g m^T L_j over panel edges
  std::vector<char> near;   // per source panel, relative to the first one
  std::vector<detail::Sample> samples;
  std::vector<EdgeSample> edge_pts;
  std::vector<double> basis;
};

struct RowRequest {
  Vec3 x;
  int self_panel = -1;
  int self_node = -1;
  double s0 = 0.0, t0 = 0.0;
  bool want_phi = false;
  bool want_grad = false;
  bool want_dyad = false;
  bool split = false;
};

void compute_row(const PanelMesh& mesh, const RowRequest& rq, Tag source, cd kappa,
                 const QuadratureOptions& q, Row& row) {
  const auto [n0, n1] = node_range(mesh, source);
  const auto [p0, p1] = panel_range(mesh, source);
  const int ns = n1 - n0;
  const int pp = mesh.nodes_per_panel();
  const bool need_phi = rq.want_phi || rq.split;
  const bool need_grad = rq.want_grad || rq.split;
  const bool need_dyad = rq.want_dyad || rq.split;
  if (need_phi) row.phi.assign(ns, cd(0.0));
  if (need_grad) row.grad.assign(ns, CVec3::Zero());
  if (need_dyad) row.dyad.assign(ns, Sym{});
  if (rq.split) row.edge.assign(ns, CMat3::Zero());
  row.near.assign(p1 - p0, 0);
  row.basis.resize(pp);

  auto add_dyad = [](Sym& m, const kernel::Point& k, cd gw, double L) {
    const Vec3& r = k.rhat;
    const cd a = L * gw * k.a, b = L * gw * k.b;
    m[0] += a + b * r.x() * r.x();
    m[1] += a + b * r.y() * r.y();
    m[2] += a + b * r.z() * r.z();
    m[3] += b * r.x() * r.y();
    m[4] += b * r.x() * r.z();
    m[5] += b * r.y() * r.z();
  };

  for (int k = p0; k < p1; ++k) {
    const Panel& pan = mesh.panels[k];
    const bool self = (k == rq.self_panel);
    const bool near = self || detail::is_near(pan, rq.x, q);
    row.near[k - p0] = near;
    if (!near) {
      for (int l = 0; l < pp; ++l) {
        const Node& n = mesh.nodes[pan.first + l];
        const int j = pan.first + l - n0;
        const kernel::Point kp = kernel::eval(kappa, rq.x - n.x);
        const cd gw = kp.g * n.weight;
        if (rq.want_phi) row.phi[j] += gw;
        if (rq.want_grad) row.grad[j] += (kp.c * gw) * to_complex(kp.rhat);
        if (need_dyad) add_dyad(row.dyad[j], kp, gw, 1.0);
      }
      continue;
    }
    if (self && !q.singular_correction)
      throw SingularQuadratureError("target coincides with a source node and correction is disabled");
    const bool dyad_here = rq.want_dyad && !rq.split;
    row.samples.clear();
    detail::near_samples(mesh, pan, rq.x, self, rq.s0, rq.t0, q, row.samples);
    const int j0 = pan.first - n0;
    for (const detail::Sample& smp : row.samples) {
      const kernel::Point kp = kernel::eval(kappa, rq.x - smp.y);
      panel_basis(mesh.order, smp.s, smp.t, row.basis.data());
      const cd gw = kp.g * smp.w;
      const CVec3 gr = (kp.c * gw) * to_complex(kp.rhat);
      for (int l = 0; l < pp; ++l) {
        const double L = row.basis[l];
        if (L == 0.0) continue;
        if (need_phi) row.phi[j0 + l] += L * gw;
        if (need_grad) row.grad[j0 + l] += L * gr;
        if (dyad_here) add_dyad(row.dyad[j0 + l], kp, gw, L);
      }
    }
    if (self && need_grad)
      row.grad[rq.self_node - n0] +=
          to_complex(detail::self_pv_correction(mesh, pan, rq.s0, rq.t0, q.singular_order));
    if (rq.split) {
      row.edge_pts.clear();
      edge_samples(mesh, pan, rq.x, q, row.edge_pts);
      for (const EdgeSample& e : row.edge_pts) {
        const kernel::Point kp = kernel::eval(kappa, rq.x - e.y);
        const CVec3 gr = (kp.c * kp.g * e.w) * to_complex(kp.rhat);
        const CMat3 gm = gr * to_complex(e.m).transpose();
        panel_basis(mesh.order, e.s, e.t, row.basis.data());
        for (int l = 0; l < pp; ++l) row.edge[j0 + l] += row.basis[l] * gm;
      }
    }
  }
}

// Reference coordinates of node l of a panel.
std::pair<double, double> node_ref(const PanelMesh& mesh, int node) {
  const Node& n = mesh.nodes[node];
  const int l = node - mesh.panels[n.panel].first;
  const auto& g = quad::gauss_legendre(mesh.order);
  return {g.x[l / mesh.order], g.x[l % mesh.order]};
}

RowRequest request_for_node(const PanelMesh& mesh, int node, bool same_surface) {
  RowRequest rq;
  rq.x = mesh.nodes[node].x;
  if (same_surface) {
    rq.self_panel = mesh.nodes[node].panel;
    rq.self_node = node;
    std::tie(rq.s0, rq.t0) = node_ref(mesh, node);
  }
  return rq;
}

}  // namespace

namespace detail {

void edge_samples(const PanelMesh& mesh, const Panel& pan, const Vec3& x,
                  const QuadratureOptions& q, std::vector<EdgeSample>& out) {
  const int order = q.resolved_near_order(mesh.order);
  const auto& g = quad::gauss_legendre(order);
  for (int e = 0; e < 4; ++e) {
    const bool along_t = e < 2;  // edges s = -1, s = +1 run along t
    const double fixed = (e % 2 == 0) ? -1.0 : 1.0;
    auto at = [&](double tau) {
      return along_t ? mesh.chart(pan, fixed, tau) : mesh.chart(pan, tau, fixed);
    };
    auto recurse = [&](auto&& self, double a, double b, int depth) -> void {
      const Vec3 ya = at(a).x, yb = at(b).x, ym = at(0.5 * (a + b)).x;
      const double len = (ya - ym).norm() + (ym - yb).norm();
      if (depth < q.max_depth && (x - ym).norm() <= q.accept_factor * len) {
        self(self, a, 0.5 * (a + b), depth + 1);
        self(self, 0.5 * (a + b), b, depth + 1);
        return;
      }
      const double h = 0.5 * (b - a);
      for (int k = 0; k < order; ++k) {
        const double tau = a + h * (g.x[k] + 1.0);
        const SurfacePoint sp = at(tau);
        const Vec3 n = sp.xu.cross(sp.xv).normalized();
        Vec3 m;
        double dl;
        if (along_t) {
          m = fixed * sp.xv.cross(n).normalized();
          dl = sp.xv.norm();
        } else {
          m = fixed * n.cross(sp.xu).normalized();
          dl = sp.xu.norm();
        }
        out.push_back({sp.x, m, h * g.w[k] * dl, along_t ? fixed : tau, along_t ? tau : fixed});
      }
    };
    recurse(recurse, -1.0, 1.0, 0);
  }
}

bool is_near(const Panel& pan, const Vec3& x, const QuadratureOptions& q) {
  return (x - pan.center).norm() < q.near_factor * pan.diameter;
}

Vec3 self_pv_correction(const PanelMesh& mesh, const Panel& pan, double s0, double t0, int order) {
  const SurfacePoint sp = mesh.chart(pan, s0, t0);
  Eigen::Matrix<double, 3, 2> A;
  A << sp.xu, sp.xv;
  const double J0 = sp.jacobian();
  // leading singular part of grad_x g in reference coordinates
  auto lead = [&](const Vec2& d) -> Vec3 {
    const Vec3 ad = A * d;
    return J0 * ad / (4.0 * kPi * std::pow(ad.norm(), 3));
  };
  const Vec2 apex(s0, t0);
  Vec3 discrete = Vec3::Zero();
  for (const auto& p : quad::singular_square_rule(s0, t0, order))
    discrete += p.w * lead(Vec2(p.s, p.t) - apex);

  // Exact principal value over the square: in polar form the leading part
  // integrates to lead(d) |d|^2 log|d| along the boundary.
  const auto& g = quad::gauss_legendre(2 * order);
  const Vec2 corners[4] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  Vec3 exact = Vec3::Zero();
  for (int k = 0; k < 4; ++k) {
    const Vec2& p0 = corners[k];
    const Vec2& p1 = corners[(k + 1) % 4];
    const Vec2 e = (p1 - p0) / 2.0;
    const double proj = std::clamp((apex - p0).dot(e), 0.0, 2.0);
    const Vec2 foot = p0 + proj * e;
    const double h = (apex - foot).norm();
    if (h < 1e-14) continue;
    for (const Vec2& far : {p0, p1}) {
      const double len = (far - foot).norm();
      if (len < 1e-15) continue;
      const Vec2 dir = (far - foot) / len;
      const double tmax = std::asinh(len / h);
      for (int a = 0; a < 2 * order; ++a) {
        const double tau = 0.5 * tmax * (g.x[a] + 1.0);
        const double ds = h * std::cosh(tau) * 0.5 * tmax * g.w[a];
        const Vec2 d = foot + h * std::sinh(tau) * dir - apex;
        const double r = d.norm();
        // area element rho h drho ds against lead ~ 1/rho^2
        exact += lead(d) * (h * std::log(r) * ds);
      }
    }
  }
  return exact - discrete;
}

namespace {

void adaptive(const PanelMesh& mesh, const Panel& pan, const Vec3& x, double s0, double s1,
              double t0, double t1, int depth, const QuadratureOptions& q, int order,
              std::vector<Sample>& out) {
  const Vec3 c = mesh.chart(pan, 0.5 * (s0 + s1), 0.5 * (t0 + t1)).x;
  const Vec3 a = mesh.chart(pan, s0, t0).x, b = mesh.chart(pan, s1, t1).x;
  const Vec3 e = mesh.chart(pan, s0, t1).x, f = mesh.chart(pan, s1, t0).x;
  const double diam = std::max((a - b).norm(), (e - f).norm());
  if (depth >= q.max_depth || (x - c).norm() > q.accept_factor * diam) {
    std::vector<quad::RefPoint> pts;
    quad::append_tensor_rule(s0, s1, t0, t1, order, pts);
    for (const auto& p : pts) {
      const SurfacePoint sp = mesh.chart(pan, p.s, p.t);
      out.push_back({sp.x, p.w * sp.jacobian(), p.s, p.t});
    }
    return;
  }
  const double sm = 0.5 * (s0 + s1), tm = 0.5 * (t0 + t1);
  adaptive(mesh, pan, x, s0, sm, t0, tm, depth + 1, q, order, out);
  adaptive(mesh, pan, x, s0, sm, tm, t1, depth + 1, q, order, out);
  adaptive(mesh, pan, x, sm, s1, t0, tm, depth + 1, q, order, out);
  adaptive(mesh, pan, x, sm, s1, tm, t1, depth + 1, q, order, out);
}

}  // namespace

void near_samples(const PanelMesh& mesh, const Panel& pan, const Vec3& x, bool self, double s0,
                  double t0, const QuadratureOptions& q, std::vector<Sample>& out) {
  if (self) {
    for (const auto& p : quad::singular_square_rule(s0, t0, q.singular_order)) {
      const SurfacePoint sp = mesh.chart(pan, p.s, p.t);
      out.push_back({sp.x, p.w * sp.jacobian(), p.s, p.t});
    }
    return;
  }
  adaptive(mesh, pan, x, -1.0, 1.0, -1.0, 1.0, 0, q, q.resolved_near_order(mesh.order), out);
}

}  // namespace detail

// ---------------------------------------------------------------- assembly

// Adds the div_s part of the split T kernel for one near panel:
// sum_j' (w_j' . grad row) div_s(b)(j') expressed in the coefficients of b.
template <class Sink>
void add_div_terms(const PanelMesh& mesh, const Panel& pan, int n0, const Row& row, const Vec3& u,
                   Sink&& sink) {
  const int p = mesh.order;
  const Eigen::MatrixXd& D = quad::gl_lagrange(p).diff();
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b) {
      const int jp = pan.first + a * p + b;
      const Node& n = mesh.nodes[jp];
      const cd w = cdot(row.grad[jp - n0], u);
      for (int c = 0; c < p; ++c) {
        const int ls = pan.first + c * p + b, lt = pan.first + a * p + c;
        const Node& ns_ = mesh.nodes[ls];
        const Node& nt_ = mesh.nodes[lt];
        const double ds = D(a, c), dt = D(b, c);
        sink(ls - n0, 0, w * (ds * n.as.dot(ns_.t1)));
        sink(ls - n0, 1, w * (ds * n.as.dot(ns_.t2)));
        sink(lt - n0, 0, w * (dt * n.at.dot(nt_.t1)));
        sink(lt - n0, 1, w * (dt * n.at.dot(nt_.t2)));
      }
    }
}

void add_operator_blocks(const PanelMesh& mesh, Tag target, Tag source, cd kappa,
                         const QuadratureOptions& q, CMatrix& A, int row0, cd coef_t, int col_t0,
                         cd coef_k, int col_k0) {
  const bool same = (target == source);
  const bool want_t = coef_t != 0.0;
  const bool want_k = coef_k != 0.0;
  const bool split = same && want_t;
  const auto [t0n, t1n] = node_range(mesh, target);
  const auto [s0n, s1n] = node_range(mesh, source);
  const auto [sp0, sp1] = panel_range(mesh, source);
  const int nt = t1n - t0n;
  const cd scale = coef_t / (kappa * kappa);

#pragma omp parallel
  {
    Row row;
#pragma omp for schedule(dynamic, 4)
    for (int it = 0; it < nt; ++it) {
      const int i = t0n + it;
      RowRequest rq = request_for_node(mesh, i, same);
      rq.want_dyad = want_t && !same;
      rq.want_grad = want_k;
      rq.split = split;
      compute_row(mesh, rq, source, kappa, q, row);
      const Node& ni = mesh.nodes[i];
      const Vec3 u[2] = {ni.t1.cross(ni.normal), ni.t2.cross(ni.normal)};
      for (int k = sp0; k < sp1; ++k) {
        const Panel& pan = mesh.panels[k];
        const bool near = row.near[k - sp0];
        for (int l = 0; l < mesh.nodes_per_panel(); ++l) {
          const int js = pan.first + l - s0n;
          const Node& nj = mesh.nodes[pan.first + l];
          const Vec3 t[2] = {nj.t1, nj.t2};
          for (int kp = 0; kp < 2; ++kp)
            for (int kk = 0; kk < 2; ++kk) {
              cd& entry_k = A(row0 + 2 * it + kp, col_k0 + 2 * js + kk);
              if (want_k) entry_k += coef_k * cdot(row.grad[js], t[kk].cross(u[kp]));
              if (!want_t) continue;
              cd v;
              if (split && near)
                v = row.phi[js] * u[kp].dot(t[kk]) -
                    (u[kp].cast<cd>().transpose() * row.edge[js] * t[kk].cast<cd>())(0) /
                        (kappa * kappa);
              else
                v = cdot(sym_apply(row.dyad[js], t[kk]), u[kp]);
              A(row0 + 2 * it + kp, col_t0 + 2 * js + kk) += coef_t * v;
            }
        }
        if (split && near)
          for (int kp = 0; kp < 2; ++kp)
            add_div_terms(mesh, pan, s0n, row, u[kp], [&](int js, int kk, cd v) {
              A(row0 + 2 * it + kp, col_t0 + 2 * js + kk) += scale * v;
            });
      }
    }
  }
}

std::vector<CVec3> apply_operators(const PanelMesh& mesh, Tag target,
                                   const std::vector<int>& target_nodes, Tag source, cd kappa,
                                   const QuadratureOptions& q, cd coef_t,
                                   const std::vector<CVec3>* dens_t, cd coef_k,
                                   const std::vector<CVec3>* dens_k) {
  const bool same = (target == source);
  const bool want_t = coef_t != 0.0 && dens_t;
  const bool want_k = coef_k != 0.0 && dens_k;
  const bool split = same && want_t;
  const auto [s0n, s1n] = node_range(mesh, source);
  const auto [sp0, sp1] = panel_range(mesh, source);
  const int ns = s1n - s0n;
  for (int i : target_nodes)
    if (mesh.nodes.at(i).tag != target) throw DomainError("target node not on the target surface");
  if ((want_t && static_cast<int>(dens_t->size()) != ns) ||
      (want_k && static_cast<int>(dens_k->size()) != ns))
    throw DomainError("density size does not match the source surface");

  std::vector<cd> div;
  if (split) {
    std::vector<CVec3> full(mesh.size(), CVec3::Zero());
    for (int j = 0; j < ns; ++j) full[s0n + j] = (*dens_t)[j];
    const std::vector<cd> d = surface_divergence(mesh, full);
    div.assign(d.begin() + s0n, d.begin() + s1n);
  }

  const int nt = static_cast<int>(target_nodes.size());
  std::vector<CVec3> out(nt, CVec3::Zero());
#pragma omp parallel
  {
    Row row;
#pragma omp for schedule(dynamic, 4)
    for (int it = 0; it < nt; ++it) {
      const int i = target_nodes[it];
      RowRequest rq = request_for_node(mesh, i, same);
      rq.want_dyad = want_t && !same;
      rq.want_grad = want_k;
      rq.split = split;
      compute_row(mesh, rq, source, kappa, q, row);
      const CVec3 nu = to_complex(mesh.nodes[i].normal);
      CVec3 acc_t = CVec3::Zero(), acc_k = CVec3::Zero();
      for (int k = sp0; k < sp1; ++k) {
        const Panel& pan = mesh.panels[k];
        const bool near = row.near[k - sp0];
        for (int l = 0; l < mesh.nodes_per_panel(); ++l) {
          const int j = pan.first + l - s0n;
          if (want_t) {
            const CVec3& b = (*dens_t)[j];
            if (split && near)
              acc_t += row.phi[j] * b + (row.grad[j] * div[j] - row.edge[j] * b) / (kappa * kappa);
            else
              acc_t += sym_apply(row.dyad[j], b);
          }
          if (want_k) {
            const CVec3& V = row.grad[j];
            const CVec3& a = (*dens_k)[j];
            // nu x (V x a) = V (nu . a) - a (nu . V)
            acc_k += V * (nu.x() * a.x() + nu.y() * a.y() + nu.z() * a.z()) -
                     a * (nu.x() * V.x() + nu.y() * V.y() + nu.z() * V.z());
          }
        }
      }
      out[it] = coef_t * ccross(nu, acc_t) + coef_k * acc_k;
    }
  }
  return out;
}

SurfaceDensity apply_T(const PanelMesh& mesh, cd kappa, double mu, double omega,
                       const SurfaceDensity& psi, const std::vector<int>& targets,
                       const QuadratureOptions& q) {
  SurfaceDensity out{psi.kind, Tag::S, {}};
  out.values = apply_operators(mesh, Tag::S, targets, Tag::S, kappa, q, kI * omega * mu,
                               &psi.values, 0.0, nullptr);
  return out;
}

SurfaceDensity apply_K(const PanelMesh& mesh, cd kappa, const SurfaceDensity& phi,
                       const std::vector<int>& targets, const QuadratureOptions& q) {
  SurfaceDensity out{phi.kind, Tag::S, {}};
  out.values = apply_operators(mesh, Tag::S, targets, Tag::S, kappa, q, 0.0, nullptr, 1.0,
                               &phi.values);
  return out;
}

std::vector<CVec3> unpack_tangential(const PanelMesh& mesh, Tag tag, const CVector& x,
                                     int offset) {
  const auto [n0, n1] = node_range(mesh, tag);
  std::vector<CVec3> f(n1 - n0);
  for (int j = n0; j < n1; ++j) {
    const Node& n = mesh.nodes[j];
    const int k = j - n0;
    f[k] = x(offset + 2 * k) * to_complex(n.t1) + x(offset + 2 * k + 1) * to_complex(n.t2);
  }
  return f;
}

void pack_tangential(const PanelMesh& mesh, Tag tag, const std::vector<CVec3>& f, CVector& x,
                     int offset) {
  const auto [n0, n1] = node_range(mesh, tag);
  for (int j = n0; j < n1; ++j) {
    const Node& n = mesh.nodes[j];
    const int k = j - n0;
    x(offset + 2 * k) = cdot(f[k], n.t1);
    x(offset + 2 * k + 1) = cdot(f[k], n.t2);
  }
}

double assembly_memory_estimate(const PanelMesh& mesh) {
  const double n = 4.0 * mesh.num_s + 2.0 * mesh.num_gamma();
  const double ns = std::max(mesh.num_s, mesh.num_gamma());
  return 16.0 * (n * n + 3.0 * ns * ns);
}

BieSystem assemble(const Scene& scene, const PanelMesh& mesh, const Dipole& dipole,
                   const AssemblyOptions& opts) {
  const double need = assembly_memory_estimate(mesh);
  if (need > opts.memory_cap_bytes)
    throw ResourceError("assembly needs " + std::to_string(need / (1 << 20)) +
                        " MiB, above the configured cap");
  const double tiny = 1e-12 * std::max(2.0 * mesh.half_width, scene.obstacle->diameter());
  for (const Node& n : mesh.nodes)
    if ((n.x - dipole.position).norm() <= tiny) throw AssemblyError("dipole lies on a mesh node");

  BieSystem sys;
  sys.kappa1 = wave_number(scene.upper);
  sys.kappa2 = wave_number(scene.lower);
  sys.layout.ns = mesh.num_s;
  sys.layout.ng = mesh.num_gamma();
  sys.layout.h_scale = scene.upper.omega * scene.upper.mu;
  sys.half_width = mesh.half_width;
  sys.density = mesh.density;
  sys.panel_order = mesh.order;
  sys.quadrature = opts.quadrature;
  const Layout& L = sys.layout;
  const QuadratureOptions& q = opts.quadrature;
  const cd mu_ratio = scene.lower.mu / scene.upper.mu;

  sys.A = CMatrix::Zero(L.size(), L.size());
  CMatrix& A = sys.A;
  const int e1s = 0, e2s = 2 * L.ns, e1g = 4 * L.ns;
  add_operator_blocks(mesh, Tag::S, Tag::S, sys.kappa1, q, A, e1s, -kI, L.b0(), -1.0, L.a0());
  add_operator_blocks(mesh, Tag::S, Tag::Gamma, sys.kappa1, q, A, e1s, -kI, L.c0(), 0.0, 0);
  add_operator_blocks(mesh, Tag::S, Tag::S, sys.kappa2, q, A, e2s, kI * mu_ratio, L.b0(), 1.0,
                      L.a0());
  add_operator_blocks(mesh, Tag::Gamma, Tag::S, sys.kappa1, q, A, e1g, -kI, L.b0(), -1.0, L.a0());
  add_operator_blocks(mesh, Tag::Gamma, Tag::Gamma, sys.kappa1, q, A, e1g, -kI, L.c0(), 0.0, 0);
  for (int r = 0; r < 2 * L.ns; ++r) {
    A(e1s + r, L.a0() + r) += 0.5;
    A(e2s + r, L.a0() + r) += 0.5;
  }

  sys.rhs = CVector::Zero(L.size());
  for (int i = 0; i < mesh.size(); ++i) {
    const Node& n = mesh.nodes[i];
    const CVec3 E = incident_field(dipole, scene.upper, n.x).E;
    const int row = n.tag == Tag::S ? e1s + 2 * i : e1g + 2 * (i - mesh.num_s);
    sys.rhs(row) = cdot(E, n.t1.cross(n.normal));
    sys.rhs(row + 1) = cdot(E, n.t2.cross(n.normal));
  }
  return sys;
}

void write_system_binary(const BieSystem& sys, std::ostream& os) {
  auto put_i64 = [&](std::int64_t v) {
    unsigned char b[8];
    for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>((static_cast<std::uint64_t>(v) >> (8 * k)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
  };
  auto put_f64 = [&](double d) {
    std::uint64_t u;
    std::memcpy(&u, &d, 8);
    unsigned char b[8];
    for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>((u >> (8 * k)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
  };
  put_i64(sys.A.rows());
  put_i64(sys.A.cols());
  for (Eigen::Index r = 0; r < sys.A.rows(); ++r)
    for (Eigen::Index c = 0; c < sys.A.cols(); ++c) {
      put_f64(sys.A(r, c).real());
      put_f64(sys.A(r, c).imag());
    }
  put_i64(sys.rhs.size());
  for (Eigen::Index r = 0; r < sys.rhs.size(); ++r) {
    put_f64(sys.rhs(r).real());
    put_f64(sys.rhs(r).imag());
  }
}

}  // namespace roughbie
