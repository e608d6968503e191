#include "roughbie/fields.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "roughbie/quadrature.hpp"

namespace roughbie {

FieldEvaluator::FieldEvaluator(const Scene& scene, const PanelMesh& mesh, Densities dens,
                               FieldOptions opts)
    : scene_(scene), mesh_(mesh), dens_(std::move(dens)), opts_(opts) {
  const std::size_t ns = mesh.num_s, ng = mesh.num_gamma();
  if (dens_.a1.size() != ns || dens_.b1.size() != ns || dens_.a2.size() != ns ||
      dens_.b2.size() != ns || dens_.c.size() != ng || dens_.d.size() != ng)
    throw PreconditionError("densities do not match the mesh");
  std::vector<CVec3> full(mesh.size());
  auto divergence = [&](const std::vector<CVec3>& on_s, const std::vector<CVec3>& on_g) {
    std::copy(on_s.begin(), on_s.end(), full.begin());
    std::copy(on_g.begin(), on_g.end(), full.begin() + mesh.num_s);
    return surface_divergence(mesh, full);
  };
  div_a1_ = divergence(dens_.a1, dens_.d);
  div_b1_ = divergence(dens_.b1, dens_.c);
  div_a2_ = divergence(dens_.a2, dens_.d);
  div_b2_ = divergence(dens_.b2, dens_.c);
  k1_ = wave_number(scene.upper);
  k2_ = wave_number(scene.lower);
}

Region FieldEvaluator::region(const Vec3& x) const {
  if (scene_.inside_obstacle(x)) throw DomainError("point lies inside the obstacle");
  return x.z() > scene_.surface->height(x.x(), x.y()) ? Region::Omega1 : Region::Omega2;
}

void FieldEvaluator::check_clearance(const Vec3& x) const {
  if (opts_.adaptive) return;
  for (const Panel& p : mesh_.panels)
    if ((x - p.center).norm() < (opts_.guard + 0.5) * p.diameter)
      throw DomainError("point within the near-boundary guard and adaptive refinement is off");
}

EHPair FieldEvaluator::integrate(const Vec3& x, Side side) const {
  const int p = mesh_.order, np = p * p;
  const double wmu1 = scene_.upper.omega * scene_.upper.mu;
  const bool up = side == Side::upper;
  const cd kappa = up ? k1_ : k2_;
  const cd ik2 = 1.0 / (kappa * kappa);
  const double mu = up ? scene_.upper.mu : scene_.lower.mu;
  const cd h_coef = kappa * kappa / (kI * scene_.upper.omega * mu);
  const cd e_coef = kI * mu / scene_.upper.mu;
  const std::vector<CVec3>& sa = up ? dens_.a1 : dens_.a2;
  const std::vector<CVec3>& sb = up ? dens_.b1 : dens_.b2;
  const std::vector<cd>& diva = up ? div_a1_ : div_a2_;
  const std::vector<cd>& divb = up ? div_b1_ : div_b2_;

  CVec3 E = CVec3::Zero(), H = CVec3::Zero();
  std::vector<detail::Sample> samples;
  std::vector<detail::EdgeSample> edges;
  std::vector<double> L(np);
  for (const Panel& pan : mesh_.panels) {
    if (!up && pan.tag == Tag::Gamma) continue;
    const bool s = pan.tag == Tag::S;
    const int off = s ? 0 : mesh_.num_s;
    const std::vector<CVec3>& da = s ? sa : dens_.d;
    const std::vector<CVec3>& db = s ? sb : dens_.c;
    if (!detail::is_near(pan, x, opts_.quadrature)) {
      for (int j = 0; j < np; ++j) {
        const Node& n = mesh_.nodes[pan.first + j];
        const CVec3& a = da[pan.first - off + j];
        const CVec3& b = db[pan.first - off + j];
        const auto k = kernel::eval(kappa, x - n.x);
        const CVec3 gr = kernel::grad(k);
        E += n.weight * (e_coef * kernel::apply_dyadic(k, b) + ccross(gr, a));
        H += n.weight * (ccross(gr, b) / wmu1 + h_coef * kernel::apply_dyadic(k, a));
      }
      continue;
    }
    // near panel: G v = g v + grad g div v / kappa^2 minus edge line charges,
    // which keeps the integrand at most 1/r^2
    samples.clear();
    detail::near_samples(mesh_, pan, x, false, 0.0, 0.0, opts_.quadrature, samples);
    for (const auto& smp : samples) {
      panel_basis(p, smp.s, smp.t, L.data());
      CVec3 a = CVec3::Zero(), b = CVec3::Zero();
      cd dva = 0.0, dvb = 0.0;
      for (int j = 0; j < np; ++j) {
        const int i = pan.first + j;
        a += L[j] * da[i - off];
        b += L[j] * db[i - off];
        dva += L[j] * diva[i];
        dvb += L[j] * divb[i];
      }
      const auto k = kernel::eval(kappa, x - smp.y);
      const CVec3 gr = kernel::grad(k);
      E += smp.w * (e_coef * (k.g * b + ik2 * dvb * gr) + ccross(gr, a));
      H += smp.w * (ccross(gr, b) / wmu1 + h_coef * (k.g * a + ik2 * dva * gr));
    }
    edges.clear();
    detail::edge_samples(mesh_, pan, x, opts_.quadrature, edges);
    for (const auto& e : edges) {
      panel_basis(p, e.s, e.t, L.data());
      CVec3 a = CVec3::Zero(), b = CVec3::Zero();
      for (int j = 0; j < np; ++j) {
        a += L[j] * da[pan.first - off + j];
        b += L[j] * db[pan.first - off + j];
      }
      const CVec3 m = to_complex(e.m);
      const CVec3 gr = kernel::grad(kernel::eval(kappa, x - e.y));
      E -= e.w * e_coef * ik2 * m.dot(b) * gr;
      H -= e.w * h_coef * ik2 * m.dot(a) * gr;
    }
  }
  if (!up) return {-E, -H};
  if (dens_.include_incident) {
    const EHPair inc = incident_field(scene_.dipole, scene_.upper, x);
    E += inc.E;
    H += inc.H;
  }
  return {E, H};
}

EHPair FieldEvaluator::upper(const Vec3& x) const {
  if (region(x) != Region::Omega1) throw DomainError("point is not in the upper region");
  check_clearance(x);
  return integrate(x, Side::upper);
}

EHPair FieldEvaluator::lower(const Vec3& x) const {
  if (region(x) != Region::Omega2) throw DomainError("point is not in the lower region");
  check_clearance(x);
  return integrate(x, Side::lower);
}

EHPair FieldEvaluator::scattered(const Vec3& x) const {
  EHPair f = upper(x);
  if (dens_.include_incident) {
    const EHPair inc = incident_field(scene_.dipole, scene_.upper, x);
    f.E -= inc.E;
    f.H -= inc.H;
  }
  return f;
}

FieldSample FieldEvaluator::sample(const Vec3& x) const {
  const Region r = region(x);
  const EHPair f = r == Region::Omega1 ? upper(x) : lower(x);
  return {x, f.E, f.H, r};
}

namespace {

CVec3 extrapolated_trace(const FieldEvaluator& f, const Vec3& x, const Vec3& normal,
                         Region side, double delta, bool magnetic) {
  const double sgn = side == Region::Omega1 ? 1.0 : -1.0;
  const CVec3 nu = to_complex(normal);
  auto at = [&](double h) {
    const Vec3 y = x + sgn * h * normal;
    const EHPair v = side == Region::Omega1 ? f.upper(y) : f.lower(y);
    return ccross(nu, magnetic ? v.H : v.E);
  };
  return 2.0 * at(delta) - at(2.0 * delta);
}

}  // namespace

CVec3 FieldEvaluator::one_sided_trace_E(const Vec3& x, const Vec3& normal, Region side,
                                        double delta) const {
  return extrapolated_trace(*this, x, normal, side, delta, false);
}

CVec3 FieldEvaluator::one_sided_trace_H(const Vec3& x, const Vec3& normal, Region side,
                                        double delta) const {
  return extrapolated_trace(*this, x, normal, side, delta, true);
}

double scene_radius(const Scene& scene) {
  constexpr int m = 24;
  double r = 0.0;
  for (int face = 0; face < 6; ++face)
    for (int i = 0; i <= m; ++i)
      for (int j = 0; j <= m; ++j)
        r = std::max(r, scene.obstacle->eval(face, -1.0 + 2.0 * i / m, -1.0 + 2.0 * j / m).x.norm());
  return r;
}

double radiation_energy(const FieldEvaluator& f, double r, Hemisphere h, int order,
                        bool magnetic) {
  if (order < 2) throw ValidationError("energy quadrature order must be at least 2");
  if (!(r > 2.0 * scene_radius(f.scene())))
    throw DomainError("energy sphere radius must exceed the scene diameter");
  const auto& g = quad::gauss_legendre(order);
  const InterfaceGeometry& s = *f.scene().surface;
  const int nphi = 2 * order;
  double total = 0.0;
  for (int k = 0; k < nphi; ++k) {
    const double phi = 2.0 * kPi * k / nphi;
    const double c = std::cos(phi), sn = std::sin(phi);
    auto below = [&](double th) {
      const double rs = r * std::sin(th);
      return r * std::cos(th) - s.height(rs * c, rs * sn);
    };
    double lo = 0.0, hi = kPi;  // polar angle where the sphere meets S
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (below(mid) > 0.0 ? lo : hi) = mid;
    }
    const double ts = 0.5 * (lo + hi);
    const double a = h == Hemisphere::upper ? 0.0 : ts, b = h == Hemisphere::upper ? ts : kPi;
    double part = 0.0;
    for (int i = 0; i < order; ++i) {
      const double th = 0.5 * (a + b) + 0.5 * (b - a) * g.x[i];
      const Vec3 x = r * Vec3(std::sin(th) * c, std::sin(th) * sn, std::cos(th));
      const EHPair v = h == Hemisphere::upper ? f.scattered(x) : f.lower(x);
      const CVec3& u = magnetic ? v.H : v.E;
      part += 0.5 * (b - a) * g.w[i] * u.squaredNorm() * std::sin(th);
    }
    total += part;
  }
  return total * r * r * 2.0 * kPi / nphi;
}

void trace_norms(PlaneTrace& t) {
  const MeasurementPlane& pl = t.plane;
  double sup = 0.0, q = 0.0;
  for (const CVec3& v : t.values) sup = std::max(sup, v.norm());
  const int c = t.cutoff;
  for (int i = 0; i < pl.nx; ++i)
    for (int j = 0; j < pl.ny; ++j)
      for (int di = 0; di <= c; ++di)
        for (int dj = -c; dj <= c; ++dj) {
          if (di == 0 && dj <= 0) continue;
          if (di * di + dj * dj > c * c) continue;
          const int i2 = i + di, j2 = j + dj;
          if (i2 >= pl.nx || j2 < 0 || j2 >= pl.ny) continue;
          const double d = (pl.node(i, j) - pl.node(i2, j2)).norm();
          const double du = (t.values[i * pl.ny + j] - t.values[i2 * pl.ny + j2]).norm();
          q = std::max(q, du / std::pow(d, t.alpha));
        }
  t.sup = sup;
  t.holder = sup + q;
}

PlaneTrace plane_trace(const FieldEvaluator& f, const MeasurementPlane& plane, double alpha,
                       int cutoff) {
  plane.validate(f.scene(), f.mesh().half_width);
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ValidationError("Hölder exponent must lie in (0, 1]");
  if (cutoff < 1) throw ValidationError("Hölder cutoff must be at least one grid step");
  PlaneTrace t;
  t.plane = plane;
  t.alpha = alpha;
  t.cutoff = cutoff;
  t.values.resize(static_cast<std::size_t>(plane.nx) * plane.ny);
  const CVec3 nu(0.0, 0.0, 1.0);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < plane.nx; ++i)
    for (int j = 0; j < plane.ny; ++j)
      t.values[i * plane.ny + j] = ccross(nu, f.E1(plane.node(i, j)));
  trace_norms(t);
  return t;
}

PlaneTrace trace_difference(const PlaneTrace& a, const PlaneTrace& b) {
  if (a.values.size() != b.values.size() || a.plane.nx != b.plane.nx || a.plane.ny != b.plane.ny)
    throw ValidationError("plane traces live on different grids");
  PlaneTrace d = a;
  for (std::size_t i = 0; i < d.values.size(); ++i) d.values[i] -= b.values[i];
  trace_norms(d);
  return d;
}

PlaneTrace scale_trace(const PlaneTrace& a, cd s) {
  PlaneTrace d = a;
  for (auto& v : d.values) v *= s;
  trace_norms(d);
  return d;
}

std::vector<FieldSample> evaluate_points(const FieldEvaluator& f, const std::vector<Vec3>& pts) {
  std::vector<FieldSample> out(pts.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = f.sample(pts[i]);
  return out;
}

namespace {

void put(std::ostream& os, const CVec3& v) {
  for (int k = 0; k < 3; ++k) os << ',' << v(k).real() << ',' << v(k).imag();
}

}  // namespace

void write_field_csv(const std::vector<FieldSample>& samples, std::ostream& os) {
  os << "x,y,z,ReEx,ImEx,ReEy,ImEy,ReEz,ImEz,ReHx,ImHx,ReHy,ImHy,ReHz,ImHz,region\n";
  os.precision(17);
  for (const auto& s : samples) {
    os << s.point.x() << ',' << s.point.y() << ',' << s.point.z();
    put(os, s.E);
    put(os, s.H);
    os << ',' << (s.region == Region::Omega1 ? "Omega1" : "Omega2") << '\n';
  }
}

void write_trace_csv(const PlaneTrace& t, std::ostream& os) {
  // H columns are left empty: the trace only carries nu x E
  os << "x,y,z,ReEx,ImEx,ReEy,ImEy,ReEz,ImEz,ReHx,ImHx,ReHy,ImHy,ReHz,ImHz,region\n";
  os.precision(17);
  for (int i = 0; i < t.plane.nx; ++i)
    for (int j = 0; j < t.plane.ny; ++j) {
      const Vec3 x = t.plane.node(i, j);
      os << x.x() << ',' << x.y() << ',' << x.z();
      put(os, t.values[i * t.plane.ny + j]);
      os << ",,,,,,,Omega1\n";
    }
}

void write_trace_json(const PlaneTrace& t, std::ostream& os) {
  nlohmann::json j;
  j["sup"] = t.sup;
  j["holder"] = t.holder;
  j["alpha"] = t.alpha;
  j["cutoff_steps"] = t.cutoff;
  j["grid"] = {{"height", t.plane.height}, {"x0", t.plane.x0}, {"x1", t.plane.x1},
               {"y0", t.plane.y0},         {"y1", t.plane.y1}, {"nx", t.plane.nx},
               {"ny", t.plane.ny}};
  os << j.dump(2) << '\n';
}

}  // namespace roughbie
