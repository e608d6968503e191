#include "roughbie/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace roughbie::quad {

namespace {

Rule1D compute_gauss_legendre(int n) {
  Rule1D r;
  r.x.resize(n);
  r.w.resize(n);
  if (n == 1) {
    r.x[0] = 0.0;
    r.w[0] = 2.0;
    return r;
  }
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  if (n % 2 == 1) r.x[n / 2] = 0.0;
  return r;
}

template <class T, class F>
const T& cached(std::map<int, std::unique_ptr<T>>& cache, std::mutex& mu, int n, F make) {
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_unique<T>(make(n))).first;
  return *it->second;
}

}  // namespace

const Rule1D& gauss_legendre(int n) {
  if (n < 1) throw DomainError("Gauss-Legendre order must be positive");
  static std::map<int, std::unique_ptr<Rule1D>> cache;
  static std::mutex mu;
  return cached(cache, mu, n, compute_gauss_legendre);
}

Lagrange1D::Lagrange1D(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  const int n = size();
  bw_.assign(n, 1.0);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (k != j) bw_[j] /= (nodes_[j] - nodes_[k]);
  D_ = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      D_(i, j) = (bw_[j] / bw_[i]) / (nodes_[i] - nodes_[j]);
      diag -= D_(i, j);
    }
    D_(i, i) = diag;
  }
}

void Lagrange1D::values(double t, double* out) const {
  const int n = size();
  double denom = 0.0;
  for (int j = 0; j < n; ++j) {
    const double d = t - nodes_[j];
    if (d == 0.0) {
      for (int k = 0; k < n; ++k) out[k] = (k == j) ? 1.0 : 0.0;
      return;
    }
    out[j] = bw_[j] / d;
    denom += out[j];
  }
  for (int j = 0; j < n; ++j) out[j] /= denom;
}

const Lagrange1D& gl_lagrange(int p) {
  static std::map<int, std::unique_ptr<Lagrange1D>> cache;
  static std::mutex mu;
  return cached(cache, mu, p, [](int n) { return Lagrange1D(gauss_legendre(n).x); });
}

void append_tensor_rule(double s0, double s1, double t0, double t1, int order,
                        std::vector<RefPoint>& out) {
  const auto& g = gauss_legendre(order);
  const double hs = 0.5 * (s1 - s0), ht = 0.5 * (t1 - t0);
  for (int i = 0; i < order; ++i)
    for (int j = 0; j < order; ++j)
      out.push_back({s0 + hs * (g.x[i] + 1.0), t0 + ht * (g.x[j] + 1.0), hs * ht * g.w[i] * g.w[j]});
}

std::vector<RefPoint> singular_square_rule(double s0, double t0, int order) {
  const auto& g = gauss_legendre(order);
  const Vec2 apex(s0, t0);
  const Vec2 corners[4] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  std::vector<RefPoint> out;
  out.reserve(8 * order * order);

  auto right_triangle = [&](const Vec2& foot, const Vec2& far, double h) {
    const double len = (far - foot).norm();
    if (len < 1e-15) return;
    const Vec2 e = (far - foot) / len;
    const double tmax = std::asinh(len / h);
    for (int a = 0; a < order; ++a) {
      const double tau = 0.5 * tmax * (g.x[a] + 1.0);
      const double s = h * std::sinh(tau);
      const double ds = h * std::cosh(tau) * 0.5 * tmax * g.w[a];
      const Vec2 edge = foot + s * e;
      for (int b = 0; b < order; ++b) {
        const double rho = 0.5 * (g.x[b] + 1.0);
        const Vec2 pt = apex + rho * (edge - apex);
        out.push_back({pt.x(), pt.y(), 0.5 * g.w[b] * rho * h * ds});
      }
    }
  };

  for (int k = 0; k < 4; ++k) {
    const Vec2& p0 = corners[k];
    const Vec2& p1 = corners[(k + 1) % 4];
    const Vec2 e = (p1 - p0) / 2.0;
    const double proj = std::clamp((apex - p0).dot(e), 0.0, 2.0);
    const Vec2 foot = p0 + proj * e;
    const double h = (apex - foot).norm();
    if (h < 1e-14) continue;
    right_triangle(foot, p0, h);
    right_triangle(foot, p1, h);
  }
  return out;
}

}  // namespace roughbie::quad
