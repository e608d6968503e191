#include "roughbie/oracles/mie_series.hpp"

#include <algorithm>
#include <cmath>

#include <vector>

namespace roughbie::oracle {

namespace {

constexpr double pi = 3.14159265358979323846;

int index(int n, int m) { return n * n + n + m - 1; }

void spherical_frame(const Vec3& d, double& r, double& th, double& ph, Vec3& er, Vec3& et,
                     Vec3& ep) {
  r = d.norm();
  th = std::acos(std::clamp(d.z() / r, -1.0, 1.0));
  ph = std::atan2(d.y(), d.x());
  er = d / r;
  et = {std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph), -std::sin(th)};
  ep = {-std::sin(ph), std::cos(ph), 0.0};
}

// All orthonormal Y_n^m (Condon-Shortley phase) at one direction, n <= nmax.
class HarmonicTable {
 public:
  HarmonicTable(int nmax, double th, double ph) : nmax_(nmax), y_((nmax + 2) * (nmax + 2)) {
    const double x = std::cos(th), st = std::sin(th);
    std::vector<double> P((nmax + 2) * (nmax + 2), 0.0);
    auto at = [&](int n, int m) -> double& { return P[n * (nmax + 2) + m]; };
    at(0, 0) = 1.0 / std::sqrt(4.0 * pi);
    for (int m = 1; m <= nmax + 1; ++m) at(m, m) = -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * st * at(m - 1, m - 1);
    for (int m = 0; m <= nmax; ++m) {
      at(m + 1, m) = std::sqrt(2.0 * m + 3.0) * x * at(m, m);
      for (int n = m + 2; n <= nmax + 1; ++n) {
        const double a = std::sqrt((4.0 * n * n - 1.0) / (double(n) * n - double(m) * m));
        const double b = std::sqrt(((n - 1.0) * (n - 1.0) - double(m) * m) / (4.0 * (n - 1.0) * (n - 1.0) - 1.0));
        at(n, m) = a * (x * at(n - 1, m) - b * at(n - 2, m));
      }
    }
    for (int n = 0; n <= nmax + 1; ++n)
      for (int m = 0; m <= n; ++m) {
        const cd v = at(n, m) * std::exp(cd(0, m * ph));
        y_[slot(n, m)] = v;
        if (m > 0) y_[slot(n, -m)] = ((m % 2) ? -1.0 : 1.0) * std::conj(v);
      }
  }
  cd operator()(int n, int m) const {
    if (std::abs(m) > n || n > nmax_ + 1) return 0.0;
    return y_[slot(n, m)];
  }

 private:
  int slot(int n, int m) const { return n * n + n + m; }
  int nmax_;
  std::vector<cd> y_;
};

// Free-space dipole field, written out independently of the solver library.
CVec3 dipole_field(cd k, const Vec3& src, const Vec3& q, const Vec3& x) {
  const Vec3 d = x - src;
  const double r = d.norm();
  const Vec3 u = d / r;
  const cd ikr = cd(0, 1) * k * r;
  const cd g = std::exp(ikr) / (4.0 * pi * r);
  // (k^2 + grad grad) g q / k^2 expanded
  const cd c1 = 1.0 + (ikr - 1.0) / (k * k * r * r);
  const cd c2 = (3.0 - 3.0 * ikr - k * k * r * r) / (k * k * r * r);
  return g * (c1 * q.cast<cd>() + c2 * u.dot(q) * u.cast<cd>());
}

}  // namespace

std::vector<cd> spherical_hankel1(int nmax, cd z) {
  const cd i(0, 1);
  std::vector<cd> h(nmax + 1);
  h[0] = -i * std::exp(i * z) / z;
  if (nmax >= 1) h[1] = -std::exp(i * z) * (z + i) / (z * z);
  for (int n = 1; n < nmax; ++n) h[n + 1] = double(2 * n + 1) / z * h[n] - h[n - 1];
  return h;
}

namespace {

void vector_harmonics(const HarmonicTable& Y, int n, int m, double th, double ph, CVec3& X,
                      CVec3& rX) {
  const cd i(0, 1);
  const double st = std::sin(th);
  const cd y = Y(n, m);
  const cd dy = (m * std::cos(th) / st) * y +
                std::sqrt(double((n - m) * (n + m + 1))) * std::exp(-i * ph) * Y(n, m + 1);
  const Vec3 et{std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph), -st};
  const Vec3 ep{-std::sin(ph), std::cos(ph), 0.0};
  const double s = 1.0 / std::sqrt(double(n * (n + 1)));
  // L Y = -(m / sin th) Y e_theta - i dY/dth e_phi
  X = s * (-(double(m) / st) * y * et.cast<cd>() - i * dy * ep.cast<cd>());
  // e_r x e_theta = e_phi, e_r x e_phi = -e_theta
  rX = s * (-(double(m) / st) * y * ep.cast<cd>() + i * dy * et.cast<cd>());
}

}  // namespace

void vector_harmonics(int n, int m, double th, double ph, CVec3& X, CVec3& rX) {
  vector_harmonics(HarmonicTable(n, th, ph), n, m, th, ph, X, rX);
}

MieDipole::MieDipole(cd kappa, const Vec3& center, double radius, const Vec3& source,
                     const Vec3& polarization, int nmax)
    : kappa_(kappa), center_(center), radius_(radius), source_(source), q_(polarization),
      nmax_(nmax) {
  const int count = (nmax + 1) * (nmax + 1) - 1;
  std::vector<cd> alpha(count, 0.0), beta(count, 0.0);
  const int nt = nmax + 24, np = 2 * nmax + 32;
  // Gauss-Legendre in cos(theta) via Newton on P_nt
  std::vector<double> xs(nt), ws(nt);
  for (int k = 0; k < nt; ++k) {
    double x = std::cos(pi * (k + 0.75) / (nt + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= nt; ++j) {
        const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      const double dp = nt * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        ws[k] = 2.0 / ((1.0 - x * x) * dp * dp);
        break;
      }
      ws[k] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    xs[k] = x;
  }
  for (int a = 0; a < nt; ++a) {
    const double th = std::acos(xs[a]);
    for (int b = 0; b < np; ++b) {
      const double ph = 2.0 * pi * b / np;
      const double w = ws[a] * 2.0 * pi / np;
      const Vec3 er{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
      const CVec3 E = dipole_field(kappa_, source_, q_, center_ + radius_ * er);
      const HarmonicTable Y(nmax, th, ph);
      for (int n = 1; n <= nmax; ++n)
        for (int m = -n; m <= n; ++m) {
          CVec3 X, rX;
          vector_harmonics(Y, n, m, th, ph, X, rX);
          alpha[index(n, m)] += w * X.dot(E);  // dot conjugates X
          beta[index(n, m)] += w * rX.dot(E);
        }
    }
  }
  const cd ka = kappa_ * radius_;
  const std::vector<cd> h = spherical_hankel1(nmax, ka);
  a_.assign(count, 0.0);
  b_.assign(count, 0.0);
  for (int n = 1; n <= nmax; ++n) {
    const cd dpsi = ka * h[n - 1] - double(n) * h[n];  // (z h_n)'
    for (int m = -n; m <= n; ++m) {
      a_[index(n, m)] = -alpha[index(n, m)] / h[n];
      b_[index(n, m)] = -beta[index(n, m)] * ka / dpsi;
    }
  }
}

CVec3 MieDipole::incident(const Vec3& x) const { return dipole_field(kappa_, source_, q_, x); }

CVec3 MieDipole::scattered(const Vec3& x) const {
  double r, th, ph;
  Vec3 er, et, ep;
  spherical_frame(x - center_, r, th, ph, er, et, ep);
  const cd i(0, 1);
  const cd kr = kappa_ * r;
  const std::vector<cd> h = spherical_hankel1(nmax_, kr);
  const HarmonicTable Y(nmax_, th, ph);
  CVec3 E = CVec3::Zero();
  for (int n = 1; n <= nmax_; ++n) {
    const cd dpsi = kr * h[n - 1] - double(n) * h[n];
    const double root = std::sqrt(double(n * (n + 1)));
    for (int m = -n; m <= n; ++m) {
      CVec3 X, rX;
      vector_harmonics(Y, n, m, th, ph, X, rX);
      // M = h_n X,  N = curl M / kappa
      const CVec3 M = h[n] * X;
      const CVec3 N = (i * root * h[n] / kr) * Y(n, m) * er.cast<cd>() + (dpsi / kr) * rX;
      E += a_[index(n, m)] * M + b_[index(n, m)] * N;
    }
  }
  return E;
}

double MieDipole::tail() const {
  double top = 0.0, last = 0.0;
  for (int n = 1; n <= nmax_; ++n)
    for (int m = -n; m <= n; ++m) {
      const double v = std::max(std::abs(a_[index(n, m)]), std::abs(b_[index(n, m)]));
      top = std::max(top, v);
      if (n == nmax_) last = std::max(last, v);
    }
  return top > 0.0 ? last / top : 0.0;
}

}  // namespace roughbie::oracle
