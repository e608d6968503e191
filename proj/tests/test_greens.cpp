#include <doctest.h>

#include <random>

#include "roughbie/greens.hpp"
#include "support/fd.hpp"

using namespace roughbie;
using testsupport::fd_curl;
using testsupport::fd_curl_curl;

TEST_CASE("wave number squares to omega^2 (eps + i sigma/omega) mu in the first quadrant") {
  const Medium m{2.0, 1.5, 3.0, 0.7};
  const cd k = wave_number(m);
  const cd k2 = m.omega * m.omega * cd(m.epsilon, m.sigma / m.omega) * m.mu;
  CHECK(std::abs(k * k - k2) < 1e-14 * std::abs(k2));
  CHECK(k.real() > 0.0);
  CHECK(k.imag() > 0.0);
}

TEST_CASE("media with non-positive parameters are rejected") {
  for (int i = 0; i < 4; ++i) {
    Medium m;
    (i == 0 ? m.epsilon : i == 1 ? m.mu : i == 2 ? m.sigma : m.omega) = 0.0;
    CHECK_THROWS_AS(wave_number(m), ValidationError);
  }
}

TEST_CASE("scalar kernel matches the closed form and refuses coincident points") {
  const cd k(1.3, 0.4);
  const Vec3 x(0.3, -0.2, 1.1), y(-0.4, 0.5, 0.2);
  const double r = (x - y).norm();
  CHECK(std::abs(scalar_green(k, x, y) - std::exp(kI * k * r) / (4.0 * kPi * r)) < 1e-15);
  CHECK_THROWS_AS(scalar_green(k, x, x), DomainError);
  CHECK_THROWS_AS(dyadic_green(k, x, y, 2.0 * r), DomainError);
}

TEST_CASE("dyadic columns solve curl curl u - kappa^2 u = 0 with O(h^2) finite-difference error") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    const cd k(1.0 + 1.5 * (u(rng) + 1.0), 0.1 + 0.6 * (u(rng) + 1.0));
    const Vec3 y(u(rng), u(rng), u(rng));
    const Vec3 x = y + Vec3(u(rng), u(rng), u(rng)).normalized() * (0.5 + 2.25 * (u(rng) + 1.0));
    for (int c = 0; c < 3; ++c) {
      const testsupport::Field f = [&](const Vec3& p) { return CVec3(dyadic_green(k, p, y).col(c)); };
      const CVec3 ref = k * k * f(x);
      const double r1 = (fd_curl_curl(f, x, 1e-3) - ref).norm() / ref.norm();
      const double r2 = (fd_curl_curl(f, x, 5e-4) - ref).norm() / ref.norm();
      CHECK(r1 <= 1e-4);
      CHECK(r2 < 0.4 * r1);
    }
  }
}

TEST_CASE("dyadic kernel is reciprocal: G(x, y) = G(y, x)^T") {
  const cd k(2.0, 1.0);
  const Vec3 x(0.1, 0.7, -0.3), y(1.2, -0.4, 0.5);
  CHECK((dyadic_green(k, x, y) - dyadic_green(k, y, x).transpose()).norm() < 1e-15);
}

TEST_CASE("curl kernel equals the finite-difference curl of the dyadic columns") {
  const cd k(1.5, 0.8);
  const Vec3 x(0.4, 0.1, 0.9), y(-0.2, 0.3, 0.0);
  const CMat3 C = curl_dyadic_green(k, x, y);
  for (int c = 0; c < 3; ++c) {
    const testsupport::Field f = [&](const Vec3& p) { return CVec3(dyadic_green(k, p, y).col(c)); };
    const CVec3 fd = fd_curl(f, x, 1e-4);
    CHECK((C.col(c) - fd).norm() < 1e-6 * fd.norm());
  }
}

TEST_CASE("incident dipole field: E = G q and H = curl E / (i omega mu)") {
  const Medium m{1.0, 1.3, 4.0, 0.9};
  const Dipole d{{0.2, -0.1, 1.0}, Vec3(0.3, 0.4, 0.5).normalized()};
  const Vec3 x(0.9, 0.5, 0.2);
  const EHPair f = incident_field(d, m, x);
  const cd k = wave_number(m);
  CHECK((f.E - dyadic_green(k, x, d.position) * d.polarization.cast<cd>()).norm() < 1e-15);
  const testsupport::Field E = [&](const Vec3& p) { return incident_field(d, m, p).E; };
  const CVec3 H = fd_curl(E, x, 1e-4) / (kI * m.omega * m.mu);
  CHECK((f.H - H).norm() < 1e-6 * H.norm());
}

TEST_CASE("kernels decay like exp(-Im kappa r) / r") {
  const cd k(2.0, 1.0);
  const Vec3 dir = Vec3(1.0, 2.0, 2.0).normalized();
  double gmin = 1e300, gmax = 0.0, cmin = 1e300, cmax = 0.0;
  for (double r : {3.0, 6.0, 9.0, 12.0}) {
    const double s = r * std::exp(k.imag() * r);
    const double g = dyadic_green(k, r * dir, Vec3::Zero()).norm() * s;
    const double c = curl_dyadic_green(k, r * dir, Vec3::Zero()).norm() * s;
    gmin = std::min(gmin, g);
    gmax = std::max(gmax, g);
    cmin = std::min(cmin, c);
    cmax = std::max(cmax, c);
  }
  CHECK(gmax / gmin < 2.0);
  CHECK(cmax / cmin < 2.0);
}
