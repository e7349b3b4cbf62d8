#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "grnsp/numeric.hpp"
#include "grnsp/reduction.hpp"
#include "grnsp/sim.hpp"

using namespace grnsp;

namespace {

const ModelParams kFig3{2, 3, 1.3536, 2.3536, 1e-2, 5e-3};

double logistic(double x) { return 1 / (1 + std::exp(-x)); }

// Second transcription of the corrections, written without the shared helpers.
Eigen::Vector2d omega_oracle(double u, double v, double eta, const ModelParams& p) {
  const double fu = logistic(u), fv = logistic(v);
  const double rb = (1 - fu) / p.gamma;
  const double gb = p.delta * (p.xi_b * rb * std::exp(-eta * v) - 1);
  const double ga = p.xi_a * fv * std::exp(-eta * u) - 1;
  return {-fv * (1 - fv) * gb, fu * (1 - fu) * ga / (p.gamma * p.gamma)};
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("omega corrections") {
  const ReducedState q = q2_equilibrium(kFig3);
  const ReducedState om = omega_corrections(q, 0.0, kFig3);
  CHECK(std::abs(om[0]) <= 1e-15);
  CHECK(std::abs(om[1]) <= 1e-15);

  ModelParams p = kFig3;
  p.xi_a = 3;
  const ReducedState o = omega_corrections(ReducedState(0, 0), 0.0, p);
  CHECK(o[1] == doctest::Approx(1.0 / 32).epsilon(1e-15));

  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> x(-6, 6), e(0, 0.3);
  for (int k = 0; k < 200; ++k) {
    const double u = x(rng), v = x(rng), eta = e(rng);
    const ReducedState om2 = omega_corrections(ReducedState(u, v), eta, kFig3);
    const Eigen::Vector2d ref = omega_oracle(u, v, eta, kFig3);
    CHECK(std::abs(om2[0] - ref[0]) <= 1e-14 * std::max(1.0, std::abs(ref[0])));
    CHECK(std::abs(om2[1] - ref[1]) <= 1e-14 * std::max(1.0, std::abs(ref[1])));
    const double gb = g_b(phi(-u) / kFig3.gamma, eta * v, kFig3);
    CHECK(std::abs(om2[0]) <= std::abs(gb) / 4 + 1e-16);
  }
}

TEST_CASE("slow manifold graph at mu = 0 is the critical manifold") {
  const SlowManifoldGraph g{1, kFig3};
  for (double u : {-3.0, 0.0, 1.7}) {
    for (double v : {-2.0, 0.4, 5.0}) {
      const Eigen::Vector2d r = g(u, v, 0.01, 0.0);
      CHECK(r[0] == phi(v));
      CHECK(r[1] == phi(-u) / kFig3.gamma);
      CHECK(std::abs(r[1] - (1 - phi(u)) / kFig3.gamma) <= 2e-16);
      CHECK(slow_manifold_residual(ReducedState(u, v), 0.01, 0.0, kFig3) <= 1e-13);
    }
  }
}

TEST_CASE("slow manifold residual orders") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> x(-3, 3);
  for (int k = 0; k < 20; ++k) {
    const ReducedState s(x(rng), x(rng));
    const double r1 = slow_manifold_residual(s, 0.01, 1e-2, kFig3, 1);
    const double r2 = slow_manifold_residual(s, 0.01, 5e-3, kFig3, 1);
    CHECK(r1 / r2 == doctest::Approx(4).epsilon(0.2));
    const double z1 = slow_manifold_residual(s, 0.01, 1e-2, kFig3, 0);
    const double z2 = slow_manifold_residual(s, 0.01, 5e-3, kFig3, 0);
    CHECK(z1 / z2 == doctest::Approx(2).epsilon(0.2));
  }
  const std::vector<double> mus{1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
  std::vector<double> first, zeroth;
  const ReducedState s(0.4, -0.7);
  for (double mu : mus) {
    first.push_back(slow_manifold_residual(s, 0.01, mu, kFig3, 1));
    zeroth.push_back(slow_manifold_residual(s, 0.01, mu, kFig3, 0));
  }
  CHECK(slope(mus, first) == doctest::Approx(2).epsilon(0.05));
  CHECK(slope(mus, zeroth) == doctest::Approx(1).epsilon(0.1));
}

TEST_CASE("reduced field: Hamiltonian limit") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> x(-5, 5);
  const auto h = [&](const auto& y) { return hamiltonian(y, kFig3); };
  for (int k = 0; k < 100; ++k) {
    const ReducedState s(x(rng), x(rng));
    const ReducedState f = reduced_field(s, 0.0, 0.0, kFig3);
    CHECK(f[0] == doctest::Approx(kFig3.xi_a * phi(s[1]) - 1).epsilon(1e-14));
    CHECK(f[1] == doctest::Approx(kFig3.delta * (kFig3.xi_b * (1 - phi(s[0])) / kFig3.gamma - 1))
                      .epsilon(1e-13));
    // u' = dH/dv, v' = -dH/du
    const double e = 1e-6;
    const double dhu = (h(ReducedState(s[0] + e, s[1])) - h(ReducedState(s[0] - e, s[1]))) / (2 * e);
    const double dhv = (h(ReducedState(s[0], s[1] + e)) - h(ReducedState(s[0], s[1] - e))) / (2 * e);
    CHECK(f[0] == doctest::Approx(dhv).epsilon(1e-7).scale(1));
    CHECK(f[1] == doctest::Approx(-dhu).epsilon(1e-7).scale(1));
  }
  const ReducedState z = reduced_field(q2_equilibrium(kFig3), 0.0, 0.0, kFig3);
  CHECK(z.cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("Hamiltonian is conserved along mu = sigma = 0 orbits") {
  const ReducedState q = q2_equilibrium(kFig3);
  for (const ReducedState& d : {ReducedState(0.5, 0.3), ReducedState(-1.0, 2.0), ReducedState(2, 0)}) {
    const Trajectory tr = integrate_reduced(q + d, kFig3, 0.0, 0.0, 100.0, 1e-10);
    const double h0 = hamiltonian(q + d, kFig3);
    double worst = 0;
    for (const auto& x : tr.x) worst = std::max(worst, std::abs(hamiltonian(x, kFig3) - h0));
    CHECK(tr.t.back() == 100.0);
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("q2 equilibrium") {
  ModelParams p = kFig3;
  p.xi_a = 2;
  p.xi_b = 2 * p.gamma;
  const ReducedState z = q2_equilibrium(p);
  CHECK(z[0] == 0.0);
  CHECK(z[1] == 0.0);

  const ReducedState q = q2_equilibrium(kFig3);
  CHECK(q[0] == doctest::Approx(std::log(0.3536 / 2)).epsilon(1e-13));
  CHECK(q[1] == doctest::Approx(-std::log(0.3536)).epsilon(1e-13));
  CHECK(q[0] == doctest::Approx(-1.7328).epsilon(1e-4));
  CHECK(q[1] == doctest::Approx(1.0396).epsilon(1e-4));
  CHECK(reduced_field(q, 0.0, 0.0, kFig3).cwiseAbs().maxCoeff() <= 1e-14);

  p = kFig3;
  p.xi_a = 1;
  CHECK_THROWS_AS(q2_equilibrium(p), DomainError);
  p = kFig3;
  p.xi_b = 1.9;
  CHECK_THROWS_AS(q2_equilibrium(p), DomainError);
  p.xi_b = 2;
  CHECK_THROWS_AS(q2_equilibrium(p), DomainError);
  p = kFig3;
  p.xi_a = 1 + 1e-12;
  CHECK(q2_equilibrium(p)[1] > 27);
}

TEST_CASE("q2 continued") {
  CHECK(q2_continued(kFig3, 0, 0) == q2_equilibrium(kFig3));
  const ReducedState q0 = q2_equilibrium(kFig3);
  const ReducedState q = q2_continued(kFig3, 1e-2, 0.5);
  CHECK(reduced_field(q, 1e-2, 0.5, kFig3).norm() < 1e-12);
  CHECK(std::abs(reduced_jacobian(q, 1e-2, 0.5, kFig3).determinant()) > 1e-8);
  const double d1 = (q2_continued(kFig3, 1e-2, 1e-2) - q0).norm();
  const double d2 = (q2_continued(kFig3, 5e-3, 5e-3) - q0).norm();
  CHECK(d1 / d2 == doctest::Approx(2).epsilon(0.1));
  for (double s : {0.0, 0.05, 0.1})
    for (double m : {0.0, 0.05, 0.1}) CHECK_NOTHROW(q2_continued(kFig3, s, m));
  CHECK_THROWS_AS(q2_continued(kFig3, -1e-3, 0), DomainError);
}

TEST_CASE("trace asymptotics") {
  CHECK(trace_at_equilibrium(kFig3, 0, 0) == doctest::Approx(0).scale(1).epsilon(1e-9));
  CHECK(trace_asymptotic(kFig3, 0, 0) == 0.0);
  const double coef = 0.3536 * 0.3536 / (1.3536 * 2.3536) * 4.5;
  CHECK(trace_asymptotic(kFig3, 0, 1) == doctest::Approx(coef).epsilon(1e-14));
  CHECK(coef == doctest::Approx(0.17660).epsilon(1e-4));
  CHECK(trace_asymptotic(kFig3, 1, 0) == -4.0);
  std::vector<double> ratio;
  for (double t : {1e-2, 5e-3, 2.5e-3})
    ratio.push_back(std::abs(trace_at_equilibrium(kFig3, t, t) - trace_asymptotic(kFig3, t, t)) /
                    (2 * t * t));
  const double hi = std::max({ratio[0], ratio[1], ratio[2]});
  const double lo = std::min({ratio[0], ratio[1], ratio[2]});
  CHECK(lo > 0);
  CHECK(hi / lo <= 3);
}

TEST_CASE("centre structure of the limit system") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> a(1.0, 3.0), b(0, 1);
  for (int k = 0; k < 50; ++k) {
    ModelParams p = kFig3;
    p.xi_a = std::nextafter(a(rng), 4.0);
    p.xi_b = p.gamma * (1 + 2 * b(rng)) + 1e-9;
    const ReducedState q = q2_equilibrium(p);
    auto field = [&](const ReducedState& y) -> ReducedState { return reduced_field(y, 0.0, 0.0, p); };
    const Eigen::MatrixXd jac = fd_jacobian(field, q);
    CHECK(std::abs(jac.trace()) <= 1e-10);
    CHECK(jac.determinant() > 0);
  }
}

TEST_CASE("mu_hopf") {
  CHECK(mu_hopf(kFig3, 0) == 0.0);
  const double m = mu_hopf(kFig3, 1e-2);
  CHECK(std::abs(trace_at_equilibrium(kFig3, 1e-2, m)) <= 1e-9);
  CHECK(det_at_equilibrium(kFig3, 1e-2, m) > 0);
  CHECK(m / 1e-2 == doctest::Approx(mu_hopf_slope(kFig3)).epsilon(0.05));
  CHECK(mu_hopf_slope(kFig3) == doctest::Approx(1 / 0.039245 * 8 / 9).epsilon(1e-4));
  // exactly one sign change of the trace in (0, mu0]
  int changes = 0;
  double prev = trace_at_equilibrium(kFig3, 1e-2, 1e-4);
  for (double mu = 2e-3; mu <= kDefaultMu0 + 1e-12; mu += 2e-3) {
    const double t = trace_at_equilibrium(kFig3, 1e-2, mu);
    if ((t > 0) != (prev > 0)) ++changes;
    prev = t;
  }
  CHECK(changes == 1);
  CHECK_THROWS_AS(mu_hopf(kFig3, 0.2), DomainError);
  ModelParams p = kFig3;
  p.xi_a = 0.9;
  CHECK_THROWS_AS(mu_hopf(p, 1e-2), DomainError);
  const HopfData d = hopf_data(kFig3, 1e-2, 0.1);
  CHECK(d.alpha == alpha(kFig3));
  REQUIRE(d.mu_hopf.has_value());
  CHECK(*d.mu_hopf == doctest::Approx(m).epsilon(1e-10));
}

TEST_CASE("alpha and ray classification") {
  CHECK(alpha(kFig3) == 8.0 / 9.0);
  ModelParams p = kFig3;
  p.gamma = p.delta = 1;
  CHECK(alpha(p) == 1.0);
  CHECK(classify_ray(5e-3 / 1e-2, kFig3) == RayClass::HopfImpossible);
  CHECK(classify_ray(0.5 / 1e-2, kFig3) == RayClass::HopfPossible);
  CHECK(to_string(RayClass::HopfPossible) == "hopf-possible");
  CHECK_THROWS_AS(classify_ray(8.0 / 9.0, kFig3), DomainError);
  CHECK_THROWS_AS(classify_ray(0, kFig3), DomainError);
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> c(0.01, 5), t(0.1, 10);
  for (int k = 0; k < 100; ++k) {
    const double mu = c(rng) * 1e-2, sigma = 1e-2, s = t(rng);
    CHECK(classify_ray(mu / sigma, kFig3) == classify_ray((s * mu) / (s * sigma), kFig3));
  }
}
