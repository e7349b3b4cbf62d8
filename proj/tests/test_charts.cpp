#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "grnsp/charts.hpp"
#include "grnsp/errors.hpp"

using namespace grnsp;

namespace {

const ModelParams kParams{2, 3, 1.3536, 2.3536, 1e-2, 5e-3};

ChartPoint k2(double eta, double u, double v, double r_a = 0.3, double r_b = 0.2, double mu = 0) {
  ChartPoint cp;
  cp.chart = ChartId::K2;
  cp.coords << r_a, r_b, eta, u, v;
  cp.mu = mu;
  return cp;
}

// Sign a chart imposes on (ln p_a, ln p_b); 0 if free.
Eigen::Vector2i required_signs(ChartId id) {
  const ChartInfo& ci = chart_info(id);
  Eigen::Vector2i sg = Eigen::Vector2i::Zero();
  if (ci.kind == ChartKind::Scaling) return sg;
  const int fix = ci.axis == ChartAxis::A ? 0 : 1;
  sg[fix] = ci.s;
  if (ci.kind == ChartKind::Side) sg[1 - fix] = ci.m;
  return sg;
}

// Random (ln p_a, ln p_b, sigma) in both charts, kept away from the overlap
// boundaries so the chart coordinates stay moderate.
Eigen::Vector3d overlap_logs(ChartId a, ChartId b, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mag(0.1, 1.5), sig(0.02, 0.5), coin(0, 1);
  const Eigen::Vector2i sa = required_signs(a), sb = required_signs(b);
  Eigen::Vector3d l;
  for (int k = 0; k < 2; ++k) {
    int s = sa[k] != 0 ? sa[k] : sb[k];
    if (s == 0) s = coin(rng) < 0.5 ? -1 : 1;
    l[k] = s * mag(rng);
  }
  l[2] = sig(rng);
  // Central charts are centred on the other axis: keep the free log smaller.
  for (ChartId id : {a, b}) {
    const ChartInfo& ci = chart_info(id);
    if (ci.kind != ChartKind::Central) continue;
    const int fix = ci.axis == ChartAxis::A ? 0 : 1;
    if (std::abs(l[1 - fix]) > std::abs(l[fix])) std::swap(l[0], l[1]);
    l[0] = std::abs(l[0]) * (sa[0] + sb[0] != 0 ? (sa[0] + sb[0] > 0 ? 1 : -1) : (l[0] > 0 ? 1 : -1));
    l[1] = std::abs(l[1]) * (sa[1] + sb[1] != 0 ? (sa[1] + sb[1] > 0 ? 1 : -1) : (l[1] > 0 ? 1 : -1));
  }
  return l;
}

ChartPoint random_point(ChartId chart, const Eigen::Vector3d& logs, std::mt19937_64& rng,
                        double mu) {
  std::uniform_real_distribution<double> r(0.05, 1.2);
  return chart_point_from_log(chart, r(rng), r(rng), logs, mu);
}

double rel_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

// Ridders' extrapolated central differences: a fixed step loses ~1e-10 |J| |f|
// either to truncation or to rounding when chart coordinates are large.
Vector5d ridders_column(const ChartPoint& cp, ChartId target, int j) {
  constexpr int kTable = 8;
  constexpr double kShrink = 1.4, kShrink2 = kShrink * kShrink;
  auto central = [&](double h) {
    ChartPoint hi = cp, lo = cp;
    hi.coords[j] += h;
    lo.coords[j] -= h;
    return Vector5d((change_chart(hi, target).coords - change_chart(lo, target).coords) / (2 * h));
  };
  double h = 1e-3 * std::max(1.0, std::abs(cp.coords[j]));
  std::vector<std::vector<Vector5d>> a(kTable, std::vector<Vector5d>(kTable));
  a[0][0] = central(h);
  Vector5d best = a[0][0];
  double err = 1e300;
  for (int i = 1; i < kTable; ++i) {
    h /= kShrink;
    a[0][i] = central(h);
    double fac = kShrink2;
    for (int k = 1; k <= i; ++k) {
      a[k][i] = (a[k - 1][i] * fac - a[k - 1][i - 1]) / (fac - 1);
      fac *= kShrink2;
      const double e = std::max((a[k][i] - a[k - 1][i]).cwiseAbs().maxCoeff(),
                                (a[k][i] - a[k - 1][i - 1]).cwiseAbs().maxCoeff());
      if (e <= err) {
        err = e;
        best = a[k][i];
      }
    }
    if ((a[i][i] - a[i - 1][i - 1]).cwiseAbs().maxCoeff() >= 2 * err) break;
  }
  return best;
}

Eigen::Matrix<double, 5, 5> chart_map_jacobian(const ChartPoint& cp, ChartId target) {
  Eigen::Matrix<double, 5, 5> jac;
  for (int j = 0; j < 5; ++j) jac.col(j) = ridders_column(cp, target, j);
  return jac;
}

}  // namespace

TEST_CASE("atlas table sign data") {
  CHECK(kAtlas.size() == 13);
  for (const ChartInfo& ci : kAtlas) {
    CHECK(chart_from_name(ci.name) == ci.id);
    if (ci.kind == ChartKind::Scaling) continue;
    if (ci.family == 1 || ci.family == 4) CHECK(ci.s == -1);
    if (ci.family == 3 || ci.family == 5) CHECK(ci.s == +1);
  }
  CHECK_THROWS_AS(chart_from_name("K7"), DomainError);
}

TEST_CASE("blow_down examples") {
  BlowDownImage b = blow_down(k2(0.01, 0, 0));
  CHECK(b.p_a == 1.0);
  CHECK(b.p_b == 1.0);
  CHECK(b.sigma == 0.01);
  b = blow_down(k2(0.01, 5, -3));
  CHECK(b.p_a == doctest::Approx(std::exp(0.05)).epsilon(1e-15));
  CHECK(b.p_b == doctest::Approx(std::exp(-0.03)).epsilon(1e-15));
  CHECK(b.sigma == 0.01);
  CHECK(b.r_a == 0.3);
  CHECK(b.r_b == 0.2);
}

TEST_CASE("kappa examples") {
  const ChartPoint a = kappa_from_k2(k2(0.01, 2, 1), ChartId::K32);
  CHECK(a.coords[2] == doctest::Approx(0.02).epsilon(1e-15));  // eta_3
  CHECK(a.coords[4] == doctest::Approx(0.5).epsilon(1e-15));   // rho_32
  CHECK(a.coords[3] == doctest::Approx(1.0).epsilon(1e-15));   // v_32
  const ChartPoint a2 = change_chart(k2(0.01, 2, 1), ChartId::K32);
  CHECK(rel_diff(a2.coords, a.coords) <= 1e-15);

  const ChartPoint b = kappa_from_k2(k2(0.01, -2, 3), ChartId::K15);
  CHECK(b.coords[2] == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(b.coords[3] == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(b.coords[4] == doctest::Approx(1.0 / 3).epsilon(1e-15));
  const ChartPoint b2 = change_chart(k2(0.01, -2, 3), ChartId::K15);
  CHECK(rel_diff(b2.coords, b.coords) <= 1e-15);

  // K32 point maps down to the same place as its K2 preimage.
  const BlowDownImage d1 = blow_down(k2(0.01, 2, 1)), d2 = blow_down(a);
  CHECK(d1.p_a == doctest::Approx(d2.p_a).epsilon(1e-15));
  CHECK(d1.p_b == doctest::Approx(d2.p_b).epsilon(1e-15));
  CHECK(d1.sigma == doctest::Approx(d2.sigma).epsilon(1e-15));
}

TEST_CASE("kappa from K2 agrees with the projective chart change") {
  std::mt19937_64 rng(5);
  for (const ChartInfo& ci : kAtlas) {
    if (ci.axis != ChartAxis::A) continue;
    for (int k = 0; k < 100; ++k) {
      const Eigen::Vector3d l = overlap_logs(ChartId::K2, ci.id, rng);
      const ChartPoint src = random_point(ChartId::K2, l, rng, 0.5);
      CHECK(rel_diff(kappa_from_k2(src, ci.id).coords, change_chart(src, ci.id).coords) <= 1e-14);
    }
  }
}

TEST_CASE("change_chart rejects points outside the overlap") {
  try {
    change_chart(k2(0.01, -2, 1), ChartId::K32);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("+ln p_a") != std::string::npos);
  }
  CHECK_THROWS_AS(change_chart(k2(0.01, 2, -1), ChartId::K35), DomainError);
  CHECK_THROWS_AS(kappa_from_k2(k2(0.01, 2, 1), ChartId::K12), DomainError);
  CHECK_THROWS_AS(kappa_from_k2(k2(0.01, 2, 1), ChartId::K52), DomainError);
  CHECK_FALSE(charts_overlap(ChartId::K12, ChartId::K32));
  CHECK_FALSE(charts_overlap(ChartId::K14, ChartId::K15));
  CHECK(charts_overlap(ChartId::K35, ChartId::K53));
  CHECK(charts_overlap(ChartId::K2, ChartId::K41));
}

TEST_CASE("atlas coherence on all overlapping pairs") {
  std::mt19937_64 rng(2024);
  int pairs = 0;
  double worst_commute = 0, worst_field = 0, worst_round = 0;
  for (const ChartInfo& a : kAtlas) {
    for (const ChartInfo& b : kAtlas) {
      if (a.id == b.id || !charts_overlap(a.id, b.id)) continue;
      ++pairs;
      for (int k = 0; k < 100; ++k) {
        const Eigen::Vector3d l = overlap_logs(a.id, b.id, rng);
        const ChartPoint src = random_point(a.id, l, rng, 0.7);
        const ChartPoint dst = change_chart(src, b.id);
        const Eigen::Vector3d la = blow_down_log(src), lb = blow_down_log(dst);
        const BlowDownImage ia = blow_down(src), ib = blow_down(dst);
        worst_commute = std::max({worst_commute, std::abs(ia.p_a - ib.p_a) / ia.p_a,
                                  std::abs(ia.p_b - ib.p_b) / ia.p_b,
                                  std::abs(la[2] - lb[2]) / la[2]});
        CHECK(dst.coords[0] == src.coords[0]);
        CHECK(dst.coords[1] == src.coords[1]);
        worst_round = std::max(worst_round, rel_diff(change_chart(dst, a.id).coords, src.coords));
        const Vector5d pushed = chart_map_jacobian(src, b.id) * chart_vector_field(src, kParams);
        const double fe = rel_diff(pushed, chart_vector_field(dst, kParams));
        worst_field = std::max(worst_field, fe);
      }
    }
  }
  CHECK(pairs > 40);
  CHECK(worst_commute <= 1e-13);
  CHECK(worst_round <= 1e-14);
  CHECK(worst_field <= 1e-9);
}

TEST_CASE("K2 field is the logarithmic pushforward of the full field") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-3, 3), r(0.05, 1.5), e(0.01, 0.2), m(0, 5);
  for (int k = 0; k < 100; ++k) {
    const double eta = e(rng), mu = m(rng);
    const ChartPoint cp = k2(eta, u(rng), u(rng), r(rng), r(rng), mu);
    const ModelParams p = ModelParams::with_mu(2, 3, 1.3536, 2.3536, eta, mu);
    const BlowDownImage b = blow_down(cp);
    const State4 f = full_vector_field(State4(b.r_a, b.r_b, b.p_a, b.p_b), p);
    const Vector5d g = chart_vector_field(cp, p);
    // d/dt (ln p / sigma) = p' / (p sigma)
    CHECK(g[0] == doctest::Approx(f[kRa]).epsilon(1e-12));
    CHECK(g[1] == doctest::Approx(f[kRb]).epsilon(1e-12));
    CHECK(g[2] == 0.0);
    CHECK(g[3] == doctest::Approx(f[kPa] / (b.p_a * eta)).epsilon(1e-11));
    CHECK(g[4] == doctest::Approx(f[kPb] / (b.p_b * eta)).epsilon(1e-11));
  }
}

TEST_CASE("K2 at mu = 0 is a layer problem") {
  const ChartPoint cp = k2(0.02, 0.7, -0.4, phi(-0.4), (1 - phi(0.7)) / 2);
  const Vector5d f = chart_vector_field(cp, kParams);
  CHECK(f.tail<3>().isZero(0));
  CHECK(std::abs(f[0]) <= 4e-16);
  CHECK(std::abs(f[1]) <= 4e-16);
  const Vector5d g = chart_vector_field(k2(0.02, 0.7, -0.4, 0.1, 0.1), kParams);
  CHECK(std::abs(g[0]) > 0.1);
}

TEST_CASE("K12 at zero radius uses the flat limit") {
  ChartPoint cp;
  cp.chart = ChartId::K12;
  cp.coords << 0.4, 0.3, 0.05, 0.8, 0.0;
  cp.mu = 1.0;
  const Vector5d f = chart_vector_field(cp, kParams);
  CHECK(f[1] == doctest::Approx(1 - kParams.gamma * 0.3).epsilon(1e-15));
  CHECK(f[0] == doctest::Approx(phi(0.8) - 0.4).epsilon(1e-15));
}

TEST_CASE("chart fields extend smoothly to zero radius") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> r(0.05, 1.2), x(0.2, 2.0), e(0.01, 0.3);
  for (const ChartInfo& ci : kAtlas) {
    if (ci.kind == ChartKind::Scaling) continue;
    for (int radial : {3, 4}) {
      if (ci.kind == ChartKind::Central && radial == 3) continue;
      ChartPoint cp;
      cp.chart = ci.id;
      cp.mu = 0.8;
      cp.coords << r(rng), r(rng), e(rng), x(rng), x(rng);
      cp.coords[radial] = 0;
      const Vector5d f0 = chart_vector_field(cp, kParams);
      CHECK(f0.allFinite());
      for (int k = 4; k <= 8; ++k) {
        ChartPoint q = cp;
        q.coords[radial] = std::pow(10.0, -k);
        const Vector5d fk = chart_vector_field(q, kParams);
        // Hill terms are flat: identical already at 1e-4.
        CHECK(fk[0] == f0[0]);
        CHECK(fk[1] == f0[1]);
        CHECK((fk - f0).cwiseAbs().maxCoeff() <= 50 * q.coords[radial]);
      }
    }
  }
}

TEST_CASE("chart variables are frozen at mu = 0 in every chart") {
  std::mt19937_64 rng(29);
  for (const ChartInfo& ci : kAtlas) {
    for (int k = 0; k < 20; ++k) {
      const Eigen::Vector3d l = overlap_logs(ci.id, ci.id, rng);
      const Vector5d f = chart_vector_field(random_point(ci.id, l, rng, 0.0), kParams);
      CHECK(f.tail<3>().isZero(0));
    }
  }
}

TEST_CASE("critical manifold eigenvalues in every chart") {
  std::mt19937_64 rng(31);
  for (double gamma : {2.0, 1.0, 0.4}) {
    ModelParams p = kParams;
    p.gamma = gamma;
    for (const ChartInfo& ci : kAtlas) {
      const Eigen::Vector3d l = overlap_logs(ci.id, ci.id, rng);
      ChartPoint cp = random_point(ci.id, l, rng, 0.0);
      const Eigen::Vector2d res = slaving_residual(cp, p);
      cp.coords[0] -= res[0];
      cp.coords[1] -= res[1];
      const Eigen::Vector2d ev = critical_manifold_eigenvalues(cp, p);
      CHECK(ev[0] == doctest::Approx(std::max(-1.0, -gamma)).epsilon(1e-7));
      CHECK(ev[1] == doctest::Approx(std::min(-1.0, -gamma)).epsilon(1e-7));

      ChartPoint off = cp;
      off.coords[0] += 1e-3;
      CHECK_THROWS_AS(critical_manifold_eigenvalues(off, p), DomainError);
      ChartPoint moving = cp;
      moving.mu = 0.1;
      CHECK_THROWS_AS(critical_manifold_eigenvalues(moving, p), DomainError);
    }
  }
}
