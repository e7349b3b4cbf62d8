#include <doctest.h>

#include <cmath>
#include <random>

#include "grnsp/core_model.hpp"
#include "grnsp/pwl.hpp"
#include "grnsp/sim.hpp"

using namespace grnsp;

namespace {

const ModelParams kFig3{2, 3, 1.3536, 2.3536, 1e-2, 5e-3};

ModelParams with_xi(double xi_a, double xi_b, ModelParams p = kFig3) {
  p.xi_a = xi_a;
  p.xi_b = xi_b;
  return p;
}

}  // namespace

TEST_CASE("pwl field: regions") {
  const ModelParams& p = kFig3;
  Eigen::Vector2d f = pwl_field(PwlState(1.7, 1.2), p);
  CHECK(f[0] == doctest::Approx(p.xi_a - 1.7));
  CHECK(f[1] == doctest::Approx(-p.delta * 1.2));
  f = pwl_field(PwlState(0.4, 0.6), p);
  CHECK(f[0] == doctest::Approx(-0.4));
  CHECK(f[1] == doctest::Approx(p.delta * (p.xi_b / p.gamma - 0.6)));
  CHECK_THROWS_AS(pwl_field(PwlState(1.0, 0.5), p), DomainError);
  CHECK_THROWS_AS(pwl_field(PwlState(0.5, 1.0), p), DomainError);
}

TEST_CASE("pwl field is the switching limit of the qssr field") {
  std::mt19937_64 rng(79);
  std::uniform_real_distribution<double> u(0.1, 3);
  for (int k = 0; k < 20; ++k) {
    PwlState s(u(rng), u(rng));
    if (std::abs(s[0] - 1) < 0.05 || std::abs(s[1] - 1) < 0.05) s += Eigen::Vector2d(0.1, 0.1);
    const Eigen::Vector2d f0 = pwl_field(s, kFig3);
    for (double sigma : {1e-1, 1e-2, 1e-3}) {
      ModelParams p = kFig3;
      p.sigma = sigma;
      const Eigen::Vector2d f = qssr_vector_field(s, p);
      // |h(p) - indicator| <= exp(-|ln p| / sigma)
      CHECK(std::abs(f[0] - f0[0]) <= p.xi_a * std::exp(-std::abs(std::log(s[1])) / sigma) + 1e-15);
      CHECK(std::abs(f[1] - f0[1]) <=
            p.delta * p.xi_b / p.gamma * std::exp(-std::abs(std::log(s[0])) / sigma) + 1e-15);
    }
  }
}

TEST_CASE("flow_exact: Appendix pattern from (1, 1.5)") {
  const PwlTrajectory tr = flow_exact(PwlState(1, 1.5), kFig3, 1e6, 4);
  REQUIRE(tr.events.size() == 4);
  CHECK(tr.status == FlowStatus::MaxEvents);
  CHECK(tr.events[0].line == SwitchLine::B);
  CHECK(tr.events[1].line == SwitchLine::A);
  CHECK(tr.events[2].line == SwitchLine::B);
  CHECK(tr.events[3].line == SwitchLine::A);
  CHECK(tr.events[0].point[0] > 1);
  CHECK(tr.events[1].point[1] < 1);
  CHECK(tr.events[2].point[0] < 1);
  CHECK(tr.events[3].point[1] > 1);
  CHECK(tr.events[3].point[1] < 1.5);
  for (std::size_t i = 1; i < tr.events.size(); ++i) CHECK(tr.events[i].t > tr.events[i - 1].t);
  for (const PwlEvent& e : tr.events) CHECK(std::abs(e.normal_speed) > 1e-10);

  const PoincareRecord r = poincare_record(1.5, kFig3);
  CHECK(r.t1 == doctest::Approx(tr.events[0].t).epsilon(1e-12));
  CHECK(r.t2 == doctest::Approx(tr.events[1].t).epsilon(1e-12));
  CHECK(r.t3 == doctest::Approx(tr.events[2].t).epsilon(1e-12));
  CHECK(r.t4 == doctest::Approx(tr.events[3].t).epsilon(1e-12));
  CHECK(r.p_a_t1 == doctest::Approx(tr.events[0].point[0]).epsilon(1e-12));
  CHECK(r.p_b_t2 == doctest::Approx(tr.events[1].point[1]).epsilon(1e-12));
  CHECK(r.p_a_t3 == doctest::Approx(tr.events[2].point[0]).epsilon(1e-12));
  // state on the line at each event, from the segment formula
  for (const PwlEvent& e : tr.events) {
    const PwlState x = tr.at(e.t);
    const int comp = e.line == SwitchLine::A ? 0 : 1;
    CHECK(std::abs(x[comp] - 1) <= 1e-12);
  }
}

TEST_CASE("flow_exact: spirals into the corner") {
  const PwlTrajectory tr = flow_exact(PwlState(3, 0.2), kFig3, 1e6, 400);
  std::vector<double> returns;
  for (const PwlEvent& e : tr.events)
    if (e.line == SwitchLine::A && e.point[1] > 1) returns.push_back(e.point[1]);
  REQUIRE(returns.size() > 50);
  for (std::size_t i = 1; i < returns.size(); ++i) {
    CHECK(returns[i] < returns[i - 1]);
    CHECK(returns[i] > 1);
  }
  CHECK(returns.back() - 1 < 0.1 * (returns.front() - 1));
}

TEST_CASE("flow_exact: hitting the corner ends the flow") {
  // xi_a = 0.5, delta = 3 from (1.5, 8): both lines reached at t = ln 2
  const PwlTrajectory tr = flow_exact(PwlState(1.5, 8), with_xi(0.5, 2.3536), 10);
  CHECK(tr.status == FlowStatus::Corner);
  CHECK(tr.t_end == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(tr.final_state() == PwlState(1, 1));
}

TEST_CASE("flow_exact: switching times accumulate in the spiral regime") {
  // Loop times shrink with the distance to the corner; the event budget runs
  // out long before t = 25.
  const PwlTrajectory tr = flow_exact(PwlState(1.3, 0.2), kFig3, 25, 20000);
  CHECK(tr.status == FlowStatus::MaxEvents);
  CHECK(tr.t_end < 25);
  CHECK((tr.final_state() - PwlState(1, 1)).norm() < 1e-2);
}

TEST_CASE("flow_exact agrees with numerical integration of the switching field") {
  struct Run {
    PwlState s0;
    ModelParams p;
    double t_end;
  };
  const Run runs[] = {{PwlState(1.3, 0.2), kFig3, 3},
                      {PwlState(0.3, 2.5), kFig3, 3},
                      {PwlState(2.0, 3.0), kFig3, 3},
                      {PwlState(2.0, 3.0), with_xi(0.6, 3.0), 20},
                      {PwlState(0.2, 0.1), with_xi(1.5, 1.2), 20}};
  for (const Run& r : runs) {
    const PwlState& s0 = r.s0;
    const ModelParams& kp = r.p;
    const double t_end = r.t_end;
    const PwlTrajectory ex = flow_exact(s0, kp, t_end);
    CHECK(ex.status == FlowStatus::Completed);
    IntegrateOptions o;
    o.sample_dt = 0.05;
    const Trajectory num = integrate(SystemKind::PwlSmoothed, s0, kp, t_end, 1e-12, o);
    double worst = 0;
    for (std::size_t i = 0; i < num.t.size(); ++i)
      worst = std::max(worst, (ex.at(num.t[i]) - num.x[i]).cwiseAbs().maxCoeff());
    CHECK(worst <= 1e-9);
    // switching events line up too
    std::size_t j = 0;
    for (const TrajectoryEvent& e : num.events) {
      if (e.kind == EventKind::Section) continue;
      REQUIRE(j < ex.events.size());
      CHECK(e.t == doctest::Approx(ex.events[j].t).epsilon(1e-9));
      ++j;
    }
  }
}

TEST_CASE("poincare map: closed form against the event-driven flow") {
  for (double x : {1.1, 1.5, 2.0, 5.0}) {
    const double a = poincare_map(x, kFig3), b = poincare_map_by_flow(x, kFig3);
    CHECK(std::abs(a - b) <= 1e-10);
    CHECK(a > 1);
    CHECK(a < x);
  }
  CHECK_THROWS_AS(poincare_map(1.0, kFig3), DomainError);
  CHECK_THROWS_AS(poincare_map(1.5, with_xi(0.9, 2.3536)), DomainError);
  CHECK_THROWS_AS(poincare_map(1.5, with_xi(1.3536, 1.9)), DomainError);
}

TEST_CASE("poincare map: no fixed point above 1, iterates decrease to 1") {
  for (double x = 1.001; x <= 10; x += 0.001) CHECK(poincare_map(x, kFig3) < x);
  double x = 5;
  for (int k = 0; k < 2000; ++k) {
    const double y = poincare_map(x, kFig3);
    CHECK(y < x);
    x = y;
  }
  CHECK(x < 1.01);
  CHECK(poincare_map(1 + 1e-9, kFig3) - 1 <= 1.1e-9);
}

TEST_CASE("poincare map derivatives at 1") {
  const PoincareDerivatives d = poincare_derivatives_at_one(kFig3);
  CHECK(d.first == doctest::Approx(1).epsilon(1e-6));
  CHECK(d.second == doctest::Approx(poincare_second_derivative_closed_form(kFig3)).epsilon(1e-4));
  // Independent check from the flow-based map: (P(1+h) - 1 - h) / h^2 -> P''(1)/2.
  std::vector<double> est;
  for (double h : {4e-3, 2e-3, 1e-3}) est.push_back(2 * (poincare_map_by_flow(1 + h, kFig3) - 1 - h) / (h * h));
  const double extrap = 2 * est[2] - est[1];
  CHECK(extrap == doctest::Approx(d.second).epsilon(1e-2));
  CHECK(poincare_second_derivative_closed_form(kFig3) == doctest::Approx(-12.012).epsilon(1e-3));

  std::mt19937_64 rng(83);
  std::uniform_real_distribution<double> a(1.05, 3), b(0.05, 1);
  for (int k = 0; k < 50; ++k) {
    const ModelParams p = with_xi(a(rng), kFig3.gamma * (1 + 2 * b(rng)));
    const PoincareDerivatives dk = poincare_derivatives_at_one(p);
    CHECK(dk.first == doctest::Approx(1).epsilon(1e-6));
    CHECK(dk.second < 0);
    CHECK(dk.second == doctest::Approx(poincare_second_derivative_closed_form(p)).epsilon(1e-4));
  }
}

TEST_CASE("region equilibria existence") {
  for (double xa = 0.1; xa < 3; xa += 0.137) {
    for (double xb = 0.1; xb < 6; xb += 0.173) {
      const ModelParams p = with_xi(xa, xb);
      const auto q = region_equilibria(p);
      const bool third = xb < p.gamma;
      const bool second = xa < 1 && xb > p.gamma;
      CHECK(q.size() == std::size_t(third) + std::size_t(second));
      for (const PwlState& s : q) {
        if (s[0] == 0) {
          CHECK(third);
          CHECK(s[1] == doctest::Approx(xb / p.gamma));
        } else {
          CHECK(second);
          CHECK(s == PwlState(xa, xb / p.gamma));
        }
        CHECK(pwl_field(s, p).cwiseAbs().maxCoeff() == 0.0);
      }
      if (xa > 1 && xb > p.gamma) CHECK(q.empty());
    }
  }
}

TEST_CASE("boundary equilibrium limits") {
  const double g = kFig3.gamma;
  struct Case {
    BoundaryCase which;
    double xa0, xb0;  // start
    double dxa, dxb;  // direction of approach
  };
  const Case cases[] = {
      {BoundaryCase::IV, 0.5, g - 0.5, 0, 1},
      {BoundaryCase::V, 0.5, g + 0.5, 0, -1},
      {BoundaryCase::VI, 0.5, 3.0, 1, 0},
      {BoundaryCase::VII, 1.5, g - 0.5, 0, 1},
  };
  for (const Case& c : cases) {
    const PwlState lim = boundary_equilibrium_limit(with_xi(c.xa0, c.xb0), c.which);
    double gap = 0.5;
    for (int k = 0; k < 5; ++k, gap /= 4) {
      const double xa = c.dxa != 0 ? 1 - gap : c.xa0;
      const double xb = c.dxb > 0 ? g - gap : (c.dxb < 0 ? g + gap : c.xb0);
      const ModelParams p = with_xi(xa, xb);
      CHECK(boundary_equilibrium_limit(p, c.which) == lim);
      const auto q = region_equilibria(p);
      double best = 1e300;
      for (const PwlState& s : q) best = std::min(best, (s - lim).norm());
      CHECK(best <= 1.0 * gap);
    }
  }
  CHECK(boundary_equilibrium_limit(with_xi(0.5, 1.5), BoundaryCase::IV) == PwlState(0, 1));
  CHECK(boundary_equilibrium_limit(with_xi(0.5, 3.0), BoundaryCase::VI) == PwlState(1, 1.5));
  CHECK_THROWS_AS(boundary_equilibrium_limit(with_xi(0.5, 1.0), BoundaryCase::VI), DomainError);
  CHECK_THROWS_AS(boundary_equilibrium_limit(with_xi(1.5, 1.5), BoundaryCase::IV), DomainError);
  CHECK_THROWS_AS(boundary_equilibrium_limit(with_xi(0.5, 1.5), BoundaryCase::VII), DomainError);
}
