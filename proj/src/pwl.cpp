#include "grnsp/pwl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "grnsp/errors.hpp"

namespace grnsp {

namespace {

constexpr double kSnap = 1e-13;

void require_spiral_regime(const ModelParams& p, const char* who) {
  p.validate();
  if (!(p.xi_a > 1) || !(p.xi_b > p.gamma)) {
    std::ostringstream msg;
    msg << who << ": requires xi_a > 1 and xi_b > gamma";
    throw DomainError(msg.str());
  }
}

double snap(double v) { return std::abs(v - 1) <= kSnap ? 1.0 : v; }

// Time for x(t) = target + (x0 - target) e^{-rate t} to reach 1, or +inf.
double hitting_time(double x0, double target, double rate) {
  if (x0 == 1) return std::numeric_limits<double>::infinity();
  const bool between = (x0 < 1 && target > 1) || (x0 > 1 && target < 1);
  if (!between) return std::numeric_limits<double>::infinity();
  return std::log((x0 - target) / (1 - target)) / rate;
}

// Richardson extrapolation of a sequence D(h), D(h/2), ... with error
// expansion in integer powers of h.
double richardson(std::vector<double> d) {
  for (std::size_t level = 1; level < d.size(); ++level) {
    const double f = std::pow(2.0, double(level));
    for (std::size_t k = d.size() - 1; k >= level; --k) d[k] = (f * d[k] - d[k - 1]) / (f - 1);
  }
  return d.back();
}

}  // namespace

Eigen::Vector2d pwl_region_field(const PwlState& s, bool b_high, bool a_low, const ModelParams& p) {
  return {p.xi_a * (b_high ? 1.0 : 0.0) - s[0],
          p.delta * (p.xi_b / p.gamma * (a_low ? 1.0 : 0.0) - s[1])};
}

Eigen::Vector2d pwl_field(const PwlState& s, const ModelParams& p) {
  if (std::abs(s[0] - 1) <= kSnap || std::abs(s[1] - 1) <= kSnap)
    throw DomainError("pwl_field: state lies on a switching line");
  return pwl_region_field(s, s[1] > 1, s[0] < 1, p);
}

std::string_view to_string(FlowStatus s) {
  switch (s) {
    case FlowStatus::Completed:
      return "completed";
    case FlowStatus::Corner:
      return "corner";
    default:
      return "max-events";
  }
}

PwlState PwlTrajectory::at(double t) const {
  if (segments.empty()) throw DomainError("PwlTrajectory::at: empty trajectory");
  auto it = std::lower_bound(segments.begin(), segments.end(), t,
                             [](const PwlSegment& sg, double v) { return sg.t1 < v; });
  const PwlSegment* seg = it == segments.end() ? &segments.back() : &*it;
  const double tau = std::clamp(t, seg->t0, seg->t1) - seg->t0;
  const Eigen::Vector2d decay(std::exp(-tau), std::exp(-delta * tau));
  return seg->target + (seg->x0 - seg->target).cwiseProduct(decay);
}

PwlState PwlTrajectory::final_state() const {
  if (segments.empty()) throw DomainError("PwlTrajectory::final_state: empty trajectory");
  return end;
}

PwlTrajectory flow_exact(const PwlState& s0, const ModelParams& p, double t_max, int max_events) {
  p.validate();
  if (!(s0.minCoeff() >= 0)) throw DomainError("flow_exact: requires p_a, p_b >= 0");
  PwlTrajectory tr;
  tr.delta = p.delta;
  PwlState x(snap(s0[0]), snap(s0[1]));
  double t = 0;
  const double c = p.xi_b / p.gamma;
  while (t < t_max) {
    const bool on_a = x[0] == 1, on_b = x[1] == 1;
    if (on_a && on_b) {
      tr.status = FlowStatus::Corner;
      break;
    }
    bool b_high, a_low;
    if (on_b) {
      a_low = x[0] < 1;
      const double speed = p.delta * (c * (a_low ? 1 : 0) - 1);
      if (std::abs(speed) <= 1e-10) throw DomainError("flow_exact: tangency at p_b = 1");
      b_high = speed > 0;
    } else if (on_a) {
      b_high = x[1] > 1;
      const double speed = p.xi_a * (b_high ? 1 : 0) - 1;
      if (std::abs(speed) <= 1e-10) throw DomainError("flow_exact: tangency at p_a = 1");
      a_low = speed < 0;
    } else {
      b_high = x[1] > 1;
      a_low = x[0] < 1;
    }
    const PwlState target(p.xi_a * (b_high ? 1 : 0), c * (a_low ? 1 : 0));
    const double ta = hitting_time(x[0], target[0], 1.0);
    const double tb = hitting_time(x[1], target[1], p.delta);
    const double t_ev = std::min(ta, tb);
    PwlSegment seg{t, std::min(t + t_ev, t_max), x, target, b_high, a_low};
    tr.segments.push_back(seg);
    if (t + t_ev >= t_max) {
      t = t_max;
      break;
    }
    const double tau = t_ev;
    x = target + (x - target).cwiseProduct(Eigen::Vector2d(std::exp(-tau), std::exp(-p.delta * tau)));
    t += tau;
    tr.segments.back().t1 = t;
    if (std::abs(ta - tb) <= 1e-12 * std::max(1.0, tau)) {
      x << 1, 1;
      tr.status = FlowStatus::Corner;
      break;
    }
    PwlEvent ev;
    ev.t = t;
    if (ta < tb) {
      x[0] = 1;
      x[1] = snap(x[1]);
      ev.line = SwitchLine::A;
      ev.normal_speed = target[0] - 1;
    } else {
      x[1] = 1;
      x[0] = snap(x[0]);
      ev.line = SwitchLine::B;
      ev.normal_speed = p.delta * (target[1] - 1);
    }
    ev.point = x;
    tr.events.push_back(ev);
    if (static_cast<int>(tr.events.size()) >= max_events) {
      tr.status = FlowStatus::MaxEvents;
      break;
    }
  }
  tr.t_end = t;
  if (tr.segments.empty()) tr.segments.push_back({t, t, x, x, x[1] > 1, x[0] < 1});
  // x is exact at events and at the corner; otherwise the run stopped at t_max
  tr.end = tr.status == FlowStatus::Completed ? tr.at(t) : x;
  return tr;
}

PoincareRecord poincare_record(double p_b0, const ModelParams& p) {
  require_spiral_regime(p, "poincare_map");
  if (!(p_b0 > 1)) throw DomainError("poincare_map: requires p_b0 > 1");
  const double c = p.xi_b / p.gamma, d = p.delta;
  PoincareRecord r;
  r.p_b0 = p_b0;
  // p_a > 1, p_b > 1: p_b decays to 1
  r.t1 = std::log(p_b0) / d;
  r.p_a_t1 = p.xi_a + (1 - p.xi_a) * std::pow(p_b0, -1 / d);
  // p_a > 1, p_b < 1: p_a decays to 1
  r.t2 = r.t1 + std::log(r.p_a_t1);
  r.p_b_t2 = std::pow(r.p_a_t1, -d);
  // p_a < 1, p_b < 1: p_b rises to 1
  const double tau3 = std::log((c - r.p_b_t2) / (c - 1)) / d;
  r.t3 = r.t2 + tau3;
  r.p_a_t3 = std::exp(-tau3);
  // p_a < 1, p_b > 1: p_a rises to 1
  const double ratio = (p.xi_a - 1) / (p.xi_a - r.p_a_t3);
  r.t4 = r.t3 - std::log(ratio);
  r.p_b_t4 = c + (1 - c) * std::pow(ratio, d);
  return r;
}

double poincare_map(double p_b0, const ModelParams& p) { return poincare_record(p_b0, p).p_b_t4; }

double poincare_map_by_flow(double p_b0, const ModelParams& p) {
  require_spiral_regime(p, "poincare_map_by_flow");
  if (!(p_b0 > 1)) throw DomainError("poincare_map_by_flow: requires p_b0 > 1");
  const PwlTrajectory tr =
      flow_exact(PwlState(1, p_b0), p, std::numeric_limits<double>::infinity(), 4);
  if (tr.events.size() < 4 || tr.events[3].line != SwitchLine::A)
    throw NumericError("poincare_map_by_flow: orbit did not return to p_a = 1");
  return tr.events[3].point[1];
}

PoincareDerivatives poincare_derivatives_at_one(const ModelParams& p) {
  require_spiral_regime(p, "poincare_derivatives_at_one");
  // P extends smoothly to P(1) = 1; one-sided differences from the right.
  std::vector<double> d1, d2;
  double h = 1e-2;
  for (int k = 0; k < 5; ++k, h *= 0.5) {
    const double p1 = poincare_map(1 + h, p), p2 = poincare_map(1 + 2 * h, p);
    d1.push_back((p1 - 1) / h);
    d2.push_back((p2 - 2 * p1 + 1) / (h * h));
  }
  return {richardson(d1), richardson(d2)};
}

double poincare_second_derivative_closed_form(const ModelParams& p) {
  require_spiral_regime(p, "poincare_second_derivative_closed_form");
  return -(p.delta + 1) * p.xi_a * p.xi_b / (p.delta * (p.xi_b - p.gamma));
}

std::vector<PwlState> region_equilibria(const ModelParams& p) {
  p.validate();
  std::vector<PwlState> out;
  for (int b_high = 0; b_high < 2; ++b_high) {
    for (int a_low = 0; a_low < 2; ++a_low) {
      const PwlState q(p.xi_a * b_high, p.xi_b / p.gamma * a_low);
      if (q[0] == 1 || q[1] == 1) continue;
      if ((q[1] > 1) == bool(b_high) && (q[0] < 1) == bool(a_low)) out.push_back(q);
    }
  }
  return out;
}

std::string_view to_string(BoundaryCase c) {
  switch (c) {
    case BoundaryCase::IV:
      return "iv";
    case BoundaryCase::V:
      return "v";
    case BoundaryCase::VI:
      return "vi";
    default:
      return "vii";
  }
}

PwlState boundary_equilibrium_limit(const ModelParams& p, BoundaryCase which) {
  p.validate();
  auto wrong_side = [&](const char* need) {
    throw DomainError(std::string("boundary_equilibrium_limit(") + std::string(to_string(which)) +
                      "): wrong side, requires " + need);
  };
  switch (which) {
    case BoundaryCase::IV:
      if (!(p.xi_a < 1 && p.xi_b < p.gamma)) wrong_side("xi_a < 1 and xi_b < gamma");
      return {0, 1};
    case BoundaryCase::V:
      if (!(p.xi_a < 1 && p.xi_b > p.gamma)) wrong_side("xi_a < 1 and xi_b > gamma");
      return {p.xi_a, 1};
    case BoundaryCase::VI:
      if (!(p.xi_b > p.gamma && p.xi_a < 1)) wrong_side("xi_b > gamma and xi_a < 1");
      return {1, p.xi_b / p.gamma};
    default:
      if (!(p.xi_a > 1 && p.xi_b < p.gamma)) wrong_side("xi_a > 1 and xi_b < gamma");
      return {0, 1};
  }
}

}  // namespace grnsp
