#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "grnsp/params.hpp"

namespace grnsp {

// Singular-limit protein system on (p_a, p_b) with switching lines p_a = 1
// and p_b = 1.
using PwlState = Eigen::Vector2d;

enum class SwitchLine { A, B };  // p_a = 1, p_b = 1

// Field from the indicators [p_b > 1] and [p_a < 1]. Throws on a switching line.
Eigen::Vector2d pwl_field(const PwlState& s, const ModelParams& p);

// Field with explicit indicator values, valid on the closure of a region.
Eigen::Vector2d pwl_region_field(const PwlState& s, bool b_high, bool a_low, const ModelParams& p);

struct PwlEvent {
  double t;
  PwlState point;
  SwitchLine line;
  double normal_speed;  // component of the field normal to the line (same on both sides)
};

enum class FlowStatus { Completed, Corner, MaxEvents };
std::string_view to_string(FlowStatus s);

// One linear piece: x(t) = target + (x0 - target) .* exp(-rates (t - t0)).
struct PwlSegment {
  double t0, t1;
  PwlState x0;
  PwlState target;
  bool b_high, a_low;
};

struct PwlTrajectory {
  std::vector<PwlSegment> segments;
  std::vector<PwlEvent> events;
  FlowStatus status = FlowStatus::Completed;
  double t_end = 0;
  double delta = 1;
  PwlState end = PwlState::Zero();

  PwlState at(double t) const;
  PwlState final_state() const;
};

PwlTrajectory flow_exact(const PwlState& s0, const ModelParams& p, double t_max,
                         int max_events = 100000);

struct PoincareRecord {
  double p_b0;
  double p_a_t1, p_b_t2, p_a_t3, p_b_t4;
  double t1, t2, t3, t4;  // cumulative hitting times
};

// Four-stage closed-form return to {p_a = 1, p_b > 1}.
PoincareRecord poincare_record(double p_b0, const ModelParams& p);
double poincare_map(double p_b0, const ModelParams& p);
// Same return computed from the event-driven flow.
double poincare_map_by_flow(double p_b0, const ModelParams& p);

struct PoincareDerivatives {
  double first;   // P'(1)
  double second;  // P''(1)
};

// P'(1) and P''(1) by Richardson-extrapolated differences of the closed form.
PoincareDerivatives poincare_derivatives_at_one(const ModelParams& p);
// -(delta+1) xi_a xi_b / (delta (xi_b - gamma)): the second derivative at 1.
double poincare_second_derivative_closed_form(const ModelParams& p);

// Equilibria of the regional linear systems that lie inside their own region.
std::vector<PwlState> region_equilibria(const ModelParams& p);

enum class BoundaryCase { IV, V, VI, VII };
std::string_view to_string(BoundaryCase c);

// Point on a switching line that a region equilibrium approaches as one
// parameter moves to the edge of its existence set. p supplies the fixed
// parameter and must lie on the approaching side.
//   IV:  xi_a < 1 fixed, xi_b -> gamma^-   q_III = (0, xi_b/gamma)    -> (0, 1)
//   V:   xi_a < 1 fixed, xi_b -> gamma^+   q_II = (xi_a, xi_b/gamma)  -> (xi_a, 1)
//   VI:  xi_b > gamma fixed, xi_a -> 1^-   q_II                       -> (1, xi_b/gamma)
//   VII: xi_a > 1 fixed, xi_b -> gamma^-   q_III                      -> (0, 1)
PwlState boundary_equilibrium_limit(const ModelParams& p, BoundaryCase which);

}  // namespace grnsp
