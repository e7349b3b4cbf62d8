#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "grnsp/params.hpp"
#include "grnsp/rosenbrock.hpp"

namespace grnsp {

// full: (r_a, r_b, p_a, p_b); qssr and pwl-smoothed: (p_a, p_b);
// reduced-k2: (u2, v2). pwl-smoothed integrates the switching-limit field
// numerically, restarting at every crossing of p_a = 1 or p_b = 1.
enum class SystemKind { Full, Qssr, ReducedK2, PwlSmoothed };
std::string_view to_string(SystemKind k);
SystemKind system_from_name(std::string_view name);
int state_dimension(SystemKind k);

enum class EventKind { Section, SwitchA, SwitchB };

struct TrajectoryEvent {
  EventKind kind;
  double t;
  Eigen::VectorXd x;
};

struct Trajectory {
  SystemKind system = SystemKind::Full;
  double sigma = 0;  // needed to map reduced coordinates back to (p_a, p_b)
  std::vector<double> t;
  std::vector<Eigen::VectorXd> x;
  std::vector<TrajectoryEvent> events;
  IntegratorStats stats;
  // Max-norm of the field at the last sample; NaN when unknown.
  double terminal_residual = std::numeric_limits<double>::quiet_NaN();
};

struct IntegrateOptions {
  double sample_dt = 0;  // 0 records every accepted step
  double dt_max = std::numeric_limits<double>::infinity();
};

// tol is used as both absolute and relative tolerance, in [1e-12, 1e-6].
// For reduced-k2 the reduced field uses (p.sigma, p.mu()), with mu = 0 when
// sigma = 0.
Trajectory integrate(SystemKind system, const Eigen::VectorXd& s0, const ModelParams& p,
                     double t_end, double tol, const IntegrateOptions& opts = {});

// Reduced-k2 with an explicit (sigma, mu) pair, including sigma = 0, mu > 0.
Trajectory integrate_reduced(const Eigen::Vector2d& s0, const ModelParams& p, double sigma,
                             double mu, double t_end, double tol,
                             const IntegrateOptions& opts = {});

// Value whose upward zero crossings define the section {p_b = 1, p_b' > 0}.
double section_value(SystemKind system, const Eigen::VectorXd& x);
// (p_a, p_b) of a sample.
Eigen::Vector2d protein_coordinates(SystemKind system, const Eigen::VectorXd& x, double sigma);

struct AttractorVerdict {
  enum class Kind { Equilibrium, LimitCycle, Undecided } kind = Kind::Undecided;
  double period = std::numeric_limits<double>::quiet_NaN();
  Eigen::Vector2d amplitude = Eigen::Vector2d::Constant(std::numeric_limits<double>::quiet_NaN());
  double terminal_distance = std::numeric_limits<double>::quiet_NaN();
  int section_returns = 0;
  double return_spread = std::numeric_limits<double>::quiet_NaN();
  double terminal_residual = std::numeric_limits<double>::quiet_NaN();
};
std::string_view to_string(AttractorVerdict::Kind k);

inline constexpr double kCycleReturnTol = 1e-7;
inline constexpr double kCycleMinAmplitude = 1e-3;
inline constexpr double kEquilibriumResidual = 1e-9;
inline constexpr int kMinSectionReturns = 50;

AttractorVerdict classify_attractor(const Trajectory& tr, const ModelParams& p);

struct DeviationSeries {
  std::vector<double> t, dev_a, dev_b, p_a, p_b;
};

// Distance of a full-system trajectory from the slaved mRNA values.
DeviationSeries qssr_deviation(const Trajectory& tr, const ModelParams& p);

// Start of the statistics window, 5 / min(1, gamma).
double transient_cutoff(const ModelParams& p);

struct DeviationPeak {
  double value = 0;
  double t = 0;
  double p_a = 0, p_b = 0;
};

// Largest r_a deviation after the transient cutoff.
DeviationPeak max_deviation(const DeviationSeries& d, double t_cut);

}  // namespace grnsp
