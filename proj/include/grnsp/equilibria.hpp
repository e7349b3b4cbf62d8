#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "grnsp/core_model.hpp"

namespace grnsp {

enum class Stability { Stable, Unstable, Marginal };
std::string_view to_string(Stability s);

struct Equilibrium4 {
  State4 state;
  ModelParams params;
  Eigen::Vector4cd eigenvalues;  // sorted by decreasing real part
  Stability stability;
};

// Scalar equilibrium condition in r_a; increasing, with a single root.
double equilibrium_condition(double r_a, const ModelParams& p);

// Root of equilibrium_condition by bisection plus Newton polish. With a
// guess, safeguarded Newton starts there instead.
double equilibrium_r_a(const ModelParams& p, std::optional<double> guess = std::nullopt);

Equilibrium4 solve_equilibrium(const ModelParams& p);
// Equilibrium from a known r_a root (fills in state, eigenvalues and stability).
Equilibrium4 equilibrium_from_r_a(double r_a, const ModelParams& p);

Eigen::Vector4cd sorted_eigenvalues(const Eigen::Matrix4d& jac);
Stability classify_stability(const Eigen::Vector4cd& ev);

// Parameter path in (xi_a, xi_b). Samples sit at increasing path parameters
// s_k; between samples the path is evaluated through at().
struct ParamPath {
  std::vector<double> s;
  std::vector<Eigen::Vector2d> xi;
  bool closed = false;
  double period = 0;  // parameter length of one loop when closed
  std::function<Eigen::Vector2d(double)> map;  // optional exact parametrization

  Eigen::Vector2d at(double s_value) const;
  std::size_t size() const { return xi.size(); }

  // Equiangular samples of a circle, parameter = angle in [0, 2 pi).
  static ParamPath circle(const Eigen::Vector2d& center, double radius, int samples);
  // Polyline through the given points, parameter = cumulative arc length.
  static ParamPath polyline(const std::vector<Eigen::Vector2d>& points);
};

struct ContinuationPoint {
  double s;
  Eigen::Vector2d xi;
  Equilibrium4 eq;
};

// Natural-parameter continuation along the samples, warm-starting Newton
// from the previous root. The closing segment of a closed path is not
// included in the output (it repeats the first sample).
std::vector<ContinuationPoint> continue_along_path(const ParamPath& path, const ModelParams& p);

struct HopfPoint {
  Eigen::Vector2d xi;
  State4 state;
  double omega;
  double s;  // path parameter
  Eigen::Vector4cd eigenvalues;
};

// Complex pair with largest real part. Throws if the rightmost eigenvalue is real.
std::complex<double> critical_pair(const Eigen::Vector4cd& ev);

// Bisection in the path parameter between two continuation samples.
HopfPoint detect_hopf(const ContinuationPoint& a, const ContinuationPoint& b,
                      const ParamPath& path, const ModelParams& p);

// All crossings of the critical pair along the path (including the closing
// segment when the path is closed).
std::vector<HopfPoint> find_hopf_points(const std::vector<ContinuationPoint>& run,
                                        const ParamPath& path, const ModelParams& p);

struct HopfCurveOptions {
  double initial_step = 1e-2;
  double max_step = 5e-2;
  double min_step = 1e-2 / 1024;
  double xi_a_max = 4;
  double xi_b_max = 8;
  int max_points = 5000;
};

// Real part of the critical pair at the equilibrium for (xi_a, xi_b).
double critical_real_part(const Eigen::Vector2d& xi, const ModelParams& p);

// Pseudo-arclength continuation of {Re lambda_pair = 0} through the seed in
// both directions; the result is ordered along the curve.
std::vector<Eigen::Vector2d> trace_hopf_curve(const ModelParams& p, const HopfPoint& seed,
                                              const HopfCurveOptions& opts = {});

}  // namespace grnsp
