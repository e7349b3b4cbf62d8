#pragma once

#include <optional>
#include <string_view>

#include <Eigen/Core>

#include "grnsp/charts.hpp"
#include "grnsp/core_model.hpp"

namespace grnsp {

// Slow coordinates (u2, v2) of the scaling chart: (p_a, p_b) = (e^{sigma u2}, e^{sigma v2}).
template <typename Scalar>
using ReducedStateT = Eigen::Matrix<Scalar, 2, 1>;
using ReducedState = ReducedStateT<double>;

enum : Eigen::Index { kU2 = 0, kV2 = 1 };

// First-order corrections of the slow manifold in the scaling chart.
template <typename Scalar>
ReducedStateT<Scalar> omega_corrections(const ReducedStateT<Scalar>& x, double eta2,
                                        const ModelParams& p) {
  const Scalar& u = x[kU2];
  const Scalar& v = x[kV2];
  const Scalar fu = phi(u), fv = phi(v);
  const Scalar rb0 = phi(Scalar(-u)) / p.gamma;
  ReducedStateT<Scalar> om;
  om[0] = -fv * (1.0 - fv) * g_b(rb0, Scalar(eta2 * v), p);
  om[1] = fu * (1.0 - fu) / (p.gamma * p.gamma) * g_a(fv, Scalar(eta2 * u), p);
  return om;
}

// Graph (r_a, r_b) of the slow manifold over (u2, v2), truncated at the given
// order in mu (0 = critical manifold, 1 = with the omega corrections).
template <typename Scalar>
ReducedStateT<Scalar> slow_manifold_graph(const ReducedStateT<Scalar>& x, double eta2, double mu,
                                          const ModelParams& p, int order = 1) {
  ReducedStateT<Scalar> r;
  r[0] = phi(x[kV2]);
  r[1] = phi(Scalar(-x[kU2])) / p.gamma;
  if (order >= 1) r += mu * omega_corrections(x, eta2, p);
  return r;
}

// Callable form of slow_manifold_graph with a fixed truncation order.
struct SlowManifoldGraph {
  int order = 1;
  ModelParams params;

  Eigen::Vector2d operator()(double u2, double v2, double eta2, double mu) const {
    return slow_manifold_graph(ReducedState(u2, v2), eta2, mu, params, order);
  }
};

// Norm of the invariance defect of the truncated graph under the K2 field.
double slow_manifold_residual(const ReducedState& x, double eta2, double mu, const ModelParams& p,
                              int order = 1);

// Planar reduced system on the first-order slow manifold (O(mu^2) dropped).
template <typename Scalar>
ReducedStateT<Scalar> reduced_field(const ReducedStateT<Scalar>& x, double sigma, double mu,
                                    const ModelParams& p) {
  using std::exp;
  const Scalar& u = x[kU2];
  const Scalar& v = x[kV2];
  const ReducedStateT<Scalar> om = omega_corrections(x, sigma, p);
  ReducedStateT<Scalar> dx;
  dx[0] = g_a(phi(v), Scalar(sigma * u), p) + mu * p.xi_a * exp(-sigma * u) * om[0];
  dx[1] = g_b(Scalar(phi(Scalar(-u)) / p.gamma), Scalar(sigma * v), p) +
          mu * p.delta * p.xi_b * exp(-sigma * v) * om[1];
  return dx;
}

Eigen::Matrix2d reduced_jacobian(const ReducedState& x, double sigma, double mu,
                                 const ModelParams& p);

// First integral of the mu = sigma = 0 reduced flow.
double hamiltonian(const ReducedState& x, const ModelParams& p);

ReducedState q2_equilibrium(const ModelParams& p);
ReducedState q2_continued(const ModelParams& p, double sigma, double mu);

double trace_at_equilibrium(const ModelParams& p, double sigma, double mu);
double det_at_equilibrium(const ModelParams& p, double sigma, double mu);
double trace_asymptotic(const ModelParams& p, double sigma, double mu);

inline constexpr double kDefaultSigma0 = 0.05;
inline constexpr double kDefaultMu0 = 1.0;

// Root in mu of the trace at the continued equilibrium, for fixed sigma.
double mu_hopf(const ModelParams& p, double sigma, double sigma0 = kDefaultSigma0);
// d mu_hopf / d sigma at sigma = 0, closed form.
double mu_hopf_slope(const ModelParams& p);

double alpha(const ModelParams& p);

enum class RayClass { HopfPossible, HopfImpossible };
std::string_view to_string(RayClass c);
// Classification of the ray mu = c sigma.
RayClass classify_ray(double c, const ModelParams& p);

struct HopfData {
  double trace;
  double det;
  std::optional<double> mu_hopf;
  double alpha;
};

HopfData hopf_data(const ModelParams& p, double sigma, double mu);

}  // namespace grnsp
