#include "grnsp/reduction.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "grnsp/numeric.hpp"

namespace grnsp {

namespace {

void require_hopf_region(const ModelParams& p, const char* who) {
  p.validate();
  if (!(p.xi_a > 1) || !(p.xi_b > p.gamma)) {
    std::ostringstream msg;
    msg << who << ": requires xi_a > 1 and xi_b > gamma (got xi_a = " << p.xi_a
        << ", xi_b = " << p.xi_b << ", gamma = " << p.gamma << ")";
    throw DomainError(msg.str());
  }
}

}  // namespace

double slow_manifold_residual(const ReducedState& x, double eta2, double mu, const ModelParams& p,
                              int order) {
  auto graph = [&](const auto& y) { return slow_manifold_graph(y, eta2, mu, p, order); };
  const Eigen::Matrix2d dg = autodiff_jacobian<2>(graph, x);
  const Eigen::Vector2d r = graph(x);
  Eigen::Vector2d fast, slow;
  fast << phi(x[kV2]) - r[0], phi(-x[kU2]) - p.gamma * r[1];
  slow << mu * g_a(r[0], eta2 * x[kU2], p), mu * g_b(r[1], eta2 * x[kV2], p);
  return (fast - dg * slow).norm();
}

Eigen::Matrix2d reduced_jacobian(const ReducedState& x, double sigma, double mu,
                                 const ModelParams& p) {
  return autodiff_jacobian<2>([&](const auto& y) { return reduced_field(y, sigma, mu, p); }, x);
}

double hamiltonian(const ReducedState& x, const ModelParams& p) {
  const double c = p.delta * p.xi_b / p.gamma;
  return c * softplus(x[kU2]) + p.xi_a * softplus(x[kV2]) - (c - p.delta) * x[kU2] - x[kV2];
}

ReducedState q2_equilibrium(const ModelParams& p) {
  require_hopf_region(p, "q2_equilibrium");
  const ReducedState q(std::log(p.xi_b - p.gamma) - std::log(p.gamma), -std::log(p.xi_a - 1));
  if (!q.allFinite()) throw DomainError("q2_equilibrium: coordinates diverge");
  return q;
}

ReducedState q2_continued(const ModelParams& p, double sigma, double mu) {
  ReducedState x = q2_equilibrium(p);
  if (!(sigma >= 0) || !(mu >= 0)) throw DomainError("q2_continued: requires sigma, mu >= 0");
  auto field = [&](const ReducedState& y) -> ReducedState { return reduced_field(y, sigma, mu, p); };
  ReducedState fx = field(x);
  for (int it = 0; it < 50; ++it) {
    if (fx.cwiseAbs().maxCoeff() <= 1e-13) return x;
    const Eigen::Matrix2d jac = fd_jacobian(field, x, 1e-7);
    const ReducedState step = jac.partialPivLu().solve(-fx);
    double lambda = 1;
    ReducedState trial = x + step, f_trial = field(trial);
    for (int k = 0; k < 30 && !(f_trial.norm() < fx.norm()); ++k) {
      lambda *= 0.5;
      trial = x + lambda * step;
      f_trial = field(trial);
    }
    x = trial;
    fx = f_trial;
    if (lambda * step.norm() <= 1e-15 * std::max(1.0, x.norm())) break;
  }
  if (fx.cwiseAbs().maxCoeff() <= 1e-12) return x;
  std::ostringstream msg;
  msg << "q2_continued: Newton did not converge in 50 iterations (sigma = " << sigma
      << ", mu = " << mu << ", residual " << fx.norm() << ")";
  throw NumericError(msg.str());
}

double trace_at_equilibrium(const ModelParams& p, double sigma, double mu) {
  const ReducedState q = q2_continued(p, sigma, mu);
  auto field = [&](const ReducedState& y) -> ReducedState { return reduced_field(y, sigma, mu, p); };
  return fd_jacobian(field, q).trace();
}

double det_at_equilibrium(const ModelParams& p, double sigma, double mu) {
  const ReducedState q = q2_continued(p, sigma, mu);
  auto field = [&](const ReducedState& y) -> ReducedState { return reduced_field(y, sigma, mu, p); };
  return fd_jacobian(field, q).determinant();
}

double trace_asymptotic(const ModelParams& p, double sigma, double mu) {
  require_hopf_region(p, "trace_asymptotic");
  const double coef = (p.xi_a - 1) * (p.xi_b - p.gamma) / (p.xi_a * p.xi_b) * p.delta *
                      (1 + p.gamma) / p.gamma;
  return -sigma * (1 + p.delta) + mu * coef;
}

double mu_hopf(const ModelParams& p, double sigma, double sigma0) {
  require_hopf_region(p, "mu_hopf");
  if (!(sigma >= 0) || sigma > sigma0) {
    std::ostringstream msg;
    msg << "mu_hopf: sigma = " << sigma << " outside [0, " << sigma0 << "]";
    throw DomainError(msg.str());
  }
  if (sigma == 0) return 0;
  auto tr = [&](double mu) { return trace_at_equilibrium(p, sigma, mu); };
  if (!(tr(0) < 0)) throw NumericError("mu_hopf: trace is not negative at mu = 0");
  double hi = std::min(2 * mu_hopf_slope(p) * sigma, kDefaultMu0);
  while (!(tr(hi) > 0)) {
    if (hi >= kDefaultMu0) throw NumericError("mu_hopf: root not bracketed in (0, mu0]");
    hi = std::min(2 * hi, kDefaultMu0);
  }
  return illinois(tr, 0.0, hi, 1e-12);
}

double mu_hopf_slope(const ModelParams& p) {
  require_hopf_region(p, "mu_hopf_slope");
  return p.xi_a * p.xi_b / ((p.xi_a - 1) * (p.xi_b - p.gamma)) * alpha(p);
}

double alpha(const ModelParams& p) {
  return p.gamma * (1 + p.delta) / (p.delta * (1 + p.gamma));
}

std::string_view to_string(RayClass c) {
  return c == RayClass::HopfPossible ? "hopf-possible" : "hopf-impossible";
}

RayClass classify_ray(double c, const ModelParams& p) {
  if (!(c > 0)) throw DomainError("classify_ray: requires c > 0");
  const double a = alpha(p);
  if (std::abs(c - a) < 1e-12) throw DomainError("classify_ray: c is on the boundary ray c = alpha");
  return c > a ? RayClass::HopfPossible : RayClass::HopfImpossible;
}

HopfData hopf_data(const ModelParams& p, double sigma, double mu) {
  HopfData d{trace_at_equilibrium(p, sigma, mu), det_at_equilibrium(p, sigma, mu), std::nullopt,
             alpha(p)};
  if (sigma <= kDefaultSigma0) d.mu_hopf = mu_hopf(p, sigma);
  return d;
}

}  // namespace grnsp
