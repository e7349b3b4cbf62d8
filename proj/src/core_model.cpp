#include "grnsp/core_model.hpp"

#include <string>

namespace grnsp {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0) || !std::isfinite(v))
    throw DomainError(std::string(name) + " must be finite and > 0");
}

void check_hill_args(double p, double theta, double n) {
  if (!(p >= 0) || !std::isfinite(p)) throw DomainError("hill: p must be finite and >= 0");
  require_positive(theta, "hill: theta");
  require_positive(n, "hill: n");
}

}  // namespace

void RawParams::validate() const {
  require_positive(m_a, "m_a");
  require_positive(m_b, "m_b");
  require_positive(gamma_a, "gamma_a");
  require_positive(gamma_b, "gamma_b");
  require_positive(k_a, "k_a");
  require_positive(k_b, "k_b");
  require_positive(delta_a, "delta_a");
  require_positive(delta_b, "delta_b");
  require_positive(theta_a, "theta_a");
  require_positive(theta_b, "theta_b");
  require_positive(eps_raw, "eps_raw");
  if (!(n >= 1) || !std::isfinite(n)) throw DomainError("n must be finite and >= 1");
}

ModelParams ModelParams::with_mu(double gamma, double delta, double xi_a, double xi_b,
                                 double sigma, double mu) {
  ModelParams p{gamma, delta, xi_a, xi_b, sigma, mu * sigma};
  p.validate();
  return p;
}

double ModelParams::mu() const {
  if (!(sigma > 0)) throw DomainError("mu is undefined for sigma = 0");
  return eps / sigma;
}

void ModelParams::validate() const {
  require_positive(gamma, "gamma");
  require_positive(delta, "delta");
  require_positive(xi_a, "xi_a");
  require_positive(xi_b, "xi_b");
  if (!(sigma >= 0) || !std::isfinite(sigma)) throw DomainError("sigma must be finite and >= 0");
  if (!(eps >= 0) || !std::isfinite(eps)) throw DomainError("eps must be finite and >= 0");
}

void ModelParams::require_smooth() const {
  validate();
  if (!(sigma > 0)) throw DomainError("sigma must be > 0 for the smooth system");
}

double hill_plus(double p, double theta, double n) {
  check_hill_args(p, theta, n);
  return detail::hill(p, theta, n, +1);
}

double hill_minus(double p, double theta, double n) {
  check_hill_args(p, theta, n);
  return detail::hill(p, theta, n, -1);
}

Eigen::Matrix4d full_jacobian(const State4& s, const ModelParams& p) {
  if (!(p.sigma > 0)) throw DomainError("full_jacobian: sigma must be > 0");
  const double n = 1 / p.sigma;
  Eigen::Matrix4d jac = Eigen::Matrix4d::Zero();
  jac(kRa, kRa) = -1;
  jac(kRa, kPb) = detail::hill_plus_slope(s[kPb], n);
  jac(kRb, kRb) = -p.gamma;
  jac(kRb, kPa) = -detail::hill_plus_slope(s[kPa], n);
  jac(kPa, kRa) = p.eps * p.xi_a;
  jac(kPa, kPa) = -p.eps;
  jac(kPb, kRb) = p.eps * p.delta * p.xi_b;
  jac(kPb, kPb) = -p.eps * p.delta;
  return jac;
}

Eigen::Matrix2d qssr_jacobian(const Eigen::Vector2d& x, const ModelParams& p) {
  if (!(p.sigma > 0)) throw DomainError("qssr_jacobian: sigma must be > 0");
  const double n = 1 / p.sigma;
  Eigen::Matrix2d jac;
  jac << -1, p.xi_a * detail::hill_plus_slope(x[1], n),
      -p.delta * p.xi_b / p.gamma * detail::hill_plus_slope(x[0], n), -p.delta;
  return jac;
}

QssrPoint make_qssr_point(double p_a, double p_b, const ModelParams& p) {
  p.require_smooth();
  if (!(p_a >= 0) || !(p_b >= 0)) throw DomainError("make_qssr_point: p_a, p_b must be >= 0");
  const double n = 1 / p.sigma;
  return {p_a, p_b, detail::hill(p_b, 1.0, n, +1), detail::hill(p_a, 1.0, n, -1) / p.gamma};
}

ModelParams normalize_parameters(const RawParams& r) {
  r.validate();
  ModelParams p;
  p.gamma = r.gamma_b / r.gamma_a;
  p.delta = r.delta_b / r.delta_a;
  p.xi_a = r.k_a * r.m_a / (r.gamma_a * r.delta_a * r.theta_a);
  p.xi_b = r.k_b * r.m_b / (r.gamma_a * r.delta_b * r.theta_b);
  p.eps = r.delta_a / r.gamma_a * r.eps_raw;
  p.sigma = 1 / r.n;
  p.validate();
  return p;
}

State4 raw_vector_field(const State4& s, const RawParams& r) {
  State4 ds;
  ds[kRa] = r.m_a * detail::hill(s[kPb], r.theta_b, r.n, +1) - r.gamma_a * s[kRa];
  ds[kRb] = r.m_b * detail::hill(s[kPa], r.theta_a, r.n, -1) - r.gamma_b * s[kRb];
  ds[kPa] = r.eps_raw * (r.k_a * s[kRa] - r.delta_a * s[kPa]);
  ds[kPb] = r.eps_raw * (r.k_b * s[kRb] - r.delta_b * s[kPb]);
  return ds;
}

State4 raw_to_scaled(const State4& raw, const RawParams& r) {
  return {raw[kRa] * r.gamma_a / r.m_a, raw[kRb] * r.gamma_a / r.m_b, raw[kPa] / r.theta_a,
          raw[kPb] / r.theta_b};
}

State4 scaled_to_raw(const State4& scaled, const RawParams& r) {
  return {scaled[kRa] * r.m_a / r.gamma_a, scaled[kRb] * r.m_b / r.gamma_a,
          scaled[kPa] * r.theta_a, scaled[kPb] * r.theta_b};
}

double raw_to_scaled_time(double t, const RawParams& r) { return r.gamma_a * t; }

double lie_derivative_defect(double p_a, const ModelParams& p) {
  p.require_smooth();
  if (!(p_a > 1)) throw DomainError("lie_derivative_defect: requires p_a > 1");
  const QssrPoint q = make_qssr_point(p_a, 1.0, p);
  const State4 f = full_vector_field(q.state(), p);
  // grad of r_a - phi(ln(p_b)/sigma) is (1, 0, 0, -phi'(ln p_b/sigma)/(sigma p_b))
  const double dg_dpb = -phi_prime(std::log(q.p_b) / p.sigma) / (p.sigma * q.p_b);
  return f[kRa] + dg_dpb * f[kPb];
}

}  // namespace grnsp
