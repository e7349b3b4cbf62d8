#pragma once

#include <cmath>

#include <Eigen/Core>

#include "grnsp/errors.hpp"
#include "grnsp/numeric.hpp"
#include "grnsp/params.hpp"

namespace grnsp {

// Logistic sigmoid e^x/(1+e^x), evaluated without overflow.
template <typename Scalar>
Scalar phi(const Scalar& x) {
  using std::exp;
  if (value_of(x) >= 0) {
    const Scalar e = exp(-x);
    return Scalar(1) / (Scalar(1) + e);
  }
  const Scalar e = exp(x);
  return e / (Scalar(1) + e);
}

inline double phi_prime(double x) {
  const double f = phi(x);
  return f * (1 - f);
}

// ln(1 + e^x) without overflow.
inline double softplus(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

namespace detail {

// p^n/(p^n+theta^n) for the increasing (sign=+1) or decreasing (sign=-1)
// branch. Switches to the log form once |n ln(p/theta)| > 30.
template <typename Scalar>
Scalar hill(const Scalar& p, double theta, double n, int sign) {
  using std::log;
  if (value_of(p) <= 0) return Scalar(sign > 0 ? 0.0 : 1.0);
  // Logistic form of (p/theta)^n / (1 + (p/theta)^n); never overflows.
  const Scalar x = n * log(p / theta);
  return sign > 0 ? phi(Scalar(x)) : phi(Scalar(-x));
}

// d/dp of the increasing branch, n h (1-h)/p.
inline double hill_plus_slope(double p, double n) {
  if (p <= 0) return 0;
  const double h = hill(p, 1.0, n, +1);
  return n * h * (1 - h) / p;
}

}  // namespace detail

double hill_plus(double p, double theta, double n);
double hill_minus(double p, double theta, double n);

template <typename Scalar>
State4T<Scalar> full_vector_field(const State4T<Scalar>& s, const ModelParams& p) {
  if (!(p.sigma > 0)) throw DomainError("full_vector_field: sigma must be > 0");
  const double n = 1 / p.sigma;
  State4T<Scalar> ds;
  ds[kRa] = detail::hill(s[kPb], 1.0, n, +1) - s[kRa];
  ds[kRb] = detail::hill(s[kPa], 1.0, n, -1) - p.gamma * s[kRb];
  ds[kPa] = p.eps * (p.xi_a * s[kRa] - s[kPa]);
  ds[kPb] = p.eps * p.delta * (p.xi_b * s[kRb] - s[kPb]);
  return ds;
}

Eigen::Matrix4d full_jacobian(const State4& s, const ModelParams& p);

// Protein-only system with the mRNA variables slaved.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> qssr_vector_field(const Eigen::Matrix<Scalar, 2, 1>& x,
                                              const ModelParams& p) {
  if (!(p.sigma > 0)) throw DomainError("qssr_vector_field: sigma must be > 0");
  const double n = 1 / p.sigma;
  Eigen::Matrix<Scalar, 2, 1> dx;
  dx[0] = p.xi_a * detail::hill(x[1], 1.0, n, +1) - x[0];
  dx[1] = p.delta * (p.xi_b / p.gamma * detail::hill(x[0], 1.0, n, -1) - x[1]);
  return dx;
}

Eigen::Matrix2d qssr_jacobian(const Eigen::Vector2d& x, const ModelParams& p);

struct QssrPoint {
  double p_a, p_b;
  double r_a, r_b;

  State4 state() const { return {r_a, r_b, p_a, p_b}; }
};

QssrPoint make_qssr_point(double p_a, double p_b, const ModelParams& p);

ModelParams normalize_parameters(const RawParams& r);

// Unscaled right-hand side, in the original time and concentrations.
State4 raw_vector_field(const State4& s, const RawParams& r);

// Maps between raw and scaled states for the rescaling in normalize_parameters.
State4 raw_to_scaled(const State4& raw, const RawParams& r);
State4 scaled_to_raw(const State4& scaled, const RawParams& r);
// Scaled time corresponding to raw time t.
double raw_to_scaled_time(double t, const RawParams& r);

// Lie derivative of r_a - phi(ln(p_b)/sigma) along the full field at the
// slaved point with p_b = 1.
double lie_derivative_defect(double p_a, const ModelParams& p);

}  // namespace grnsp
