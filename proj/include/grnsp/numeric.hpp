#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Core>
#include <unsupported/Eigen/AutoDiff>

#include "grnsp/errors.hpp"

namespace grnsp {

inline double value_of(double x) { return x; }

template <typename Derivative>
double value_of(const Eigen::AutoDiffScalar<Derivative>& x) {
  return x.value();
}

// Central differences, step h_rel * max(1, |x_j|) per coordinate.
template <typename F, typename Vec>
Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic> fd_jacobian(const F& f, const Vec& x,
                                                                  double h_rel = 1e-6) {
  const auto f0 = f(x);
  const Eigen::Index m = f0.size(), n = x.size();
  Eigen::MatrixXd jac(m, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double h = h_rel * std::max(1.0, std::abs(x[j]));
    Vec xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    jac.col(j) = (f(xp) - f(xm)) / (2 * h);
  }
  return jac;
}

// Jacobian by forward-mode AutoDiff; f must be templated on the scalar.
template <int N, typename F>
Eigen::Matrix<double, N, N> autodiff_jacobian(const F& f, const Eigen::Matrix<double, N, 1>& x) {
  using AD = Eigen::AutoDiffScalar<Eigen::Matrix<double, N, 1>>;
  Eigen::Matrix<AD, N, 1> xa;
  for (int i = 0; i < N; ++i) xa[i] = AD(x[i], N, i);
  const Eigen::Matrix<AD, N, 1> fa = f(xa);
  Eigen::Matrix<double, N, N> jac;
  for (int i = 0; i < N; ++i) jac.row(i) = fa[i].derivatives().transpose();
  return jac;
}

// Bisection on a sign-changing f over [lo, hi] until the bracket is narrower
// than width. Returns the midpoint.
template <typename F>
double bisect(const F& f, double lo, double hi, double width) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0) return lo;
  if (fhi == 0) return hi;
  if ((flo > 0) == (fhi > 0)) throw NumericError("bisect: root not bracketed");
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Illinois variant of regula falsi. Stops when the bracket is below xtol or
// 200 iterations have run.
template <typename F>
double illinois(const F& f, double a, double b, double xtol) {
  double fa = f(a), fb = f(b);
  if (fa == 0) return a;
  if (fb == 0) return b;
  if ((fa > 0) == (fb > 0)) throw NumericError("illinois: root not bracketed");
  int side = 0;
  for (int it = 0; it < 200; ++it) {
    const double c = (a * fb - b * fa) / (fb - fa);
    const double fc = f(c);
    if (fc == 0) return c;
    if ((fc > 0) == (fb > 0)) {
      b = c;
      fb = fc;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = c;
      fa = fc;
      if (side == 1) fb *= 0.5;
      side = 1;
    }
    if (std::abs(b - a) <= xtol * std::max(1.0, std::abs(c))) return c;
  }
  throw NumericError("illinois: no convergence in 200 iterations");
}

}  // namespace grnsp
