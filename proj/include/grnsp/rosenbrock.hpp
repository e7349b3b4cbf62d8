#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "grnsp/errors.hpp"

namespace grnsp {

// Six-stage, order-4 Rosenbrock scheme (Hairer-Wanner RODAS coefficients)
// for autonomous systems x' = f(x), with an embedded order-3 error estimate
// and a continuous extension of order 3.
//
// System must provide
//   Vec rhs(const Vec&) const;
//   Mat jacobian(const Vec&) const;
template <int N>
class Rodas4 {
 public:
  using Vec = Eigen::Matrix<double, N, 1>;
  using Mat = Eigen::Matrix<double, N, N>;

  struct Step {
    Vec x;      // new state
    Vec err;    // embedded error estimate
    Vec cont3;  // dense-output coefficients
    Vec cont4;
  };

  template <class System>
  static Step step(const System& sys, const Vec& x, double dt) {
    const Mat jac = sys.jacobian(x);
    const Mat m = Mat::Identity(x.size(), x.size()) / (kGamma * dt) - jac;
    const Eigen::PartialPivLU<Mat> lu(m);
    const double h = 1 / dt;

    const Vec g1 = lu.solve(sys.rhs(x));
    const Vec g2 = lu.solve(sys.rhs(Vec(x + kA21 * g1)) + h * kC21 * g1);
    const Vec g3 =
        lu.solve(sys.rhs(Vec(x + kA31 * g1 + kA32 * g2)) + h * (kC31 * g1 + kC32 * g2));
    const Vec g4 = lu.solve(sys.rhs(Vec(x + kA41 * g1 + kA42 * g2 + kA43 * g3)) +
                            h * (kC41 * g1 + kC42 * g2 + kC43 * g3));
    const Vec x5 = x + kA51 * g1 + kA52 * g2 + kA53 * g3 + kA54 * g4;
    const Vec g5 = lu.solve(sys.rhs(x5) + h * (kC51 * g1 + kC52 * g2 + kC53 * g3 + kC54 * g4));
    const Vec x6 = x5 + g5;
    Step out;
    out.err = lu.solve(sys.rhs(x6) +
                       h * (kC61 * g1 + kC62 * g2 + kC63 * g3 + kC64 * g4 + kC65 * g5));
    out.x = x6 + out.err;
    out.cont3 = kD21 * g1 + kD22 * g2 + kD23 * g3 + kD24 * g4 + kD25 * g5;
    out.cont4 = kD31 * g1 + kD32 * g2 + kD33 * g3 + kD34 * g4 + kD35 * g5;
    return out;
  }

  // State at fraction s in [0,1] of an accepted step from x_old.
  static Vec interpolate(const Vec& x_old, const Step& st, double s) {
    return x_old * (1 - s) + s * (st.x + (1 - s) * (st.cont3 + s * st.cont4));
  }

 private:
  static constexpr double kGamma = 0.25;
  static constexpr double kC21 = -5.6688;
  static constexpr double kC31 = -2.430093356833875, kC32 = -0.2063599157091915;
  static constexpr double kC41 = -0.1073529058151375, kC42 = -9.594562251023355,
                          kC43 = -20.47028614809616;
  static constexpr double kC51 = 7.496443313967647, kC52 = -10.24680431464352,
                          kC53 = -33.99990352819905, kC54 = 11.70890893206160;
  static constexpr double kC61 = 8.083246795921522, kC62 = -7.981132988064893,
                          kC63 = -31.52159432874371, kC64 = 16.31930543123136,
                          kC65 = -6.058818238834054;
  static constexpr double kA21 = 1.544;
  static constexpr double kA31 = 0.9466785280815826, kA32 = 0.2557011698983284;
  static constexpr double kA41 = 3.314825187068521, kA42 = 2.896124015972201,
                          kA43 = 0.9986419139977817;
  static constexpr double kA51 = 1.221224509226641, kA52 = 6.019134481288629,
                          kA53 = 12.53708332932087, kA54 = -0.6878860361058950;
  static constexpr double kD21 = 10.12623508344586, kD22 = -7.487995877610167,
                          kD23 = -34.80091861555747, kD24 = -7.992771707568823,
                          kD25 = 1.025137723295662;
  static constexpr double kD31 = -0.6762803392801253, kD32 = 6.087714651680015,
                          kD33 = 16.43084320892478, kD34 = 24.76722511418386,
                          kD35 = -6.594389125716872;
};

struct StepControl {
  double atol = 1e-9;
  double rtol = 1e-9;
  double dt_initial = 1e-4;
  double dt_max = 1e300;
  long max_steps = 50'000'000;
};

struct IntegratorStats {
  long accepted = 0;
  long rejected = 0;
  double max_error_ratio = 0;  // largest normalized error among accepted steps
};

// Adaptive driver. After every accepted step the observer is called as
//   bool obs(double t_old, const Vec& x_old, double t_new, const typename Rodas4<N>::Step&)
// and integration stops early when it returns false. Returns the final time.
template <int N, class System, class Observer>
double integrate_adaptive(const System& sys, Eigen::Matrix<double, N, 1>& x, double t0,
                          double t_end, const StepControl& ctl, Observer&& obs,
                          IntegratorStats* stats = nullptr) {
  using Method = Rodas4<N>;
  using Vec = typename Method::Vec;
  IntegratorStats local;
  IntegratorStats& st = stats ? *stats : local;
  double t = t0;
  double dt = std::min({ctl.dt_initial, ctl.dt_max, t_end - t0});
  for (long n = 0; t < t_end; ++n) {
    if (n >= ctl.max_steps) throw NumericError("integrator: step budget exhausted");
    const bool last = t + dt >= t_end;
    if (last) dt = t_end - t;
    const typename Method::Step s = Method::step(sys, x, dt);
    double err = 0;
    bool finite = s.x.allFinite() && s.err.allFinite();
    if (finite) {
      const Vec scale =
          (ctl.atol + ctl.rtol * x.cwiseAbs().cwiseMax(s.x.cwiseAbs()).array()).matrix();
      err = (s.err.cwiseAbs().array() / scale.array()).maxCoeff();
    }
    if (!finite || err > 1) {
      ++st.rejected;
      dt *= finite ? std::max(0.2, 0.9 * std::pow(err, -0.25)) : 0.2;
      if (dt < 1e-14 * std::max(1.0, std::abs(t))) {
        std::ostringstream msg;
        msg << "integrator: " << (finite ? "step size underflow" : "non-finite state")
            << " at t = " << t << ", x = ["
            << x.transpose() << "]";
        throw NumericError(msg.str());
      }
      continue;
    }
    ++st.accepted;
    st.max_error_ratio = std::max(st.max_error_ratio, err);
    const double t_new = last ? t_end : t + dt;
    const Vec x_old = x;
    x = s.x;
    const bool go_on = obs(t, x_old, t_new, s);
    t = t_new;
    if (!go_on) break;
    const double fac = err > 0 ? std::clamp(0.9 * std::pow(err, -0.25), 0.2, 5.0) : 5.0;
    dt = std::min(dt * fac, ctl.dt_max);
  }
  return t;
}

}  // namespace grnsp
