#include "grnsp/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "grnsp/core_model.hpp"
#include "grnsp/equilibria.hpp"
#include "grnsp/pwl.hpp"
#include "grnsp/reduction.hpp"

namespace grnsp {

namespace {

struct FullSystem {
  const ModelParams& p;
  State4 rhs(const State4& x) const { return full_vector_field(x, p); }
  Eigen::Matrix4d jacobian(const State4& x) const { return full_jacobian(x, p); }
};

struct QssrSystem {
  const ModelParams& p;
  Eigen::Vector2d rhs(const Eigen::Vector2d& x) const { return qssr_vector_field(x, p); }
  Eigen::Matrix2d jacobian(const Eigen::Vector2d& x) const { return qssr_jacobian(x, p); }
};

struct ReducedSystem {
  const ModelParams& p;
  double sigma, mu;
  Eigen::Vector2d rhs(const Eigen::Vector2d& x) const { return reduced_field(x, sigma, mu, p); }
  Eigen::Matrix2d jacobian(const Eigen::Vector2d& x) const {
    return reduced_jacobian(x, sigma, mu, p);
  }
};

// The switching-limit field with the indicators frozen for one region.
struct PwlRegionSystem {
  const ModelParams& p;
  bool b_high, a_low;
  Eigen::Vector2d rhs(const Eigen::Vector2d& x) const {
    return pwl_region_field(x, b_high, a_low, p);
  }
  Eigen::Matrix2d jacobian(const Eigen::Vector2d&) const {
    return Eigen::Vector2d(-1, -p.delta).asDiagonal();
  }
};

// Bisection on the dense output for a sign change of g over one step.
template <int N, class G>
double locate(const Eigen::Matrix<double, N, 1>& x_old, const typename Rodas4<N>::Step& st,
              const G& g) {
  double lo = 0, hi = 1;
  const bool neg_lo = g(x_old) < 0;
  for (int it = 0; it < 80 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((g(Rodas4<N>::interpolate(x_old, st, mid)) < 0) == neg_lo)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

// Records samples and section crossings while integrating sys.
template <int N, class System>
void run(const System& sys, Eigen::Matrix<double, N, 1> x, double t0, double t_end, double tol,
         const IntegrateOptions& opts, Trajectory& tr) {
  using Vec = Eigen::Matrix<double, N, 1>;
  StepControl ctl;
  ctl.atol = ctl.rtol = tol;
  ctl.dt_max = opts.dt_max;
  ctl.dt_initial = std::min(1e-3, 0.1 * (t_end - t0));
  const SystemKind kind = tr.system;
  auto sec = [kind](const Vec& y) { return section_value(kind, Eigen::VectorXd(y)); };
  long sample_index = 1;
  double next_sample = t0 + opts.sample_dt;
  if (tr.t.empty() || tr.t.back() < t0) {
    tr.t.push_back(t0);
    tr.x.push_back(x);
  }
  auto obs = [&](double t_old, const Vec& x_old, double t_new, const typename Rodas4<N>::Step& st) {
    const double dt = t_new - t_old;
    if (sec(x_old) < 0 && sec(st.x) >= 0) {
      const double s = locate<N>(x_old, st, sec);
      Vec xs = Rodas4<N>::interpolate(x_old, st, s);
      tr.events.push_back({EventKind::Section, t_old + s * dt, xs});
    }
    if (opts.sample_dt > 0) {
      while (next_sample <= t_new) {
        const double s = (next_sample - t_old) / dt;
        tr.t.push_back(next_sample);
        tr.x.push_back(Rodas4<N>::interpolate(x_old, st, s));
        next_sample = t0 + opts.sample_dt * double(++sample_index);
      }
    } else {
      tr.t.push_back(t_new);
      tr.x.push_back(st.x);
    }
    return true;
  };
  IntegratorStats stats;
  integrate_adaptive<N>(sys, x, t0, t_end, ctl, obs, &stats);
  if (tr.t.back() < t_end) {
    tr.t.push_back(t_end);
    tr.x.push_back(x);
  }
  tr.stats.accepted += stats.accepted;
  tr.stats.rejected += stats.rejected;
  tr.stats.max_error_ratio = std::max(tr.stats.max_error_ratio, stats.max_error_ratio);
  tr.terminal_residual = sys.rhs(x).cwiseAbs().maxCoeff();
}

void check_tol(double tol, double t_end) {
  if (!(tol >= 1e-12 && tol <= 1e-6)) throw DomainError("integrate: tol must lie in [1e-12, 1e-6]");
  if (!(t_end > 0)) throw DomainError("integrate: t_end must be > 0");
}

Trajectory run_pwl(const Eigen::Vector2d& s0, const ModelParams& p, double t_end, double tol,
                   const IntegrateOptions& opts) {
  Trajectory tr;
  tr.system = SystemKind::PwlSmoothed;
  Eigen::Vector2d x = s0;
  for (int k = 0; k < 2; ++k)
    if (std::abs(x[k] - 1) <= 1e-13) x[k] = 1;
  double t = 0;
  tr.t.push_back(0);
  tr.x.push_back(x);
  const double c = p.xi_b / p.gamma;
  StepControl ctl;
  ctl.atol = ctl.rtol = tol;
  ctl.dt_max = opts.dt_max;
  double next_sample = opts.sample_dt;
  for (int segment = 0; t < t_end; ++segment) {
    if (segment > 100000) throw NumericError("integrate(pwl-smoothed): too many switching events");
    const bool on_a = x[0] == 1, on_b = x[1] == 1;
    if (on_a && on_b) break;  // corner: the field is undefined
    bool b_high = x[1] > 1, a_low = x[0] < 1;
    if (on_b) b_high = c * (a_low ? 1 : 0) > 1;
    if (on_a) a_low = p.xi_a * (b_high ? 1 : 0) < 1;
    const PwlRegionSystem sys{p, b_high, a_low};
    struct Hit {
      bool found = false;
      double t = 0;
      Eigen::Vector2d x;
      int line = -1;
    } hit;
    auto obs = [&](double t_old, const Eigen::Vector2d& x_old, double t_new,
                   const Rodas4<2>::Step& st) {
      const double dt = t_new - t_old;
      double s_best = 2;
      int line = -1;
      for (int k = 0; k < 2; ++k) {
        const double a = x_old[k] - 1, b = st.x[k] - 1;
        if (a != 0 && (b == 0 || (a < 0) != (b < 0))) {
          const double s = locate<2>(x_old, st, [k](const Eigen::Vector2d& y) { return y[k] - 1; });
          if (s < s_best) {
            s_best = s;
            line = k;
          }
        }
      }
      const double t_stop = line >= 0 ? t_old + s_best * dt : t_new;
      if (opts.sample_dt > 0) {
        while (next_sample <= t_stop && next_sample < t_end) {
          tr.t.push_back(next_sample);
          tr.x.push_back(Rodas4<2>::interpolate(x_old, st, (next_sample - t_old) / dt));
          next_sample += opts.sample_dt;
        }
      }
      if (line >= 0) {
        hit = {true, t_stop, Rodas4<2>::interpolate(x_old, st, s_best), line};
        hit.x[line] = 1;
        return false;
      }
      if (opts.sample_dt <= 0) {
        tr.t.push_back(t_new);
        tr.x.push_back(st.x);
      }
      return true;
    };
    ctl.dt_initial = std::min(1e-3, t_end - t);
    IntegratorStats stats;
    Eigen::Vector2d y = x;
    const double t_reached = integrate_adaptive<2>(sys, y, t, t_end, ctl, obs, &stats);
    tr.stats.accepted += stats.accepted;
    tr.stats.rejected += stats.rejected;
    tr.stats.max_error_ratio = std::max(tr.stats.max_error_ratio, stats.max_error_ratio);
    if (hit.found) {
      for (int k = 0; k < 2; ++k)
        if (std::abs(hit.x[k] - 1) <= 1e-13) hit.x[k] = 1;
      t = hit.t;
      x = hit.x;
      tr.events.push_back({hit.line == 0 ? EventKind::SwitchA : EventKind::SwitchB, t, x});
      if (hit.line == 1 && a_low && !b_high)  // upward through p_b = 1
        tr.events.push_back({EventKind::Section, t, x});
      if (tr.t.back() < t) {
        tr.t.push_back(t);
        tr.x.push_back(x);
      }
    } else {
      t = t_reached;
      x = y;
      if (tr.t.back() < t) {
        tr.t.push_back(t);
        tr.x.push_back(x);
      }
      tr.terminal_residual = sys.rhs(x).cwiseAbs().maxCoeff();
    }
  }
  return tr;
}

}  // namespace

std::string_view to_string(SystemKind k) {
  switch (k) {
    case SystemKind::Full:
      return "full";
    case SystemKind::Qssr:
      return "qssr";
    case SystemKind::ReducedK2:
      return "reduced-k2";
    default:
      return "pwl-smoothed";
  }
}

SystemKind system_from_name(std::string_view name) {
  for (SystemKind k : {SystemKind::Full, SystemKind::Qssr, SystemKind::ReducedK2,
                       SystemKind::PwlSmoothed})
    if (to_string(k) == name) return k;
  throw DomainError("unknown system '" + std::string(name) + "'");
}

int state_dimension(SystemKind k) { return k == SystemKind::Full ? 4 : 2; }

double section_value(SystemKind system, const Eigen::VectorXd& x) {
  switch (system) {
    case SystemKind::Full:
      return x[kPb] - 1;
    case SystemKind::ReducedK2:
      return x[1];
    default:
      return x[1] - 1;
  }
}

Eigen::Vector2d protein_coordinates(SystemKind system, const Eigen::VectorXd& x, double sigma) {
  switch (system) {
    case SystemKind::Full:
      return {x[kPa], x[kPb]};
    case SystemKind::ReducedK2:
      return {std::exp(sigma * x[0]), std::exp(sigma * x[1])};
    default:
      return {x[0], x[1]};
  }
}

Trajectory integrate(SystemKind system, const Eigen::VectorXd& s0, const ModelParams& p,
                     double t_end, double tol, const IntegrateOptions& opts) {
  check_tol(tol, t_end);
  p.validate();
  if (s0.size() != state_dimension(system)) {
    std::ostringstream msg;
    msg << "integrate: " << to_string(system) << " expects " << state_dimension(system)
        << " initial values, got " << s0.size();
    throw DomainError(msg.str());
  }
  switch (system) {
    case SystemKind::Full: {
      p.require_smooth();
      if (!(s0.minCoeff() >= 0)) throw DomainError("integrate: initial state must be >= 0");
      Trajectory tr;
      tr.system = system;
      tr.sigma = p.sigma;
      run<4>(FullSystem{p}, State4(s0), 0, t_end, tol, opts, tr);
      return tr;
    }
    case SystemKind::Qssr: {
      p.require_smooth();
      if (!(s0.minCoeff() >= 0)) throw DomainError("integrate: initial state must be >= 0");
      Trajectory tr;
      tr.system = system;
      tr.sigma = p.sigma;
      run<2>(QssrSystem{p}, Eigen::Vector2d(s0), 0, t_end, tol, opts, tr);
      return tr;
    }
    case SystemKind::ReducedK2:
      return integrate_reduced(s0, p, p.sigma, p.sigma > 0 ? p.mu() : 0.0, t_end, tol, opts);
    default:
      if (!(s0.minCoeff() >= 0)) throw DomainError("integrate: initial state must be >= 0");
      return run_pwl(s0, p, t_end, tol, opts);
  }
}

Trajectory integrate_reduced(const Eigen::Vector2d& s0, const ModelParams& p, double sigma,
                             double mu, double t_end, double tol, const IntegrateOptions& opts) {
  check_tol(tol, t_end);
  if (!(sigma >= 0) || !(mu >= 0)) throw DomainError("integrate_reduced: sigma, mu must be >= 0");
  Trajectory tr;
  tr.system = SystemKind::ReducedK2;
  tr.sigma = sigma;
  run<2>(ReducedSystem{p, sigma, mu}, s0, 0, t_end, tol, opts, tr);
  return tr;
}

std::string_view to_string(AttractorVerdict::Kind k) {
  switch (k) {
    case AttractorVerdict::Kind::Equilibrium:
      return "equilibrium";
    case AttractorVerdict::Kind::LimitCycle:
      return "limit-cycle";
    default:
      return "undecided";
  }
}

AttractorVerdict classify_attractor(const Trajectory& tr, const ModelParams& p) {
  AttractorVerdict v;
  if (tr.t.size() < 2) return v;

  // Section returns, from recorded events or by interpolating samples.
  std::vector<double> ret_t, ret_val;
  for (const TrajectoryEvent& e : tr.events) {
    if (e.kind != EventKind::Section) continue;
    ret_t.push_back(e.t);
    ret_val.push_back(protein_coordinates(tr.system, e.x, tr.sigma)[0]);
  }
  if (ret_t.empty()) {
    for (std::size_t k = 1; k < tr.t.size(); ++k) {
      const double a = section_value(tr.system, tr.x[k - 1]), b = section_value(tr.system, tr.x[k]);
      if (a < 0 && b >= 0) {
        const double w = a / (a - b);
        ret_t.push_back(tr.t[k - 1] + w * (tr.t[k] - tr.t[k - 1]));
        const Eigen::VectorXd xs = (1 - w) * tr.x[k - 1] + w * tr.x[k];
        ret_val.push_back(protein_coordinates(tr.system, xs, tr.sigma)[0]);
      }
    }
  }
  v.section_returns = static_cast<int>(ret_t.size());

  double residual = tr.terminal_residual;
  if (!std::isfinite(residual)) {
    const std::size_t n = tr.t.size();
    residual = (tr.x[n - 1] - tr.x[n - 2]).cwiseAbs().maxCoeff() / (tr.t[n - 1] - tr.t[n - 2]);
  }
  v.terminal_residual = residual;

  if (v.section_returns >= kMinSectionReturns) {
    const std::size_t n = ret_t.size();
    double spread = 0;
    for (std::size_t k = n - 3; k < n; ++k) spread = std::max(spread, std::abs(ret_val[k] - ret_val[k - 1]));
    v.return_spread = spread;
    v.period = (ret_t[n - 1] - ret_t[n - 3]) / 2;
    Eigen::Vector2d lo = Eigen::Vector2d::Constant(1e300), hi = -lo;
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
      if (tr.t[k] < ret_t[n - 2] || tr.t[k] > ret_t[n - 1]) continue;
      const Eigen::Vector2d q = protein_coordinates(tr.system, tr.x[k], tr.sigma);
      lo = lo.cwiseMin(q);
      hi = hi.cwiseMax(q);
    }
    v.amplitude = hi - lo;
    if (spread <= kCycleReturnTol && v.amplitude.minCoeff() > kCycleMinAmplitude) {
      v.kind = AttractorVerdict::Kind::LimitCycle;
      return v;
    }
  }
  if (residual < kEquilibriumResidual) {
    v.kind = AttractorVerdict::Kind::Equilibrium;
    const Eigen::VectorXd& xe = tr.x.back();
    if ((tr.system == SystemKind::Full || tr.system == SystemKind::Qssr) && p.sigma > 0) {
      const Equilibrium4 q = solve_equilibrium(p);
      v.terminal_distance = tr.system == SystemKind::Full
                                ? (xe - q.state).cwiseAbs().maxCoeff()
                                : (xe - q.state.tail<2>()).cwiseAbs().maxCoeff();
    }
  }
  return v;
}

DeviationSeries qssr_deviation(const Trajectory& tr, const ModelParams& p) {
  if (tr.system != SystemKind::Full) throw DomainError("qssr_deviation: requires a full-system trajectory");
  p.require_smooth();
  const double n = 1 / p.sigma;
  DeviationSeries d;
  for (std::size_t k = 0; k < tr.t.size(); ++k) {
    const Eigen::VectorXd& x = tr.x[k];
    d.t.push_back(tr.t[k]);
    d.dev_a.push_back(std::abs(x[kRa] - detail::hill(x[kPb], 1.0, n, +1)));
    d.dev_b.push_back(std::abs(x[kRb] - detail::hill(x[kPa], 1.0, n, -1) / p.gamma));
    d.p_a.push_back(x[kPa]);
    d.p_b.push_back(x[kPb]);
  }
  return d;
}

double transient_cutoff(const ModelParams& p) { return 5 / std::min(1.0, p.gamma); }

DeviationPeak max_deviation(const DeviationSeries& d, double t_cut) {
  DeviationPeak peak;
  for (std::size_t k = 0; k < d.t.size(); ++k) {
    if (d.t[k] < t_cut || d.dev_a[k] <= peak.value) continue;
    peak = {d.dev_a[k], d.t[k], d.p_a[k], d.p_b[k]};
  }
  return peak;
}

}  // namespace grnsp
