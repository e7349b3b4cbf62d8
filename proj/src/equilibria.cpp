#include "grnsp/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "grnsp/numeric.hpp"

namespace grnsp {

namespace {

constexpr double kMarginal = 1e-9;

double condition_slope(double r_a, const ModelParams& p) {
  const double n = 1 / p.sigma;
  const double p_a = p.xi_a * r_a;
  const double p_b = p.xi_b * detail::hill(p_a, 1.0, n, -1) / p.gamma;
  return 1 + p.xi_a * p.xi_b / p.gamma * detail::hill_plus_slope(p_a, n) *
                 detail::hill_plus_slope(p_b, n);
}

double bracket_hi(const ModelParams& p) { return 1 + 1 / p.xi_a; }

// Plain Newton from a warm start; empty when it leaves the bracket or stalls.
std::optional<double> newton_from(double r, const ModelParams& p) {
  const double hi = bracket_hi(p);
  for (int it = 0; it < 40; ++it) {
    const double f = equilibrium_condition(r, p);
    if (f == 0) return r;
    const double step = -f / condition_slope(r, p);
    r += step;
    if (!(r >= 0 && r <= hi)) return std::nullopt;
    if (std::abs(step) <= 1e-15 * std::max(1.0, r)) {
      // Near the switching lines the slope is large and F is only known to
      // slope * ulp, so judge the residual in units of r_a.
      const double fr = equilibrium_condition(r, p);
      if (std::abs(fr) <= 1e-13 * condition_slope(r, p)) return r;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

// Newton steps kept only while they reduce |F|.
double polish(double r, const ModelParams& p) {
  double f = equilibrium_condition(r, p);
  for (int it = 0; it < 4 && f != 0; ++it) {
    const double trial = r - f / condition_slope(r, p);
    const double ft = equilibrium_condition(trial, p);
    if (!(std::abs(ft) < std::abs(f))) break;
    r = trial;
    f = ft;
  }
  return r;
}

double root_from_guess(double guess, const ModelParams& p) {
  double lo = 0, hi = bracket_hi(p);
  double r = std::clamp(guess, lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double f = equilibrium_condition(r, p);
    if (f == 0) return r;
    (f < 0 ? lo : hi) = r;
    double next = r - f / condition_slope(r, p);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - r) <= 1e-15 * std::max(1.0, r) || hi - lo <= 1e-15) return polish(next, p);
    r = next;
  }
  return polish(r, p);
}

}  // namespace

std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::Stable:
      return "stable";
    case Stability::Unstable:
      return "unstable";
    default:
      return "marginal";
  }
}

double equilibrium_condition(double r_a, const ModelParams& p) {
  const double n = 1 / p.sigma;
  const double r_b = detail::hill(p.xi_a * r_a, 1.0, n, -1) / p.gamma;
  return r_a - detail::hill(p.xi_b * r_b, 1.0, n, +1);
}

double equilibrium_r_a(const ModelParams& p, std::optional<double> guess) {
  p.require_smooth();
  if (guess) return root_from_guess(*guess, p);
  auto f = [&](double r) { return equilibrium_condition(r, p); };
  return polish(bisect(f, 0.0, bracket_hi(p), 1e-14), p);
}

Eigen::Vector4cd sorted_eigenvalues(const Eigen::Matrix4d& jac) {
  Eigen::Vector4cd ev = Eigen::EigenSolver<Eigen::Matrix4d>(jac, false).eigenvalues();
  std::sort(ev.begin(), ev.end(), [](const std::complex<double>& a, const std::complex<double>& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  return ev;
}

Stability classify_stability(const Eigen::Vector4cd& ev) {
  const double re = ev[0].real();
  if (re > kMarginal) return Stability::Unstable;
  if (re < -kMarginal) return Stability::Stable;
  return Stability::Marginal;
}

Equilibrium4 equilibrium_from_r_a(double r_a, const ModelParams& p) {
  const double r_b = detail::hill(p.xi_a * r_a, 1.0, 1 / p.sigma, -1) / p.gamma;
  Equilibrium4 eq;
  eq.state << r_a, r_b, p.xi_a * r_a, p.xi_b * r_b;
  eq.params = p;
  eq.eigenvalues = sorted_eigenvalues(full_jacobian(eq.state, p));
  eq.stability = classify_stability(eq.eigenvalues);
  return eq;
}

Equilibrium4 solve_equilibrium(const ModelParams& p) {
  return equilibrium_from_r_a(equilibrium_r_a(p), p);
}

Eigen::Vector2d ParamPath::at(double s_value) const {
  if (map) return map(s_value);
  if (xi.empty()) throw DomainError("ParamPath: empty path");
  double sv = s_value;
  if (closed && period > 0) sv = s.front() + std::fmod(s_value - s.front(), period);
  if (closed && sv > s.back()) {
    const double w = (sv - s.back()) / (s.front() + period - s.back());
    return (1 - w) * xi.back() + w * xi.front();
  }
  auto it = std::upper_bound(s.begin(), s.end(), sv);
  if (it == s.begin()) return xi.front();
  if (it == s.end()) return xi.back();
  const std::size_t k = it - s.begin();
  const double w = (sv - s[k - 1]) / (s[k] - s[k - 1]);
  return (1 - w) * xi[k - 1] + w * xi[k];
}

ParamPath ParamPath::circle(const Eigen::Vector2d& center, double radius, int samples) {
  if (samples < 3 || !(radius > 0)) throw DomainError("ParamPath::circle: bad radius or sample count");
  ParamPath path;
  path.closed = true;
  path.period = 2 * std::numbers::pi;
  path.map = [center, radius](double a) {
    return Eigen::Vector2d(center + radius * Eigen::Vector2d(std::cos(a), std::sin(a)));
  };
  for (int k = 0; k < samples; ++k) {
    const double a = path.period * k / samples;
    path.s.push_back(a);
    path.xi.push_back(path.map(a));
  }
  return path;
}

ParamPath ParamPath::polyline(const std::vector<Eigen::Vector2d>& points) {
  if (points.empty()) throw DomainError("ParamPath::polyline: no points");
  ParamPath path;
  double len = 0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (k > 0) len += (points[k] - points[k - 1]).norm();
    path.s.push_back(len);
    path.xi.push_back(points[k]);
  }
  return path;
}

std::vector<ContinuationPoint> continue_along_path(const ParamPath& path, const ModelParams& p) {
  p.require_smooth();
  std::vector<ContinuationPoint> out;
  out.reserve(path.size());
  auto at = [&](double s) {
    ModelParams q = p;
    const Eigen::Vector2d xi = path.at(s);
    if (!(xi[0] > 0) || !(xi[1] > 0)) throw DomainError("continue_along_path: sample outside (0,inf)^2");
    q.xi_a = xi[0];
    q.xi_b = xi[1];
    return q;
  };
  double r = 0;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const double s_k = path.s[k];
    if (k == 0) {
      r = equilibrium_r_a(at(s_k));
    } else {
      // Reach s_k from s_{k-1}; a failed Newton solve halves the sub-step
      // (at most 10 times in a row), a successful one lets it grow back.
      const double full = s_k - path.s[k - 1];
      double s_prev = path.s[k - 1], h = full;
      int halvings = 0;
      while (s_prev < s_k) {
        const double s_next = std::min(s_prev + h, s_k);
        if (auto root = newton_from(r, at(s_next))) {
          r = *root;
          s_prev = s_next;
          halvings = 0;
          h = std::min(2 * h, full);
        } else {
          if (++halvings > 10) {
            std::ostringstream msg;
            msg << "continue_along_path: step failure near s = " << s_prev
                << " after 10 step halvings";
            throw NumericError(msg.str());
          }
          h *= 0.5;
        }
      }
    }
    const ModelParams q = at(s_k);
    out.push_back({s_k, Eigen::Vector2d(q.xi_a, q.xi_b), equilibrium_from_r_a(r, q)});
  }
  return out;
}

std::complex<double> critical_pair(const Eigen::Vector4cd& ev) {
  for (const auto& l : ev) {
    if (std::abs(l.imag()) > 1e-12 * std::max(1.0, std::abs(l))) {
      if (l.real() < ev[0].real() - 1e-12 * std::max(1.0, std::abs(ev[0])))
        break;  // a real eigenvalue lies to the right of every pair
      return {l.real(), std::abs(l.imag())};
    }
  }
  throw NumericError("not a pair: the rightmost eigenvalue is real");
}

HopfPoint detect_hopf(const ContinuationPoint& a, const ContinuationPoint& b,
                      const ParamPath& path, const ModelParams& p) {
  auto eval = [&](double s, double guess) {
    ModelParams q = p;
    const Eigen::Vector2d xi = path.at(s);
    q.xi_a = xi[0];
    q.xi_b = xi[1];
    return equilibrium_from_r_a(equilibrium_r_a(q, guess), q);
  };
  double lo = a.s, hi = b.s;
  double g_lo = critical_pair(a.eq.eigenvalues).real();
  const double g_hi = critical_pair(b.eq.eigenvalues).real();
  if ((g_lo > 0) == (g_hi > 0)) throw DomainError("detect_hopf: no sign change on the segment");
  double guess = a.eq.state[kRa];
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const Equilibrium4 eq = eval(mid, guess);
    const std::complex<double> pair = critical_pair(eq.eigenvalues);
    if (std::abs(pair.real()) <= 1e-9 || hi - lo <= 1e-15 * std::max(1.0, std::abs(mid))) {
      if (std::abs(pair.real()) > 1e-9) throw NumericError("detect_hopf: bisection stalled");
      return {path.at(mid), eq.state, pair.imag(), mid, eq.eigenvalues};
    }
    guess = eq.state[kRa];
    if ((pair.real() > 0) == (g_lo > 0)) {
      lo = mid;
      g_lo = pair.real();
    } else {
      hi = mid;
    }
  }
  throw NumericError("detect_hopf: no convergence");
}

std::vector<HopfPoint> find_hopf_points(const std::vector<ContinuationPoint>& run,
                                        const ParamPath& path, const ModelParams& p) {
  std::vector<HopfPoint> out;
  auto crossing = [&](const ContinuationPoint& a, const ContinuationPoint& b) {
    const double ra = a.eq.eigenvalues[0].real(), rb = b.eq.eigenvalues[0].real();
    if ((ra > 0) != (rb > 0)) out.push_back(detect_hopf(a, b, path, p));
  };
  for (std::size_t k = 1; k < run.size(); ++k) crossing(run[k - 1], run[k]);
  if (path.closed && run.size() > 1) {
    ContinuationPoint wrap = run.front();
    wrap.s += path.period;
    crossing(run.back(), wrap);
  }
  return out;
}

double critical_real_part(const Eigen::Vector2d& xi, const ModelParams& p) {
  ModelParams q = p;
  q.xi_a = xi[0];
  q.xi_b = xi[1];
  q.validate();
  return critical_pair(solve_equilibrium(q).eigenvalues).real();
}

std::vector<Eigen::Vector2d> trace_hopf_curve(const ModelParams& p, const HopfPoint& seed,
                                              const HopfCurveOptions& opts) {
  auto g = [&](const Eigen::Vector2d& x) { return critical_real_part(x, p); };
  auto grad = [&](const Eigen::Vector2d& x) {
    Eigen::Vector2d d;
    for (int j = 0; j < 2; ++j) {
      const double h = 1e-6 * std::max(1.0, std::abs(x[j]));
      Eigen::Vector2d xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      d[j] = (g(xp) - g(xm)) / (2 * h);
    }
    return d;
  };
  auto tangent = [](const Eigen::Vector2d& gr) { return Eigen::Vector2d(-gr[1], gr[0]).normalized(); };
  auto inside = [&](const Eigen::Vector2d& x) {
    return x[0] > 1 && x[1] > p.gamma && x[0] < opts.xi_a_max && x[1] < opts.xi_b_max;
  };

  const Eigen::Vector2d t0 = tangent(grad(seed.xi));
  std::vector<Eigen::Vector2d> branch[2];
  for (int side = 0; side < 2; ++side) {
    Eigen::Vector2d x = seed.xi;
    Eigen::Vector2d t = side == 0 ? t0 : Eigen::Vector2d(-t0);
    double h = opts.initial_step;
    int halvings = 0;
    while (static_cast<int>(branch[side].size()) < opts.max_points) {
      const Eigen::Vector2d pred = x + h * t;
      Eigen::Vector2d y = pred;
      bool converged = false, pair_lost = false;
      int iters = 0;
      try {
        for (; iters < 8; ++iters) {
          const double gy = g(y);
          const Eigen::Vector2d gr = grad(y);
          Eigen::Matrix2d jac;
          jac.row(0) = gr.transpose();
          jac.row(1) = t.transpose();
          const Eigen::Vector2d rhs(-gy, -t.dot(y - pred));
          const Eigen::Vector2d dy = jac.partialPivLu().solve(rhs);
          y += dy;
          if (!y.allFinite()) break;
          if (dy.norm() <= 1e-10 && std::abs(g(y)) <= 1e-11) {
            converged = true;
            break;
          }
        }
      } catch (const NumericError&) {
        pair_lost = true;
      } catch (const DomainError&) {
        pair_lost = true;  // left the parameter domain
      }
      if (pair_lost) break;
      if (!converged) {
        if (++halvings > 10) {
          std::ostringstream msg;
          msg << "trace_hopf_curve: step failure after 10 halvings near (" << x[0] << ", " << x[1]
              << ")";
          throw NumericError(msg.str());
        }
        h *= 0.5;
        continue;
      }
      halvings = 0;
      if (!inside(y)) break;
      Eigen::Vector2d tn = tangent(grad(y));
      if (tn.dot(t) < 0) tn = -tn;
      x = y;
      t = tn;
      branch[side].push_back(x);
      if (iters <= 2) h = std::min(1.5 * h, opts.max_step);
      if (iters >= 5) h *= 0.5;
    }
  }
  std::vector<Eigen::Vector2d> curve(branch[1].rbegin(), branch[1].rend());
  curve.push_back(seed.xi);
  curve.insert(curve.end(), branch[0].begin(), branch[0].end());
  return curve;
}

}  // namespace grnsp
