#include "grnsp/charts.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace grnsp {

namespace {

constexpr double kOverlapMargin = 1e-12;

// phi(sign/den) for den >= 0, extended by its flat limits at den = 0.
double phi_of_ratio(double sign, double den) {
  if (den > 0) return phi(sign / den);
  return sign > 0 ? 1.0 : 0.0;
}

// Arguments ln(p_a)/sigma and ln(p_b)/sigma of the Hill functions, as
// (numerator sign, denominator) pairs or plain values for K2.
struct HillArgs {
  double phi_a;      // phi(ln p_a / sigma)
  double phi_neg_a;  // phi(-ln p_a / sigma)
  double phi_b;      // phi(ln p_b / sigma)
};

HillArgs hill_args(const ChartPoint& cp) {
  const ChartInfo& ci = chart_info(cp.chart);
  const Vector5d& c = cp.coords;
  if (ci.kind == ChartKind::Scaling) return {phi(c[3]), phi(-c[3]), phi(c[4])};
  double fix_pos, fix_neg, free_pos, free_neg;
  if (ci.kind == ChartKind::Central) {
    fix_pos = phi_of_ratio(ci.s, c[4]);
    fix_neg = phi_of_ratio(-ci.s, c[4]);
    free_pos = phi(c[3]);
    free_neg = phi(-c[3]);
  } else {
    fix_pos = phi_of_ratio(ci.s, c[3] * c[4]);
    fix_neg = phi_of_ratio(-ci.s, c[3] * c[4]);
    free_pos = phi_of_ratio(ci.m, c[4]);
    free_neg = phi_of_ratio(-ci.m, c[4]);
  }
  if (ci.axis == ChartAxis::A) return {fix_pos, fix_neg, free_pos};
  return {free_pos, free_neg, fix_pos};
}

// Projective description of a first-level sphere chart point:
// (ln p_a, ln p_b, sigma) = eta * dir, with dir normalized in the chart's
// fixed component.
struct Level1 {
  int family;
  double eta;
  Eigen::Vector3d dir;
};

int fixed_component(int family) {
  switch (family) {
    case 1:
    case 3:
      return 0;
    case 4:
    case 5:
      return 1;
    default:
      return 2;
  }
}

double fixed_sign(int family) { return (family == 1 || family == 4) ? -1.0 : 1.0; }

const char* component_name(int c) {
  static const char* names[] = {"ln p_a", "ln p_b", "sigma"};
  return names[c];
}

[[noreturn]] void overlap_error(ChartId from, ChartId to, const std::string& what, double value) {
  std::ostringstream msg;
  msg << "change_chart " << chart_info(from).name << " -> " << chart_info(to).name
      << ": point outside overlap, requires " << what << " > 0 (got " << value << ")";
  throw DomainError(msg.str());
}

// Second-level cylinder direction (free_i, sigma_i) = rho * dir2.
Eigen::Vector2d cylinder_dir(const ChartInfo& ci, const Vector5d& c, double* rho) {
  if (ci.kind == ChartKind::Central) {
    *rho = c[4];
    return {c[3], 1.0};
  }
  *rho = c[3];
  return {double(ci.m), c[4]};
}

Level1 lift(const ChartPoint& cp) {
  const ChartInfo& ci = chart_info(cp.chart);
  const Vector5d& c = cp.coords;
  if (ci.kind == ChartKind::Scaling) return {2, c[2], {c[3], c[4], 1.0}};
  double rho;
  const Eigen::Vector2d d2 = cylinder_dir(ci, c, &rho);
  const double free = rho * d2[0], sig = rho * d2[1];
  if (ci.axis == ChartAxis::A) return {ci.family, c[2], {double(ci.s), free, sig}};
  return {ci.family, c[2], {free, double(ci.s), sig}};
}

Level1 switch_level1(const Level1& x, int target, ChartId from, ChartId to) {
  if (x.family == target) return x;
  const int comp = fixed_component(target);
  const double f = fixed_sign(target);
  const double t = x.dir[comp] * f;
  if (!(t > kOverlapMargin))
    overlap_error(from, to, std::string(f > 0 ? "+" : "-") + component_name(comp), t * x.eta);
  return {target, x.eta * t, x.dir / t};
}

// Finish a chart point from a direction pair (free, sigma) scaled by rho.
ChartPoint descend(const ChartInfo& target, double eta, double rho, const Eigen::Vector2d& d2,
                   double r_a, double r_b, double mu, ChartId from) {
  ChartPoint out;
  out.chart = target.id;
  out.mu = mu;
  out.coords << r_a, r_b, eta, 0, 0;
  if (target.kind == ChartKind::Central) {
    const double t = d2[1];
    if (!(t > kOverlapMargin)) overlap_error(from, target.id, "sigma", t * rho);
    out.coords[3] = d2[0] / t;
    out.coords[4] = rho * t;
  } else {
    const double t = target.m * d2[0];
    const std::string free_name = target.axis == ChartAxis::A ? "ln p_b" : "ln p_a";
    if (!(t > kOverlapMargin))
      overlap_error(from, target.id, std::string(target.m > 0 ? "+" : "-") + free_name, t * rho);
    out.coords[3] = rho * t;
    out.coords[4] = d2[1] / t;
  }
  return out;
}

}  // namespace

const ChartInfo& chart_info(ChartId id) { return kAtlas[static_cast<std::size_t>(id)]; }

ChartId chart_from_name(std::string_view name) {
  for (const ChartInfo& ci : kAtlas)
    if (ci.name == name) return ci.id;
  throw DomainError("unknown chart '" + std::string(name) + "'");
}

Eigen::Vector3d blow_down_log(const ChartPoint& cp) {
  const ChartInfo& ci = chart_info(cp.chart);
  const Vector5d& c = cp.coords;
  const double eta = c[2];
  if (ci.kind == ChartKind::Scaling) return {eta * c[3], eta * c[4], eta};
  const double fix = ci.s * eta;
  double free, sigma;
  if (ci.kind == ChartKind::Central) {
    free = eta * c[4] * c[3];
    sigma = eta * c[4];
  } else {
    free = ci.m * eta * c[3];
    sigma = eta * c[3] * c[4];
  }
  if (ci.axis == ChartAxis::A) return {fix, free, sigma};
  return {free, fix, sigma};
}

BlowDownImage blow_down(const ChartPoint& cp) {
  const Eigen::Vector3d l = blow_down_log(cp);
  return {cp.coords[0], cp.coords[1], std::exp(l[0]), std::exp(l[1]), l[2]};
}

Vector5d chart_vector_field(const ChartPoint& cp, const ModelParams& p) {
  const ChartInfo& ci = chart_info(cp.chart);
  const Vector5d& c = cp.coords;
  const double r_a = c[0], r_b = c[1], eta = c[2], mu = cp.mu;
  const HillArgs h = hill_args(cp);
  Vector5d f;
  f[0] = h.phi_b - r_a;
  f[1] = h.phi_neg_a - p.gamma * r_b;
  if (ci.kind == ChartKind::Scaling) {
    f[2] = 0;
    f[3] = mu * g_a(r_a, eta * c[3], p);
    f[4] = mu * g_b(r_b, eta * c[4], p);
    return f;
  }
  // G of the chart's fixed axis and of the other one.
  const bool on_a = ci.axis == ChartAxis::A;
  const double s = ci.s;
  const double fix_log = s * eta;
  const double free_log =
      ci.kind == ChartKind::Central ? eta * c[4] * c[3] : ci.m * eta * c[3];
  const double g_fix = on_a ? g_a(r_a, fix_log, p) : g_b(r_b, fix_log, p);
  const double g_free = on_a ? g_b(r_b, free_log, p) : g_a(r_a, free_log, p);
  if (ci.kind == ChartKind::Central) {
    const double rho = c[4];
    f[2] = mu * s * eta * rho * g_fix;
    f[3] = mu * g_free;
    f[4] = -mu * s * rho * rho * g_fix;
  } else {
    const double m = ci.m, rho = c[3], vs = c[4];
    f[2] = mu * s * eta * rho * vs * g_fix;
    f[3] = mu * m * rho * vs * (g_free - s * m * rho * g_fix);
    f[4] = -mu * m * vs * vs * g_free;
  }
  return f;
}

ChartPoint change_chart(const ChartPoint& cp, ChartId target) {
  if (cp.chart == target) return cp;
  const ChartInfo& src = chart_info(cp.chart);
  const ChartInfo& dst = chart_info(target);
  const double r_a = cp.coords[0], r_b = cp.coords[1];

  if (src.kind != ChartKind::Scaling && dst.kind != ChartKind::Scaling &&
      src.family == dst.family) {
    double rho;
    const Eigen::Vector2d d2 = cylinder_dir(src, cp.coords, &rho);
    return descend(dst, cp.coords[2], rho, d2, r_a, r_b, cp.mu, cp.chart);
  }

  const Level1 up = lift(cp);
  const Level1 mid = switch_level1(up, dst.family, cp.chart, target);
  if (dst.kind == ChartKind::Scaling) {
    ChartPoint out;
    out.chart = target;
    out.mu = cp.mu;
    out.coords << r_a, r_b, mid.eta, mid.dir[0], mid.dir[1];
    return out;
  }
  const Eigen::Vector2d d2 = dst.axis == ChartAxis::A ? Eigen::Vector2d(mid.dir[1], mid.dir[2])
                                                      : Eigen::Vector2d(mid.dir[0], mid.dir[2]);
  return descend(dst, mid.eta, 1.0, d2, r_a, r_b, cp.mu, cp.chart);
}

ChartPoint kappa_from_k2(const ChartPoint& cp, ChartId target) {
  if (cp.chart != ChartId::K2) throw DomainError("kappa_from_k2: source must be K2");
  const ChartInfo& dst = chart_info(target);
  if (dst.axis != ChartAxis::A) throw DomainError("kappa_from_k2: target must be K1j or K3j");
  const double eta2 = cp.coords[2], u2 = cp.coords[3], v2 = cp.coords[4], s = dst.s;
  if (!(s * u2 > 0)) overlap_error(cp.chart, target, "s_i*u2", s * u2);
  ChartPoint out = cp;
  out.chart = target;
  out.coords[2] = s * eta2 * u2;
  if (dst.kind == ChartKind::Central) {
    out.coords[3] = v2;
    out.coords[4] = s / u2;
  } else if (dst.m < 0) {
    if (!(v2 < 0)) overlap_error(cp.chart, target, "-v2", -v2);
    out.coords[3] = -s * v2 / u2;
    out.coords[4] = -1 / v2;
  } else {
    if (!(v2 > 0)) overlap_error(cp.chart, target, "v2", v2);
    out.coords[3] = s * v2 / u2;
    out.coords[4] = 1 / v2;
  }
  return out;
}

ChartPoint chart_point_from_log(ChartId chart, double r_a, double r_b, const Eigen::Vector3d& logs,
                                double mu) {
  const ChartInfo& ci = chart_info(chart);
  const double sigma = logs[2];
  if (!(sigma > 0)) throw DomainError("chart_point_from_log: requires sigma > 0");
  ChartPoint cp;
  cp.chart = chart;
  cp.mu = mu;
  if (ci.kind == ChartKind::Scaling) {
    cp.coords << r_a, r_b, sigma, logs[0] / sigma, logs[1] / sigma;
    return cp;
  }
  const int fix = ci.axis == ChartAxis::A ? 0 : 1;
  const double eta = ci.s * logs[fix], free = logs[1 - fix];
  if (!(eta > 0)) throw DomainError("chart_point_from_log: fixed coordinate has the wrong sign");
  if (ci.kind == ChartKind::Central) {
    cp.coords << r_a, r_b, eta, free / sigma, sigma / eta;
    return cp;
  }
  const double rho = ci.m * free / eta;
  if (!(rho > 0)) throw DomainError("chart_point_from_log: free coordinate has the wrong sign");
  cp.coords << r_a, r_b, eta, rho, sigma / (eta * rho);
  return cp;
}

bool charts_overlap(ChartId a, ChartId b) {
  // Sign required of (ln p_a, ln p_b) by each chart; 0 means unconstrained.
  auto signs = [](ChartId id) {
    const ChartInfo& ci = chart_info(id);
    Eigen::Vector2i sg = Eigen::Vector2i::Zero();
    if (ci.kind == ChartKind::Scaling) return sg;
    const int fix = ci.axis == ChartAxis::A ? 0 : 1;
    sg[fix] = ci.s;
    if (ci.kind == ChartKind::Side) sg[1 - fix] = ci.m;
    return sg;
  };
  const Eigen::Vector2i sa = signs(a), sb = signs(b);
  for (int k = 0; k < 2; ++k)
    if (sa[k] * sb[k] < 0) return false;
  return true;
}

Eigen::Vector2d slaving_residual(const ChartPoint& cp, const ModelParams& p) {
  const HillArgs h = hill_args(cp);
  return {cp.coords[0] - h.phi_b, cp.coords[1] - h.phi_neg_a / p.gamma};
}

Eigen::Vector2d critical_manifold_eigenvalues(const ChartPoint& cp, const ModelParams& p) {
  if (cp.mu != 0) throw DomainError("critical_manifold_eigenvalues: requires mu = 0");
  const Eigen::Vector2d res = slaving_residual(cp, p);
  if (res.cwiseAbs().maxCoeff() > 1e-10) {
    std::ostringstream msg;
    msg << "critical_manifold_eigenvalues: point is off the critical manifold (slaving residual "
        << res.cwiseAbs().maxCoeff() << ")";
    throw DomainError(msg.str());
  }
  // Layer linearization in (r_a, r_b) with the chart variables frozen.
  Eigen::Matrix2d layer;
  for (int j = 0; j < 2; ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(cp.coords[j]));
    ChartPoint hi = cp, lo = cp;
    hi.coords[j] += h;
    lo.coords[j] -= h;
    layer.col(j) = (chart_vector_field(hi, p) - chart_vector_field(lo, p)).head<2>() / (2 * h);
  }
  Eigen::Vector2d ev = Eigen::EigenSolver<Eigen::Matrix2d>(layer, false).eigenvalues().real();
  if (ev[0] < ev[1]) std::swap(ev[0], ev[1]);
  return ev;
}

}  // namespace grnsp
