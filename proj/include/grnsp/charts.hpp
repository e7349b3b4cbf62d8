#pragma once

#include <array>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "grnsp/core_model.hpp"
#include "grnsp/params.hpp"

namespace grnsp {

// Reduced-flow building blocks shared by the chart fields and the slow
// manifold: G_a(x,y) = xi_a x e^{-y} - 1 and G_b(x,y) = delta (xi_b x e^{-y} - 1).
template <typename Scalar>
Scalar g_a(const Scalar& x, const Scalar& y, const ModelParams& p) {
  using std::exp;
  return p.xi_a * x * exp(-y) - 1.0;
}

template <typename Scalar>
Scalar g_b(const Scalar& x, const Scalar& y, const ModelParams& p) {
  using std::exp;
  return p.delta * (p.xi_b * x * exp(-y) - 1.0);
}

enum class ChartId { K2, K12, K14, K15, K32, K34, K35, K41, K42, K43, K51, K52, K53 };

// Which switching line a directional chart sits over: a means p_a is the
// fixed (large-exponent) coordinate, b means p_b is.
enum class ChartAxis { None, A, B };
enum class ChartKind { Scaling, Central, Side };

struct ChartInfo {
  ChartId id;
  std::string_view name;
  int family;  // first-level sphere chart 1..5 (2 for the scaling chart)
  ChartAxis axis;
  ChartKind kind;
  int s;  // sign of the fixed log-coordinate
  int m;  // sign of the free log-coordinate (side charts only)
};

inline constexpr std::array<ChartInfo, 13> kAtlas{{
    {ChartId::K2, "K2", 2, ChartAxis::None, ChartKind::Scaling, 0, 0},
    {ChartId::K12, "K12", 1, ChartAxis::A, ChartKind::Central, -1, 0},
    {ChartId::K14, "K14", 1, ChartAxis::A, ChartKind::Side, -1, -1},
    {ChartId::K15, "K15", 1, ChartAxis::A, ChartKind::Side, -1, +1},
    {ChartId::K32, "K32", 3, ChartAxis::A, ChartKind::Central, +1, 0},
    {ChartId::K34, "K34", 3, ChartAxis::A, ChartKind::Side, +1, -1},
    {ChartId::K35, "K35", 3, ChartAxis::A, ChartKind::Side, +1, +1},
    {ChartId::K41, "K41", 4, ChartAxis::B, ChartKind::Side, -1, -1},
    {ChartId::K42, "K42", 4, ChartAxis::B, ChartKind::Central, -1, 0},
    {ChartId::K43, "K43", 4, ChartAxis::B, ChartKind::Side, -1, +1},
    {ChartId::K51, "K51", 5, ChartAxis::B, ChartKind::Side, +1, -1},
    {ChartId::K52, "K52", 5, ChartAxis::B, ChartKind::Central, +1, 0},
    {ChartId::K53, "K53", 5, ChartAxis::B, ChartKind::Side, +1, +1},
}};

const ChartInfo& chart_info(ChartId id);
ChartId chart_from_name(std::string_view name);

using Vector5d = Eigen::Matrix<double, 5, 1>;

// coords = (r_a, r_b, c0, c1, c2) with
//   K2:            (eta2, u2, v2)
//   central K_i2:  (eta_i, free coordinate v_i2 or u_i2, rho_i2)
//   side K_ij:     (eta_i, rho_ij, sigma_ij)
struct ChartPoint {
  ChartId chart = ChartId::K2;
  Vector5d coords = Vector5d::Zero();
  double mu = 0;
};

struct BlowDownImage {
  double r_a, r_b, p_a, p_b, sigma;
};

// Exponents (ln p_a, ln p_b) and sigma of a chart point.
Eigen::Vector3d blow_down_log(const ChartPoint& cp);
BlowDownImage blow_down(const ChartPoint& cp);

Vector5d chart_vector_field(const ChartPoint& cp, const ModelParams& p);

// Change of chart on the overlap. Throws DomainError naming the violated
// sign condition when cp is not in the target's domain.
ChartPoint change_chart(const ChartPoint& cp, ChartId target);

// The K2 -> K_ij maps for i in {1,3} written out coordinate by coordinate.
ChartPoint kappa_from_k2(const ChartPoint& cp, ChartId target);

// Inverse of blow_down_log for sigma > 0: chart coordinates of the point with
// exponents logs = (ln p_a, ln p_b, sigma). Throws outside the chart.
ChartPoint chart_point_from_log(ChartId chart, double r_a, double r_b, const Eigen::Vector3d& logs,
                                double mu);

// True if some point can lie in both charts.
bool charts_overlap(ChartId a, ChartId b);

// Eigenvalues of the (r_a, r_b) layer linearization at mu = 0, ordered
// decreasingly. Throws when cp is off the critical manifold.
Eigen::Vector2d critical_manifold_eigenvalues(const ChartPoint& cp, const ModelParams& p);

// Slaving defect (r_a - phi(ln p_b/sigma), r_b - (1 - phi(ln p_a/sigma))/gamma)
// with the chart's extension of phi to zero radius.
Eigen::Vector2d slaving_residual(const ChartPoint& cp, const ModelParams& p);

}  // namespace grnsp
