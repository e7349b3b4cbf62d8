#pragma once

#include <Eigen/Core>

namespace grnsp {

// Dimensional parameters of the two-gene activator/inhibitor network.
struct RawParams {
  double m_a = 1, m_b = 1;          // max transcription rates
  double gamma_a = 1, gamma_b = 1;  // mRNA decay
  double k_a = 1, k_b = 1;          // translation
  double delta_a = 1, delta_b = 1;  // protein decay
  double theta_a = 1, theta_b = 1;  // switching thresholds
  double eps_raw = 1;
  double n = 1;  // shared Hill exponent

  void validate() const;
};

// Scaled parameters. sigma is the inverse Hill exponent; sigma == 0 is the
// switching limit and is only accepted by the pwl functions.
struct ModelParams {
  double gamma = 2;
  double delta = 3;
  double xi_a = 1.3536;
  double xi_b = 2.3536;
  double sigma = 1e-2;
  double eps = 5e-3;

  static ModelParams with_mu(double gamma, double delta, double xi_a, double xi_b,
                             double sigma, double mu);

  // eps / sigma; throws when sigma == 0.
  double mu() const;
  void validate() const;
  void require_smooth() const;  // validate() plus sigma > 0
};

template <typename Scalar>
using State4T = Eigen::Matrix<Scalar, 4, 1>;
using State4 = State4T<double>;

// Component order of State4.
enum : Eigen::Index { kRa = 0, kRb = 1, kPa = 2, kPb = 3 };

}  // namespace grnsp
