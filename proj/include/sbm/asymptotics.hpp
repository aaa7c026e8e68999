#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <utility>

#include "sbm/error.hpp"
#include "sbm/special.hpp"

// Closed-form asymptotic constants for the Frechet maximum likelihood estimator based on
// sliding and disjoint block maxima. All matrices are for the parameter vector
// (alpha, sigma / sigma_r) and the moment functions
//   f1(x) = x^-a log x,  f2(x) = x^-a,  f3(x) = log x   under Frechet(a, 1).

namespace sbm::asymptotics {

using Matrix23 = Eigen::Matrix<double, 2, 3>;
using Matrix33 = Eigen::Matrix3d;
using Matrix22 = Eigen::Matrix2d;
using Vector2 = Eigen::Vector2d;

namespace detail {
inline void check_alpha(double alpha0) {
  if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) throw InputError("alpha0 must be positive");
}
inline constexpr double six_over_pi_sq = 1.0 / special::pi_sq_over_6;
}  // namespace detail

struct SpecialConstants {
  double euler_gamma = special::euler_gamma;
  double apery = special::apery;
  double pi_sq_over_6 = special::pi_sq_over_6;
  double digamma_2 = special::digamma_2;
  double trigamma_2 = special::trigamma_2;
  double gamma_second_deriv_2 = special::gamma_second_deriv_2;
};

struct LogMoments {
  double pf1, pf2, pf3;
};

/// Frechet(alpha0, 1) expectations of f1, f2, f3.
inline LogMoments frechet_log_moments(double alpha0) {
  detail::check_alpha(alpha0);
  const double g = special::euler_gamma;
  return {(g - 1.0) / alpha0, 1.0, g / alpha0};
}

inline Matrix23 m_matrix(double alpha0) {
  detail::check_alpha(alpha0);
  const double g = special::euler_gamma;
  Matrix23 m;
  m << alpha0 * alpha0, alpha0 * (1.0 - g), -alpha0 * alpha0,
      g - 1.0, -(special::gamma_second_deriv_2 + 1.0) / alpha0, 1.0 - g;
  return detail::six_over_pi_sq * m;
}

/// Integrals over the Marshall-Olkin parameter of the six covariance functionals that
/// make up Sigma_Y (closed forms). Indexed like marshall_olkin::HCase.
struct CovarianceIntegrals {
  double h00_11;  ///< Cov(S, T)
  double h01_11;  ///< Cov(S, T log T)
  double h11_11;  ///< Cov(S log S, T log T)
  double h01_10;  ///< Cov(S, log T)
  double h11_10;  ///< Cov(S log S, log T)
  double h11_00;  ///< Cov(log S, log T)
};

inline CovarianceIntegrals covariance_integrals_closed() {
  const double l2 = special::ln2;
  const double p2 = special::digamma_2;
  const double g = special::euler_gamma;
  const double z3 = special::apery;
  const double pi2_6 = special::pi_sq_over_6;
  const double pi2_12 = 0.5 * pi2_6;
  CovarianceIntegrals c{};
  c.h00_11 = 2.0 * l2 - 1.0;
  c.h01_11 = pi2_12 - l2 * l2 + (1.0 - g) * (2.0 * l2 - 1.0);
  c.h11_11 = 2.0 * l2 * (p2 * p2 + pi2_6 - p2 * l2 + l2 * l2 / 3.0) + p2 * pi2_6 -
             1.75 * z3 - p2 * p2;
  c.h01_10 = pi2_12 + 1.0 - 2.0 * l2;
  c.h11_10 = (1.0 + p2) * pi2_12 + l2 * l2 - 2.0 * p2 * l2 + p2 - 0.875 * z3;
  c.h11_00 = 4.0 * l2 - 2.0;
  return c;
}

/// Sigma_Y from the six xi-integrals: sigma_ij = 2 * prefactor_ij * integral_ij with
/// f1 = -S log S / a, f2 = S, f3 = -log S / a for (S, T) = (Z1^-a, Z2^-a).
inline Matrix33 assemble_sigma_Y(double alpha0, const CovarianceIntegrals& c) {
  detail::check_alpha(alpha0);
  const double ia = 1.0 / alpha0;
  Matrix33 s;
  const double s11 = 2.0 * ia * ia * c.h11_11;
  const double s22 = 2.0 * c.h00_11;
  const double s33 = 2.0 * ia * ia * c.h11_00;
  const double s12 = -2.0 * ia * c.h01_11;
  const double s13 = 2.0 * ia * ia * c.h11_10;
  const double s23 = -2.0 * ia * c.h01_10;
  s << s11, s12, s13, s12, s22, s23, s13, s23, s33;
  return s;
}

inline Matrix33 sigma_Y(double alpha0) {
  return assemble_sigma_Y(alpha0, covariance_integrals_closed());
}

/// Asymptotic covariance of sqrt(n/r) (alpha_hat - alpha0, sigma_hat/sigma_r - 1) for
/// sliding blocks: M Sigma_Y M^T.
inline Matrix22 sigma_sliding(double alpha0) {
  const Matrix23 m = m_matrix(alpha0);
  Matrix22 s = m * sigma_Y(alpha0) * m.transpose();
  // exact symmetry
  const double off = 0.5 * (s(0, 1) + s(1, 0));
  s(0, 1) = s(1, 0) = off;
  return s;
}

/// Inverse Fisher information of the Frechet family at (alpha0, 1) (disjoint blocks).
inline Matrix22 fisher_inverse_disjoint(double alpha0) {
  detail::check_alpha(alpha0);
  const double g = special::euler_gamma;
  const double one_g = 1.0 - g;
  Matrix22 m;
  m << alpha0 * alpha0, g - 1.0, g - 1.0, (one_g * one_g + special::pi_sq_over_6) / (alpha0 * alpha0);
  return detail::six_over_pi_sq * m;
}

/// Smallest and largest eigenvalue of Sigma(alpha0) * I(alpha0, 1), which bound
/// b' Sigma b / b' I^-1 b over all nonzero b.
inline std::pair<double, double> ratio_bounds(double alpha0) {
  const Matrix22 s = sigma_sliding(alpha0);
  const Matrix22 inv = fisher_inverse_disjoint(alpha0);
  // Generalized symmetric problem S v = lambda I^-1 v; real eigenvalues.
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix22> solver(s, inv);
  if (solver.info() != Eigen::Success) throw EstimationError("eigenvalue computation failed");
  const auto ev = solver.eigenvalues();
  return {std::min(ev(0), ev(1)), std::max(ev(0), ev(1))};
}

inline double variance_ratio(double alpha0, const Vector2& beta) {
  return beta.dot(sigma_sliding(alpha0) * beta) / beta.dot(fisher_inverse_disjoint(alpha0) * beta);
}

namespace detail {

// Both formulas cancel badly as x -> 0; below the cutoff use Taylor series truncated
// after x^13 (remainder below 1e-17).
inline constexpr double series_cutoff = 0.05;

// zeta(2), ..., zeta(15): gamma + psi(1 + x) = sum_{k>=2} (-1)^k zeta(k) x^(k-1)
inline constexpr std::array<double, 14> zeta_2_15 = {
    1.644934066848226436472, 1.202056903159594285400, 1.082323233711138191516,
    1.036927755143369926331, 1.017343061984449139715, 1.008349277381922826840,
    1.004077356197944339379, 1.002008392826082214418, 1.000994575127818085337,
    1.000494188604119464559, 1.000246086553308048299, 1.000122713347578489147,
    1.000061248135058704829, 1.000030588236307020494};

// Taylor coefficients N_2, ..., N_15 of N(x) = Gamma(2 + x) {Gamma''(2) + gamma + (gamma - 1)
// psi(1 + x)}; N_0 = pi^2/6 and N_1 = 0.
inline constexpr std::array<double, 14> n_2_15 = {
    0.8916346563619897988563,  -0.3949524059295944802776, 0.5196388019773574305387,
    -0.4438406812909243649168, 0.4439559275099940954468,  -0.4322062835633972965942,
    0.4284298773169073372529,  -0.4257337466813974179615, 0.4243870743643541123885,
    -0.4236362636628697589304, 0.4232374521735960413534,  -0.4230239909536650874738,
    0.4229107263461681724853,  -0.4228507892493073260514};

inline double horner(const std::array<double, 14>& c, double x) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

inline double b1(double x) {
  if (x == 0.0) return special::pi_sq_over_6;
  // (1 + x) Gamma(x) = Gamma(2 + x) / x
  if (x < series_cutoff) return std::tgamma(2.0 + x) * horner(zeta_2_15, -x);
  return std::tgamma(2.0 + x) * (special::euler_gamma + special::digamma(1.0 + x)) / x;
}

inline double b2(double x) {
  if (x == 0.0) return 0.0;
  if (x < series_cutoff) return x * horner(n_2_15, x);
  const double g = special::euler_gamma;
  const double k = special::gamma_second_deriv_2 + g + (g - 1.0) * special::digamma(1.0 + x);
  return (std::tgamma(2.0 + x) * k - special::pi_sq_over_6) / x;
}

}  // namespace detail

struct BiasVector {
  double shape = 0.0;
  double scale = 0.0;
  double rho = 0.0;
  double lambda = 0.0;
};

/// Asymptotic bias lambda * B(alpha0, rho) of the sliding (and disjoint) block maxima
/// estimator for iid data under second-order regular variation with index rho.
inline BiasVector bias_iid(double alpha0, double rho, double lambda) {
  detail::check_alpha(alpha0);
  if (!(rho <= 0.0)) throw InputError("second-order index rho must be <= 0");
  const double x = std::abs(rho) / alpha0;
  // divide rather than multiply by 6/pi^2 so that b1(0) / (pi^2/6) is exactly 1
  const double p = special::pi_sq_over_6;
  return {-lambda * (detail::b1(x) / p), -lambda * (detail::b2(x) / p) / (alpha0 * alpha0), rho,
          lambda};
}

inline double bias_b1(double x) {
  if (!(x >= 0.0)) throw InputError("b1 is defined for x >= 0");
  return detail::b1(x);
}

inline double bias_b2(double x) {
  if (!(x >= 0.0)) throw InputError("b2 is defined for x >= 0");
  return detail::b2(x);
}

/// All matrices for one alpha0.
struct Tables {
  double alpha0 = 1.0;
  Matrix23 M;
  Matrix33 sigma_Y;
  Matrix22 sigma_sliding;
  Matrix22 fisher_inv_disjoint;
};

inline Tables tables(double alpha0) {
  return {alpha0, m_matrix(alpha0), sigma_Y(alpha0), sigma_sliding(alpha0),
          fisher_inverse_disjoint(alpha0)};
}

}  // namespace sbm::asymptotics
