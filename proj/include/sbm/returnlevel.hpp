#pragma once

#include <Eigen/Dense>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <optional>

#include "sbm/asymptotics.hpp"
#include "sbm/blocks.hpp"
#include "sbm/error.hpp"
#include "sbm/frechet.hpp"

namespace sbm::returnlevel {

struct Estimate {
  double T = 0.0;
  double point = 0.0;
  double variance_factor = 0.0;  ///< beta' Sigma beta, per unit of 1 / m
  double ci_low = 0.0;
  double ci_high = 0.0;
  double level = 0.0;
  double m_effective = 0.0;
  double alpha_for_variance = 0.0;
  Scheme scheme = Scheme::sliding;
};

/// b_T = -log(1 - 1/T).
inline double b_T(double T) {
  if (!(T > 1.0)) throw InputError("return period must exceed 1");
  return -std::log1p(-1.0 / T);
}

/// sigma_hat * b_T^(-1/alpha_hat): the 1 - 1/T quantile of the fitted block maximum law.
inline double estimate(const frechet::Params& params, double T) {
  frechet::validate(params);
  return params.sigma * std::pow(b_T(T), -1.0 / params.alpha);
}

inline double estimate(const frechet::Fit& fit, double T) { return estimate(fit.params, T); }

/// Delta-method gradient of log RL(T) in (alpha, sigma / sigma_r).
inline asymptotics::Vector2 beta(double T, double alpha0) {
  return {std::log(b_T(T)) / (alpha0 * alpha0), 1.0};
}

/// Asymptotic variance of sqrt(m) (RL_hat / RL - 1).
inline double variance_factor(double T, double alpha0, Scheme scheme) {
  const auto b = beta(T, alpha0);
  const auto cov = scheme == Scheme::sliding ? asymptotics::sigma_sliding(alpha0)
                                             : asymptotics::fisher_inverse_disjoint(alpha0);
  return b.dot(cov * b);
}

/// Normal interval on the relative scale RL_hat / RL - 1, bias terms set to zero.
/// alpha0 in beta and Sigma is the fitted shape unless `alpha_override` is given.
inline Estimate ci(const frechet::Fit& fit, double T, double level,
                   std::optional<double> alpha_override = std::nullopt,
                   std::optional<Scheme> scheme_override = std::nullopt) {
  if (!(level > 0.0 && level < 1.0)) throw InputError("confidence level must be in (0, 1)");
  if (!(fit.params.alpha > 0.0) || !(fit.params.sigma > 0.0)) {
    throw EstimationError("degenerate fit");
  }
  if (fit.r == 0 || fit.n == 0) throw InputError("fit lacks block provenance");
  Estimate out;
  out.T = T;
  out.level = level;
  out.scheme = scheme_override.value_or(fit.scheme);
  out.m_effective = fit.m_effective();
  out.alpha_for_variance = alpha_override.value_or(fit.params.alpha);
  out.point = estimate(fit, T);
  out.variance_factor = variance_factor(T, out.alpha_for_variance, out.scheme);
  const double z =
      boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + 0.5 * level);
  const double half_width = z * std::sqrt(out.variance_factor / out.m_effective);
  out.ci_low = out.point * (1.0 - half_width);
  out.ci_high = out.point * (1.0 + half_width);
  return out;
}

}  // namespace sbm::returnlevel
