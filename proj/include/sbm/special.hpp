#pragma once

#include <cmath>
#include <numbers>

#include "sbm/error.hpp"

namespace sbm::special {

inline constexpr double euler_gamma = 0.57721566490153286060651209008;
inline constexpr double apery = 1.20205690315959428539973816151;  // zeta(3)
inline constexpr double pi_sq_over_6 = 1.64493406684822643647241516665;
inline constexpr double ln2 = 0.69314718055994530941723212146;
/// psi(2) = 1 - gamma
inline constexpr double digamma_2 = 0.42278433509846713939348790992;
/// psi'(2) = pi^2/6 - 1
inline constexpr double trigamma_2 = 0.64493406684822643647241516665;
/// Gamma''(2) = psi'(2) + psi(2)^2, since Gamma(2) = 1
inline constexpr double gamma_second_deriv_2 = 0.82368066085287938957776712284;

namespace detail {
inline constexpr double asymptotic_threshold = 10.0;
}

/// Digamma function psi(x) for real x that is not a nonpositive integer.
/// Upward recurrence to x >= 10, then the Stirling-type asymptotic series.
inline double digamma(double x) {
  if (std::isnan(x)) return x;
  if (x <= 0.0) {
    if (x == std::floor(x)) throw InputError("digamma pole at nonpositive integer");
    // psi(1 - x) - psi(x) = pi cot(pi x)
    return digamma(1.0 - x) - std::numbers::pi / std::tan(std::numbers::pi * x);
  }
  // recurrence terms and the asymptotic tail summed with compensation
  double sum = 0.0, comp = 0.0;
  auto add = [&](double v) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  };
  while (x < detail::asymptotic_threshold) {
    add(-1.0 / x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Bernoulli terms B_{2k} / (2k x^{2k}), k = 1..7
  const double series =
      inv2 * (1.0 / 12 -
              inv2 * (1.0 / 120 -
                      inv2 * (1.0 / 252 -
                              inv2 * (1.0 / 240 -
                                      inv2 * (1.0 / 132 -
                                              inv2 * (691.0 / 32760 - inv2 * (1.0 / 12)))))));
  add(std::log(x));
  add(-0.5 * inv);
  add(-series);
  return sum + comp;
}

/// Trigamma function psi'(x) for x > 0.
inline double trigamma(double x) {
  if (std::isnan(x)) return x;
  if (x <= 0.0) throw InputError("trigamma implemented for positive arguments only");
  double sum = 0.0, comp = 0.0;
  auto add = [&](double v) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  };
  while (x < detail::asymptotic_threshold) {
    add(1.0 / (x * x));
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // 1/x + 1/(2x^2) + sum B_{2k} / x^{2k+1}, k = 1..7
  const double tail =
      inv2 * inv * (1.0 / 6 -
                    inv2 * (1.0 / 30 -
                            inv2 * (1.0 / 42 -
                                    inv2 * (1.0 / 30 -
                                            inv2 * (5.0 / 66 -
                                                    inv2 * (691.0 / 2730 - inv2 * (7.0 / 6)))))));
  add(inv);
  add(0.5 * inv2);
  add(tail);
  return sum + comp;
}

}  // namespace sbm::special
