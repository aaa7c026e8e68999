#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <utility>

#include "sbm/asymptotics.hpp"
#include "sbm/error.hpp"
#include "sbm/parallel.hpp"
#include "sbm/quadrature.hpp"
#include "sbm/rng.hpp"
#include "sbm/special.hpp"

// Bivariate limit law of two sliding block maxima whose blocks overlap by a fraction 1 - xi,
// and covariances H_{k,l}(a,b) = Cov(S^a (log S)^k, T^b (log T)^l) of the min-stable pair
// (S, T) = (Z1^-alpha0, Z2^-alpha0) with Marshall-Olkin Pickands function A_xi.

namespace sbm::marshall_olkin {

/// The six (k, l, a, b) combinations entering Sigma_Y.
enum class HCase { h00_11, h01_11, h11_11, h01_10, h11_10, h11_00 };

inline constexpr std::array<HCase, 6> all_cases = {HCase::h00_11, HCase::h01_11, HCase::h11_11,
                                                   HCase::h01_10, HCase::h11_10, HCase::h11_00};

struct HIndex {
  int k, l, a, b;
};

inline constexpr HIndex index_of(HCase c) {
  switch (c) {
    case HCase::h00_11: return {0, 0, 1, 1};
    case HCase::h01_11: return {0, 1, 1, 1};
    case HCase::h11_11: return {1, 1, 1, 1};
    case HCase::h01_10: return {0, 1, 1, 0};
    case HCase::h11_10: return {1, 1, 1, 0};
    case HCase::h11_00: return {1, 1, 0, 0};
  }
  return {0, 0, 0, 0};
}

inline std::string name_of(HCase c) {
  const auto i = index_of(c);
  return "H" + std::to_string(i.k) + std::to_string(i.l) + "(" + std::to_string(i.a) + "," +
         std::to_string(i.b) + ")";
}

inline void check_xi(double xi) {
  if (!(xi >= 0.0 && xi <= 1.0)) throw InputError("Marshall-Olkin parameter xi must be in [0, 1]");
}

/// A_xi(w) = 1 - (1 - xi) min(w, 1 - w).
inline double pickands(double xi, double w) {
  check_xi(xi);
  if (!(w >= 0.0 && w <= 1.0)) throw InputError("Pickands argument w must be in [0, 1]");
  return 1.0 - (1.0 - xi) * std::min(w, 1.0 - w);
}

/// G_{alpha0,xi}(x, y); the margins are Frechet(alpha0, 1).
inline double joint_cdf(double alpha0, double xi, double x, double y) {
  if (!(alpha0 > 0.0)) throw InputError("alpha0 must be positive");
  if (!(xi >= 0.0)) throw InputError("xi must be nonnegative");
  if (!(x > 0.0 && y > 0.0)) throw InputError("joint cdf arguments must be positive");
  const double ux = std::pow(x, -alpha0);
  const double uy = std::pow(y, -alpha0);
  if (xi >= 1.0) return std::exp(-ux - uy);
  return std::exp(-xi * ux - (1.0 - xi) * std::max(ux, uy) - xi * uy);
}

/// (S, T) with survival exp(-xi s - xi t - (1 - xi) max(s, t)), unit exponential margins.
inline std::pair<double, double> sample_pair(Engine& rng, double xi) {
  check_xi(xi);
  const double e0 = standard_exponential(rng);
  const double e1 = standard_exponential(rng);
  const double e2 = standard_exponential(rng);
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double shared = xi < 1.0 ? e0 / (1.0 - xi) : inf;
  const double s = xi > 0.0 ? std::min(e1 / xi, shared) : shared;
  const double t = xi > 0.0 ? std::min(e2 / xi, shared) : shared;
  return {s, t};
}

namespace detail {

struct PickandsPoint {
  double a;      // A(w)
  double log_a;  // log A(w), accurate near A = 1
};

/// Integrand of the single-integral representation of H for Pickands function A
/// (callable returning PickandsPoint), at interior w.
template <class PickandsFn>
double h_integrand(HCase c, const PickandsFn& pick, double w) {
  const auto [a, log_a] = pick(w);
  const double p2 = special::digamma_2;
  const double log_w = std::log(w);
  const double log_1w = std::log1p(-w);
  switch (c) {
    case HCase::h00_11:
      return 1.0 / (a * a);
    case HCase::h01_11:
      return (1.0 + log_1w + p2 - log_a) / (a * a);
    case HCase::h11_11:
      return (p2 * p2 + 2.0 * p2 + special::trigamma_2 + 1.0 +
              (1.0 + p2) * (log_w + log_1w - 2.0 * log_a) + (log_w - log_a) * (log_1w - log_a)) /
             (a * a);
    case HCase::h01_10:
      // (1 - A) / ((1 - w) A), with 1 - A computed from log A to avoid cancellation
      return -std::expm1(log_a) / ((1.0 - w) * a);
    case HCase::h11_10:
      return (-std::expm1(log_a) * (log_w + p2) - log_a) / ((1.0 - w) * a);
    case HCase::h11_00:
      return -log_a / (w * (1.0 - w));
  }
  return 0.0;
}

/// Constant subtracted after integration.
inline double h_offset(HCase c) {
  const double p2 = special::digamma_2;
  switch (c) {
    case HCase::h00_11: return 1.0;
    case HCase::h01_11: return p2;
    case HCase::h11_11: return p2 * p2;
    default: return 0.0;
  }
}

}  // namespace detail

inline constexpr double cov_h_abs_tol = 1e-12;

/// H for an arbitrary Pickands function given as a callable w -> PickandsPoint, with
/// w = 1/2 as breakpoint. Requires the integrand to be finite or integrably singular.
template <class PickandsFn>
quad::Result cov_H_general(HCase c, const PickandsFn& pick, const quad::Options& opts = {}) {
  auto f = [&](double w) { return detail::h_integrand(c, pick, w); };
  auto res = quad::integrate(f, std::vector<double>{0.0, 0.5, 1.0}, opts);
  res.value -= detail::h_offset(c);
  return res;
}

inline auto marshall_olkin_pickands(double xi) {
  check_xi(xi);
  return [xi](double w) {
    const double d = (1.0 - xi) * std::min(w, 1.0 - w);
    return detail::PickandsPoint{1.0 - d, std::log1p(-d)};
  };
}

inline quad::Result cov_H_detailed(HCase c, double xi) {
  quad::Options opts;
  opts.abs_tol = cov_h_abs_tol;
  return cov_H_general(c, marshall_olkin_pickands(xi), opts);
}

/// H_{k,l}(a, b; xi) by adaptive quadrature (absolute error below 1e-10).
inline double cov_H(HCase c, double xi) { return cov_H_detailed(c, xi).value; }

/// Cov(log S, log T) = int_0^1 -log A(w) / (w (1 - w)) dw for a general Pickands function.
template <class PickandsFn>
double tiago_de_oliveira(const PickandsFn& pick) {
  quad::Options opts;
  opts.abs_tol = cov_h_abs_tol;
  auto f = [&](double w) { return -pick(w).log_a / (w * (1.0 - w)); };
  return quad::integrate(f, std::vector<double>{0.0, 0.5, 1.0}, opts).value;
}

/// int_0^1 H(case; xi) dxi in closed form.
inline double cov_H_integral_closed(HCase c) {
  const auto ci = asymptotics::covariance_integrals_closed();
  switch (c) {
    case HCase::h00_11: return ci.h00_11;
    case HCase::h01_11: return ci.h01_11;
    case HCase::h11_11: return ci.h11_11;
    case HCase::h01_10: return ci.h01_10;
    case HCase::h11_10: return ci.h11_10;
    case HCase::h11_00: return ci.h11_00;
  }
  return 0.0;
}

/// Same integral by nested adaptive quadrature over xi and w.
inline quad::Result cov_H_integral_quadrature_detailed(HCase c) {
  quad::Options outer;
  outer.abs_tol = 1e-11;
  return quad::integrate([c](double xi) { return cov_H(c, xi); }, 0.0, 1.0, outer);
}

inline double cov_H_integral_quadrature(HCase c) {
  return cov_H_integral_quadrature_detailed(c).value;
}

inline asymptotics::CovarianceIntegrals covariance_integrals_quadrature() {
  return {cov_H_integral_quadrature(HCase::h00_11), cov_H_integral_quadrature(HCase::h01_11),
          cov_H_integral_quadrature(HCase::h11_11), cov_H_integral_quadrature(HCase::h01_10),
          cov_H_integral_quadrature(HCase::h11_10), cov_H_integral_quadrature(HCase::h11_00)};
}

struct MonteCarloSigmaY {
  asymptotics::Matrix33 estimate;
  asymptotics::Matrix33 std_error;
  std::uint64_t draws = 0;
  std::uint64_t seed = 0;
};

inline constexpr std::size_t mc_chunks = 64;

/// Monte Carlo estimate of sigma_ij = 2 int_0^1 Cov_xi(f_i(Z1), f_j(Z2)) dxi with
/// xi ~ U(0, 1) and (Z1, Z2) ~ G_{alpha0, xi}. Chunk c uses stream (seed, c), so the result
/// does not depend on `threads`.
inline MonteCarloSigmaY mc_sigma_Y_oracle(std::uint64_t seed, double alpha0, std::uint64_t draws,
                                          unsigned threads = 1) {
  if (draws < 10000) throw InputError("Monte Carlo oracle needs at least 10^4 draws");
  if (!(alpha0 > 0.0)) throw InputError("alpha0 must be positive");

  struct Partial {
    std::array<double, 6> sum{};
    std::array<double, 6> sum_sq{};
  };
  constexpr std::array<std::pair<int, int>, 6> pairs = {
      {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}}};
  std::vector<Partial> partials(mc_chunks);

  parallel_for(mc_chunks, threads, [&](std::size_t chunk) {
    const std::uint64_t begin = draws * chunk / mc_chunks;
    const std::uint64_t end = draws * (chunk + 1) / mc_chunks;
    Engine rng = make_stream(seed, chunk);
    std::array<CompensatedSum, 6> sum{};
    std::array<CompensatedSum, 6> sum_sq{};
    for (std::uint64_t d = begin; d < end; ++d) {
      const double xi = uniform_open(rng);
      const auto [s, t] = sample_pair(rng, xi);
      const double z1 = std::pow(s, -1.0 / alpha0);
      const double z2 = std::pow(t, -1.0 / alpha0);
      const std::array<double, 3> f1 = {std::pow(z1, -alpha0) * std::log(z1), std::pow(z1, -alpha0),
                                        std::log(z1)};
      const std::array<double, 3> f2 = {std::pow(z2, -alpha0) * std::log(z2), std::pow(z2, -alpha0),
                                        std::log(z2)};
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto [i, j] = pairs[p];
        const double prod = 0.5 * (f1[i] * f2[j] + f1[j] * f2[i]);
        sum[p].add(prod);
        sum_sq[p].add(prod * prod);
      }
    }
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      partials[chunk].sum[p] = sum[p].value();
      partials[chunk].sum_sq[p] = sum_sq[p].value();
    }
  });

  const auto pf = asymptotics::frechet_log_moments(alpha0);
  const std::array<double, 3> mean_f = {pf.pf1, pf.pf2, pf.pf3};
  MonteCarloSigmaY out;
  out.draws = draws;
  out.seed = seed;
  const double nd = static_cast<double>(draws);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    CompensatedSum sum;
    CompensatedSum sum_sq;
    for (const auto& part : partials) {
      sum.add(part.sum[p]);
      sum_sq.add(part.sum_sq[p]);
    }
    const double mean = sum.value() / nd;
    const double var = std::max(0.0, sum_sq.value() / nd - mean * mean) * nd / (nd - 1.0);
    const auto [i, j] = pairs[p];
    const double est = 2.0 * (mean - mean_f[i] * mean_f[j]);
    const double se = 2.0 * std::sqrt(var / nd);
    out.estimate(i, j) = out.estimate(j, i) = est;
    out.std_error(i, j) = out.std_error(j, i) = se;
  }
  return out;
}

}  // namespace sbm::marshall_olkin
