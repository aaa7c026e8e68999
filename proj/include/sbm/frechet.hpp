#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "sbm/blocks.hpp"
#include "sbm/error.hpp"
#include "sbm/rng.hpp"

namespace sbm::frechet {

struct Params {
  double alpha = 1.0;
  double sigma = 1.0;
};

inline void validate(const Params& p) {
  if (!(p.alpha > 0.0) || !(p.sigma > 0.0) || !std::isfinite(p.alpha) ||
      !std::isfinite(p.sigma)) {
    throw InputError("Frechet parameters must be positive and finite");
  }
}

struct SolverOptions {
  double rel_tol = 1e-12;
  int max_iterations = 200;
  double bracket_low = 1e-3;
  double bracket_high = 1e3;
  double bracket_low_limit = 1e-6;
  double bracket_high_limit = 1e6;
};

struct SolverDiagnostics {
  int iterations = 0;
  double residual = 0.0;  ///< profile score at the returned shape
  double bracket_low = 0.0;
  double bracket_high = 0.0;
};

struct Fit {
  Params params;
  std::size_t k = 0;  ///< number of maxima used
  std::size_t r = 1;
  std::size_t n = 0;  ///< source series length
  Scheme scheme = Scheme::sliding;
  double truncation = 0.0;
  SolverDiagnostics solver;

  [[nodiscard]] double m_effective() const noexcept {
    return static_cast<double>(n) / static_cast<double>(r);
  }
};

/// P(X <= x) = exp(-(x/sigma)^-alpha); 0 for x <= 0.
inline double cdf(const Params& p, double x) {
  if (x <= 0.0) return 0.0;
  return std::exp(-std::pow(x / p.sigma, -p.alpha));
}

inline double quantile(const Params& p, double prob) {
  if (!(prob > 0.0 && prob < 1.0)) throw InputError("quantile probability must be in (0, 1)");
  return p.sigma * std::pow(-std::log(prob), -1.0 / p.alpha);
}

inline double log_likelihood(std::span<const double> sample, const Params& p) {
  double ll = 0.0;
  const double log_prefix = std::log(p.alpha) - std::log(p.sigma);
  for (double x : sample) {
    if (!(x > 0.0)) throw InputError("Frechet log-likelihood needs positive observations");
    const double z = x / p.sigma;
    ll += log_prefix - (p.alpha + 1.0) * std::log(z) - std::pow(z, -p.alpha);
  }
  return ll;
}

/// Profile score in the shape after the scale has been profiled out, evaluated on centred
/// log-observations. Its root is the likelihood maximizer; it is strictly decreasing.
class ProfileScore {
 public:
  explicit ProfileScore(std::span<const double> sample) {
    logs_.reserve(sample.size());
    for (double x : sample) {
      if (!(x > 0.0) || !std::isfinite(x)) {
        throw InputError("Frechet fit needs positive finite observations");
      }
      logs_.push_back(std::log(x));
    }
    mean_log_ = std::accumulate(logs_.begin(), logs_.end(), 0.0) / static_cast<double>(logs_.size());
    for (double& l : logs_) l -= mean_log_;
    min_log_ = *std::min_element(logs_.begin(), logs_.end());
    max_log_ = *std::max_element(logs_.begin(), logs_.end());
  }

  struct Value {
    double score;
    double derivative;
  };

  /// score(a) = 1/a + sum w_i l_i - mean(l), weights w_i ∝ exp(-a l_i), l_i centred logs.
  [[nodiscard]] Value evaluate(double a) const {
    double s0 = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    for (double l : logs_) {
      const double w = std::exp(-a * (l - min_log_));
      s0 += w;
      s1 += w * l;
      s2 += w * l * l;
    }
    const double mean_w = s1 / s0;
    const double var_w = std::max(0.0, s2 / s0 - mean_w * mean_w);
    return {1.0 / a + mean_w, -1.0 / (a * a) - var_w};
  }

  /// log of the profiled scale at shape a, sigma(a)^a = k / sum x_i^-a.
  [[nodiscard]] double log_sigma(double a) const {
    double s0 = 0.0;
    for (double l : logs_) s0 += std::exp(-a * (l - min_log_));
    return mean_log_ + min_log_ + (std::log(static_cast<double>(logs_.size())) - std::log(s0)) / a;
  }

  [[nodiscard]] bool degenerate() const noexcept { return max_log_ == min_log_; }
  [[nodiscard]] std::span<const double> centred_logs() const noexcept { return logs_; }

 private:
  std::vector<double> logs_;
  double mean_log_ = 0.0;
  double min_log_ = 0.0;
  double max_log_ = 0.0;
};

/// Maximum (quasi-)likelihood Frechet fit by profiling out the scale and solving the
/// profile score with Newton steps safeguarded by bisection.
inline Fit fit(std::span<const double> sample, const SolverOptions& opts = {}) {
  if (sample.size() < 2) throw InputError("Frechet fit needs at least two observations");
  const ProfileScore score(sample);
  if (score.degenerate()) throw DegenerateSampleError("all sample values are equal");

  double lo = opts.bracket_low;
  double hi = opts.bracket_high;
  double f_lo = score.evaluate(lo).score;
  double f_hi = score.evaluate(hi).score;
  while (!(f_lo > 0.0 && f_hi < 0.0)) {
    const bool can_lower = lo > opts.bracket_low_limit;
    const bool can_raise = hi < opts.bracket_high_limit;
    if (!can_lower && !can_raise) {
      throw ConvergenceError("profile score does not change sign on [" + std::to_string(lo) +
                             ", " + std::to_string(hi) + "]");
    }
    if (f_lo <= 0.0 && can_lower) {
      lo = std::max(lo * 1e-1, opts.bracket_low_limit);
      f_lo = score.evaluate(lo).score;
    } else if (f_hi >= 0.0 && can_raise) {
      hi = std::min(hi * 1e1, opts.bracket_high_limit);
      f_hi = score.evaluate(hi).score;
    } else {
      throw ConvergenceError("profile score does not change sign within the bracket limits");
    }
  }
  const double bracket_lo = lo;
  const double bracket_hi = hi;

  // Seed from the log-moment relation Var(log X) = pi^2 / (6 alpha^2).
  double var_log = 0.0;
  for (double l : score.centred_logs()) var_log += l * l;
  var_log /= static_cast<double>(sample.size());
  double a = std::numbers::pi / std::sqrt(6.0 * var_log);
  if (!(a > lo && a < hi)) a = std::sqrt(lo * hi);

  SolverDiagnostics diag;
  diag.bracket_low = bracket_lo;
  diag.bracket_high = bracket_hi;
  bool converged = false;
  ProfileScore::Value v{};
  for (int it = 1; it <= opts.max_iterations; ++it) {
    diag.iterations = it;
    v = score.evaluate(a);
    if (v.score == 0.0) {
      converged = true;
      break;
    }
    if (v.score > 0.0) lo = a; else hi = a;
    double next = a - v.score / v.derivative;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - a);
    a = next;
    if (step <= opts.rel_tol * a || (hi - lo) <= opts.rel_tol * a) {
      v = score.evaluate(a);
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw ConvergenceError("profile score solver exceeded " + std::to_string(opts.max_iterations) +
                           " iterations");
  }
  diag.residual = v.score;

  Fit out;
  out.params = {a, std::exp(score.log_sigma(a))};
  out.k = sample.size();
  out.n = sample.size();
  out.solver = diag;
  return out;
}

/// Fits a (truncated) block maxima sample and records its provenance.
inline Fit fit(const BlockMaximaSample& sample, double truncation,
               const SolverOptions& opts = {}) {
  auto out = fit(std::span<const double>(sample.maxima), opts);
  out.r = sample.r;
  out.n = sample.n;
  out.scheme = sample.scheme;
  out.truncation = truncation;
  return out;
}

/// Inverse-cdf draws sigma * (-log U)^(-1/alpha).
inline std::vector<double> sample(Engine& rng, const Params& p, std::size_t count) {
  std::vector<double> out(count);
  for (double& x : out) x = p.sigma * std::pow(standard_exponential(rng), -1.0 / p.alpha);
  return out;
}

}  // namespace sbm::frechet

namespace sbm::frechet {

/// Block maxima extraction, left truncation at c and fit in one call.
inline Fit fit_series(const TimeSeries& series, std::size_t r, Scheme scheme,
                      double truncation = default_truncation(), const SolverOptions& opts = {}) {
  return fit(left_truncate(block_maxima(series, r, scheme), truncation), truncation, opts);
}

}  // namespace sbm::frechet
