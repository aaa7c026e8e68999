#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sbm/blocks.hpp"
#include "sbm/error.hpp"
#include "sbm/frechet.hpp"
#include "sbm/parallel.hpp"
#include "sbm/rng.hpp"

namespace sbm::simulate {

enum class Family { iid, armax };
enum class Innovation { frechet, pareto, abs_t };
enum class Estimator { sliding, disjoint, hill };

inline std::string_view to_string(Family f) { return f == Family::iid ? "iid" : "armax"; }
inline std::string_view to_string(Innovation i) {
  switch (i) {
    case Innovation::frechet: return "frechet";
    case Innovation::pareto: return "pareto";
    case Innovation::abs_t: return "abs_t";
  }
  return "";
}
inline std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::sliding: return "sliding";
    case Estimator::disjoint: return "disjoint";
    case Estimator::hill: return "hill";
  }
  return "";
}

inline Family parse_family(std::string_view s) {
  if (s == "iid") return Family::iid;
  if (s == "armax") return Family::armax;
  throw InputError("unknown model '" + std::string(s) + "' (expected iid or armax)");
}
inline Innovation parse_innovation(std::string_view s) {
  if (s == "frechet") return Innovation::frechet;
  if (s == "pareto") return Innovation::pareto;
  if (s == "abs_t" || s == "t") return Innovation::abs_t;
  throw InputError("unknown distribution '" + std::string(s) + "'");
}
inline Estimator parse_estimator(std::string_view s) {
  if (s == "sliding") return Estimator::sliding;
  if (s == "disjoint") return Estimator::disjoint;
  if (s == "hill") return Estimator::hill;
  throw InputError("unknown estimator '" + std::string(s) + "'");
}

struct GeneratorSpec {
  Family family = Family::iid;
  Innovation innovation = Innovation::frechet;
  double alpha = 1.0;
  double beta = 0.0;
  std::size_t burn_in = 200;

  void validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InputError("tail index must be positive");
    if (!(beta >= 0.0 && beta < 1.0)) throw InputError("ARMAX beta must be in [0, 1)");
  }
};

/// One innovation draw with tail index alpha:
///   frechet  (-log U)^(-1/alpha)
///   pareto   U^(-1/alpha), survival (y v 1)^-alpha
///   abs_t    |N| / sqrt(chi2_alpha / alpha)
inline double draw_innovation(Engine& rng, Innovation kind, double alpha) {
  switch (kind) {
    case Innovation::frechet: return std::pow(standard_exponential(rng), -1.0 / alpha);
    case Innovation::pareto: return std::pow(uniform_open(rng), -1.0 / alpha);
    case Innovation::abs_t: {
      const double z = standard_normal(rng);
      const double chi = chi_square(rng, alpha);
      return std::abs(z) / std::sqrt(chi / alpha);
    }
  }
  return 0.0;
}

/// iid innovations, or X_t = max(beta X_{t-1}, (1 - beta) Z_t) after burn_in discarded steps.
inline TimeSeries generate(Engine& rng, const GeneratorSpec& spec, std::size_t n) {
  spec.validate();
  if (n < 1) throw InputError("series length must be at least 1");
  std::vector<double> out(n);
  if (spec.family == Family::iid) {
    for (double& x : out) x = draw_innovation(rng, spec.innovation, spec.alpha);
    return TimeSeries(std::move(out));
  }
  const double scale = 1.0 - spec.beta;
  double x = scale * draw_innovation(rng, spec.innovation, spec.alpha);
  for (std::size_t t = 0; t < spec.burn_in; ++t) {
    x = std::max(spec.beta * x, scale * draw_innovation(rng, spec.innovation, spec.alpha));
  }
  for (double& v : out) {
    x = std::max(spec.beta * x, scale * draw_innovation(rng, spec.innovation, spec.alpha));
    v = x;
  }
  return TimeSeries(std::move(out));
}

/// Hill estimator from the m largest observations over the (m+1)-th largest.
inline double hill(std::span<const double> sample, std::size_t m) {
  const std::size_t n = sample.size();
  if (m < 2 || m >= n) {
    throw InputError("Hill estimator needs 2 <= m < n (m = " + std::to_string(m) +
                     ", n = " + std::to_string(n) + ")");
  }
  std::vector<double> sorted(sample.begin(), sample.end());
  // sorted[0..m) are the m largest, sorted[m] the threshold
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(m), sorted.end(),
                   std::greater<>());
  const double threshold = sorted[m];
  if (!(threshold > 0.0)) throw EstimationError("Hill threshold must be positive");
  double log_sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) log_sum += std::log(sorted[i] / threshold);
  if (!(log_sum > 0.0)) throw EstimationError("Hill log-excess sum is zero");
  return static_cast<double>(m) / log_sum;
}

struct McConfig {
  std::size_t n = 1000;
  std::vector<Estimator> estimators = {Estimator::sliding, Estimator::disjoint, Estimator::hill};
  std::vector<std::size_t> grid;  ///< effective sample sizes m
  std::size_t reps = 3000;
  std::uint64_t seed = 1;
  double truncation = default_truncation();
  unsigned threads = 1;

  void validate() const {
    if (reps < 1) throw InputError("reps must be at least 1");
    if (grid.empty()) throw InputError("grid of effective sample sizes is empty");
    if (estimators.empty()) throw InputError("no estimators selected");
    for (auto m : grid) {
      if (m < 2) throw InputError("every grid value m must be at least 2");
      if (m > n) throw InputError("grid value m exceeds the series length");
    }
    if (!(truncation > 0.0)) throw InputError("truncation must be positive");
  }
};

struct McCell {
  Estimator estimator = Estimator::sliding;
  std::size_t m = 0;
  std::size_t r = 0;  ///< floor(n / m)
  double mean = 0.0;
  double mean_sigma = std::numeric_limits<double>::quiet_NaN();  ///< blocks estimators only
  double bias2 = 0.0;
  double variance = 0.0;  ///< population form (denominator = successful reps)
  double mse = 0.0;
  std::size_t reps = 0;  ///< successful replications
  std::size_t failures = 0;
  bool valid = true;  ///< failures below 1% of reps
};

struct McResult {
  std::vector<McCell> cells;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  double alpha0 = 0.0;

  [[nodiscard]] const McCell& cell(Estimator e, std::size_t m) const {
    for (const auto& c : cells) {
      if (c.estimator == e && c.m == m) return c;
    }
    throw InputError("no Monte Carlo cell for requested estimator and m");
  }
};

/// Shape (and, for blocks, scale) estimate of one estimator at effective size m.
struct PointEstimate {
  double alpha;
  double sigma;
};

inline PointEstimate estimate_at(const TimeSeries& series, Estimator e, std::size_t m,
                                 double truncation) {
  const std::size_t r = series.size() / m;
  if (e == Estimator::hill) {
    return {hill(series.values(), m), std::numeric_limits<double>::quiet_NaN()};
  }
  const auto f = frechet::fit_series(series, r,
                                     e == Estimator::sliding ? Scheme::sliding : Scheme::disjoint,
                                     truncation);
  return {f.params.alpha, f.params.sigma};
}

/// Monte Carlo study of shape estimators. Replication i draws from stream (seed, i), so the
/// result is independent of config.threads.
inline McResult run_mc(const McConfig& config, const GeneratorSpec& spec) {
  config.validate();
  spec.validate();
  const std::size_t ncell = config.estimators.size() * config.grid.size();
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<PointEstimate>> per_rep(config.reps);

  parallel_for(config.reps, config.threads, [&](std::size_t rep) {
    Engine rng = make_stream(config.seed, rep);
    const TimeSeries series = generate(rng, spec, config.n);
    auto& row = per_rep[rep];
    row.reserve(ncell);
    for (auto e : config.estimators) {
      for (auto m : config.grid) {
        try {
          row.push_back(estimate_at(series, e, m, config.truncation));
        } catch (const EstimationError&) {
          row.push_back({nan, nan});
        } catch (const InputError&) {
          row.push_back({nan, nan});
        }
      }
    }
  });

  McResult out;
  out.reps = config.reps;
  out.seed = config.seed;
  out.alpha0 = spec.alpha;
  std::size_t idx = 0;
  for (auto e : config.estimators) {
    for (auto m : config.grid) {
      McCell cell;
      cell.estimator = e;
      cell.m = m;
      cell.r = config.n / m;
      CompensatedSum sum;
      CompensatedSum sum_sigma;
      for (const auto& row : per_rep) {
        const double a = row[idx].alpha;
        if (std::isnan(a)) {
          ++cell.failures;
          continue;
        }
        ++cell.reps;
        sum.add(a);
        sum_sigma.add(row[idx].sigma);
      }
      cell.valid = cell.reps > 0 && 100 * cell.failures < config.reps;
      if (cell.reps > 0) {
        const double cnt = static_cast<double>(cell.reps);
        cell.mean = sum.value() / cnt;
        if (e != Estimator::hill) cell.mean_sigma = sum_sigma.value() / cnt;
        CompensatedSum dev;
        for (const auto& row : per_rep) {
          const double a = row[idx].alpha;
          if (!std::isnan(a)) dev.add((a - cell.mean) * (a - cell.mean));
        }
        cell.variance = dev.value() / cnt;
        cell.bias2 = (cell.mean - spec.alpha) * (cell.mean - spec.alpha);
        cell.mse = cell.bias2 + cell.variance;
      } else {
        cell.mean = cell.bias2 = cell.variance = cell.mse = nan;
      }
      out.cells.push_back(cell);
      ++idx;
    }
  }
  return out;
}

struct TrajectoryPoint {
  std::size_t r = 0;
  std::size_t m = 0;  ///< floor(n / r), used by Hill
  std::optional<double> sliding;
  std::optional<double> disjoint;
  std::optional<double> hill;
  std::string error;  ///< messages of failed cells
};

/// Shape estimates of the three estimators along a grid of block sizes.
inline std::vector<TrajectoryPoint> trajectory(const TimeSeries& series,
                                               std::span<const std::size_t> r_grid,
                                               double truncation = default_truncation()) {
  const std::size_t n = series.size();
  std::vector<TrajectoryPoint> out;
  out.reserve(r_grid.size());
  for (auto r : r_grid) {
    if (r < 1 || r > n) throw InputError("trajectory block size outside [1, n]");
    TrajectoryPoint p;
    p.r = r;
    p.m = n / r;
    auto attempt = [&](auto&& fn, std::optional<double>& slot, std::string_view label) {
      try {
        slot = fn();
      } catch (const std::exception& ex) {
        if (!p.error.empty()) p.error += "; ";
        p.error += std::string(label) + ": " + ex.what();
      }
    };
    attempt([&] { return frechet::fit_series(series, r, Scheme::sliding, truncation).params.alpha; },
            p.sliding, "sliding");
    attempt([&] { return frechet::fit_series(series, r, Scheme::disjoint, truncation).params.alpha; },
            p.disjoint, "disjoint");
    attempt([&] { return hill(series.values(), p.m); }, p.hill, "hill");
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace sbm::simulate
