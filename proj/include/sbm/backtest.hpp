#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sbm/blocks.hpp"
#include "sbm/error.hpp"
#include "sbm/frechet.hpp"
#include "sbm/io.hpp"
#include "sbm/returnlevel.hpp"

namespace sbm::backtest {

struct Config {
  std::size_t window = 2500;
  std::size_t r = 62;
  std::size_t step = 0;  ///< 0 means step = r
  std::vector<double> T_list = {20, 40, 80};
  io::Sign sign = io::Sign::positive;  ///< recorded only; applied when building returns
  double level = 0.95;
  double truncation = default_truncation();

  [[nodiscard]] std::size_t effective_step() const noexcept { return step == 0 ? r : step; }
};

struct Roll {
  std::size_t index = 0;
  std::size_t train_begin = 0;
  std::size_t window_end = 0;  ///< index of the last training observation
  std::string label;
  bool failed = false;
  std::string error;
  double alpha = 0.0;
  double sigma = 0.0;
  std::vector<returnlevel::Estimate> levels;  ///< one per T
  double realized_max = 0.0;                  ///< maximum of the next r observations
  std::vector<bool> exceeded;
};

struct Report {
  Config config;
  std::vector<Roll> rolls;
  std::vector<std::size_t> exceedances;  ///< per T, successful rolls only
  std::vector<double> expected;          ///< successful rolls / T
  std::size_t successful = 0;
  std::size_t failed = 0;
};

/// Number of rolls j >= 0 with j * step + window + r <= n.
inline std::size_t roll_count(std::size_t n, const Config& c) {
  if (c.window + c.r > n) return 0;
  return (n - c.window - c.r) / c.effective_step() + 1;
}

/// Rolling out-of-sample check of sliding block maxima return levels: fit on each training
/// window and compare RL(T) with the maximum of the following block of r observations.
inline Report run(const TimeSeries& series, const Config& config,
                  std::span<const std::string> labels = {}) {
  if (config.r < 1) throw InputError("block size must be at least 1");
  if (config.window < config.r) throw InputError("training window shorter than block size");
  if (config.window + config.r > series.size()) {
    throw InputError("window + block size exceeds series length");
  }
  if (config.T_list.empty()) throw InputError("no return periods given");
  for (double T : config.T_list) {
    if (!(T > 1.0)) throw InputError("return periods must exceed 1");
  }
  if (!labels.empty() && labels.size() != series.size()) {
    throw InputError("label count does not match series length");
  }

  Report rep;
  rep.config = config;
  rep.exceedances.assign(config.T_list.size(), 0);
  const auto values = series.values();
  const std::size_t count = roll_count(series.size(), config);
  const std::size_t step = config.effective_step();
  for (std::size_t j = 0; j < count; ++j) {
    Roll roll;
    roll.index = j;
    roll.train_begin = j * step;
    roll.window_end = roll.train_begin + config.window - 1;
    roll.label = labels.empty() ? std::to_string(roll.window_end) : labels[roll.window_end];
    const auto eval = values.subspan(roll.window_end + 1, config.r);
    roll.realized_max = *std::max_element(eval.begin(), eval.end());
    try {
      const TimeSeries train(
          std::vector<double>(values.begin() + static_cast<std::ptrdiff_t>(roll.train_begin),
                              values.begin() + static_cast<std::ptrdiff_t>(roll.window_end + 1)));
      const auto fit = frechet::fit_series(train, config.r, Scheme::sliding, config.truncation);
      roll.alpha = fit.params.alpha;
      roll.sigma = fit.params.sigma;
      for (double T : config.T_list) {
        const auto est = returnlevel::ci(fit, T, config.level);
        roll.levels.push_back(est);
        roll.exceeded.push_back(roll.realized_max > est.point);
      }
    } catch (const EstimationError& ex) {
      roll.failed = true;
      roll.error = ex.what();
      roll.levels.clear();
      roll.exceeded.clear();
    }
    if (roll.failed) {
      ++rep.failed;
    } else {
      ++rep.successful;
      for (std::size_t t = 0; t < config.T_list.size(); ++t) {
        if (roll.exceeded[t]) ++rep.exceedances[t];
      }
    }
    rep.rolls.push_back(std::move(roll));
  }
  for (double T : config.T_list) rep.expected.push_back(static_cast<double>(rep.successful) / T);
  return rep;
}

}  // namespace sbm::backtest
