#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sbm/error.hpp"

namespace sbm {

enum class Scheme { sliding, disjoint };

inline std::string_view to_string(Scheme s) {
  return s == Scheme::sliding ? "sliding" : "disjoint";
}

inline Scheme parse_scheme(std::string_view s) {
  if (s == "sliding") return Scheme::sliding;
  if (s == "disjoint") return Scheme::disjoint;
  throw InputError("unknown block scheme '" + std::string(s) + "'");
}

/// Ordered, finite observations.
class TimeSeries {
 public:
  TimeSeries() = default;
  explicit TimeSeries(std::vector<double> values) : values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) {
        throw InputError("non-finite observation at index " + std::to_string(i));
      }
    }
  }

  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] bool empty() const noexcept { return values_.empty(); }
  [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }

 private:
  std::vector<double> values_;
};

struct BlockMaximaSample {
  std::vector<double> maxima;
  std::size_t r = 1;
  Scheme scheme = Scheme::sliding;
  std::size_t n = 0;  ///< source series length
  std::size_t k = 0;  ///< n - r + 1
  std::size_t m = 0;  ///< floor(n / r)

  [[nodiscard]] std::size_t size() const noexcept { return maxima.size(); }
  /// Effective sample size n / r used in the asymptotic variances.
  [[nodiscard]] double m_effective() const noexcept {
    return static_cast<double>(n) / static_cast<double>(r);
  }
};

/// Default left-truncation level: square root of machine epsilon.
inline constexpr double default_truncation() noexcept {
  // sqrt(DBL_EPSILON) = 2^-26
  return 1.4901161193847656e-08;
}

namespace detail {

inline void check_block_size(std::size_t n, std::size_t r) {
  if (r < 1 || r > n) {
    throw InputError("block size " + std::to_string(r) + " outside [1, " + std::to_string(n) +
                     "]");
  }
}

inline BlockMaximaSample make_sample(std::size_t n, std::size_t r, Scheme scheme) {
  BlockMaximaSample out;
  out.r = r;
  out.scheme = scheme;
  out.n = n;
  out.k = n - r + 1;
  out.m = n / r;
  return out;
}

}  // namespace detail

/// Maxima of all windows values[t, t+r), t = 0..n-r, in O(n) with a monotone deque
/// of candidate indices (values strictly decreasing from front to back).
inline std::vector<double> sliding_window_max(std::span<const double> values, std::size_t r) {
  detail::check_block_size(values.size(), r);
  const std::size_t n = values.size();
  std::vector<double> out;
  out.reserve(n - r + 1);
  std::deque<std::size_t> window;
  for (std::size_t i = 0; i < n; ++i) {
    while (!window.empty() && values[window.back()] <= values[i]) window.pop_back();
    window.push_back(i);
    if (window.front() + r <= i) window.pop_front();
    if (i + 1 >= r) out.push_back(values[window.front()]);
  }
  return out;
}

inline BlockMaximaSample sliding_maxima(const TimeSeries& series, std::size_t r) {
  detail::check_block_size(series.size(), r);
  auto out = detail::make_sample(series.size(), r, Scheme::sliding);
  out.maxima = sliding_window_max(series.values(), r);
  return out;
}

/// Maxima of the floor(n/r) consecutive full blocks; a trailing partial block is dropped.
inline BlockMaximaSample disjoint_maxima(const TimeSeries& series, std::size_t r) {
  detail::check_block_size(series.size(), r);
  auto out = detail::make_sample(series.size(), r, Scheme::disjoint);
  const auto v = series.values();
  out.maxima.reserve(out.m);
  for (std::size_t h = 0; h < out.m; ++h) {
    double mx = v[h * r];
    for (std::size_t j = h * r + 1; j < (h + 1) * r; ++j) mx = std::max(mx, v[j]);
    out.maxima.push_back(mx);
  }
  return out;
}

inline BlockMaximaSample block_maxima(const TimeSeries& series, std::size_t r, Scheme scheme) {
  return scheme == Scheme::sliding ? sliding_maxima(series, r) : disjoint_maxima(series, r);
}

/// Replaces every value by max(value, c).
inline BlockMaximaSample left_truncate(BlockMaximaSample sample, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw InputError("truncation level must be positive and finite");
  }
  for (double& x : sample.maxima) x = std::max(x, c);
  return sample;
}

}  // namespace sbm
