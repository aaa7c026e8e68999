#pragma once

#include <array>
#include <cmath>
#include <initializer_list>
#include <queue>
#include <vector>

#include "sbm/error.hpp"

namespace sbm::quad {

struct Options {
  double abs_tol = 1e-12;
  double rel_tol = 0.0;
  int max_intervals = 4000;
};

struct Result {
  double value = 0.0;
  double error = 0.0;  ///< sum of per-interval |K21 - G10|
  int intervals = 0;
  int evaluations = 0;
};

namespace detail {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
inline constexpr std::array<double, 11> kronrod_nodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> kronrod_weights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077808644401905, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
// Gauss weights for the odd-indexed Kronrod nodes.
inline constexpr std::array<double, 5> gauss_weights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

/// Never evaluates f at the endpoints.
template <class F>
Segment gk21(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double kronrod = kronrod_weights[10] * f(center);
  double gauss = 0.0;
  for (std::size_t i = 0; i < 10; ++i) {
    const double dx = half * kronrod_nodes[i];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kronrod_weights[i] * pair;
    if (i % 2 == 1) gauss += gauss_weights[i / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of f over [points.front(), points.back()].
/// Interior points are initial breakpoints (kinks, singularities). The interval with the
/// largest error estimate is bisected until the summed estimate falls below
/// max(abs_tol, rel_tol * |value|). Throws NumericalError when max_intervals is reached.
template <class F>
Result integrate(F&& f, const std::vector<double>& points, const Options& opts = {}) {
  if (points.size() < 2) throw InputError("integration needs at least two points");
  std::priority_queue<detail::Segment> heap;
  Result res;
  double value = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i] < points[i + 1])) throw InputError("integration breakpoints must increase");
    auto s = detail::gk21(f, points[i], points[i + 1]);
    value += s.value;
    error += s.error;
    heap.push(s);
  }
  res.evaluations = 21 * static_cast<int>(heap.size());

  auto tolerance = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::abs(value)); };
  while (error > tolerance()) {
    if (static_cast<int>(heap.size()) >= opts.max_intervals) {
      throw NumericalError("adaptive quadrature did not converge", error,
                           static_cast<int>(heap.size()));
    }
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) {
      throw NumericalError("adaptive quadrature hit interval resolution limit", error,
                           static_cast<int>(heap.size()) + 1);
    }
    const auto left = detail::gk21(f, worst.a, mid);
    const auto right = detail::gk21(f, mid, worst.b);
    res.evaluations += 42;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum to drop accumulated cancellation from the incremental updates.
  res.intervals = static_cast<int>(heap.size());
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  res.value = value;
  res.error = error;
  return res;
}

template <class F>
Result integrate(F&& f, double a, double b, const Options& opts = {}) {
  return integrate(std::forward<F>(f), std::vector<double>{a, b}, opts);
}

}  // namespace sbm::quad
