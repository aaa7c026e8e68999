#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "sbm/simulate.hpp"

namespace {

namespace sim = sbm::simulate;

sim::GeneratorSpec spec(sim::Family f, sim::Innovation i, double alpha = 1.0, double beta = 0.0) {
  sim::GeneratorSpec s;
  s.family = f;
  s.innovation = i;
  s.alpha = alpha;
  s.beta = beta;
  return s;
}

TEST(Generate, ParetoSupportAndTail) {
  auto rng = sbm::make_stream(3, 0);
  const auto x = sim::generate(rng, spec(sim::Family::iid, sim::Innovation::pareto, 2.0), 200000);
  std::size_t above = 0;
  for (double v : x.values()) {
    ASSERT_GE(v, 1.0);
    above += v > 3.0;
  }
  const double p = 1.0 / 9.0;
  EXPECT_NEAR(double(above) / x.size(), p, 4 * std::sqrt(p * (1 - p) / x.size()));
}

TEST(Generate, FrechetMargin) {
  auto rng = sbm::make_stream(4, 0);
  const std::size_t n = 200000;
  const auto x = sim::generate(rng, spec(sim::Family::iid, sim::Innovation::frechet, 1.5), n);
  for (double q : {0.7, 1.0, 2.0}) {
    const double p = std::exp(-std::pow(q, -1.5));
    const auto c = std::count_if(x.values().begin(), x.values().end(), [&](double v) { return v <= q; });
    EXPECT_NEAR(double(c) / n, p, 4 * std::sqrt(p * (1 - p) / n));
  }
}

TEST(Generate, AbsTMatchesStudentT) {
  // P(|t_3| <= 1) = 2 F_3(1) - 1 with F_3(1) = 1/2 + (1/pi)(atan(1/sqrt3) + sqrt3/4)
  auto rng = sbm::make_stream(5, 0);
  const std::size_t n = 200000;
  const auto x = sim::generate(rng, spec(sim::Family::iid, sim::Innovation::abs_t, 3.0), n);
  const double s3 = std::sqrt(3.0);
  const double p = 2.0 / std::numbers::pi * (std::atan(1.0 / s3) + s3 / 4.0);
  const auto c = std::count_if(x.values().begin(), x.values().end(), [](double v) { return v <= 1.0; });
  EXPECT_NEAR(double(c) / n, p, 4 * std::sqrt(p * (1 - p) / n));
  // Cauchy case: P(|t_1| <= 1) = 1/2
  auto rng1 = sbm::make_stream(6, 0);
  const auto y = sim::generate(rng1, spec(sim::Family::iid, sim::Innovation::abs_t, 1.0), n);
  const auto c1 = std::count_if(y.values().begin(), y.values().end(), [](double v) { return v <= 1.0; });
  EXPECT_NEAR(double(c1) / n, 0.5, 4 * std::sqrt(0.25 / n));
}

TEST(Generate, ArmaxBetaZeroIsIid) {
  const auto s = spec(sim::Family::armax, sim::Innovation::frechet, 1.0, 0.0);
  auto rng1 = sbm::make_stream(9, 1);
  auto rng2 = sbm::make_stream(9, 1);
  const auto a = sim::generate(rng1, s, 50);
  for (std::size_t i = 0; i < s.burn_in + 1; ++i) sim::draw_innovation(rng2, sim::Innovation::frechet, 1.0);
  for (std::size_t i = 0; i < 50; ++i) {
    EXPECT_EQ(a[i], sim::draw_innovation(rng2, sim::Innovation::frechet, 1.0));
  }
}

TEST(Generate, ArmaxStationaryLaw) {
  // With Frechet(1) innovations the stationary margin of max(b X, (1-b) Z) is Frechet(1):
  // P(X <= x) = exp(-1/x). Estimated from one observation per independent path.
  const auto s = spec(sim::Family::armax, sim::Innovation::frechet, 1.0, 0.5);
  const std::size_t paths = 40000;
  std::size_t below = 0;
  for (std::size_t i = 0; i < paths; ++i) {
    auto rng = sbm::make_stream(11, i);
    below += sim::generate(rng, s, 1)[0] <= 1.0;
  }
  const double p = std::exp(-1.0);
  EXPECT_NEAR(double(below) / paths, p, 4 / std::sqrt(double(paths)));
}

TEST(Generate, ArmaxRecursion) {
  const auto s = spec(sim::Family::armax, sim::Innovation::pareto, 2.0, 0.7);
  auto rng = sbm::make_stream(12, 0);
  const auto x = sim::generate(rng, s, 2000);
  for (std::size_t t = 1; t < x.size(); ++t) EXPECT_GE(x[t], 0.7 * x[t - 1]);
}

TEST(Generate, Deterministic) {
  const auto s = spec(sim::Family::armax, sim::Innovation::abs_t, 2.5, 0.3);
  auto r1 = sbm::make_stream(99, 7);
  auto r2 = sbm::make_stream(99, 7);
  const auto a = sim::generate(r1, s, 500);
  const auto b = sim::generate(r2, s, 500);
  for (std::size_t i = 0; i < 500; ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(Generate, Validation) {
  auto rng = sbm::make_stream(1, 0);
  EXPECT_THROW(sim::generate(rng, spec(sim::Family::armax, sim::Innovation::frechet, 1.0, 1.0), 10),
               sbm::InputError);
  EXPECT_THROW(sim::generate(rng, spec(sim::Family::iid, sim::Innovation::frechet, -1.0), 10),
               sbm::InputError);
  EXPECT_THROW(sim::generate(rng, spec(sim::Family::iid, sim::Innovation::frechet), 0), sbm::InputError);
}

TEST(Hill, HandValue) {
  const std::vector<double> x = {1, 2, 4, 8};
  EXPECT_NEAR(sim::hill(x, 3), 1.0 / (2.0 * std::numbers::ln2), 1e-12);
  const std::vector<double> shuffled = {4, 1, 8, 2};
  EXPECT_EQ(sim::hill(shuffled, 3), sim::hill(x, 3));
}

TEST(Hill, GeometricSample) {
  // {q^0..q^K}: top m over q^(K-m) have log-excesses j log q, j = 1..m
  const double q = 1.3;
  const int K = 20;
  std::vector<double> x;
  for (int j = 0; j <= K; ++j) x.push_back(std::pow(q, j));
  for (std::size_t m : {2u, 5u, 20u}) {
    const double expect = 2.0 / ((m + 1.0) * std::log(q));
    EXPECT_NEAR(sim::hill(x, m), expect, 1e-12 * expect);
  }
}

TEST(Hill, ScaleInvariance) {
  auto rng = sbm::make_stream(21, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = sim::generate(rng, spec(sim::Family::iid, sim::Innovation::pareto, 1.5), 300);
    std::vector<double> v(x.values().begin(), x.values().end());
    const double h = sim::hill(v, 40);
    for (double c : {0.25, 8.0, 1024.0}) {
      std::vector<double> w(v);
      for (double& e : w) e *= c;
      EXPECT_EQ(sim::hill(w, 40), h);
    }
    std::vector<double> w(v);
    for (double& e : w) e *= 3.7;
    EXPECT_NEAR(sim::hill(w, 40), h, 1e-13 * h);
  }
}

TEST(Hill, Errors) {
  const std::vector<double> x = {1, 2, 3, 4};
  EXPECT_THROW(sim::hill(x, 1), sbm::InputError);
  EXPECT_THROW(sim::hill(x, 4), sbm::InputError);
  EXPECT_THROW(sim::hill(std::vector<double>{-1, 2, 3, 4}, 3), sbm::EstimationError);
  EXPECT_THROW(sim::hill(std::vector<double>{5, 5, 5, 1}, 2), sbm::EstimationError);
}

TEST(Hill, UnbiasedOnExactPareto) {
  const auto s = spec(sim::Family::iid, sim::Innovation::pareto, 2.0);
  const int reps = 400;
  std::vector<double> est;
  for (int i = 0; i < reps; ++i) {
    auto rng = sbm::make_stream(31, i);
    est.push_back(sim::hill(sim::generate(rng, s, 10000).values(), 500));
  }
  const double mean = std::accumulate(est.begin(), est.end(), 0.0) / reps;
  double var = 0;
  for (double e : est) var += (e - mean) * (e - mean);
  const double sd = std::sqrt(var / (reps - 1));
  EXPECT_LE(std::abs(mean - 2.0) / (sd / std::sqrt(double(reps))), 3.0);
}

sim::McConfig small_config() {
  sim::McConfig c;
  c.n = 400;
  c.grid = {8, 20};
  c.reps = 60;
  c.seed = 17;
  return c;
}

TEST(RunMc, DecompositionAndDeterminism) {
  const auto s = spec(sim::Family::iid, sim::Innovation::frechet);
  auto c = small_config();
  const auto a = sim::run_mc(c, s);
  c.threads = 4;
  const auto b = sim::run_mc(c, s);
  ASSERT_EQ(a.cells.size(), 6u);
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    const auto& x = a.cells[i];
    EXPECT_EQ(x.mean, b.cells[i].mean);
    EXPECT_EQ(x.variance, b.cells[i].variance);
    EXPECT_EQ(x.failures, 0u);
    EXPECT_TRUE(x.valid);
    EXPECT_EQ(x.r, 400 / x.m);
    EXPECT_NEAR(x.mse, x.bias2 + x.variance, 1e-12 * x.mse);
    EXPECT_DOUBLE_EQ(x.bias2, (x.mean - 1.0) * (x.mean - 1.0));
  }
  EXPECT_TRUE(std::isnan(a.cell(sim::Estimator::hill, 8).mean_sigma));
  EXPECT_FALSE(std::isnan(a.cell(sim::Estimator::sliding, 8).mean_sigma));
}

TEST(RunMc, MatchesDirectReplication) {
  const auto s = spec(sim::Family::iid, sim::Innovation::pareto, 1.5);
  auto c = small_config();
  c.estimators = {sim::Estimator::disjoint};
  c.grid = {20};
  const auto res = sim::run_mc(c, s);
  std::vector<double> est;
  for (std::size_t i = 0; i < c.reps; ++i) {
    auto rng = sbm::make_stream(c.seed, i);
    const auto x = sim::generate(rng, s, c.n);
    est.push_back(sbm::frechet::fit_series(x, 20, sbm::Scheme::disjoint).params.alpha);
  }
  const double mean = std::accumulate(est.begin(), est.end(), 0.0) / est.size();
  double var = 0;
  for (double e : est) var += (e - mean) * (e - mean);
  var /= est.size();
  EXPECT_NEAR(res.cells[0].mean, mean, 1e-13);
  EXPECT_NEAR(res.cells[0].variance, var, 1e-13);
}

TEST(RunMc, SingleReplication) {
  auto c = small_config();
  c.reps = 1;
  const auto res = sim::run_mc(c, spec(sim::Family::iid, sim::Innovation::frechet));
  for (const auto& x : res.cells) {
    EXPECT_EQ(x.variance, 0.0);
    EXPECT_EQ(x.mse, x.bias2);
  }
}

TEST(RunMc, FailuresMarkCellInvalid) {
  // Hill with m = n has no threshold observation, so every replication fails
  auto c = small_config();
  c.n = 50;
  c.grid = {50};
  c.estimators = {sim::Estimator::hill};
  c.reps = 10;
  const auto res = sim::run_mc(c, spec(sim::Family::iid, sim::Innovation::frechet));
  EXPECT_EQ(res.cells[0].failures, 10u);
  EXPECT_FALSE(res.cells[0].valid);
}

TEST(RunMc, Validation) {
  auto c = small_config();
  c.grid = {1};
  EXPECT_THROW(sim::run_mc(c, spec(sim::Family::iid, sim::Innovation::frechet)), sbm::InputError);
  c = small_config();
  c.reps = 0;
  EXPECT_THROW(sim::run_mc(c, spec(sim::Family::iid, sim::Innovation::frechet)), sbm::InputError);
}

TEST(Trajectory, ShapeAndSmoothness) {
  auto rng = sbm::make_stream(41, 0);
  const auto s = spec(sim::Family::iid, sim::Innovation::abs_t, 1.0);
  std::vector<std::size_t> grid;
  for (std::size_t r = 5; r <= 40; ++r) grid.push_back(r);
  double rough_s = 0, rough_d = 0;
  for (int path = 0; path < 10; ++path) {
    const auto x = sim::generate(rng, s, 2000);
    const auto t = sim::trajectory(x, grid);
    ASSERT_EQ(t.size(), grid.size());
    for (std::size_t i = 1; i < t.size(); ++i) {
      rough_s += std::abs(*t[i].sliding - *t[i - 1].sliding);
      rough_d += std::abs(*t[i].disjoint - *t[i - 1].disjoint);
    }
  }
  EXPECT_LT(rough_s, rough_d);
}

TEST(Trajectory, SingleBlockFailsForDisjoint) {
  auto rng = sbm::make_stream(42, 0);
  const auto x = sim::generate(rng, spec(sim::Family::iid, sim::Innovation::frechet), 30);
  const std::vector<std::size_t> grid = {30};
  const auto t = sim::trajectory(x, grid);
  EXPECT_FALSE(t[0].disjoint.has_value());
  EXPECT_FALSE(t[0].error.empty());
}

}  // namespace
