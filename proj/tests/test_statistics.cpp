#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "wigfluct/rng.hpp"
#include "wigfluct/statistics.hpp"

using namespace wigfluct;
using namespace wigfluct::stats;

namespace {

std::vector<double> normals(std::size_t n, std::uint64_t seed, double sd = 1.0) {
  Engine eng = make_engine(seed);
  std::normal_distribution<double> d(0.0, sd);
  std::vector<double> v(n);
  for (auto& x : v) x = d(eng);
  return v;
}

}  // namespace

TEST(MomentAccumulator, MatchesTwoPassFormulas) {
  const auto xs = normals(1000, 3);
  MomentAccumulator acc;
  for (double x : xs) acc.add(x + 2.0);
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size() + 2.0;
  EXPECT_NEAR(acc.mean(), mean, 1e-13);
  for (int p = 2; p <= 8; ++p) {
    double s = 0.0;
    for (double x : xs) s += std::pow(x + 2.0 - mean, p);
    EXPECT_NEAR(acc.central(p), s / xs.size(), 1e-10 * std::max(1.0, std::abs(s / xs.size()))) << p;
  }
  for (int k = 1; k <= 6; ++k) {
    double s = 0.0;
    for (double x : xs) s += std::pow(x + 2.0, k);
    EXPECT_NEAR(acc.raw(k), s / xs.size(), 1e-9 * std::abs(s / xs.size())) << k;
  }
}

TEST(MomentAccumulator, MergeIsGroupingInvariant) {
  const auto xs = normals(999, 4);
  MomentAccumulator all;
  for (double x : xs) all.add(x);
  MomentAccumulator a, b, c;
  for (std::size_t i = 0; i < xs.size(); ++i) (i < 100 ? a : (i < 600 ? b : c)).add(xs[i]);
  MomentAccumulator left = a;
  left.merge(b);
  left.merge(c);
  MomentAccumulator right = b;
  right.merge(c);
  MomentAccumulator right2 = a;
  right2.merge(right);
  for (int p = 2; p <= MomentAccumulator::kMaxOrder; ++p) {
    EXPECT_NEAR(left.central(p), all.central(p), 1e-9 * std::max(1.0, all.central(p)));
    EXPECT_NEAR(right2.central(p), all.central(p), 1e-9 * std::max(1.0, all.central(p)));
  }
  EXPECT_EQ(left.count(), 999);
  MomentAccumulator empty;
  left.merge(empty);
  EXPECT_EQ(left.count(), 999);
}

TEST(Estimates, MeanAndVariance) {
  const auto xs = normals(40000, 5, 2.0);
  const auto m = mean_estimate(xs);
  EXPECT_NEAR(m.se, 2.0 / 200.0, 2e-4);
  EXPECT_LT(std::abs(m.value), 3 * m.se);
  const auto v = variance_estimate(xs);
  // Gaussian: Var of the sample variance ~ 2 sigma^4 / n.
  EXPECT_NEAR(v.se, std::sqrt(2.0 * 16.0 / 40000.0), 0.005);
  EXPECT_LT(std::abs(v.value - 4.0), 3 * v.se);
}

TEST(Estimates, BatchMeansAndBootstrap) {
  const auto xs = normals(20000, 6);
  auto mean = [](std::span<const double> s) { return std::accumulate(s.begin(), s.end(), 0.0) / s.size(); };
  const auto b = batch_means(xs, mean, 50);
  EXPECT_NEAR(b.se, 1.0 / std::sqrt(20000.0), 0.003);
  const auto reps = bootstrap(xs, mean, 200, 9);
  EXPECT_EQ(reps, bootstrap(xs, mean, 200, 9));
  EXPECT_NEAR(sample_sd(reps), 1.0 / std::sqrt(20000.0), 0.0015);
}
