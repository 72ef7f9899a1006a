#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace wigfluct::stats {

/// Count, mean and central moment sums up to order kMaxOrder, mergeable in
/// any grouping (pairwise update of Chan et al. generalized by Pebay).
class MomentAccumulator {
 public:
  static constexpr int kMaxOrder = 12;

  void add(double x);
  void merge(const MomentAccumulator& other);

  long count() const { return n_; }
  double mean() const { return mean_; }
  /// (1/n) sum (x - mean)^p, for 2 <= p <= kMaxOrder.
  double central(int p) const;
  /// Unbiased sample variance.
  double variance() const;
  /// (1/n) sum x^k, for 1 <= k <= kMaxOrder.
  double raw(int k) const;

 private:
  long n_ = 0;
  double mean_ = 0.0;
  std::array<double, kMaxOrder + 1> m_{};  // m_[p] = sum (x - mean)^p
};

struct Estimate {
  double value = 0.0;
  double se = 0.0;

  bool operator==(const Estimate&) const = default;
};

Estimate mean_estimate(std::span<const double> xs);
/// Unbiased variance with the delta-method standard error sqrt((m4 - m2^2)/n).
Estimate variance_estimate(std::span<const double> xs);

/// Statistic evaluated on the full sample; standard error from its spread
/// over `batches` consecutive equal batches.
Estimate batch_means(std::span<const double> xs, const std::function<double(std::span<const double>)>& stat,
                     int batches = 50);

/// Bootstrap replicates of `stat` from resampling with replacement,
/// deterministic in `seed`.
std::vector<double> bootstrap(std::span<const double> xs, const std::function<double(std::span<const double>)>& stat,
                              int replicates, std::uint64_t seed);

double sample_sd(std::span<const double> xs);

}  // namespace wigfluct::stats
