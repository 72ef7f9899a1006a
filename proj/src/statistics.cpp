#include "wigfluct/statistics.hpp"

#include <cmath>
#include <stdexcept>

#include "wigfluct/rng.hpp"

namespace wigfluct::stats {
namespace {

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

void MomentAccumulator::add(double x) {
  MomentAccumulator one;
  one.n_ = 1;
  one.mean_ = x;
  merge(one);
}

void MomentAccumulator::merge(const MomentAccumulator& b) {
  if (b.n_ == 0) return;
  if (n_ == 0) {
    *this = b;
    return;
  }
  const double na = static_cast<double>(n_), nb = static_cast<double>(b.n_);
  const double n = na + nb;
  const double delta = b.mean_ - mean_;
  std::array<double, kMaxOrder + 1> out{};
  for (int p = 2; p <= kMaxOrder; ++p) {
    double s = m_[p] + b.m_[p];
    for (int k = 1; k <= p - 2; ++k) {
      s += binom(p, k) * std::pow(delta, k) *
           (std::pow(-nb / n, k) * m_[p - k] + std::pow(na / n, k) * b.m_[p - k]);
    }
    s += std::pow(na * nb / n * delta, p) * (1.0 / std::pow(nb, p - 1) - std::pow(-1.0 / na, p - 1));
    out[p] = s;
  }
  m_ = out;
  mean_ += delta * nb / n;
  n_ += b.n_;
}

double MomentAccumulator::central(int p) const {
  if (p < 2 || p > kMaxOrder) throw std::out_of_range("central moment order");
  return n_ == 0 ? 0.0 : m_[p] / static_cast<double>(n_);
}

double MomentAccumulator::variance() const {
  return n_ < 2 ? 0.0 : m_[2] / static_cast<double>(n_ - 1);
}

double MomentAccumulator::raw(int k) const {
  if (k < 1 || k > kMaxOrder) throw std::out_of_range("raw moment order");
  double s = std::pow(mean_, k);
  for (int p = 2; p <= k; ++p) s += binom(k, p) * central(p) * std::pow(mean_, k - p);
  return s;
}

Estimate mean_estimate(std::span<const double> xs) {
  MomentAccumulator acc;
  for (double x : xs) acc.add(x);
  const double n = static_cast<double>(acc.count());
  return {acc.mean(), n > 1 ? std::sqrt(acc.variance() / n) : 0.0};
}

Estimate variance_estimate(std::span<const double> xs) {
  MomentAccumulator acc;
  for (double x : xs) acc.add(x);
  const double n = static_cast<double>(acc.count());
  if (n < 2) return {0.0, 0.0};
  const double m2 = acc.central(2), m4 = acc.central(4);
  return {acc.variance(), std::sqrt(std::max(m4 - m2 * m2, 0.0) / n)};
}

Estimate batch_means(std::span<const double> xs, const std::function<double(std::span<const double>)>& stat,
                     int batches) {
  Estimate out;
  out.value = stat(xs);
  const std::size_t size = xs.size() / static_cast<std::size_t>(std::max(batches, 1));
  if (batches < 2 || size == 0) return out;
  std::vector<double> per;
  per.reserve(static_cast<std::size_t>(batches));
  for (int b = 0; b < batches; ++b) per.push_back(stat(xs.subspan(static_cast<std::size_t>(b) * size, size)));
  out.se = sample_sd(per) / std::sqrt(static_cast<double>(batches));
  return out;
}

std::vector<double> bootstrap(std::span<const double> xs, const std::function<double(std::span<const double>)>& stat,
                              int replicates, std::uint64_t seed) {
  std::vector<double> out;
  if (xs.empty()) return out;
  Engine eng = make_engine(seed);
  std::uniform_int_distribution<std::size_t> pick(0, xs.size() - 1);
  std::vector<double> resample(xs.size());
  for (int r = 0; r < replicates; ++r) {
    for (auto& v : resample) v = xs[pick(eng)];
    out.push_back(stat(resample));
  }
  return out;
}

double sample_sd(std::span<const double> xs) {
  MomentAccumulator acc;
  for (double x : xs) acc.add(x);
  return std::sqrt(acc.variance());
}

}  // namespace wigfluct::stats
