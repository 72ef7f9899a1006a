#include "wigfluct/fluctuations.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

namespace wigfluct {
namespace {

double clip(double v, const char* what) {
  if (v >= 0.0) return v;
  if (v > -1e-9) return 0.0;
  throw std::runtime_error(std::string(what) + " is negative beyond quadrature noise");
}

double double_factorial(int k) {
  double r = 1.0;
  for (int i = k; i > 1; i -= 2) r *= i;
  return r;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

Complex ipow(Complex z, int k) {
  Complex r = 1.0;
  for (int i = 0; i < k; ++i) r *= z;
  return r;
}

}  // namespace

double predicted_variance_diag(const VTerms& v, double sigma4) {
  const double s2 = v.sigma2;
  return v.v1 + v.v1_sigma2 - 2.0 * v.v2 - (1.0 + s2) * v.v3 + (sigma4 - 2.0 - s2 * s2) * v.v4;
}

double predicted_variance_diag(const BVFunction& f, double sigma2, double sigma4) {
  return predicted_variance_diag(v_terms(f, sigma2), sigma4);
}

OffdiagVariance predicted_variance_offdiag(const VTerms& v) {
  return {v.v1_sigma2 - v.v2 - v.sigma2 * v.v3, v.v1 - v.v2 - v.v3};
}

OffdiagVariance predicted_variance_offdiag(const BVFunction& f, double sigma2) {
  return predicted_variance_offdiag(v_terms(f, sigma2));
}

FluctuationPrediction predict(const BVFunction& f, double sigma2, double sigma4) {
  FluctuationPrediction p;
  p.sigma2 = sigma2;
  p.sigma4 = sigma4;
  p.lipschitz = f.lipschitz();
  p.mean = sc_integral(f, ScWeight::One);
  p.xi_coeff = sc_integral(f, ScWeight::X);
  p.v = v_terms(f, sigma2);
  p.var_diag = clip(predicted_variance_diag(p.v, sigma4), "diagonal variance");
  const OffdiagVariance off = predicted_variance_offdiag(p.v);
  p.abs_sq = clip(off.eabssq, "off-diagonal variance");
  p.var_offdiag_sq = off.esq;
  if (std::abs(p.var_offdiag_sq) > p.abs_sq) {
    if (std::abs(p.var_offdiag_sq) - p.abs_sq > 1e-9) throw std::runtime_error("|E D^2| exceeds E|D|^2");
    p.var_offdiag_sq = std::copysign(p.abs_sq, p.var_offdiag_sq);
  }
  return p;
}

Complex f_of_H_entry(const WignerMatrix& h, const BVFunction& f, std::size_t i, std::size_t j) {
  if (i >= h.n() || j >= h.n()) throw std::out_of_range("f_of_H_entry: index out of range");
  const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
  Complex sum = 0.0;
  if (h.is_real()) {
    const auto e = spectral::eigh(h.real_entries());
    for (Eigen::Index k = 0; k < e.values.size(); ++k) sum += f(e.values(k)) * e.vectors(ii, k) * e.vectors(jj, k);
  } else {
    const auto e = spectral::eigh(h.complex_entries());
    for (Eigen::Index k = 0; k < e.values.size(); ++k)
      sum += f(e.values(k)) * e.vectors(ii, k) * std::conj(e.vectors(jj, k));
  }
  return sum;
}

EntryValues entry_values(const spectral::EntrySpectrum& s, const BVFunction& f) {
  EntryValues out;
  for (std::size_t k = 0; k < s.n; ++k) {
    const double fk = f(s.eigenvalues[k]);
    if (fk == 0.0) continue;
    out.f11 += fk * s.first[k] * s.first[k];
    out.f12 += fk * s.first[k] * std::conj(s.second[k]);
  }
  return out;
}

SampleStatistic t_statistic(const EntryValues& e, std::size_t n, double xi11, Complex xi12,
                            const FluctuationPrediction& pred) {
  const double rn = std::sqrt(static_cast<double>(n));
  SampleStatistic s;
  s.f11 = e.f11;
  s.f12 = e.f12;
  s.t_value = rn * (e.f11 - pred.mean) - xi11 * pred.xi_coeff;
  s.s_value = rn * e.f12 - xi12 * pred.xi_coeff;
  return s;
}

SampleStatistic t_statistic(const WignerMatrix& h, const BVFunction& f, const FluctuationPrediction& pred) {
  EntryValues e;
  e.f11 = f_of_H_entry(h, f, 0, 0).real();
  e.f12 = f_of_H_entry(h, f, 0, 1);
  return t_statistic(e, h.n(), h.xi11(), h.xi12(), pred);
}

double gaussian_moment(int k, double variance) {
  if (k < 0) throw std::invalid_argument("gaussian_moment: negative order");
  if (variance < 0.0) throw std::domain_error("gaussian_moment: negative variance");
  if (k % 2 == 1) return 0.0;
  return double_factorial(k - 1) * std::pow(variance, k / 2);
}

Eigen::Matrix2d complex_gaussian_covariance(Complex esq, double eabssq) {
  if (std::abs(esq) > eabssq + 1e-12) throw std::domain_error("complex Gaussian: |E D^2| exceeds E|D|^2");
  Eigen::Matrix2d c;
  c << 0.5 * (eabssq + esq.real()), 0.5 * esq.imag(), 0.5 * esq.imag(), 0.5 * (eabssq - esq.real());
  return c;
}

Complex complex_gaussian_moment(int k, int l, Complex esq, double eabssq) {
  if (k < 0 || l < 0) throw std::invalid_argument("complex_gaussian_moment: negative order");
  if (std::abs(esq) > eabssq + 1e-12) throw std::domain_error("complex Gaussian: |E D^2| exceeds E|D|^2");
  Complex total = 0.0;
  for (int j = 0; j <= std::min(k, l); ++j) {
    if ((k - j) % 2 != 0 || (l - j) % 2 != 0) continue;
    const double count = binom(k, j) * binom(l, j) * std::tgamma(j + 1.0) * double_factorial(k - j - 1) *
                         double_factorial(l - j - 1);
    total += count * std::pow(eabssq, j) * ipow(esq, (k - j) / 2) * ipow(std::conj(esq), (l - j) / 2);
  }
  return total;
}

double levy_distance(std::span<const double> samples, double variance) {
  if (variance < 0.0) throw std::domain_error("levy_distance: negative variance");
  if (samples.empty()) throw std::invalid_argument("levy_distance: no samples");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  // Distinct jump points and the empirical CDF value reached at each.
  std::vector<double> at;
  std::vector<double> level;
  const double n = static_cast<double>(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i + 1 < s.size() && s[i + 1] == s[i]) continue;
    at.push_back(s[i]);
    level.push_back(static_cast<double>(i + 1) / n);
  }
  const bool degenerate = variance == 0.0;
  const boost::math::normal_distribution<double> normal(0.0, degenerate ? 1.0 : std::sqrt(variance));
  auto g = [&](double x) { return degenerate ? (x >= 0.0 ? 1.0 : 0.0) : boost::math::cdf(normal, x); };
  auto g_left = [&](double x) { return degenerate ? (x > 0.0 ? 1.0 : 0.0) : boost::math::cdf(normal, x); };
  auto feasible = [&](double eps) {
    // G(x) <= F(x + eps) + eps: binding just before each jump of F(. + eps).
    double below = 0.0;
    for (std::size_t i = 0; i < at.size(); ++i) {
      if (g_left(at[i] - eps) > below + eps) return false;
      below = level[i];
    }
    // F(x - eps) - eps <= G(x): binding at each jump of F(. - eps).
    for (std::size_t i = 0; i < at.size(); ++i)
      if (g(at[i] + eps) < level[i] - eps) return false;
    return true;
  };
  if (feasible(0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 100 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace wigfluct
