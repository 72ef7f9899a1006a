#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <vector>

namespace wigfluct::quad {

/// Fixed quadrature rule on [-1, 1]; nodes ascending and mirror-symmetric.
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss–Legendre rule. Supported orders: 7, 10, 15, 20, 25, 30.
const Rule& gauss_legendre(int order);

/// Gauss–Kronrod 7/15 pair on [-1, 1], nonnegative half. Index 0 is the
/// centre node; the even indices of `kronrod_nodes` are the Gauss nodes.
struct GaussKronrod15 {
  std::array<double, 8> kronrod_nodes;
  std::array<double, 8> kronrod_weights;
  std::array<double, 4> gauss_weights;  // for kronrod_nodes 0, 2, 4, 6
};
const GaussKronrod15& gauss_kronrod15();

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

/// Two complex integrands sharing one set of nodes.
struct ComplexPair {
  std::complex<double> first{}, second{};
  ComplexPair operator+(const ComplexPair& o) const { return {first + o.first, second + o.second}; }
  ComplexPair operator-(const ComplexPair& o) const { return {first - o.first, second - o.second}; }
};
inline ComplexPair operator*(double w, const ComplexPair& p) { return {w * p.first, w * p.second}; }
inline double magnitude(const ComplexPair& p) { return std::max(std::abs(p.first), std::abs(p.second)); }

template <class V>
struct Estimate {
  V value{};
  double error = 0.0;
  long evaluations = 0;
};

/// One G7/K15 panel on [a, b]. The Kronrod sum is returned; the error is the
/// Kronrod–Gauss difference.
template <class V, class F>
Estimate<V> gk15_panel(F&& f, double a, double b) {
  const auto& t = gauss_kronrod15();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  V fc = f(c);
  V kronrod = t.kronrod_weights[0] * fc;
  V gauss{};
  for (std::size_t i = 1; i < 8; ++i) {
    const double dx = h * t.kronrod_nodes[i];
    V pair = f(c - dx) + f(c + dx);
    kronrod = kronrod + t.kronrod_weights[i] * pair;
    if (i % 2 == 0) gauss = gauss + t.gauss_weights[i / 2] * pair;
  }
  gauss = gauss + t.gauss_weights[0] * fc;
  Estimate<V> out;
  out.value = h * kronrod;
  out.error = std::abs(h) * magnitude(kronrod - gauss);
  out.evaluations = 15;
  return out;
}

struct AdaptiveOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_intervals = 4000;
};

/// Globally adaptive G7/K15 integration: the panel with the largest error
/// estimate is bisected until the summed estimate meets the tolerance.
template <class V, class F>
Estimate<V> integrate_adaptive(F&& f, double a, double b, const AdaptiveOptions& opt = {}) {
  struct Panel {
    double a, b;
    Estimate<V> est;
    bool operator<(const Panel& o) const { return est.error < o.est.error; }
  };
  Estimate<V> total;
  if (!(b > a)) return total;
  std::priority_queue<Panel> heap;
  Panel first{a, b, gk15_panel<V>(f, a, b)};
  total.evaluations = first.est.evaluations;
  heap.push(first);
  V sum = first.est.value;
  double err = first.est.error;
  int count = 1;
  while (count < opt.max_intervals) {
    const double target = std::max(opt.abs_tol, opt.rel_tol * magnitude(sum));
    if (err <= target) break;
    Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    heap.pop();
    Panel left{worst.a, mid, gk15_panel<V>(f, worst.a, mid)};
    Panel right{mid, worst.b, gk15_panel<V>(f, mid, worst.b)};
    total.evaluations += 30;
    sum = sum - worst.est.value + left.est.value + right.est.value;
    err = err - worst.est.error + left.est.error + right.est.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  // Re-sum from the panels in a fixed order to avoid drift from the running update.
  std::vector<Panel> panels;
  panels.reserve(heap.size());
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  V s{};
  double e = 0.0;
  for (const auto& p : panels) {
    s = s + p.est.value;
    e += p.est.error;
  }
  total.value = s;
  total.error = e;
  return total;
}

/// Composite Gauss–Legendre on `panels` equal sub-intervals of [a, b].
template <class V, class F>
V integrate_composite(F&& f, double a, double b, int panels, int order) {
  const Rule& r = gauss_legendre(order);
  V sum{};
  const double w = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * w;
    const double c = lo + 0.5 * w;
    V part{};
    for (std::size_t i = 0; i < r.nodes.size(); ++i) part = part + r.weights[i] * f(c + 0.5 * w * r.nodes[i]);
    sum = sum + (0.5 * w) * part;
  }
  return sum;
}

}  // namespace wigfluct::quad
