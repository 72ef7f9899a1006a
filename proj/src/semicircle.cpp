#include "wigfluct/semicircle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "wigfluct/quadrature.hpp"

namespace wigfluct {
namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

double to_theta(double x) { return std::asin(std::clamp(x / 2.0, -1.0, 1.0)); }

// Sorted theta split points: the endpoints plus the images of `xs` in (-2, 2).
std::vector<double> theta_splits(const std::vector<double>& xs) {
  std::vector<double> t{-kHalfPi, kHalfPi};
  for (double x : xs)
    if (x > -2.0 && x < 2.0) t.push_back(to_theta(x));
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

template <class F>
double integrate_theta(F&& g, const std::vector<double>& splits, double tol) {
  double sum = 0.0;
  const quad::AdaptiveOptions opt{tol, tol, 2000};
  for (std::size_t k = 0; k + 1 < splits.size(); ++k) {
    auto est = quad::integrate_adaptive<double>(
        [&](double t) {
          const double c = std::cos(t);
          return (2.0 / std::numbers::pi) * c * c * g(2.0 * std::sin(t));
        },
        splits[k], splits[k + 1], opt);
    sum += est.value;
  }
  return sum;
}

std::vector<double> symmetric(const std::vector<double>& xs) {
  std::vector<double> out;
  for (double x : xs) {
    out.push_back(x);
    out.push_back(-x);
  }
  return out;
}

}  // namespace

double sc_density(double x) {
  const double q = 4.0 - x * x;
  return q > 0.0 ? std::sqrt(q) / (2.0 * std::numbers::pi) : 0.0;
}

Complex stieltjes_m(Complex z) {
  if (z.imag() == 0.0 && std::abs(z.real()) <= 2.0)
    throw std::domain_error("stieltjes_m: z lies on the support [-2, 2]; use the boundary value");
  // sqrt(z-2) sqrt(z+2) is the branch of sqrt(z^2-4) that behaves like z at infinity.
  const Complex root = std::sqrt(z - 2.0) * std::sqrt(z + 2.0);
  return -2.0 / (z + root);
}

Complex stieltjes_m_boundary(double x) {
  if (!(std::abs(x) < 2.0)) throw std::domain_error("stieltjes_m_boundary: need |x| < 2");
  return {-x / 2.0, std::sqrt(4.0 - x * x) / 2.0};
}

double sc_moment(int k) {
  if (k < 0) throw std::invalid_argument("sc_moment: negative order");
  if (k % 2 == 1) return 0.0;
  const int n = k / 2;
  double c = 1.0;
  for (int i = 0; i < n; ++i) c = c * 2.0 * (2.0 * i + 1.0) / (i + 2.0);
  return c;
}

double sc_expectation(const std::function<double(double)>& g, const std::vector<double>& splits, double tol) {
  return integrate_theta(g, theta_splits(splits), tol);
}

double sc_integral(const BVFunction& f, const std::function<double(double)>& weight) {
  return integrate_theta([&](double x) { return f(x) * weight(x); }, theta_splits(f.breakpoints()), 1e-13);
}

double sc_integral(const BVFunction& f, ScWeight weight) {
  switch (weight) {
    case ScWeight::One:
      return sc_integral(f, [](double) { return 1.0; });
    case ScWeight::X:
      return sc_integral(f, [](double x) { return x; });
    case ScWeight::XSquaredMinusOne:
      return sc_integral(f, [](double x) { return x * x - 1.0; });
  }
  throw std::invalid_argument("sc_integral: unknown weight");
}

double sigma2_kernel(double x, double y, double s) {
  const double s2 = s * s;
  const double den = 1.0 - x * y * s + (x * x + y * y - 2.0) * s2 - x * y * s2 * s + s2 * s2;
  return (1.0 - s2) / den;
}

double v1_sigma2(const BVFunction& f, double s) {
  if (!(std::abs(s) <= 1.0)) throw std::domain_error("v1_sigma2: need |sigma2| <= 1");
  if (s == 1.0) return sc_integral(f, [&](double x) { return f(x); });
  if (s == -1.0) return sc_integral(f, [&](double x) { return f(-x); });
  const std::vector<double> splits = symmetric(f.breakpoints());
  const std::vector<double> outer = theta_splits(splits);
  return integrate_theta(
      [&](double x) {
        const double fx = f(x);
        if (fx == 0.0) return 0.0;
        std::vector<double> inner_x = splits;
        inner_x.push_back(x);
        inner_x.push_back(-x);
        const double inner =
            integrate_theta([&](double y) { return f(y) * sigma2_kernel(x, y, s); }, theta_splits(inner_x), 1e-12);
        return fx * inner;
      },
      outer, 1e-11);
}

VTerms v_terms(const BVFunction& f, double sigma2) {
  VTerms v;
  v.sigma2 = sigma2;
  v.v1 = sc_integral(f, [&](double x) { return f(x); });
  const double i0 = sc_integral(f, ScWeight::One);
  const double i1 = sc_integral(f, ScWeight::X);
  const double i2 = sc_integral(f, ScWeight::XSquaredMinusOne);
  v.v2 = i0 * i0;
  v.v3 = i1 * i1;
  v.v4 = i2 * i2;
  v.v1_sigma2 = v1_sigma2(f, sigma2);
  return v;
}

}  // namespace wigfluct
