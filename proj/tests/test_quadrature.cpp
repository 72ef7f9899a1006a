#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include "wigfluct/quadrature.hpp"

using namespace wigfluct::quad;

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  for (int order : {7, 10, 15, 20, 25, 30}) {
    const Rule& r = gauss_legendre(order);
    ASSERT_EQ(r.nodes.size(), static_cast<std::size_t>(order));
    for (int k = 0; k <= 2 * order - 1; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
      const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
      EXPECT_NEAR(s, exact, 1e-13) << "order " << order << " k " << k;
    }
  }
}

TEST(GaussLegendre, UnsupportedOrderThrows) { EXPECT_THROW(gauss_legendre(8), std::invalid_argument); }

TEST(GaussKronrod, PanelExactForDegree22) {
  // Kronrod 15 point is exact to degree 22, the embedded Gauss 7 to 13.
  auto est = gk15_panel<double>([](double x) { return std::pow(x, 13) + std::pow(x, 12); }, -1.0, 1.0);
  EXPECT_NEAR(est.value, 2.0 / 13.0, 1e-14);
  EXPECT_LT(est.error, 1e-13);
  auto hi = gk15_panel<double>([](double x) { return std::pow(x, 22); }, 0.0, 1.0);
  EXPECT_NEAR(hi.value, 1.0 / 23.0, 1e-14);
}

TEST(Adaptive, KinkAndComplexIntegrands) {
  auto a = integrate_adaptive<double>([](double x) { return std::abs(x - 0.3); }, -1.0, 1.0);
  EXPECT_NEAR(a.value, 0.5 * (1.3 * 1.3 + 0.7 * 0.7), 1e-9);
  using C = std::complex<double>;
  auto c = integrate_adaptive<C>([](double x) { return std::exp(C(0.0, x)); }, 0.0, M_PI);
  EXPECT_NEAR(std::abs(c.value - C(0.0, 2.0)), 0.0, 1e-12);
}

TEST(Adaptive, EmptyIntervalIsZero) {
  auto e = integrate_adaptive<double>([](double) { return 1.0; }, 1.0, 1.0);
  EXPECT_EQ(e.value, 0.0);
}

TEST(Composite, ConvergesOnSmoothIntegrand) {
  const double v = integrate_composite<double>([](double x) { return std::exp(x); }, 0.0, 1.0, 4, 10);
  EXPECT_NEAR(v, std::exp(1.0) - 1.0, 1e-14);
}

TEST(ComplexPair, AddsComponentwise) {
  ComplexPair p{{1.0, 2.0}, {3.0, -1.0}};
  auto q = 2.0 * p + p - p;
  EXPECT_EQ(q.first, std::complex<double>(2.0, 4.0));
  EXPECT_DOUBLE_EQ(magnitude(q), std::abs(std::complex<double>(6.0, -2.0)));
}
