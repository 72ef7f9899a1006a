#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "wigfluct/bvfunc.hpp"
#include "wigfluct/semicircle.hpp"

using namespace wigfluct;

namespace {

// Independent quadrature: Gauss-Kronrod in x on sub-intervals of [-2, 2].
double oracle_sc(const std::function<double(double)>& g, std::vector<double> cuts = {}) {
  cuts.push_back(-2.0);
  cuts.push_back(2.0);
  std::sort(cuts.begin(), cuts.end());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i] < -2.0 || cuts[i + 1] > 2.0) continue;
    s += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double x) { return g(x) * sc_density(x); }, cuts[i], cuts[i + 1], 15, 1e-14);
  }
  return s;
}

// U_k(x/2), the orthonormal polynomials of the semicircle law.
double cheb_u(int k, double x) {
  double a = 1.0, b = x;
  if (k == 0) return a;
  for (int i = 1; i < k; ++i) {
    const double c = x * b - a;
    a = b;
    b = c;
  }
  return b;
}

}  // namespace

TEST(Density, Values) {
  EXPECT_DOUBLE_EQ(sc_density(0.0), 1.0 / M_PI);
  EXPECT_EQ(sc_density(2.0), 0.0);
  EXPECT_EQ(sc_density(-2.0), 0.0);
  EXPECT_EQ(sc_density(3.0), 0.0);
}

TEST(Stieltjes, ClosedFormAtI) {
  const Complex m = stieltjes_m(Complex(0.0, 1.0));
  EXPECT_NEAR(std::abs(m - Complex(0.0, 0.5 * (std::sqrt(5.0) - 1.0))), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(stieltjes_m_boundary(0.0) - Complex(0.0, 1.0)), 0.0, 1e-15);
}

TEST(Stieltjes, SelfConsistentEquationAndHerglotz) {
  for (double x : {-5.0, -2.0, -1.3, 0.0, 0.4, 1.99, 2.0, 3.7})
    for (double eta : {-2.0, -1e-3, 1e-9, 1e-3, 0.5, 10.0}) {
      const Complex z(x, eta);
      const Complex m = stieltjes_m(z);
      EXPECT_LT(std::abs(m * m + z * m + 1.0), 1e-13) << z;
      EXPECT_GT(m.imag() * eta, 0.0) << z;
      EXPECT_LT(std::abs(m), 1.0 + 1e-12);
      EXPECT_NEAR(std::abs(stieltjes_m(std::conj(z)) - std::conj(m)), 0.0, 1e-15);
    }
  EXPECT_THROW(stieltjes_m(Complex(1.0, 0.0)), std::domain_error);
  EXPECT_NEAR(std::abs(stieltjes_m(Complex(5.0, 0.0)) - Complex(0.5 * (-5.0 + std::sqrt(21.0)))), 0.0, 1e-15);
}

TEST(Stieltjes, MatchesDensityTransform) {
  const Complex z(0.7, 0.3);
  const double re = oracle_sc([&](double x) { return (1.0 / (Complex(x) - z)).real(); });
  const double im = oracle_sc([&](double x) { return (1.0 / (Complex(x) - z)).imag(); });
  EXPECT_NEAR(std::abs(stieltjes_m(z) - Complex(re, im)), 0.0, 1e-10);
}

TEST(Moments, Catalan) {
  const double catalan[] = {1, 1, 2, 5, 14, 42};
  for (int k = 0; k <= 10; ++k) {
    EXPECT_DOUBLE_EQ(sc_moment(k), k % 2 ? 0.0 : catalan[k / 2]);
    EXPECT_NEAR(sc_expectation([k](double x) { return std::pow(x, k); }), sc_moment(k), 1e-12);
  }
}

TEST(ScIntegral, Examples) {
  EXPECT_NEAR(sc_integral(bv::monomial(0), ScWeight::One), 1.0, 1e-12);
  EXPECT_NEAR(sc_integral(bv::monomial(2), ScWeight::One), 1.0, 1e-12);
  EXPECT_NEAR(sc_integral(bv::indicator(-2.0, 0.0), ScWeight::One), 0.5, 1e-12);
  EXPECT_NEAR(sc_integral(bv::indicator(-1.0, 1.0), ScWeight::One), 1.0 / 3.0 + std::sqrt(3.0) / (2.0 * M_PI), 1e-12);
  EXPECT_NEAR(sc_integral(bv::monomial(2), ScWeight::XSquaredMinusOne), 1.0, 1e-12);
  EXPECT_NEAR(sc_integral(bv::monomial(1), ScWeight::X), 1.0, 1e-12);
  const auto f = bv::abs_shift(0.3);
  EXPECT_NEAR(sc_integral(f, [](double x) { return x * x * x; }),
              oracle_sc([&](double x) { return f(x) * x * x * x; }, {0.3}), 1e-11);
}

TEST(VTerms, LinearFunction) {
  for (double s : {-1.0, -0.4, 0.0, 0.5, 1.0}) {
    const VTerms v = v_terms(bv::monomial(1), s);
    EXPECT_NEAR(v.v1, 1.0, 1e-12);
    EXPECT_NEAR(v.v2, 0.0, 1e-12);
    EXPECT_NEAR(v.v3, 1.0, 1e-12);
    EXPECT_NEAR(v.v4, 0.0, 1e-12);
    EXPECT_NEAR(v.v1_sigma2, s, 1e-9) << s;
  }
}

TEST(VTerms, EndpointIdentities) {
  for (const auto& f : builtin_library()) {
    const VTerms v0 = v_terms(f, 0.0);
    EXPECT_NEAR(v0.v1_sigma2, v0.v2, 1e-9) << f.name();
    const VTerms v1 = v_terms(f, 1.0);
    EXPECT_NEAR(v1.v1_sigma2, v1.v1, 1e-10) << f.name();
  }
}

TEST(VTerms, ChebyshevExpansionOracle) {
  // With c_k = int f U_k(x/2) dmu_sc: v1 = sum c_k^2, v1_sigma2 = sum s^k c_k^2,
  // v2 = c_0^2, v3 = c_1^2, v4 = c_2^2.
  for (const auto& f : {bv::bump(0.3, 1.2), bv::ramp(), bv::monomial(3)}) {
    std::vector<double> c;
    std::vector<double> cuts = f.breakpoints();
    for (int k = 0; k < 60; ++k) c.push_back(oracle_sc([&](double x) { return f(x) * cheb_u(k, x); }, cuts));
    const VTerms v = v_terms(f, 0.6);
    double v1 = 0.0, v1s = 0.0;
    for (int k = 0; k < 60; ++k) {
      v1 += c[k] * c[k];
      v1s += std::pow(0.6, k) * c[k] * c[k];
    }
    // The truncated series converges slowly for kinked f, so v1 is checked
    // against int f^2 directly and the partial sum only bounds it from below.
    EXPECT_NEAR(v.v1, oracle_sc([&](double x) { return f(x) * f(x); }, cuts), 1e-10) << f.name();
    EXPECT_LE(v1, v.v1 + 1e-10) << f.name();
    EXPECT_NEAR(v.v1_sigma2, v1s, 1e-9) << f.name();
    EXPECT_NEAR(v.v2, c[0] * c[0], 1e-11 * (1.0 + c[0] * c[0])) << f.name();
    EXPECT_NEAR(v.v3, c[1] * c[1], 1e-11 * (1.0 + c[1] * c[1])) << f.name();
    EXPECT_NEAR(v.v4, c[2] * c[2], 1e-11 * (1.0 + c[2] * c[2])) << f.name();
  }
}

TEST(VTerms, KernelIsPositiveForSubunitSigma) {
  for (double s : {-0.9, -0.3, 0.2, 0.8})
    for (double x : {-1.9, -0.5, 0.0, 1.1})
      for (double y : {-1.5, 0.3, 1.95}) EXPECT_GT(sigma2_kernel(x, y, s), 0.0);
  EXPECT_THROW(v1_sigma2(bv::bump(), 1.5), std::domain_error);
}
