#include <cmath>
#include <memory>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "wigfluct/fluctuations.hpp"
#include "wigfluct/pleijel.hpp"
#include "wigfluct/resolvent.hpp"
#include "wigfluct/semicircle.hpp"

using namespace wigfluct;

namespace {

ContourParams params(double eta0, double M) {
  ContourParams p;
  p.eta0 = eta0;
  p.M = M;
  return p;
}

void expect_within_budget(const PleijelResult& r, double exact, const std::string& what) {
  EXPECT_LE(std::abs(r.value - exact), r.error_budget) << what << " value " << r.value << " budget " << r.error_budget;
  EXPECT_LT(r.error_budget, 0.05) << what;
}

}  // namespace

TEST(Pleijel, PointMassRecoversValueAtZero) {
  const auto r = pleijel_integrate(point_mass_source(0.0), bv::bump(), params(1e-4, 1e3));
  expect_within_budget(r, 1.0, "delta bump");
  EXPECT_NEAR(r.value, 1.0, 1e-3);
}

TEST(Pleijel, PointMassOffCentre) {
  const auto f = bv::abs_shift(0.2);
  const auto r = pleijel_integrate(point_mass_source(-0.9), f, params(1e-4, 1e3));
  expect_within_budget(r, f(-0.9), "delta abs");
}

TEST(Pleijel, SemicircleOddFunctionVanishes) {
  const auto r = pleijel_integrate(semicircle_source(), bv::monomial(1), params(1e-3, 1e3));
  expect_within_budget(r, 0.0, "sc x");
}

TEST(Pleijel, SemicircleHalfLine) {
  const auto r = pleijel_integrate(semicircle_source(), bv::indicator(-2.0, 0.0), params(1e-3, 1e3));
  expect_within_budget(r, 0.5, "sc indicator");
}

TEST(Pleijel, IntervalMasses) {
  const auto p = params(1e-3, 1e3);
  expect_within_budget(pleijel_interval_mass(semicircle_source(), -2.0, 2.0, p), 1.0, "[-2,2]");
  expect_within_budget(pleijel_interval_mass(semicircle_source(), 0.0, 2.0, p), 0.5, "[0,2]");
  // Closed-form antiderivative of the density on [-1, 1].
  const double mass = 1.0 / 3.0 + std::sqrt(3.0) / (2.0 * M_PI);
  expect_within_budget(pleijel_interval_mass(semicircle_source(), -1.0, 1.0, p), mass, "[-1,1]");
  EXPECT_THROW(pleijel_interval_mass(semicircle_source(), 1.0, -1.0, p), std::invalid_argument);
}

TEST(Pleijel, BudgetShrinksWithEta0) {
  const auto f = bv::indicator(-1.0, 1.0);
  const double a = pleijel_integrate(semicircle_source(), f, params(1e-2, 1e3)).error_budget;
  const double b = pleijel_integrate(semicircle_source(), f, params(1e-4, 1e3)).error_budget;
  EXPECT_LT(b, a);
}

TEST(Pleijel, SymmetricAndRealFormsAgree) {
  for (const auto& f : builtin_library()) {
    const auto r = pleijel_integrate(semicircle_source(), f, params(1e-3, 1e3));
    EXPECT_LT(r.reform_discrepancy, 1e-10) << f.name();
    EXPECT_LT(r.imag_residue, 1e-10) << f.name();
    EXPECT_NEAR(r.value, sc_integral(f, ScWeight::One), r.error_budget) << f.name();
  }
}

TEST(Pleijel, DiscreteMeasureMatchesDirectSum) {
  const std::vector<double> atoms{-1.7, -0.4, 0.05, 0.9, 1.6};
  const std::vector<double> w{0.1, 0.3, 0.2, 0.25, 0.15};
  for (const auto& f : builtin_library()) {
    double exact = 0.0;
    for (std::size_t k = 0; k < atoms.size(); ++k) exact += w[k] * f(atoms[k]);
    const auto r = pleijel_integrate(discrete_source(atoms, w), f, params(1e-5, 1e4));
    EXPECT_LE(std::abs(r.value - exact), r.error_budget) << f.name();
  }
}

TEST(Pleijel, ResolventSourceMatchesEigendecomposition) {
  const auto h = sample_wigner(gue_spec(), 60, 4);
  auto spec = std::make_shared<const spectral::EntrySpectrum>(spectral::entry_spectrum(h));
  const auto src = g11_source(spec);
  for (const auto& f : {bv::indicator(-1.0, 1.0), bv::abs_shift(0.0), bv::ramp()}) {
    const double exact = f_of_H_entry(h, f, 0, 0).real();
    const auto r = pleijel_integrate(src, f, ContourParams::for_dimension(60, f.lipschitz()));
    EXPECT_LE(std::abs(r.value - exact), r.error_budget) << f.name();
  }
}

TEST(Pleijel, ThreadsGiveIdenticalValue) {
  ContourParams p = params(1e-3, 1e3);
  const auto a = pleijel_integrate(semicircle_source(), bv::bump(), p);
  p.threads = 4;
  const auto b = pleijel_integrate(semicircle_source(), bv::bump(), p);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.error_budget, b.error_budget);
}

TEST(Pleijel, RejectsBadParameters) {
  EXPECT_THROW(pleijel_integrate(semicircle_source(), bv::bump(), params(0.0, 10.0)), std::invalid_argument);
  ContourParams p = params(1e-3, 1e3);
  p.grading = 1.0;
  EXPECT_THROW(pleijel_integrate(semicircle_source(), bv::bump(), p), std::invalid_argument);
  p = params(1e-3, 1e3);
  p.L = 1.5;
  EXPECT_THROW(pleijel_integrate(semicircle_source(), bv::bump(), p), std::invalid_argument);
}

TEST(Stokes, SemicircleTransformWithBump) {
  const auto r = stokes_check([](Complex z) { return stieltjes_m(z); }, bv::bump(), params(1e-3, 1e3));
  EXPECT_LE(r.residual, r.bound);
}

TEST(Stokes, RealConstantGivesZero) {
  const auto r = stokes_check([](Complex) { return Complex(2.5, 0.0); }, bv::bump(0.2, 0.8), params(1e-3, 1e3));
  EXPECT_LT(std::abs(r.lhs), 1e-10);
  EXPECT_EQ(r.rhs, 0.0);
}

TEST(Stokes, PoissonSmoothingOfPole) {
  const double lambda0 = 0.35, eta0 = 0.05;
  const auto f = bv::bump();
  const auto r = stokes_check([&](Complex z) { return 1.0 / (lambda0 - z); }, f, params(eta0, 1e3));
  const double poisson = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double x) { return f(x) * eta0 / (M_PI * ((x - lambda0) * (x - lambda0) + eta0 * eta0)); }, -1.0, 1.0, 20,
      1e-13);
  EXPECT_NEAR(r.rhs, poisson, 1e-9);
  EXPECT_LE(r.residual, r.bound);
}
