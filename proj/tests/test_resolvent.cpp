#include <cmath>

#include <gtest/gtest.h>

#include "wigfluct/resolvent.hpp"
#include "wigfluct/semicircle.hpp"
#include "wigfluct/statistics.hpp"

using namespace wigfluct;

namespace {

const Complex I(0.0, 1.0);

WignerMatrix without_first_row(const WignerMatrix& h) {
  ComplexMatrix a = h.to_complex();
  for (Eigen::Index k = 1; k < a.rows(); ++k) a(0, k) = a(k, 0) = 0.0;
  return WignerMatrix::from_entries(a);
}

}  // namespace

TEST(Resolvent, ScalarAndDiagonalCases) {
  const auto zero = WignerMatrix::from_entries(RealMatrix(RealMatrix::Zero(4, 4)));
  ResolventQuery q{I, {{0, 0}}, true, std::nullopt};
  const auto v = resolvent_entries(zero, q);
  EXPECT_NEAR(std::abs(v.entries[0] - I), 0.0, 1e-15);
  RealMatrix d = RealMatrix::Zero(4, 4);
  d.diagonal() << 1.0, -1.0, 0.5, 2.0;
  const auto r = resolvent_entries(WignerMatrix::from_entries(d), {I, {{0, 0}, {1, 1}, {0, 1}}, false, 2});
  EXPECT_NEAR(std::abs(r.entries[0] - 1.0 / (1.0 - I)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(r.entries[1] - 1.0 / (-1.0 - I)), 0.0, 1e-15);
  EXPECT_EQ(r.entries[2], Complex(0.0));
  ASSERT_TRUE(r.column.has_value());
  EXPECT_NEAR(std::abs((*r.column)(2) - 1.0 / (0.5 - I)), 0.0, 1e-15);
}

TEST(Resolvent, DefiningEquation) {
  const auto h = sample_wigner(gue_spec(), 80, 3);
  const Complex z(0.4, 0.01);
  const ComplexMatrix g = resolvent_matrix(h, z);
  const ComplexMatrix id = ComplexMatrix::Identity(80, 80);
  for (Eigen::Index c = 0; c < 80; ++c)
    EXPECT_LT(((h.to_complex() - z * id) * g.col(c) - id.col(c)).norm(), 1e-10);
  EXPECT_NEAR(std::abs(g(2, 5) - std::conj(resolvent_matrix(h, std::conj(z))(5, 2))), 0.0, 1e-10);
  EXPECT_THROW(resolvent_matrix(h, Complex(0.1, 1e-10)), std::invalid_argument);
}

TEST(Schur, TwoByTwoClosedForm) {
  RealMatrix a(4, 4);
  a << 0.3, -0.7, 0, 0, -0.7, 1.1, 0, 0, 0, 0, 0.2, 0, 0, 0, 0, -0.4;
  const Complex z(0.0, 1.0);
  // First 2x2 block decouples: G11 = (h22 - z) / det.
  const Complex det = (0.3 - z) * (1.1 - z) - 0.49;
  EXPECT_NEAR(std::abs(schur_g11(WignerMatrix::from_entries(a), z) - (1.1 - z) / det), 0.0, 1e-15);
}

TEST(Schur, MatchesDirectSolve) {
  for (const auto& spec : {goe_spec(), gue_spec()}) {
    const auto h = sample_wigner(spec, 50, 9);
    for (Complex z : {I, Complex(1.9, 0.05), Complex(-0.3, -0.2)}) {
      const Complex direct = resolvent_matrix(h, z)(0, 0);
      EXPECT_NEAR(std::abs(schur_g11(h, z) - direct), 0.0, 1e-11);
    }
  }
}

TEST(Schur, DecoupledRow) {
  const auto h = without_first_row(sample_wigner(goe_spec(), 20, 1));
  const Complex z(0.2, 0.3);
  EXPECT_NEAR(std::abs(schur_g11(h, z) - 1.0 / (h(0, 0) - z)), 0.0, 1e-14);
}

TEST(Kernel, EmptyQuadraticForm) {
  const auto h = without_first_row(sample_wigner(gue_spec(), 20, 2));
  const Complex z(-0.5, 0.4);
  const KernelStats k = kernel_stats(h, z);
  EXPECT_NEAR(std::abs(k.x_value + k.m_hat), 0.0, 1e-13);
}

TEST(Kernel, FastPathMatchesMinors) {
  for (const auto& spec : {goe_spec(), gue_spec(), uniform_phase_spec()}) {
    const auto h = sample_wigner(spec, 60, 5);
    const auto s = spectral::entry_spectrum(h);
    for (Complex z : {I, Complex(0.5, 0.5), Complex(-0.5, -0.5), Complex(2.5, 0.1)}) {
      const KernelStats a = kernel_stats(h, z);
      const KernelStats b = kernel_stats(s, z);
      EXPECT_NEAR(std::abs(a.x_value - b.x_value), 0.0, 1e-10) << spec.name;
      EXPECT_NEAR(std::abs(a.y_value - b.y_value), 0.0, 1e-10) << spec.name;
      EXPECT_NEAR(std::abs(a.m_hat - b.m_hat), 0.0, 1e-12) << spec.name;
    }
  }
}

TEST(Kernel, MeansVanish) {
  // X is centred given the minor, Y by independence of the two columns.
  const int trials = 2000;
  std::vector<double> xr, xi, yr, yi;
  for (int t = 0; t < trials; ++t) {
    const auto h = sample_wigner(gue_spec(), 40, stream_seed(17, {static_cast<std::uint64_t>(t)}));
    const auto k = kernel_stats(spectral::entry_spectrum(h), Complex(0.3, 0.5));
    xr.push_back(k.x_value.real());
    xi.push_back(k.x_value.imag());
    yr.push_back(k.y_value.real());
    yi.push_back(k.y_value.imag());
  }
  for (const auto* v : {&xr, &xi, &yr, &yi}) {
    const auto e = stats::mean_estimate(*v);
    EXPECT_LT(std::abs(e.value), 3.5 * e.se);
  }
}

TEST(Predictions, ExxClosedForm) {
  const Complex m = Complex(0.0, 0.5 * (std::sqrt(5.0) - 1.0));
  const Complex expect = std::pow(m, 4) / (1.0 - m * m) + m * m;
  EXPECT_NEAR(std::abs(exx_prediction(I, I, 0.0, 2.0) - expect), 0.0, 1e-14);
  const Complex z(0.5, 0.5), zp(-0.5, 0.5);
  const Complex mz = stieltjes_m(z), mzp = stieltjes_m(zp);
  EXPECT_NEAR(std::abs(exx_prediction(z, zp, 0.0, 1.0) - mz * mz * mzp * mzp / (1.0 - mz * mzp)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(exx_prediction(z, zp, 0.3, 2.2) - exx_prediction(zp, z, 0.3, 2.2)), 0.0, 1e-15);
}

TEST(Predictions, EyyConventions) {
  const Complex z(0.5, 0.5), zp(-0.5, 0.5);
  EXPECT_EQ(eyy_predictions(z, zp, 0.0).eyy, Complex(0.0));
  const auto one = eyy_predictions(z, zp, 1.0);
  EXPECT_NEAR(std::abs(one.eyy - one.eyybar), 0.0, 1e-15);
  const Complex m = stieltjes_m(z), mp = stieltjes_m(zp);
  EXPECT_NEAR(std::abs(eyy_predictions(z, zp, 0.0).eyybar - m * mp / (1.0 - m * mp)), 0.0, 1e-15);
}

TEST(Predictions, WickPairings) {
  const std::vector<Complex> two{I, Complex(0.5, 0.5)};
  EXPECT_NEAR(std::abs(wick_prediction(two, 1.0, 3.0) - exx_prediction(two[0], two[1], 1.0, 3.0)), 0.0, 1e-15);
  const std::vector<Complex> four(4, Complex(0.2, 0.7));
  const Complex e = exx_prediction(four[0], four[0], 0.0, 2.0);
  EXPECT_NEAR(std::abs(wick_prediction(four, 0.0, 2.0) - 3.0 * e * e), 0.0, 1e-14);
  const std::vector<Complex> three(3, I);
  EXPECT_EQ(wick_prediction(three, 1.0, 3.0), Complex(0.0));
}

TEST(Predictions, StabilityBound) {
  // C |1 - m m'| >= Phi on a grid over [-3,3]^2 x [1e-3,1]^2, with C = 10.
  double worst = 0.0;
  Complex worst_z, worst_zp;
  for (int i = 0; i <= 24; ++i)
    for (int j = 0; j <= 24; ++j)
      for (double eta : {1e-3, 1e-2, 0.1, 0.5, 1.0})
        for (double etap : {1e-3, 1e-2, 0.1, 0.5, 1.0}) {
          const Complex z(-3.0 + 0.25 * i, eta), zp(-3.0 + 0.25 * j, etap);
          const Complex m = stieltjes_m(z), mp = stieltjes_m(zp);
          ASSERT_LT(std::abs(m), 1.0);
          const double ratio = psi_phi(z, zp, 1000).phi_lower / std::abs(1.0 - m * mp);
          ASSERT_TRUE(std::isfinite(ratio));
          if (ratio > worst) { worst = ratio; worst_z = z; worst_zp = zp; }
        }
  EXPECT_LE(worst, 10.0) << "smallest admissible C is " << worst << " at z=" << worst_z
                         << " z'=" << worst_zp;
}

TEST(PsiPhi, Examples) {
  const auto a = psi_phi(I, I, 400);
  EXPECT_NEAR(a.psi, 2.0 + 1.0 / 20.0, 1e-14);
  EXPECT_NEAR(a.phi_lower, 2.0, 1e-14);
  EXPECT_GE(psi_phi(Complex(3.0, 0.2), Complex(3.0, 0.2), 100).phi_lower, 2.0);
  EXPECT_LT(psi_phi(Complex(0.0, 1e-6), Complex(0.0, 1e-6), 100).phi_lower, 1e-5);
}

TEST(LocalLaw, LargeSpectralParameter) {
  const auto h = sample_wigner(goe_spec(), 4, 3);
  const auto r = local_law_residuals(h, Complex(0.0, 100.0));
  EXPECT_LT(r.avg_residual, 10.0 / (100.0 * 100.0));
  EXPECT_LT(r.max_entry_residual, 10.0 / (100.0 * 100.0));
}

TEST(LocalLaw, SharedDecompositionAgrees) {
  const auto h = sample_wigner(gue_spec(), 50, 3);
  const std::vector<Complex> zs{I, Complex(0.1, 0.05)};
  const auto many = local_law_residuals(h, zs);
  for (std::size_t k = 0; k < zs.size(); ++k) {
    const auto one = local_law_residuals(h, zs[k]);
    EXPECT_NEAR(one.avg_residual, many[k].avg_residual, 1e-12);
    EXPECT_NEAR(one.max_entry_residual, many[k].max_entry_residual, 1e-12);
  }
  const ComplexMatrix g = resolvent_matrix(h, I);
  const Complex m = stieltjes_m(I);
  EXPECT_NEAR(many[0].avg_residual, std::abs(g.trace() / 50.0 - m), 1e-12);
}

TEST(LocalLaw, AverageEnvelopeAtModerateSize) {
  int inside = 0;
  const int trials = 40;
  const double N = 300.0;
  for (int t = 0; t < trials; ++t) {
    const auto h = sample_wigner(goe_spec(), 300, static_cast<std::uint64_t>(t));
    inside += local_law_residuals(h, I).avg_residual <= 10.0 / N;
  }
  EXPECT_GE(inside, static_cast<int>(0.95 * trials));
}

TEST(PhiSplit, DecoupledRow) {
  RealMatrix a = RealMatrix::Zero(6, 6);
  a.bottomRightCorner(5, 5) = RealMatrix::Identity(5, 5) * 0.3;
  const auto h = WignerMatrix::from_entries(a);
  const Complex z(0.1, 0.4);
  const PhiSplit p = phi_split(h, z);
  EXPECT_NEAR(std::abs(p.phi - 1.0 / (-z)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(p.fluct - (p.phi - p.phi_hat)), 0.0, 1e-15);
  EXPECT_GT(std::abs(p.phi - p.phi_hat), 1e-3);
}

TEST(PhiSplit, FastPathMatchesFullResolvent) {
  const Complex z(0.0, 0.5);
  for (std::uint64_t t = 0; t < 5; ++t) {
    const auto h = sample_wigner(goe_spec(), 200, 100 + t);
    const PhiSplit a = phi_split(h, z);
    const PhiSplit b = phi_split(spectral::entry_spectrum(h), z);
    EXPECT_NEAR(std::abs(a.phi - b.phi), 0.0, 1e-11);
    EXPECT_NEAR(std::abs(a.phi_hat - b.phi_hat), 0.0, 1e-11);
    EXPECT_NEAR(std::abs(a.linearized - b.linearized), 0.0, 1e-10);
  }
}

TEST(PhiSplit, Envelopes) {
  // Both residuals should sit inside N^0.1/(N eta) for 95% of trials.
  const double N = 1000.0, eta = 0.5;
  const Complex z(0.0, eta);
  const auto spec = goe_spec();
  int fl = 0, hat = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    const auto h = sample_wigner(spec, 1000, 100 + static_cast<std::uint64_t>(t));
    const PhiSplit a = phi_split(spectral::entry_spectrum(h), z);
    const double env = std::pow(N, 0.1) / (N * eta);
    fl += std::abs(a.fluct - a.linearized) <= env;
    hat += std::abs(a.phi_hat - stieltjes_m(z)) <= env;
  }
  EXPECT_GE(fl, static_cast<int>(0.95 * trials));
  EXPECT_GE(hat, static_cast<int>(0.95 * trials));
}
