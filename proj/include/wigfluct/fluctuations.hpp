#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wigfluct/bvfunc.hpp"
#include "wigfluct/ensembles.hpp"
#include "wigfluct/semicircle.hpp"
#include "wigfluct/spectral.hpp"

namespace wigfluct {

/// Limiting law of T_f and S_f for one test function and ensemble.
struct FluctuationPrediction {
  double mean = 0.0;      // int f d mu_sc
  double xi_coeff = 0.0;  // int f x d mu_sc
  double var_diag = 0.0;
  double var_offdiag_sq = 0.0;  // E Delta~^2 (real for real sigma2)
  double abs_sq = 0.0;          // E |Delta~|^2
  bool lipschitz = false;
  double sigma2 = 0.0;
  double sigma4 = 0.0;
  VTerms v;
};

double predicted_variance_diag(const VTerms& v, double sigma4);
double predicted_variance_diag(const BVFunction& f, double sigma2, double sigma4);

struct OffdiagVariance {
  double esq = 0.0;
  double eabssq = 0.0;
};
OffdiagVariance predicted_variance_offdiag(const VTerms& v);
OffdiagVariance predicted_variance_offdiag(const BVFunction& f, double sigma2);

/// Variances below zero by less than 1e-9 are clipped to zero; larger
/// negative values throw.
FluctuationPrediction predict(const BVFunction& f, double sigma2, double sigma4);

/// f(H)_ij from a full LAPACK eigendecomposition (0-based indices).
Complex f_of_H_entry(const WignerMatrix& h, const BVFunction& f, std::size_t i, std::size_t j);

struct EntryValues {
  double f11 = 0.0;
  Complex f12;
};
/// f(H)_00 and f(H)_01 from the entry spectrum.
EntryValues entry_values(const spectral::EntrySpectrum& s, const BVFunction& f);

struct SampleStatistic {
  double t_value = 0.0;
  Complex s_value;
  double f11 = 0.0;
  Complex f12;
  std::uint64_t seed = 0;
};

SampleStatistic t_statistic(const WignerMatrix& h, const BVFunction& f, const FluctuationPrediction& pred);
SampleStatistic t_statistic(const EntryValues& e, std::size_t n, double xi11, Complex xi12,
                            const FluctuationPrediction& pred);

/// E X^k for X ~ N(0, variance).
double gaussian_moment(int k, double variance);

/// Covariance of (Re D, Im D) for a centered complex Gaussian D with
/// E D^2 = esq and E |D|^2 = eabssq. Throws std::domain_error if |esq| > eabssq.
Eigen::Matrix2d complex_gaussian_covariance(Complex esq, double eabssq);

/// E D^k conj(D)^l for that complex Gaussian, summed over pairings.
Complex complex_gaussian_moment(int k, int l, Complex esq, double eabssq);

/// Levy distance between the empirical law of `samples` and N(0, variance)
/// (the point mass at 0 when variance is 0).
double levy_distance(std::span<const double> samples, double variance);

}  // namespace wigfluct
