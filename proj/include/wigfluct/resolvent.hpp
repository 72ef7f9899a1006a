#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "wigfluct/ensembles.hpp"
#include "wigfluct/pleijel.hpp"
#include "wigfluct/spectral.hpp"

namespace wigfluct {

/// Smallest |Im z| accepted by the resolvent routines.
inline constexpr double kEtaMin = 1e-8;

/// Entries (0-based) of (H - z)^{-1} to compute, optionally with the
/// normalized trace (1/N) Tr G and a full column.
struct ResolventQuery {
  Complex z;
  std::vector<std::pair<std::size_t, std::size_t>> entries;
  bool trace = false;
  std::optional<std::size_t> column;
};

struct ResolventValues {
  std::vector<Complex> entries;
  std::optional<Complex> trace;
  std::optional<ComplexVector> column;
};

/// Direct LU solves, one per distinct requested column; the trace uses
/// the full inverse.
ResolventValues resolvent_entries(const WignerMatrix& h, const ResolventQuery& q);

/// Full resolvent matrix by LU.
ComplexMatrix resolvent_matrix(const WignerMatrix& h, Complex z);

/// G(z)_11 through the Schur complement over the minor without index 0.
Complex schur_g11(const WignerMatrix& h, Complex z);

struct KernelStats {
  Complex x_value;  // <h, G^(1) h> - m_hat
  Complex y_value;  // sqrt(N) <h1, G^(12) h2>
  Complex m_hat;    // (1/N) Tr G^(1)
};

/// From explicit minors and LU solves.
KernelStats kernel_stats(const WignerMatrix& h, Complex z);
/// From the entry spectrum: <h, G^(1) h> = h11 - z - 1/G11, and the 2x2
/// Schur complement of the resolvent block gives <h1, G^(12) h2>.
KernelStats kernel_stats(const spectral::EntrySpectrum& s, Complex z);

/// Limit of N E[X(z) X(z')].
Complex exx_prediction(Complex z, Complex zp, double sigma2, double sigma4);

struct EyyPrediction {
  Complex eyy;        // E[Y(z) Y(z')]
  Complex eyybar;     // E[Y(z) conj Y(conj z')] = m m' / (1 - m m')
  Complex eyybar_alt; // same formula with m' replaced by conj m(z'), i.e. E[Y(z) conj Y(z')]
};
EyyPrediction eyy_predictions(Complex z, Complex zp, double sigma2);

/// Sum over pair partitions of products of exx_prediction.
Complex wick_prediction(std::span<const Complex> zs, double sigma2, double sigma4);

struct LocalLawResiduals {
  double avg_residual = 0.0;        // |(1/N) Tr G - m|
  double max_entry_residual = 0.0;  // max_ij |G_ij - delta_ij m|
};
LocalLawResiduals local_law_residuals(const WignerMatrix& h, Complex z);
/// Shares one eigendecomposition across several z.
std::vector<LocalLawResiduals> local_law_residuals(const WignerMatrix& h, std::span<const Complex> zs);

struct PhiSplit {
  Complex phi;        // G(z)_11
  Complex phi_hat;    // 1 / (-z - m_hat)
  Complex fluct;      // phi - phi_hat
  Complex linearized; // m(z)^2 (X(z) - h11)
};
PhiSplit phi_split(const WignerMatrix& h, Complex z);
PhiSplit phi_split(const spectral::EntrySpectrum& s, Complex z);

struct PsiPhi {
  double psi = 0.0;
  double phi_lower = 0.0;
};
PsiPhi psi_phi(Complex z, Complex zp, std::size_t n);

/// z -> G(z)_11, the Stieltjes transform of the spectral measure at e_1.
StieltjesSource g11_source(std::shared_ptr<const spectral::EntrySpectrum> s);

}  // namespace wigfluct
