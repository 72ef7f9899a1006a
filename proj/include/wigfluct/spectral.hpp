#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "wigfluct/ensembles.hpp"

// Dense self-adjoint eigen machinery shared by the resolvent and
// fluctuation modules. Backed by LAPACK (reduction, full solvers); the
// tridiagonal QL sweep that tracks selected rows is local.
namespace wigfluct::spectral {

struct RealEigen {
  Eigen::VectorXd values;  // ascending
  RealMatrix vectors;      // columns
};

struct ComplexEigen {
  Eigen::VectorXd values;
  ComplexMatrix vectors;
};

/// Full decompositions (Eigen, no BLAS).
RealEigen eigh(const RealMatrix& a);
ComplexEigen eigh(const ComplexMatrix& a);

/// Eigenvalues only, ascending.
Eigen::VectorXd eigenvalues(const RealMatrix& a);
Eigen::VectorXd eigenvalues(const ComplexMatrix& a);
Eigen::VectorXd eigenvalues(const WignerMatrix& h);

/// Implicit QL with Wilkinson shifts on the symmetric tridiagonal matrix
/// with diagonal `d` and subdiagonal `e` (e.size() == d.size() - 1).
/// Every rotation is also applied to the columns of `rows`, so on exit
/// rows <- rows * W where W holds the eigenvectors. Eigenvalues are returned
/// ascending in `d`, with the columns of `rows` permuted to match.
/// Throws std::runtime_error if an eigenvalue fails to converge.
void tridiagonal_ql(std::vector<double>& d, std::vector<double> e, RealMatrix& rows);

/// Eigenvalues of a symmetric tridiagonal matrix (LAPACK sterf).
std::vector<double> tridiagonal_eigenvalues(std::vector<double> d, std::vector<double> e);

/// Spectral data of a self-adjoint H seen from the first two coordinates:
/// H = sum_k lambda_k u_k u_k^*, with first[k] = u_k(0) (real, by a
/// phase choice) and second[k] = u_k(1). Enough for f(H)_00, f(H)_01 and
/// the 2x2 resolvent block; also carries the spectrum of the 0-minor.
struct EntrySpectrum {
  std::size_t n = 0;
  std::vector<double> eigenvalues;
  std::vector<double> first;
  std::vector<Complex> second;
  std::vector<double> minor_eigenvalues;
  double h11 = 0.0;
  Complex h12 = 0.0;

  /// G(z)_{ab} for a, b in {0, 1}.
  Complex resolvent(int a, int b, Complex z) const;
  /// (1/n) Tr (H^(0) - z)^{-1} over the 0-minor (normalized by n, not n-1).
  Complex minor_trace(Complex z) const;
};

/// One Householder reduction (first coordinate fixed) plus a QL sweep
/// tracking two rows: O(n^3) with a small constant, no eigenvector matrix.
EntrySpectrum entry_spectrum(const WignerMatrix& h);

/// Pins the BLAS backend to one thread so results do not depend on how
/// work is split; the harness parallelizes over trials instead.
void use_single_threaded_blas();

}  // namespace wigfluct::spectral
