#pragma once

#include <complex>
#include <functional>
#include <string>

#include "wigfluct/bvfunc.hpp"

namespace wigfluct {

using Complex = std::complex<double>;

/// Integration region [-L, L] x ([-M, M] \ [-eta0, eta0]) and its
/// quadrature controls.
struct ContourParams {
  double eta0 = 1e-3;
  double M = 1e3;
  double L = 3.0;
  double grading = 1.5;      // ratio of consecutive eta panel edges
  double inner_tol = 1e-9;   // absolute tolerance of each x integral, divided by max(1, eta)
  int threads = 1;           // eta panels evaluated concurrently when the source allows it

  /// eta0 = n^{-2/3} (n^{-0.95} for Lipschitz f), M = n.
  static ContourParams for_dimension(std::size_t n, bool lipschitz);
  void validate() const;
};

/// Stieltjes transform z -> int (lambda - z)^{-1} mu(d lambda) of a measure
/// supported in [-support_bound, support_bound].
struct StieltjesSource {
  std::function<Complex(Complex)> eval;
  double support_bound = 0.0;
  bool concurrent_safe = true;
  std::string name;
};

StieltjesSource point_mass_source(double at = 0.0);
StieltjesSource semicircle_source();
/// Spectral measure sum_k w_k delta_{lambda_k}.
StieltjesSource discrete_source(std::vector<double> atoms, std::vector<double> weights);

struct PleijelResult {
  double value = 0.0;
  double error_budget = 0.0;
  double imag_residue = 0.0;       // |Im| of the contour sum
  double cutoff_term = 0.0;        // eta0 * int |m(x + i eta0)| |df|(x)
  double tail_term = 0.0;          // ||f||_1 / M
  double quadrature_error = 0.0;
  double reform_discrepancy = 0.0; // symmetric region vs 2 Re of the upper half
  long evaluations = 0;
};

/// (1/2pi) times the double integral of m(x + i eta) d eta df(x) over the
/// region. Outer eta: log-graded G7/K15 panels on [eta0, M], both signs of
/// eta evaluated explicitly. Inner x: atoms of df exactly plus adaptive
/// quadrature against f' on each piece.
PleijelResult pleijel_integrate(const StieltjesSource& src, const BVFunction& f, const ContourParams& params);

/// mu([x, x']) as the integral against the indicator of [x, x'].
PleijelResult pleijel_interval_mass(const StieltjesSource& src, double x, double x_prime,
                                    const ContourParams& params);

struct StokesResult {
  Complex lhs;           // (1/2pi) double integral of g d eta df
  double rhs = 0.0;      // (1/pi) int f(x) Im g(x + i eta0) dx
  double residual = 0.0; // |lhs - rhs|
  double bound = 0.0;    // ||f||_1 max_x |g(x + iM)| + quadrature error
};

/// Compares both sides of the Stokes identity for g analytic off the axis
/// with g(conj z) = conj g(z).
StokesResult stokes_check(const std::function<Complex(Complex)>& g, const BVFunction& f,
                          const ContourParams& params);

}  // namespace wigfluct
