#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "wigfluct/bvfunc.hpp"

namespace wigfluct {

using Complex = std::complex<double>;

/// (1/2pi) sqrt((4 - x^2)_+)
double sc_density(double x);

/// Stieltjes transform of the semicircle law, m(z) = (-z + sqrt(z^2 - 4))/2
/// on the branch with m(z) ~ -1/z. Throws std::domain_error for z on [-2, 2].
Complex stieltjes_m(Complex z);

/// Boundary value m(x + i0) = (-x + i sqrt(4 - x^2))/2 for |x| < 2.
Complex stieltjes_m_boundary(double x);

/// Moments of the semicircle law: 0 for odd k, Catalan(k/2) for even k.
double sc_moment(int k);

/// Integral of g against the semicircle law, computed in the variable
/// x = 2 sin(theta) with adaptive G7/K15 panels split at `splits`.
double sc_expectation(const std::function<double(double)>& g, const std::vector<double>& splits = {},
                      double tol = 1e-12);

enum class ScWeight { One, X, XSquaredMinusOne };

double sc_integral(const BVFunction& f, ScWeight weight);
double sc_integral(const BVFunction& f, const std::function<double(double)>& weight);

/// Second-order building blocks of the limiting variances.
struct VTerms {
  double v1 = 0.0;         // int f^2
  double v1_sigma2 = 0.0;  // double integral against the sigma2 kernel
  double v2 = 0.0;         // (int f)^2
  double v3 = 0.0;         // (int f x)^2
  double v4 = 0.0;         // (int f (x^2 - 1))^2
  double sigma2 = 0.0;
};

/// (1 - s^2) / (1 - xys + (x^2 + y^2 - 2)s^2 - xys^3 + s^4)
double sigma2_kernel(double x, double y, double sigma2);

/// Double integral of f(x) f(y) sigma2_kernel(x, y) over the product
/// semicircle law. At sigma2 = 1 this is int f^2 and at sigma2 = -1 it is
/// int f(x) f(-x); both endpoints are evaluated in that closed form.
double v1_sigma2(const BVFunction& f, double sigma2);

VTerms v_terms(const BVFunction& f, double sigma2);

}  // namespace wigfluct
