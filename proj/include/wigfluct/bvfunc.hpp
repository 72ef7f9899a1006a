#pragma once

#include <complex>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "wigfluct/quadrature.hpp"

namespace wigfluct {

/// Smooth piece of a BV function on one interval between breakpoints.
/// The callables must be valid on the closed interval; their values at the
/// endpoints are the one-sided limits used to derive jumps.
struct Piece {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  bool constant = false;  // derivative identically zero; skipped by df integrals

  static Piece constant_value(double c);
  /// sum_k coeffs[k] (x - origin)^k
  static Piece polynomial(std::vector<double> coeffs, double origin = 0.0);
};

struct Jump {
  double location;
  double size;  // f(x+) - f(x-)
};

struct BVNorms {
  double total_variation = 0.0;
  double l1 = 0.0;
};

/// Compactly supported function of bounded variation on [-L, L]: smooth
/// pieces between sorted breakpoints, zero outside [breakpoints.front(),
/// breakpoints.back()]. Jumps are read off the piece limits. Evaluation is
/// right-continuous.
class BVFunction {
 public:
  BVFunction() = default;
  BVFunction(std::string name, std::vector<double> breakpoints, std::vector<Piece> pieces, bool lipschitz,
             double support = 3.0);

  const std::string& name() const { return name_; }
  void rename(std::string name) { name_ = std::move(name); }
  /// Whether f' is bounded (no jumps, Lipschitz pieces).
  bool lipschitz() const { return lipschitz_; }
  double support() const { return support_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  const std::vector<Jump>& jumps() const { return jumps_; }
  /// Points splitting each piece into intervals on which f is monotone.
  const std::vector<std::vector<double>>& monotone_splits() const { return monotone_splits_; }

  double operator()(double x) const;
  /// Derivative of the absolutely continuous part (0 outside the pieces).
  double derivative(double x) const;

  BVNorms norms() const;

  /// Sum over atoms of g(x) * jump plus the integral of g f' over every
  /// non-constant piece (adaptive G7/K15 per monotone sub-interval).
  template <class V, class G>
  quad::Estimate<V> integrate_df(G&& g, const quad::AdaptiveOptions& opt = {}) const {
    quad::Estimate<V> out;
    for (const auto& j : jumps_) {
      out.value = out.value + j.size * g(j.location);
      ++out.evaluations;
    }
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      if (pieces_[i].constant) continue;
      const auto& df = pieces_[i].derivative;
      const auto& cuts = monotone_splits_[i];
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        auto est = quad::integrate_adaptive<V>([&](double x) { return df(x) * g(x); }, cuts[k], cuts[k + 1], opt);
        out.value = out.value + est.value;
        out.error += est.error;
        out.evaluations += est.evaluations;
      }
    }
    return out;
  }

  /// Integral of h against the total variation measure |df|.
  template <class G>
  quad::Estimate<double> integrate_abs_df(G&& h, const quad::AdaptiveOptions& opt = {}) const {
    quad::Estimate<double> out;
    for (const auto& j : jumps_) out.value += std::abs(j.size) * h(j.location);
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      if (pieces_[i].constant) continue;
      const auto& df = pieces_[i].derivative;
      const auto& cuts = monotone_splits_[i];
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        auto est = quad::integrate_adaptive<double>([&](double x) { return std::abs(df(x)) * h(x); }, cuts[k],
                                                    cuts[k + 1], opt);
        out.value += est.value;
        out.error += est.error;
        out.evaluations += est.evaluations;
      }
    }
    return out;
  }

  /// Integral of f * w dx over the support, split at breakpoints.
  double integrate(const std::function<double(double)>& w, const quad::AdaptiveOptions& opt = {}) const;

  BVFunction scaled(double alpha) const;
  friend BVFunction operator+(const BVFunction& f, const BVFunction& g);

 private:
  std::size_t piece_index(double x) const;  // breakpoints_[i] <= x < breakpoints_[i+1]

  std::string name_;
  std::vector<double> breakpoints_;
  std::vector<Piece> pieces_;
  std::vector<Jump> jumps_;
  std::vector<std::vector<double>> monotone_splits_;
  bool lipschitz_ = true;
  double support_ = 3.0;
};

/// C^2 cutoff: 1 on [-flat, flat], 0 outside [-support, support], quintic
/// smoothstep in between.
double cutoff(double x, double flat = 2.5, double support = 3.0);
double cutoff_derivative(double x, double flat = 2.5, double support = 3.0);

namespace bv {

BVFunction indicator(double a, double b);
/// |x - a| times the cutoff.
BVFunction abs_shift(double a, double flat = 2.5);
/// x^k times the cutoff.
BVFunction monomial(int k, double flat = 2.5);
/// exp(1 - 1/(1 - t^2)) with t = (x - center)/radius; equals 1 at the center.
BVFunction bump(double center = 0.0, double radius = 1.0);
/// Clamped linear ramp from 0 at a to 1 at b, times the cutoff.
BVFunction ramp(double a = -1.0, double b = 1.0, double flat = 2.5);
/// Identically zero.
BVFunction zero();

/// Builds a builtin from a kind name and numeric parameters, e.g.
/// ("indicator", {a: -1, b: 1}). Unknown kinds or parameters throw.
BVFunction make(const std::string& kind, const std::map<std::string, double>& params);

}  // namespace bv

/// indicator [-1,1], indicator [-2,0], |x|, x, x^2, x^3, bump, ramp.
std::vector<BVFunction> builtin_library();

}  // namespace wigfluct
