#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "wigfluct/rng.hpp"

namespace wigfluct {

using Complex = std::complex<double>;
using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

enum class Symmetry { RealSymmetric, ComplexHermitian };

/// Unit-variance scalar laws used to build matrix entries.
///
/// Gaussian, Rademacher and Uniform are real laws; a complex entry is
/// formed as (a x + i b y) / sqrt(N) from two independent draws.
/// UniformPhase is complex only: r e^{i theta} / sqrt(N) with theta uniform
/// and r^2 ~ Gamma(1/(sigma4-1), sigma4-1), so E r^2 = 1 and E r^4 = sigma4.
enum class EntryLaw { Gaussian, Rademacher, Uniform, UniformPhase };

std::string to_string(Symmetry s);
std::string to_string(EntryLaw law);
Symmetry symmetry_from_string(const std::string& s);
EntryLaw entry_law_from_string(const std::string& s);

/// Fourth moment E x^4 of a real unit-variance law.
double real_law_kurtosis(EntryLaw law);

struct EnsembleSpec {
  std::string name;
  Symmetry symmetry = Symmetry::RealSymmetric;
  EntryLaw off_diag_law = EntryLaw::Gaussian;
  double sigma2 = 1.0;  // N E h_ij^2
  double sigma4 = 3.0;  // N^2 E |h_ij|^4
  EntryLaw diag_law = EntryLaw::Gaussian;  // law of xi_ii / sqrt(s_diag); must be real
  double s_diag = 1.0;                     // N E |h_ii|^2

  bool operator==(const EnsembleSpec&) const = default;
};

/// The fourth moment implied by (symmetry, off_diag_law, sigma2).
/// For UniformPhase the fourth moment is free and `sigma4` is returned as is.
double implied_sigma4(const EnsembleSpec& spec);

/// Throws std::invalid_argument on an inconsistent spec. Besides the
/// analytic checks, draws 10^6 off-diagonal scalars and requires the
/// empirical sigma4 within 2% relative and sigma2 within 0.02 absolute.
void validate(const EnsembleSpec& spec);

EnsembleSpec goe_spec();
EnsembleSpec gue_spec();
EnsembleSpec rademacher_spec();
EnsembleSpec uniform_phase_spec(double sigma4 = 1.5);
/// Complex entries (a x + i b y) with x, y ~ `law` and a^2 - b^2 = sigma2.
EnsembleSpec complex_component_spec(EntryLaw law, double sigma2);

/// GOE, GUE, real Rademacher, complex uniform-phase (sigma4 = 1.5).
std::vector<EnsembleSpec> builtin_specs();
/// Looks up a builtin by name ("goe", "gue", "rademacher", "uniform_phase").
EnsembleSpec builtin_spec(const std::string& name);

/// Sampled Wigner matrix with the realized xi_11 = sqrt(N) h_11 and
/// xi_12 = sqrt(N) h_12 kept alongside the entries.
class WignerMatrix {
 public:
  WignerMatrix(RealMatrix entries, double xi11, Complex xi12);
  WignerMatrix(ComplexMatrix entries, double xi11, Complex xi12);

  /// Wraps an explicit self-adjoint matrix; xi values are read off the entries.
  static WignerMatrix from_entries(RealMatrix entries);
  static WignerMatrix from_entries(ComplexMatrix entries);

  std::size_t n() const { return n_; }
  bool is_real() const { return std::holds_alternative<RealMatrix>(entries_); }
  const RealMatrix& real_entries() const { return std::get<RealMatrix>(entries_); }
  const ComplexMatrix& complex_entries() const { return std::get<ComplexMatrix>(entries_); }
  const std::variant<RealMatrix, ComplexMatrix>& entries() const { return entries_; }
  Complex operator()(std::size_t i, std::size_t j) const;
  ComplexMatrix to_complex() const;

  double xi11() const { return xi11_; }
  Complex xi12() const { return xi12_; }

 private:
  std::variant<RealMatrix, ComplexMatrix> entries_;
  std::size_t n_;
  double xi11_;
  Complex xi12_;
};

/// Deterministic in (spec, n, seed). Requires n >= 4 and a valid spec.
WignerMatrix sample_wigner(const EnsembleSpec& spec, std::size_t n, std::uint64_t seed);

/// Matrix with rows/columns `removed` (0-based, one or two distinct indices)
/// deleted, together with the deleted columns restricted to the survivors:
/// columns[k][r] = H(surviving[r], removed[k]).
struct Minor {
  std::variant<RealMatrix, ComplexMatrix> matrix;
  std::vector<ComplexVector> columns;
  std::vector<std::size_t> surviving;

  std::size_t n() const;
  ComplexMatrix to_complex() const;
};

Minor minor(const WignerMatrix& h, std::span<const std::size_t> removed);
Minor minor(const WignerMatrix& h, std::initializer_list<std::size_t> removed);

}  // namespace wigfluct
