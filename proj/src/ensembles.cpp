#include "wigfluct/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wigfluct {
namespace {

bool is_real_law(EntryLaw law) { return law != EntryLaw::UniformPhase; }

void check_consistency(const EnsembleSpec& s) {
  auto fail = [&](const std::string& what) {
    throw std::invalid_argument("ensemble '" + s.name + "': " + what);
  };
  if (!std::isfinite(s.sigma2) || std::abs(s.sigma2) > 1.0) fail("sigma2 must lie in [-1, 1]");
  if (!std::isfinite(s.sigma4) || s.sigma4 < 1.0) fail("sigma4 must be >= 1");
  if (!std::isfinite(s.s_diag) || s.s_diag < 0.0) fail("s_diag must be >= 0");
  if (!is_real_law(s.diag_law)) fail("diagonal law must be real");
  if (s.symmetry == Symmetry::RealSymmetric) {
    if (!is_real_law(s.off_diag_law)) fail("uniform_phase entries require complex-hermitian symmetry");
    if (s.sigma2 != 1.0) fail("real-symmetric entries force sigma2 = 1");
  }
  if (s.off_diag_law == EntryLaw::UniformPhase && s.sigma2 != 0.0) fail("uniform_phase entries have sigma2 = 0");
  const double implied = implied_sigma4(s);
  if (std::abs(implied - s.sigma4) > 1e-9 * std::max(1.0, s.sigma4)) {
    fail("sigma4 = " + std::to_string(s.sigma4) + " inconsistent with entry law (implies " +
         std::to_string(implied) + ")");
  }
}

class ScalarSampler {
 public:
  explicit ScalarSampler(const EnsembleSpec& spec)
      : spec_(spec),
        re_scale_(std::sqrt(0.5 * (1.0 + spec.sigma2))),
        im_scale_(std::sqrt(0.5 * (1.0 - spec.sigma2))) {
    if (spec.off_diag_law == EntryLaw::UniformPhase && spec.sigma4 > 1.0) {
      const double k = 1.0 / (spec.sigma4 - 1.0);
      gamma_ = std::gamma_distribution<double>(k, spec.sigma4 - 1.0);
    }
  }

  double real(EntryLaw law, Engine& eng) {
    switch (law) {
      case EntryLaw::Gaussian: return normal_(eng);
      case EntryLaw::Rademacher: return (eng() >> 63) ? 1.0 : -1.0;
      case EntryLaw::Uniform: return uniform_(eng);
      case EntryLaw::UniformPhase: break;
    }
    throw std::logic_error("ScalarSampler::real: complex law");
  }

  // Unnormalized off-diagonal entry: sqrt(N) h_ij.
  Complex off_diagonal(Engine& eng) {
    if (spec_.symmetry == Symmetry::RealSymmetric) return real(spec_.off_diag_law, eng);
    if (spec_.off_diag_law == EntryLaw::UniformPhase) {
      const double theta = phase_(eng);
      const double r = spec_.sigma4 > 1.0 ? std::sqrt(gamma_(eng)) : 1.0;
      return std::polar(r, theta);
    }
    const double x = real(spec_.off_diag_law, eng);
    const double y = real(spec_.off_diag_law, eng);
    return {re_scale_ * x, im_scale_ * y};
  }

  double diagonal(Engine& eng) { return std::sqrt(spec_.s_diag) * real(spec_.diag_law, eng); }

 private:
  const EnsembleSpec& spec_;
  double re_scale_;
  double im_scale_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{-std::numbers::sqrt3, std::numbers::sqrt3};
  std::uniform_real_distribution<double> phase_{0.0, 2.0 * std::numbers::pi};
  std::gamma_distribution<double> gamma_{1.0, 1.0};
};

template <class M>
M select(const M& a, const std::vector<std::size_t>& keep) {
  const auto m = static_cast<Eigen::Index>(keep.size());
  M out(m, m);
  for (Eigen::Index c = 0; c < m; ++c)
    for (Eigen::Index r = 0; r < m; ++r)
      out(r, c) = a(static_cast<Eigen::Index>(keep[r]), static_cast<Eigen::Index>(keep[c]));
  return out;
}

}  // namespace

std::string to_string(Symmetry s) {
  return s == Symmetry::RealSymmetric ? "real_symmetric" : "complex_hermitian";
}

std::string to_string(EntryLaw law) {
  switch (law) {
    case EntryLaw::Gaussian: return "gaussian";
    case EntryLaw::Rademacher: return "rademacher";
    case EntryLaw::Uniform: return "uniform";
    case EntryLaw::UniformPhase: return "uniform_phase";
  }
  return "unknown";
}

Symmetry symmetry_from_string(const std::string& s) {
  if (s == "real_symmetric" || s == "real") return Symmetry::RealSymmetric;
  if (s == "complex_hermitian" || s == "complex") return Symmetry::ComplexHermitian;
  throw std::invalid_argument("unknown symmetry '" + s + "'");
}

EntryLaw entry_law_from_string(const std::string& s) {
  if (s == "gaussian") return EntryLaw::Gaussian;
  if (s == "rademacher") return EntryLaw::Rademacher;
  if (s == "uniform") return EntryLaw::Uniform;
  if (s == "uniform_phase") return EntryLaw::UniformPhase;
  throw std::invalid_argument("unknown entry law '" + s + "'");
}

double real_law_kurtosis(EntryLaw law) {
  switch (law) {
    case EntryLaw::Gaussian: return 3.0;
    case EntryLaw::Rademacher: return 1.0;
    case EntryLaw::Uniform: return 9.0 / 5.0;
    case EntryLaw::UniformPhase: break;
  }
  throw std::invalid_argument("real_law_kurtosis: not a real law");
}

double implied_sigma4(const EnsembleSpec& spec) {
  if (spec.off_diag_law == EntryLaw::UniformPhase) return spec.sigma4;
  const double kappa = real_law_kurtosis(spec.off_diag_law);
  if (spec.symmetry == Symmetry::RealSymmetric) return kappa;
  // |h|^2 = a^2 x^2 + b^2 y^2 with a^2 + b^2 = 1, a^2 - b^2 = sigma2.
  const double a2 = 0.5 * (1.0 + spec.sigma2);
  const double b2 = 0.5 * (1.0 - spec.sigma2);
  return kappa * (a2 * a2 + b2 * b2) + 2.0 * a2 * b2;
}

void validate(const EnsembleSpec& spec) {
  check_consistency(spec);
  constexpr int draws = 1'000'000;
  Engine eng = make_engine(stream_seed(0x5eedc0deULL, {static_cast<std::uint64_t>(spec.symmetry),
                                                       static_cast<std::uint64_t>(spec.off_diag_law)}));
  ScalarSampler sampler(spec);
  Complex m2 = 0.0;
  double abs2 = 0.0;
  double abs4 = 0.0;
  for (int k = 0; k < draws; ++k) {
    const Complex h = sampler.off_diagonal(eng);
    const double a = std::norm(h);
    m2 += h * h;
    abs2 += a;
    abs4 += a * a;
  }
  m2 /= draws;
  abs2 /= draws;
  abs4 /= draws;
  auto fail = [&](const std::string& what) {
    throw std::invalid_argument("ensemble '" + spec.name + "': empirical moment check failed: " + what);
  };
  if (std::abs(abs2 - 1.0) > 0.02) fail("E|h|^2 = " + std::to_string(abs2));
  if (std::abs(m2.real() - spec.sigma2) > 0.02 || std::abs(m2.imag()) > 0.02)
    fail("E h^2 = " + std::to_string(m2.real()) + " vs sigma2 = " + std::to_string(spec.sigma2));
  if (std::abs(abs4 - spec.sigma4) > 0.02 * spec.sigma4)
    fail("E|h|^4 = " + std::to_string(abs4) + " vs sigma4 = " + std::to_string(spec.sigma4));
}

EnsembleSpec goe_spec() {
  EnsembleSpec s{"goe", Symmetry::RealSymmetric, EntryLaw::Gaussian, 1.0, 3.0, EntryLaw::Gaussian, 1.0};
  check_consistency(s);
  return s;
}

EnsembleSpec gue_spec() {
  EnsembleSpec s{"gue", Symmetry::ComplexHermitian, EntryLaw::Gaussian, 0.0, 2.0, EntryLaw::Gaussian, 1.0};
  check_consistency(s);
  return s;
}

EnsembleSpec rademacher_spec() {
  EnsembleSpec s{"rademacher", Symmetry::RealSymmetric, EntryLaw::Rademacher, 1.0, 1.0, EntryLaw::Rademacher, 1.0};
  check_consistency(s);
  return s;
}

EnsembleSpec uniform_phase_spec(double sigma4) {
  EnsembleSpec s{"uniform_phase", Symmetry::ComplexHermitian, EntryLaw::UniformPhase, 0.0, sigma4,
                 EntryLaw::Gaussian, 1.0};
  check_consistency(s);
  return s;
}

EnsembleSpec complex_component_spec(EntryLaw law, double sigma2) {
  EnsembleSpec s{"complex_" + to_string(law), Symmetry::ComplexHermitian, law, sigma2, 0.0, law, 1.0};
  if (law == EntryLaw::UniformPhase) throw std::invalid_argument("complex_component_spec: needs a real law");
  s.sigma4 = implied_sigma4(s);
  check_consistency(s);
  return s;
}

std::vector<EnsembleSpec> builtin_specs() {
  return {goe_spec(), gue_spec(), rademacher_spec(), uniform_phase_spec()};
}

EnsembleSpec builtin_spec(const std::string& name) {
  if (name == "goe") return goe_spec();
  if (name == "gue") return gue_spec();
  if (name == "rademacher") return rademacher_spec();
  if (name == "uniform_phase") return uniform_phase_spec();
  throw std::invalid_argument("unknown builtin ensemble '" + name + "'");
}

WignerMatrix::WignerMatrix(RealMatrix entries, double xi11, Complex xi12)
    : entries_(std::move(entries)), xi11_(xi11), xi12_(xi12) {
  n_ = static_cast<std::size_t>(std::get<RealMatrix>(entries_).rows());
}

WignerMatrix::WignerMatrix(ComplexMatrix entries, double xi11, Complex xi12)
    : entries_(std::move(entries)), xi11_(xi11), xi12_(xi12) {
  n_ = static_cast<std::size_t>(std::get<ComplexMatrix>(entries_).rows());
}

WignerMatrix WignerMatrix::from_entries(RealMatrix entries) {
  if (entries.rows() != entries.cols()) throw std::invalid_argument("from_entries: matrix not square");
  const double root = std::sqrt(static_cast<double>(entries.rows()));
  const double xi11 = entries.rows() > 0 ? root * entries(0, 0) : 0.0;
  const double xi12 = entries.rows() > 1 ? root * entries(0, 1) : 0.0;
  return WignerMatrix(std::move(entries), xi11, xi12);
}

WignerMatrix WignerMatrix::from_entries(ComplexMatrix entries) {
  if (entries.rows() != entries.cols()) throw std::invalid_argument("from_entries: matrix not square");
  const double root = std::sqrt(static_cast<double>(entries.rows()));
  const double xi11 = entries.rows() > 0 ? root * entries(0, 0).real() : 0.0;
  const Complex xi12 = entries.rows() > 1 ? root * entries(0, 1) : Complex(0.0);
  return WignerMatrix(std::move(entries), xi11, xi12);
}

Complex WignerMatrix::operator()(std::size_t i, std::size_t j) const {
  const auto r = static_cast<Eigen::Index>(i);
  const auto c = static_cast<Eigen::Index>(j);
  if (is_real()) return real_entries()(r, c);
  return complex_entries()(r, c);
}

ComplexMatrix WignerMatrix::to_complex() const {
  if (is_real()) return real_entries().cast<Complex>();
  return complex_entries();
}

WignerMatrix sample_wigner(const EnsembleSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n < 4) throw std::invalid_argument("sample_wigner: n must be >= 4");
  check_consistency(spec);
  Engine eng = make_engine(seed);
  ScalarSampler sampler(spec);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const auto m = static_cast<Eigen::Index>(n);
  double xi11 = 0.0;
  Complex xi12 = 0.0;
  if (spec.symmetry == Symmetry::RealSymmetric) {
    RealMatrix a(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index i = 0; i < j; ++i) {
        const double x = sampler.off_diagonal(eng).real();
        if (i == 0 && j == 1) xi12 = x;
        a(i, j) = scale * x;
      }
      const double d = sampler.diagonal(eng);
      if (j == 0) xi11 = d;
      a(j, j) = scale * d;
    }
    // Filled column by column above the diagonal; mirror in one pass.
    a.triangularView<Eigen::StrictlyLower>() = a.transpose();
    return WignerMatrix(std::move(a), xi11, xi12);
  }
  ComplexMatrix a(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      const Complex x = sampler.off_diagonal(eng);
      if (i == 0 && j == 1) xi12 = x;
      a(i, j) = scale * x;
      a(j, i) = std::conj(a(i, j));
    }
    const double d = sampler.diagonal(eng);
    if (j == 0) xi11 = d;
    a(j, j) = scale * d;
  }
  a.triangularView<Eigen::StrictlyLower>() = a.adjoint();
  return WignerMatrix(std::move(a), xi11, xi12);
}

std::size_t Minor::n() const {
  return std::visit([](const auto& m) { return static_cast<std::size_t>(m.rows()); }, matrix);
}

ComplexMatrix Minor::to_complex() const {
  if (const auto* r = std::get_if<RealMatrix>(&matrix)) return r->cast<Complex>();
  return std::get<ComplexMatrix>(matrix);
}

Minor minor(const WignerMatrix& h, std::span<const std::size_t> removed) {
  const std::size_t n = h.n();
  if (removed.empty() || removed.size() > 2) throw std::invalid_argument("minor: remove one or two indices");
  for (std::size_t r : removed)
    if (r >= n) throw std::out_of_range("minor: index out of range");
  if (removed.size() == 2 && removed[0] == removed[1]) throw std::invalid_argument("minor: indices must differ");
  Minor out;
  for (std::size_t i = 0; i < n; ++i)
    if (std::find(removed.begin(), removed.end(), i) == removed.end()) out.surviving.push_back(i);
  std::visit([&](const auto& a) { out.matrix = select(a, out.surviving); }, h.entries());
  for (std::size_t r : removed) {
    ComplexVector col(static_cast<Eigen::Index>(out.surviving.size()));
    for (std::size_t k = 0; k < out.surviving.size(); ++k) col(static_cast<Eigen::Index>(k)) = h(out.surviving[k], r);
    out.columns.push_back(std::move(col));
  }
  return out;
}

Minor minor(const WignerMatrix& h, std::initializer_list<std::size_t> removed) {
  return minor(h, std::span<const std::size_t>(removed.begin(), removed.size()));
}

}  // namespace wigfluct
