#include "wigfluct/pleijel.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "wigfluct/quadrature.hpp"
#include "wigfluct/semicircle.hpp"

namespace wigfluct {
namespace {

struct PanelSum {
  quad::ComplexPair value;
  double eta_error = 0.0;
  double inner_error = 0.0;
  long evaluations = 0;
};

std::vector<double> eta_edges(const ContourParams& p) {
  std::vector<double> e{p.eta0};
  while (e.back() < p.M) e.push_back(std::min(p.M, e.back() * p.grading));
  return e;
}

Complex checked(const std::function<Complex(Complex)>& g, Complex z) {
  const Complex v = g(z);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw std::runtime_error("Stieltjes source returned a non-finite value");
  return v;
}

// G7/K15 over one eta panel of the x integrals of g(x + i eta) + g(x - i eta)
// (first) and 2 Re g(x + i eta) (second) against df.
PanelSum eta_panel(const std::function<Complex(Complex)>& g, const BVFunction& f, double a, double b,
                   double inner_tol) {
  const auto& t = quad::gauss_kronrod15();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  PanelSum out;
  quad::ComplexPair kronrod, gauss;
  for (std::size_t i = 0; i < 8; ++i) {
    const int reps = i == 0 ? 1 : 2;
    for (int side = 0; side < reps; ++side) {
      const double eta = side == 0 ? c + h * t.kronrod_nodes[i] : c - h * t.kronrod_nodes[i];
      const double tol = inner_tol / std::max(1.0, eta);
      auto est = f.integrate_df<quad::ComplexPair>(
          [&](double x) {
            const Complex up = checked(g, {x, eta});
            const Complex down = checked(g, {x, -eta});
            return quad::ComplexPair{up + down, Complex(2.0 * up.real(), 0.0)};
          },
          {tol, 1e-10, 20000});
      kronrod = kronrod + t.kronrod_weights[i] * est.value;
      if (i % 2 == 0) gauss = gauss + t.gauss_weights[i / 2] * est.value;
      out.inner_error += h * t.kronrod_weights[i] * est.error;
      out.evaluations += 2 * est.evaluations;
    }
  }
  out.value = h * kronrod;
  out.eta_error = h * quad::magnitude(kronrod - gauss);
  return out;
}

struct ContourSum {
  quad::ComplexPair value;
  double error = 0.0;
  long evaluations = 0;
};

ContourSum contour_sum(const std::function<Complex(Complex)>& g, const BVFunction& f, const ContourParams& p,
                       bool concurrent) {
  const auto edges = eta_edges(p);
  const std::size_t panels = edges.size() - 1;
  std::vector<PanelSum> parts(panels);
  const int workers = concurrent ? std::max(1, std::min<int>(p.threads, static_cast<int>(panels))) : 1;
  if (workers <= 1) {
    for (std::size_t j = 0; j < panels; ++j) parts[j] = eta_panel(g, f, edges[j], edges[j + 1], p.inner_tol);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t j = next++; j < panels; j = next++) {
          try {
            parts[j] = eta_panel(g, f, edges[j], edges[j + 1], p.inner_tol);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }
  ContourSum out;
  for (const auto& part : parts) {
    out.value = out.value + part.value;
    out.error += part.eta_error + part.inner_error;
    out.evaluations += part.evaluations;
  }
  return out;
}

}  // namespace

ContourParams ContourParams::for_dimension(std::size_t n, bool lipschitz) {
  ContourParams p;
  const double N = static_cast<double>(n);
  p.eta0 = lipschitz ? std::pow(N, -0.95) : std::pow(N, -2.0 / 3.0);
  p.M = N;
  return p;
}

void ContourParams::validate() const {
  if (!(eta0 > 0.0 && M > eta0)) throw std::invalid_argument("contour: need 0 < eta0 < M");
  if (!(L > 0.0)) throw std::invalid_argument("contour: need L > 0");
  if (!(grading > 1.0)) throw std::invalid_argument("contour: grading must exceed 1");
  if (!(inner_tol > 0.0)) throw std::invalid_argument("contour: inner_tol must be positive");
}

StieltjesSource point_mass_source(double at) {
  return {[at](Complex z) { return 1.0 / (at - z); }, std::abs(at), true, "delta"};
}

StieltjesSource semicircle_source() { return {[](Complex z) { return stieltjes_m(z); }, 2.0, true, "semicircle"}; }

StieltjesSource discrete_source(std::vector<double> atoms, std::vector<double> weights) {
  if (atoms.size() != weights.size()) throw std::invalid_argument("discrete_source: size mismatch");
  double bound = 0.0;
  for (double a : atoms) bound = std::max(bound, std::abs(a));
  return {[atoms = std::move(atoms), weights = std::move(weights)](Complex z) {
            Complex s = 0.0;
            for (std::size_t k = 0; k < atoms.size(); ++k) s += weights[k] / (atoms[k] - z);
            return s;
          },
          bound, true, "discrete"};
}

PleijelResult pleijel_integrate(const StieltjesSource& src, const BVFunction& f, const ContourParams& params) {
  params.validate();
  if (!(src.support_bound < params.L))
    throw std::invalid_argument("pleijel: source support bound must be below L");
  if (!f.breakpoints().empty() && (f.breakpoints().front() < -params.L || f.breakpoints().back() > params.L))
    throw std::invalid_argument("pleijel: f must be supported in [-L, L]");

  const ContourSum sum = contour_sum(src.eval, f, params, src.concurrent_safe);
  const double scale = 1.0 / (2.0 * std::numbers::pi);
  PleijelResult r;
  r.value = scale * sum.value.first.real();
  r.imag_residue = scale * std::abs(sum.value.first.imag());
  r.reform_discrepancy = scale * std::abs(sum.value.first - sum.value.second);
  r.quadrature_error = scale * sum.error;
  r.evaluations = sum.evaluations;
  const auto cut = f.integrate_abs_df([&](double x) { return std::abs(checked(src.eval, {x, params.eta0})); },
                                      {1e-10, 1e-8, 20000});
  r.cutoff_term = params.eta0 * cut.value;
  r.tail_term = f.norms().l1 / params.M;
  r.error_budget = r.imag_residue + r.cutoff_term + r.tail_term + r.quadrature_error;
  return r;
}

PleijelResult pleijel_interval_mass(const StieltjesSource& src, double x, double x_prime,
                                    const ContourParams& params) {
  if (!(x < x_prime)) throw std::invalid_argument("pleijel_interval_mass: need x < x'");
  return pleijel_integrate(src, bv::indicator(x, x_prime), params);
}

StokesResult stokes_check(const std::function<Complex(Complex)>& g, const BVFunction& f,
                          const ContourParams& params) {
  params.validate();
  const ContourSum sum = contour_sum(g, f, params, false);
  StokesResult r;
  r.lhs = sum.value.first / (2.0 * std::numbers::pi);
  const double eta0 = params.eta0;
  double rhs_error = 0.0;
  {
    const auto& bps = f.breakpoints();
    for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
      auto est = quad::integrate_adaptive<double>(
          [&](double x) { return f.pieces()[i].value(x) * checked(g, {x, eta0}).imag(); }, bps[i], bps[i + 1],
          {1e-12, 1e-12, 20000});
      r.rhs += est.value;
      rhs_error += est.error;
    }
  }
  r.rhs /= std::numbers::pi;
  rhs_error /= std::numbers::pi;
  double gmax = 0.0;
  const int grid = 600;
  for (int k = 0; k <= grid; ++k) {
    const double x = -params.L + 2.0 * params.L * k / grid;
    gmax = std::max(gmax, std::abs(checked(g, {x, params.M})));
  }
  r.residual = std::abs(r.lhs - Complex(r.rhs, 0.0));
  r.bound = f.norms().l1 * gmax + sum.error / (2.0 * std::numbers::pi) + rhs_error;
  return r;
}

}  // namespace wigfluct
