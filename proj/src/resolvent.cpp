#include "wigfluct/resolvent.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "wigfluct/semicircle.hpp"

namespace wigfluct {
namespace {

void check_z(Complex z) {
  if (!(std::abs(z.imag()) >= kEtaMin)) throw std::invalid_argument("resolvent: |Im z| below the conditioning floor");
}

Eigen::PartialPivLU<ComplexMatrix> factor(const ComplexMatrix& a, Complex z) {
  ComplexMatrix shifted = a;
  shifted.diagonal().array() -= z;
  return Eigen::PartialPivLU<ComplexMatrix>(shifted);
}

Complex checked_inverse(Complex d) {
  if (d == Complex(0.0) || !std::isfinite(std::abs(d))) throw std::runtime_error("resolvent: singular solve");
  return 1.0 / d;
}

Complex singular_guard(Complex den) {
  if (std::abs(den) < 1e-12) throw std::domain_error("prediction: denominator vanishes");
  return den;
}

void wick_recurse(std::vector<std::size_t>& rest, std::span<const Complex> zs, double s2, double s4, Complex acc,
                  Complex& total) {
  if (rest.empty()) {
    total += acc;
    return;
  }
  const std::size_t a = rest.front();
  for (std::size_t k = 1; k < rest.size(); ++k) {
    const std::size_t b = rest[k];
    std::vector<std::size_t> next;
    for (std::size_t r = 1; r < rest.size(); ++r)
      if (r != k) next.push_back(rest[r]);
    wick_recurse(next, zs, s2, s4, acc * exx_prediction(zs[a], zs[b], s2, s4), total);
  }
}

}  // namespace

ResolventValues resolvent_entries(const WignerMatrix& h, const ResolventQuery& q) {
  check_z(q.z);
  const auto lu = factor(h.to_complex(), q.z);
  const auto n = static_cast<Eigen::Index>(h.n());
  std::map<std::size_t, ComplexVector> columns;
  auto column = [&](std::size_t j) -> const ComplexVector& {
    if (j >= h.n()) throw std::out_of_range("resolvent: index out of range");
    auto it = columns.find(j);
    if (it == columns.end()) {
      ComplexVector e = ComplexVector::Zero(n);
      e(static_cast<Eigen::Index>(j)) = 1.0;
      it = columns.emplace(j, lu.solve(e)).first;
    }
    return it->second;
  };
  ResolventValues out;
  for (const auto& [i, j] : q.entries) {
    if (i >= h.n()) throw std::out_of_range("resolvent: index out of range");
    out.entries.push_back(column(j)(static_cast<Eigen::Index>(i)));
  }
  if (q.column) out.column = column(*q.column);
  if (q.trace) out.trace = lu.inverse().trace() / static_cast<double>(h.n());
  return out;
}

ComplexMatrix resolvent_matrix(const WignerMatrix& h, Complex z) {
  check_z(z);
  return factor(h.to_complex(), z).inverse();
}

Complex schur_g11(const WignerMatrix& h, Complex z) {
  check_z(z);
  if (h.n() == 1) return checked_inverse(h(0, 0) - z);
  const Minor mn = minor(h, {0});
  const ComplexVector& v = mn.columns[0];
  const ComplexVector w = factor(mn.to_complex(), z).solve(v);
  return checked_inverse(h(0, 0) - z - v.dot(w));
}

KernelStats kernel_stats(const WignerMatrix& h, Complex z) {
  check_z(z);
  if (h.n() < 3) throw std::invalid_argument("kernel_stats: need n >= 3");
  const double N = static_cast<double>(h.n());
  KernelStats out;
  {
    const Minor mn = minor(h, {0});
    const auto lu = factor(mn.to_complex(), z);
    const ComplexVector& v = mn.columns[0];
    const Complex quad = v.dot(lu.solve(v));
    out.m_hat = lu.inverse().trace() / N;
    out.x_value = quad - out.m_hat;
  }
  {
    const Minor mn = minor(h, {0, 1});
    const auto lu = factor(mn.to_complex(), z);
    out.y_value = std::sqrt(N) * mn.columns[0].dot(lu.solve(mn.columns[1]));
  }
  return out;
}

KernelStats kernel_stats(const spectral::EntrySpectrum& s, Complex z) {
  check_z(z);
  const double N = static_cast<double>(s.n);
  KernelStats out;
  const Complex g00 = s.resolvent(0, 0, z);
  const Complex g01 = s.resolvent(0, 1, z);
  const Complex g10 = s.resolvent(1, 0, z);
  const Complex g11 = s.resolvent(1, 1, z);
  out.m_hat = s.minor_trace(z);
  out.x_value = s.h11 - z - checked_inverse(g00) - out.m_hat;
  // (G_block)^{-1} = H_block - z - [h1 h2]^* G^(12) [h1 h2]; take entry (0, 1).
  const Complex det = g00 * g11 - g01 * g10;
  const Complex inv01 = -g01 * checked_inverse(det);
  out.y_value = std::sqrt(N) * (s.h12 - inv01);
  return out;
}

Complex exx_prediction(Complex z, Complex zp, double s2, double s4) {
  const Complex m = stieltjes_m(z), mp = stieltjes_m(zp);
  const Complex mm = m * mp;
  const Complex d1 = singular_guard(1.0 - mm);
  const Complex d2 = singular_guard(1.0 - s2 * mm);
  return mm * mm / d1 + s2 * s2 * s2 * mm * mm / d2 + (s4 - 1.0) * mm;
}

EyyPrediction eyy_predictions(Complex z, Complex zp, double s2) {
  const Complex m = stieltjes_m(z), mp = stieltjes_m(zp);
  const Complex mm = m * mp;
  const Complex mc = m * std::conj(mp);
  EyyPrediction out;
  out.eyy = s2 * s2 * mm / singular_guard(1.0 - s2 * mm);
  out.eyybar = mm / singular_guard(1.0 - mm);
  out.eyybar_alt = mc / singular_guard(1.0 - mc);
  return out;
}

Complex wick_prediction(std::span<const Complex> zs, double s2, double s4) {
  if (zs.size() % 2 == 1) return 0.0;
  std::vector<std::size_t> idx(zs.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  Complex total = 0.0;
  wick_recurse(idx, zs, s2, s4, 1.0, total);
  return total;
}

std::vector<LocalLawResiduals> local_law_residuals(const WignerMatrix& h, std::span<const Complex> zs) {
  for (Complex z : zs) check_z(z);
  const ComplexMatrix hc = h.to_complex();
  const spectral::ComplexEigen eig = spectral::eigh(hc);
  const double N = static_cast<double>(h.n());
  std::vector<LocalLawResiduals> out;
  for (Complex z : zs) {
    const Complex m = stieltjes_m(z);
    ComplexVector inv(eig.values.size());
    for (Eigen::Index k = 0; k < inv.size(); ++k) inv(k) = 1.0 / (eig.values(k) - z);
    const ComplexMatrix g = eig.vectors * inv.asDiagonal() * eig.vectors.adjoint();
    ComplexMatrix diff = g;
    diff.diagonal().array() -= m;
    LocalLawResiduals r;
    r.avg_residual = std::abs(inv.sum() / N - m);
    r.max_entry_residual = diff.cwiseAbs().maxCoeff();
    out.push_back(r);
  }
  return out;
}

LocalLawResiduals local_law_residuals(const WignerMatrix& h, Complex z) {
  return local_law_residuals(h, std::span<const Complex>(&z, 1)).front();
}

PhiSplit phi_split(const WignerMatrix& h, Complex z) {
  const KernelStats k = kernel_stats(h, z);
  PhiSplit out;
  out.phi = resolvent_entries(h, {z, {{0, 0}}, false, std::nullopt}).entries[0];
  out.phi_hat = checked_inverse(-z - k.m_hat);
  out.fluct = out.phi - out.phi_hat;
  const Complex m = stieltjes_m(z);
  out.linearized = m * m * (k.x_value - h(0, 0));
  return out;
}

PhiSplit phi_split(const spectral::EntrySpectrum& s, Complex z) {
  const KernelStats k = kernel_stats(s, z);
  PhiSplit out;
  out.phi = s.resolvent(0, 0, z);
  out.phi_hat = checked_inverse(-z - k.m_hat);
  out.fluct = out.phi - out.phi_hat;
  const Complex m = stieltjes_m(z);
  out.linearized = m * m * (k.x_value - s.h11);
  return out;
}

PsiPhi psi_phi(Complex z, Complex zp, std::size_t n) {
  const double N = static_cast<double>(n);
  const double e = std::abs(z.imag()), ep = std::abs(zp.imag());
  const double x = z.real(), xp = zp.real();
  PsiPhi out;
  out.psi = (1.0 / std::sqrt(e * ep)) * (1.0 / std::sqrt(e) + 1.0 / std::sqrt(ep) + 1.0 / std::sqrt(N * e * ep));
  const bool inside = std::abs(x) <= 2.0 && std::abs(xp) <= 2.0;
  out.phi_lower = (inside ? e + ep + (x - xp) * (x - xp) : 0.0) + std::max(std::abs(x) - 2.0, 0.0) +
                  std::max(std::abs(xp) - 2.0, 0.0);
  return out;
}

StieltjesSource g11_source(std::shared_ptr<const spectral::EntrySpectrum> s) {
  double bound = 0.0;
  for (double l : s->eigenvalues) bound = std::max(bound, std::abs(l));
  return {[s](Complex z) { return s->resolvent(0, 0, z); }, bound, true, "G11"};
}

}  // namespace wigfluct
