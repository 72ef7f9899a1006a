#include "wigfluct/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

extern "C" void openblas_set_num_threads(int);

namespace wigfluct::spectral {
namespace {

void check_info(lapack_int info, const char* routine) {
  if (info != 0)
    throw std::runtime_error(std::string(routine) + " failed with info = " + std::to_string(info));
}

}  // namespace

// Eigenvectors come from Eigen rather than syevd/heevd: OpenBLAS 0.3.20 picks
// its Cooperlake kernels on recent Xeons and those return wrong eigenvectors
// for n of order 100 and up. Eigenvalue-only drivers and the entry spectrum
// path are unaffected (checked against Eigen in test_spectral).
template <class Matrix, class Out>
Out eigh_impl(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigh: eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

RealEigen eigh(const RealMatrix& a) { return eigh_impl<RealMatrix, RealEigen>(a); }

ComplexEigen eigh(const ComplexMatrix& a) { return eigh_impl<ComplexMatrix, ComplexEigen>(a); }

Eigen::VectorXd eigenvalues(const RealMatrix& a) {
  RealMatrix work = a;
  Eigen::VectorXd w(a.rows());
  const auto n = static_cast<lapack_int>(a.rows());
  check_info(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, work.data(), n, w.data()), "dsyevd");
  return w;
}

Eigen::VectorXd eigenvalues(const ComplexMatrix& a) {
  ComplexMatrix work = a;
  Eigen::VectorXd w(a.rows());
  const auto n = static_cast<lapack_int>(a.rows());
  check_info(LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n, work.data(), n, w.data()), "zheevd");
  return w;
}

Eigen::VectorXd eigenvalues(const WignerMatrix& h) {
  return std::visit([](const auto& a) { return eigenvalues(a); }, h.entries());
}

void tridiagonal_ql(std::vector<double>& d, std::vector<double> sub, RealMatrix& rows) {
  const std::size_t n = d.size();
  if (n == 0) return;
  if (sub.size() + 1 != n) throw std::invalid_argument("tridiagonal_ql: subdiagonal size mismatch");
  if (static_cast<std::size_t>(rows.cols()) != n) throw std::invalid_argument("tridiagonal_ql: rows width mismatch");
  std::vector<double> e(sub);
  e.push_back(0.0);
  const double eps = std::numeric_limits<double>::epsilon();
  const Eigen::Index k = rows.rows();

  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (++iter > 60) throw std::runtime_error("tridiagonal_ql: no convergence");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (std::size_t i = m; i-- > l;) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          double* zi = rows.col(static_cast<Eigen::Index>(i)).data();
          double* zj = rows.col(static_cast<Eigen::Index>(i + 1)).data();
          for (Eigen::Index q = 0; q < k; ++q) {
            f = zj[q];
            zj[q] = s * zi[q] + c * f;
            zi[q] = c * zi[q] - s * f;
          }
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  std::vector<double> sorted(n);
  RealMatrix permuted(k, static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    sorted[j] = d[order[j]];
    permuted.col(static_cast<Eigen::Index>(j)) = rows.col(static_cast<Eigen::Index>(order[j]));
  }
  d = std::move(sorted);
  rows = std::move(permuted);
}

std::vector<double> tridiagonal_eigenvalues(std::vector<double> d, std::vector<double> e) {
  const auto n = static_cast<lapack_int>(d.size());
  if (n == 0) return d;
  e.resize(d.size());
  check_info(LAPACKE_dsterf(n, d.data(), e.data()), "dsterf");
  return d;
}

Complex EntrySpectrum::resolvent(int a, int b, Complex z) const {
  double re = 0.0, im = 0.0;
  const double x = z.real(), eta = z.imag();
  if (a == 0 && b == 0) {
    for (std::size_t k = 0; k < n; ++k) {
      const double dx = eigenvalues[k] - x;
      const double w = first[k] * first[k] / (dx * dx + eta * eta);
      re += w * dx;
      im += w * eta;
    }
    return {re, im};
  }
  Complex sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Complex ua = a == 0 ? Complex(first[k]) : second[k];
    const Complex ub = b == 0 ? Complex(first[k]) : second[k];
    sum += ua * std::conj(ub) / (eigenvalues[k] - z);
  }
  return sum;
}

Complex EntrySpectrum::minor_trace(Complex z) const {
  double re = 0.0, im = 0.0;
  const double x = z.real(), eta = z.imag();
  for (double mu : minor_eigenvalues) {
    const double dx = mu - x;
    const double w = 1.0 / (dx * dx + eta * eta);
    re += w * dx;
    im += w * eta;
  }
  return Complex(re, im) / static_cast<double>(n);
}

EntrySpectrum entry_spectrum(const WignerMatrix& h) {
  const std::size_t n = h.n();
  const auto ln = static_cast<lapack_int>(n);
  EntrySpectrum out;
  out.n = n;
  out.h11 = h(0, 0).real();
  out.h12 = h(0, 1);
  std::vector<double> d(n), e(n > 0 ? n - 1 : 0);
  // rows: 0 -> e_0^T Q, 1 -> Re(e_1^T Q), 2 -> Im(e_1^T Q)
  RealMatrix rows = RealMatrix::Zero(h.is_real() ? 2 : 3, static_cast<Eigen::Index>(n));
  rows(0, 0) = 1.0;
  if (h.is_real()) {
    RealMatrix a = h.real_entries();
    std::vector<double> tau(n > 0 ? n - 1 : 0);
    check_info(LAPACKE_dsytrd(LAPACK_COL_MAJOR, 'L', ln, a.data(), ln, d.data(), e.data(), tau.data()), "dsytrd");
    // Q = diag(1, Q'), so e_0^T Q = e_0^T. Row 1 of Q is (Q^T e_1)^T.
    Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    c(1) = 1.0;
    check_info(LAPACKE_dormtr(LAPACK_COL_MAJOR, 'L', 'L', 'T', ln, 1, a.data(), ln, tau.data(), c.data(), ln),
               "dormtr");
    rows.row(1) = c.transpose();
  } else {
    ComplexMatrix a = h.complex_entries();
    std::vector<Complex> tau(n > 0 ? n - 1 : 0);
    check_info(LAPACKE_zhetrd(LAPACK_COL_MAJOR, 'L', ln, a.data(), ln, d.data(), e.data(), tau.data()), "zhetrd");
    // Row 1 of Q is conj(Q^H e_1)^T.
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
    c(1) = 1.0;
    check_info(LAPACKE_zunmtr(LAPACK_COL_MAJOR, 'L', 'L', 'C', ln, 1, a.data(), ln, tau.data(), c.data(), ln),
               "zunmtr");
    rows.row(1) = c.real().transpose();
    rows.row(2) = -c.imag().transpose();
  }
  out.minor_eigenvalues =
      tridiagonal_eigenvalues(std::vector<double>(d.begin() + 1, d.end()), std::vector<double>(e.begin() + 1, e.end()));
  tridiagonal_ql(d, e, rows);
  out.eigenvalues = std::move(d);
  out.first.resize(n);
  out.second.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    out.first[k] = rows(0, kk);
    out.second[k] = h.is_real() ? Complex(rows(1, kk)) : Complex(rows(1, kk), rows(2, kk));
  }
  return out;
}

void use_single_threaded_blas() { openblas_set_num_threads(1); }

}  // namespace wigfluct::spectral
