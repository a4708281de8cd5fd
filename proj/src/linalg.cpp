#include "matprod/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <string>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace matprod {

namespace {

void require_square_finite(const ComplexMatrix& m, const char* what) {
  if (!m.square()) throw std::invalid_argument(std::string(what) + ": matrix is not square");
  if (!m.all_finite()) throw DecompositionError(std::string(what) + ": non-finite entries");
}

// Eigen/LAPACK work on column-major storage; a row-major buffer read as
// column-major is the transpose, which has the same eigenvalues and singular
// values, so no reordering is needed.
std::vector<cplx> lapack_copy(const ComplexMatrix& m) {
  return {m.entries().begin(), m.entries().end()};
}

}  // namespace

EigenSpectrum eigenvalues(const ComplexMatrix& m) {
  require_square_finite(m, "eigenvalues");
  const auto n = static_cast<lapack_int>(m.rows());
  EigenSpectrum out;
  if (n == 0) return out;
  auto a = lapack_copy(m);
  out.values.resize(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n,
                                        out.values.data(), nullptr, 1, nullptr, 1);
  if (info != 0) {
    throw DecompositionError("eigenvalues: zgeev failed (info=" + std::to_string(info) +
                             ", n=" + std::to_string(n) + ")");
  }
  return out;
}

SingularSpectrum singular_values(const ComplexMatrix& m, cplx z) {
  require_square_finite(m, "singular_values");
  const auto n = static_cast<lapack_int>(m.rows());
  SingularSpectrum out;
  out.shift = z;
  if (n == 0) return out;
  auto a = lapack_copy(m.shifted(z));
  out.values.resize(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', n, n, a.data(), n,
                                         out.values.data(), nullptr, 1, nullptr, 1);
  if (info != 0) {
    throw DecompositionError("singular_values: zgesdd failed (info=" + std::to_string(info) +
                             ", n=" + std::to_string(n) + ")");
  }
  std::sort(out.values.begin(), out.values.end(), std::greater<>());
  return out;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h) {
  require_square_finite(h, "hermitian_eigenvalues");
  const std::size_t n = h.rows();
  ComplexMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = h(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      a(i, j) = h(i, j);
      a(j, i) = std::conj(h(i, j));
    }
  }

  const double total = a.frobenius_norm_squared();
  const double eps = std::numeric_limits<double>::epsilon();
  constexpr int kMaxSweeps = 60;
  bool converged = total == 0.0;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * std::norm(a(p, q));
    if (off <= eps * eps * total) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double mag = std::abs(a(p, q));
        if (mag == 0.0) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        if (mag < eps * eps * std::sqrt(total)) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        // Phase-align a_pq to a positive real, then a real Jacobi rotation.
        const cplx phase = a(p, q) / mag;
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(1.0, theta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = t * c;
        const cplx gpp = c, gpq = s;
        const cplx gqp = -s * std::conj(phase), gqq = c * std::conj(phase);
        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * gpp + akq * gqp;
          a(k, q) = akp * gpq + akq * gqq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
          a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }
  if (!converged) {
    throw DecompositionError("hermitian_eigenvalues: Jacobi did not converge in " +
                             std::to_string(kMaxSweeps) + " sweeps (n=" + std::to_string(n) + ")");
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a(i, i).real();
  std::sort(out.begin(), out.end());
  return out;
}

ComplexMatrix linearization(const ComplexMatrix& w, cplx z) {
  if (!w.square()) throw std::invalid_argument("linearization: matrix is not square");
  const std::size_t n = w.rows();
  const ComplexMatrix shifted = w.shifted(z);
  ComplexMatrix v(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      v(i, n + j) = shifted(i, j);
      v(n + j, i) = std::conj(shifted(i, j));
    }
  }
  return v;
}

std::vector<double> linearized_spectrum(const ComplexMatrix& w, cplx z) {
  std::vector<double> e = hermitian_eigenvalues(linearization(w, z));
  const std::size_t total = e.size();
  for (std::size_t k = 0; k < total / 2; ++k) {
    const double paired = 0.5 * (e[total - 1 - k] - e[k]);
    e[k] = -paired;
    e[total - 1 - k] = paired;
  }
  return e;
}

LogAbsDet log_abs_det(const SingularSpectrum& s, double floor) {
  if (!(floor > 0.0)) throw std::invalid_argument("log_abs_det: floor must be positive");
  LogAbsDet out;
  for (const double v : s.values) {
    if (v < floor) {
      ++out.floored_count;
      out.value += std::log(floor);
    } else {
      out.value += std::log(v);
    }
  }
  return out;
}

LogAbsDet log_abs_det(const ComplexMatrix& m, cplx z, double floor) {
  return log_abs_det(singular_values(m, z), floor);
}

}  // namespace matprod
