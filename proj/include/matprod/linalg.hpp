#pragma once

#include <stdexcept>
#include <vector>

#include "matprod/complex_matrix.hpp"

namespace matprod {

/// A dense decomposition failed to converge or was handed non-finite input.
class DecompositionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EigenSpectrum {
  std::vector<cplx> values;  // unordered, with multiplicity
};

struct SingularSpectrum {
  std::vector<double> values;  // descending
  cplx shift = 0.0;
};

// Eigenvalues via Hessenberg reduction + shifted QR (LAPACK zgeev).
EigenSpectrum eigenvalues(const ComplexMatrix& m);

// Singular values of M - zI via bidiagonalization (LAPACK zgesdd).
SingularSpectrum singular_values(const ComplexMatrix& m, cplx z = 0.0);

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations,
/// ascending. Only the upper triangle is read. Intended for moderate sizes
/// (a few hundred rows); cost is O(n^3) per sweep.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h);

/// The 2n x 2n Hermitian block matrix [[0, W - zI], [(W - zI)^*, 0]].
ComplexMatrix linearization(const ComplexMatrix& w, cplx z);

/// Eigenvalues of linearization(w, z), ascending, with the +/- pairs
/// averaged so that out[k] == -out[2n-1-k] exactly.
std::vector<double> linearized_spectrum(const ComplexMatrix& w, cplx z);

struct LogAbsDet {
  double value = 0.0;
  int floored_count = 0;
};

inline constexpr double kDefaultLogFloor = 1e-300;

/// sum_j log max(s_j(M - zI), floor).
LogAbsDet log_abs_det(const ComplexMatrix& m, cplx z = 0.0, double floor = kDefaultLogFloor);
LogAbsDet log_abs_det(const SingularSpectrum& s, double floor = kDefaultLogFloor);

}  // namespace matprod
