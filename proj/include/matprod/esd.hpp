#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "matprod/complex_matrix.hpp"
#include "matprod/linalg.hpp"
#include "matprod/rng.hpp"

namespace matprod {

/// Right-continuous empirical distribution function with uniform weights.
class EmpiricalCDF {
 public:
  EmpiricalCDF() = default;
  explicit EmpiricalCDF(std::vector<double> samples);

  /// Fraction of samples <= x.
  double operator()(double x) const;
  /// Fraction of samples < x.
  double left_limit(double x) const;

  const std::vector<double>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }

  /// CSV with header "sample,cumulative_weight", one row per sample.
  void write_csv(std::ostream& out) const;

 private:
  std::vector<double> samples_;
};

EmpiricalCDF radial_ecdf(const EigenSpectrum& spectrum);

/// arg(lambda) / (2 pi) mapped to [0, 1).
EmpiricalCDF angular_ecdf(const EigenSpectrum& spectrum);

/// ECDF of squared singular values, the input expected by symmetrize().
EmpiricalCDF squared_ecdf(const SingularSpectrum& spectrum);

/// Fraction of eigenvalues with Re <= x and Im <= y.
double cdf2d(const EigenSpectrum& spectrum, double x, double y);

/// 1/2 (1 + sign(x) F(x^2)) for the CDF F of squared values.
double symmetrize(const EmpiricalCDF& squared_value_cdf, double x);

/// Kolmogorov distance to a nondecreasing reference CDF, taken over the
/// distinct jump points (ties merged) from both sides of each jump. The left
/// side is compared with the reference one ulp below the jump, so step
/// references are handled as well as continuous ones.
double ks_distance(const EmpiricalCDF& empirical, const std::function<double(double)>& reference);

/// sup |F_n - G| over the eigenvalue positions and a grid x grid lattice on
/// [-extent, extent]^2, for an arbitrary 2-D reference CDF.
double grid2d_distance(const EigenSpectrum& spectrum,
                       const std::function<double(double, double)>& reference, int grid = 64,
                       double extent = 1.5);

struct PotentialEstimate {
  double value = 0.0;
  int floored_count = 0;
  double smoothing_radius = 0.0;
  int replica_count = 1;  // shifts averaged
};

/// -(1/n) log|det(W - zI)|, optionally averaged over shifts z + r xi with xi
/// uniform on the unit disc.
PotentialEstimate empirical_log_potential(const ComplexMatrix& w, cplx z,
                                          double smoothing_radius = 0.0, int smoothing_draws = 1,
                                          CounterStream* stream = nullptr,
                                          double floor = kDefaultLogFloor);

inline constexpr int kMaxSpectralMomentOrder = 8;

/// (1/n) sum_j s_j^{2p}.
double spectral_moment(const SingularSpectrum& singulars, int p);

}  // namespace matprod
