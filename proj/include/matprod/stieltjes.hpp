#pragma once

#include <array>
#include <iosfwd>
#include <json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "matprod/complex_matrix.hpp"

namespace matprod {

/// Solution of the limiting system
///   1 + w y + (-1)^{m+1} w^{m-1} y^{m+1} = 0,
///   y (w - alpha)^2 + (w - alpha) - y |z|^2 = 0,
///   w = alpha + z t / y,
/// where y is the Stieltjes transform at alpha of the symmetrized limiting
/// singular-value law of W - zI.
struct StieltjesState {
  int m = 1;
  cplx alpha = 0.0;
  cplx z = 0.0;
  cplx y = 0.0;
  cplx t = 0.0;
  cplx w = 0.0;
  std::array<double, 2> residuals{0.0, 0.0};
  bool converged = false;
  int iterations = 0;          // Newton iterations over the whole continuation
  int continuation_steps = 0;  // accepted v-steps
  std::string diagnostic;      // failure description when !converged

  /// |w - alpha| and |z|^2, reported for comparison with the known bounds.
  double shift_magnitude() const { return std::abs(w - alpha); }
};

void to_json(nlohmann::json& j, const StieltjesState& s);

/// Raised by the derived quantities (density, potential, ...) when the
/// underlying solve did not converge. Carries the failed state.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(StieltjesState state);
  const StieltjesState& state() const { return state_; }

 private:
  StieltjesState state_;
};

struct SolverOptions {
  double start_offset = 8.0;  // continuation starts at Im alpha = start_offset + |z|
  double step_ratio = 0.7;    // geometric v-sweep
  int max_step_halvings = 8;  // per continuation step
  int newton_max_iterations = 60;
  double residual_tolerance = 1e-10;
};

/// Solves the system at one (alpha, z) by a warm-started sweep in Im alpha
/// from start_offset + |z| down to Im alpha. Never throws on non-convergence;
/// the returned state has converged == false and a diagnostic instead.
StieltjesState solve_system(int m, cplx z, cplx alpha, const SolverOptions& options = {});

/// Same sweep, reporting the state at every requested Im alpha (descending
/// order is not required; results follow the input order).
std::vector<StieltjesState> solve_along(int m, cplx z, double x, const std::vector<double>& heights,
                                        const SolverOptions& options = {});

inline constexpr double kDefaultInversionHeight = 1e-5;

/// Limiting density p(x, z) = Im y(x + i0) / pi, from the values at v_min and
/// 2 v_min combined by Richardson extrapolation. Throws SolverError.
double density_p(int m, cplx z, double x, double v_min = kDefaultInversionHeight);

/// Density sampled on a symmetric grid graded towards x = 0, with the
/// midpoint-rule weights of that grid so that integrals are sums.
struct DensityCurve {
  int m = 1;
  cplx z = 0.0;
  double v_min = kDefaultInversionHeight;
  double extent = 0.0;  // grid covers [-extent, extent]
  std::vector<double> x;
  std::vector<double> p;
  std::vector<double> weight;

  double integral() const;
  /// Integral of x^{2k} p(x).
  double even_moment(int k) const;
  /// -Integral of log|x| p(x).
  double log_potential() const;

  /// CSV "x,p", ascending x.
  void write_csv(std::ostream& out) const;
};

inline constexpr int kDefaultDensityGrid = 2048;

/// grid_points must be even and >= 4. Grading exponent q places nodes at
/// extent * t^q for t on a uniform midpoint lattice of (0, 1).
DensityCurve density_curve(int m, cplx z, int grid_points = kDefaultDensityGrid,
                           double v_min = kDefaultInversionHeight, double grading = 2.0);

/// Delta(x) = -i y(z, i x) for x > 0; real and in [0, 1/(2|z|)].
/// Throws SolverError, or std::runtime_error if the imaginary residue exceeds 1e-8.
double delta_function(int m, cplx z, double x);

inline constexpr double kPdeHeight = 1e-4;

/// |d y / d u - 2u y / sqrt(1 + 4|z|^2 y^2) d y / d x| at alpha = x + i 1e-4,
/// z = u + iv, with both derivatives by central differences of step h. The
/// square root is taken on the solver's branch, 2 y (w - alpha) + 1.
double pde_residual(int m, cplx z, double x, double h);

/// -Integral log|x| p(x, z) dx on density_curve(m, z, grid_size).
double potential_from_solver(int m, cplx z, int quadrature_grid_size = kDefaultDensityGrid);

}  // namespace matprod
