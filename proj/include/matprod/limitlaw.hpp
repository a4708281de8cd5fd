#pragma once

#include <cstdint>
#include <string>

#include "matprod/complex_matrix.hpp"

namespace matprod {

/// Law of zeta^m with zeta uniform on the unit disc.
class PowerDiscLaw {
 public:
  explicit PowerDiscLaw(int m);

  int m() const { return m_; }

  /// Planar density; +infinity exactly at the origin when m > 1.
  double density(double x, double y) const;

  /// P(|zeta^m| <= r) = min(r, 1)^{2/m}.
  double radial_cdf(double r) const;

  /// P(Re <= x, Im <= y) by adaptive polar quadrature (abs. error <= 1e-6).
  double cdf(double x, double y) const;

  /// Logarithmic potential -E log|z - zeta^m|.
  double potential(cplx z) const;

 private:
  int m_;
};

/// Fraction of the circle {theta : r cos(theta) <= x, r sin(theta) <= y}.
double quadrant_arc_fraction(double r, double x, double y);

struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

enum class FussCatalanVariant {
  /// binom((m+1)p, p) / (mp + 1); matches Catalan numbers at m = 1.
  standard,
  /// binom(mp + p, p) / (mp + p), the alternative normalization sometimes
  /// printed for these moments. Requires p >= 1.
  alternate,
};

inline constexpr int kFussCatalanMaxP = 12;

/// Exact Fuss-Catalan number as a reduced fraction. Throws std::overflow_error
/// if p exceeds kFussCatalanMaxP or 64-bit arithmetic would overflow.
Rational fuss_catalan(int m, int p, FussCatalanVariant variant = FussCatalanVariant::standard);

/// Right edge sqrt((m+1)^{m+1} / m^m) of the singular-value law of the product at z = 0.
double support_edge(int m);

}  // namespace matprod
