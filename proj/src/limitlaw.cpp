#include "matprod/limitlaw.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace matprod {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double overlap(double lo1, double hi1, double lo2, double hi2) {
  return std::max(0.0, std::min(hi1, hi2) - std::max(lo1, lo2));
}

boost::math::quadrature::tanh_sinh<double>& integrator() {
  thread_local boost::math::quadrature::tanh_sinh<double> instance;
  return instance;
}

}  // namespace

PowerDiscLaw::PowerDiscLaw(int m) : m_(m) {
  if (m < 1) throw std::invalid_argument("PowerDiscLaw: m must be >= 1");
}

double PowerDiscLaw::density(double x, double y) const {
  const double r2 = x * x + y * y;
  if (r2 > 1.0) return 0.0;
  if (r2 == 0.0 && m_ > 1) return std::numeric_limits<double>::infinity();
  const double exponent = static_cast<double>(m_ - 1) / m_;
  return 1.0 / (std::numbers::pi * m_ * std::pow(r2, exponent));
}

double PowerDiscLaw::radial_cdf(double r) const {
  if (r <= 0.0) return 0.0;
  if (r >= 1.0) return 1.0;
  return std::pow(r, 2.0 / m_);
}

double quadrant_arc_fraction(double r, double x, double y) {
  if (r <= 0.0) return (x >= 0.0 && y >= 0.0) ? 1.0 : 0.0;
  const double a = std::clamp(x / r, -1.0, 1.0);
  const double b = std::clamp(y / r, -1.0, 1.0);
  // {cos <= a} = [alpha, 2pi - alpha]; {sin <= b} = [pi - beta, 2pi + beta] mod 2pi.
  const double alpha = std::acos(a);
  const double beta = std::asin(b);
  const double lo = alpha, hi = kTwoPi - alpha;
  const double arc = overlap(lo, hi, std::numbers::pi - beta, kTwoPi + beta) +
                     overlap(lo, hi, -std::numbers::pi - beta, beta);
  return std::clamp(arc / kTwoPi, 0.0, 1.0);
}

double PowerDiscLaw::cdf(double x, double y) const {
  if (x >= 1.0 && y >= 1.0) return 1.0;
  if (x <= -1.0 || y <= -1.0) return 0.0;
  // With u = r^{2/m} the radial law is uniform on [0, 1].
  const double half_m = 0.5 * m_;
  auto integrand = [&](double u) { return quadrant_arc_fraction(std::pow(u, half_m), x, y); };

  std::vector<double> cuts{0.0, 1.0};
  for (const double r : {std::abs(x), std::abs(y), std::hypot(x, y)}) {
    if (r > 0.0 && r < 1.0) cuts.push_back(std::pow(r, 2.0 / m_));
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k], b = cuts[k + 1];
    if (b - a <= 0.0) continue;
    // Between cuts the arc fraction is smooth; constant pieces need no work.
    const double fa = integrand(a), fb = integrand(b), fm = integrand(0.5 * (a + b));
    if (fa == fb && fa == fm) {
      total += fa * (b - a);
      continue;
    }
    total += integrator().integrate(integrand, a, b, 1e-10);
  }
  return std::clamp(total, 0.0, 1.0);
}

double PowerDiscLaw::potential(cplx z) const {
  const double r = std::abs(z);
  if (r >= 1.0) return -std::log(r);
  return 0.5 * m_ * (1.0 - std::pow(r, 2.0 / m_));
}

Rational fuss_catalan(int m, int p, FussCatalanVariant variant) {
  if (m < 1) throw std::invalid_argument("fuss_catalan: m must be >= 1");
  if (p < 0) throw std::invalid_argument("fuss_catalan: p must be >= 0");
  if (p > kFussCatalanMaxP) {
    throw std::overflow_error("fuss_catalan: p = " + std::to_string(p) + " exceeds guard " +
                              std::to_string(kFussCatalanMaxP));
  }
  if (variant == FussCatalanVariant::alternate && p == 0) {
    throw std::invalid_argument("fuss_catalan: alternate variant is undefined at p = 0");
  }
  const auto mm = static_cast<std::uint64_t>(m);
  const auto pp = static_cast<std::uint64_t>(p);
  const std::uint64_t top = (mm + 1) * pp;

  // binom(top, p) by C <- C * (top - i) / (i + 1), cancelling before multiplying.
  std::uint64_t binom = 1;
  for (std::uint64_t i = 0; i < pp; ++i) {
    const std::uint64_t g = std::gcd(binom, i + 1);
    const std::uint64_t rest = (i + 1) / g;
    const std::uint64_t factor = (top - i) / rest;
    if (__builtin_mul_overflow(binom / g, factor, &binom)) {
      throw std::overflow_error("fuss_catalan: binomial overflows 64 bits");
    }
  }
  const std::uint64_t den = variant == FussCatalanVariant::standard ? mm * pp + 1 : top;
  const std::uint64_t g = std::gcd(binom, den);
  return {binom / g, den / g};
}

double support_edge(int m) {
  if (m < 1) throw std::invalid_argument("support_edge: m must be >= 1");
  const double md = m;
  return std::sqrt((md + 1.0) * std::pow(1.0 + 1.0 / md, md));
}

}  // namespace matprod
