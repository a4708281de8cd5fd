#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "matprod/limitlaw.hpp"

using namespace matprod;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Mass of the disc of radius R by radial quadrature of the planar density.
// The mass inside r = 1e-100 is at most 1e-25 for m <= 4.
double disc_mass(const PowerDiscLaw& law, double radius) {
  boost::math::quadrature::tanh_sinh<double> q;
  return q.integrate([&](double r) { return 2.0 * kPi * r * law.density(r, 0.0); }, 1e-100, radius);
}

double square_mass(const PowerDiscLaw& law, double a) {
  return law.cdf(a, a) - law.cdf(-a, a) - law.cdf(a, -a) + law.cdf(-a, -a);
}

}  // namespace

TEST_SUITE("limitlaw") {
  TEST_CASE("density examples") {
    const PowerDiscLaw one(1), two(2);
    CHECK(one.density(0.3, -0.4) == doctest::Approx(1.0 / kPi));
    CHECK(one.density(0.0, 0.0) == doctest::Approx(1.0 / kPi));
    CHECK(one.density(0.8, 0.8) == 0.0);
    CHECK(two.density(0.5, 0.0) == doctest::Approx(0.3183098861837907));
    CHECK(two.density(0.0, 0.0) == kInf);
    CHECK(two.density(1.0, 0.0) == doctest::Approx(1.0 / (2.0 * kPi)));
    CHECK_THROWS_AS(PowerDiscLaw(0), std::invalid_argument);
  }

  TEST_CASE("radial cdf examples") {
    const PowerDiscLaw two(2);
    CHECK(two.radial_cdf(1.0) == 1.0);
    CHECK(two.radial_cdf(0.0) == 0.0);
    CHECK(two.radial_cdf(0.25) == doctest::Approx(0.25));
    CHECK(PowerDiscLaw(4).radial_cdf(0.25) == doctest::Approx(0.5));
    CHECK(two.radial_cdf(7.0) == 1.0);
    CHECK(PowerDiscLaw(1).radial_cdf(0.5) == doctest::Approx(0.25));
  }

  TEST_CASE("density integrates to one and reproduces the radial law") {
    for (int m = 1; m <= 4; ++m) {
      const PowerDiscLaw law(m);
      CAPTURE(m);
      CHECK(std::abs(disc_mass(law, 1.0) - 1.0) <= 1e-6);
      for (const double r : {0.1, 0.35, 0.7, 0.95})
        CHECK(std::abs(disc_mass(law, r) - law.radial_cdf(r)) <= 1e-6);
    }
  }

  TEST_CASE("cdf trivial regions") {
    for (int m = 1; m <= 3; ++m) {
      const PowerDiscLaw law(m);
      CHECK(law.cdf(1.0, 1.0) == 1.0);
      CHECK(law.cdf(3.0, 1.5) == 1.0);
      CHECK(law.cdf(-1.0, 0.4) == 0.0);
      CHECK(law.cdf(0.2, -1.2) == 0.0);
      CHECK(law.cdf(0.0, kInf) == doctest::Approx(0.5).epsilon(1e-9));
      CHECK(law.cdf(kInf, 0.0) == doctest::Approx(0.5).epsilon(1e-9));
      CHECK(law.cdf(0.0, 0.0) == doctest::Approx(0.25).epsilon(1e-9));
    }
  }

  // Reference values from an independent double-integral evaluation.
  TEST_CASE("cdf matches frozen reference values") {
    struct Case {
      double x, y;
      double g[3];
    };
    const Case cases[] = {
        {0.3, -0.2, {0.261707010160, 0.215065218384, 0.175167788377}},
        {-0.5, 0.4, {0.157930683635, 0.102111234850, 0.074691075591}},
        {0.7, 0.7, {0.811911642043, 0.892753819432, 0.925162895247}},
        {0.1, 0.05, {0.299278266903, 0.370038829883, 0.450506556211}},
        {-0.2, -0.9, {0.003407317406, 0.001752418537, 0.001179420591}},
        {0.0, 2.0, {0.5, 0.5, 0.5}},
    };
    for (int m = 1; m <= 3; ++m) {
      const PowerDiscLaw law(m);
      for (const auto& c : cases) {
        CAPTURE(m);
        CAPTURE(c.x);
        CAPTURE(c.y);
        CHECK(std::abs(law.cdf(c.x, c.y) - c.g[m - 1]) <= 1e-6);
      }
    }
  }

  TEST_CASE("cdf of centered squares against closed forms") {
    for (const double a : {0.1, 0.3, 0.5, 0.7}) {
      CHECK(std::abs(square_mass(PowerDiscLaw(1), a) - 4.0 * a * a / kPi) <= 1e-6);
      CHECK(std::abs(square_mass(PowerDiscLaw(2), a) -
                     4.0 * a / kPi * std::log1p(std::sqrt(2.0))) <= 1e-6);
    }
  }

  TEST_CASE("cdf is monotone and symmetric") {
    for (int m = 1; m <= 3; ++m) {
      const PowerDiscLaw law(m);
      for (double x = -1.1; x <= 1.1; x += 0.1) {
        double previous = 0.0;
        for (double y = -1.1; y <= 1.1; y += 0.1) {
          const double v = law.cdf(x, y);
          CHECK(v >= previous - 1e-9);
          CHECK(std::abs(v - law.cdf(y, x)) <= 1e-8);
          previous = v;
        }
        CHECK(law.cdf(x, kInf) + law.cdf(-x, kInf) == doctest::Approx(1.0).epsilon(1e-8));
      }
    }
  }

  TEST_CASE("quadrant arc fraction") {
    CHECK(quadrant_arc_fraction(1.0, 2.0, 2.0) == 1.0);
    CHECK(quadrant_arc_fraction(1.0, -2.0, 0.0) == 0.0);
    CHECK(quadrant_arc_fraction(1.0, 0.0, 0.0) == doctest::Approx(0.25));
    CHECK(quadrant_arc_fraction(1.0, 0.0, 5.0) == doctest::Approx(0.5));
    CHECK(quadrant_arc_fraction(0.0, 0.0, 0.0) == 1.0);
    CHECK(quadrant_arc_fraction(0.0, -0.1, 0.0) == 0.0);
  }

  TEST_CASE("potential examples") {
    for (int m = 1; m <= 4; ++m) {
      const PowerDiscLaw law(m);
      CHECK(law.potential(cplx(0.0, 1.0)) == doctest::Approx(0.0));
      CHECK(law.potential(0.0) == doctest::Approx(0.5 * m));
      CHECK(law.potential(cplx(0.0, std::numbers::e)) == doctest::Approx(-1.0));
    }
    CHECK(PowerDiscLaw(1).potential(0.5) == doctest::Approx(0.375));
    CHECK(PowerDiscLaw(2).potential(0.25) == doctest::Approx(0.75));
  }

  TEST_CASE("potential is continuous across the unit circle") {
    for (int m = 1; m <= 4; ++m) {
      const PowerDiscLaw law(m);
      const double eps = 1e-8;
      const double inside = law.potential(1.0 - eps), outside = law.potential(1.0 + eps);
      // Both branches have radial slope -1 at the circle, so the gap is 2 eps.
      CHECK(std::abs(inside - outside - 2.0 * eps) <= 1e-12);
      CHECK(std::abs(law.potential(std::polar(1.0, 0.3))) <= 1e-12);
    }
  }

  TEST_CASE("laplacian of the potential is -2 pi times the density") {
    const double h = 1e-3;
    for (int m = 1; m <= 3; ++m) {
      const PowerDiscLaw law(m);
      auto laplacian = [&](cplx z) {
        return (law.potential(z + h) + law.potential(z - h) + law.potential(z + cplx(0, h)) +
                law.potential(z - cplx(0, h)) - 4.0 * law.potential(z)) /
               (h * h);
      };
      for (const double r : {0.3, 0.6}) {
        const cplx z = std::polar(r, 0.7);
        const double expected = -2.0 * kPi * law.density(z.real(), z.imag());
        CHECK(std::abs(laplacian(z) - expected) <= 0.02 * std::abs(expected));
      }
      CHECK(std::abs(laplacian(std::polar(2.0, 1.1))) <= 1e-4);
    }
  }

  TEST_CASE("fuss-catalan values") {
    CHECK(fuss_catalan(1, 0) == Rational{1, 1});
    CHECK(fuss_catalan(3, 0) == Rational{1, 1});
    const std::uint64_t catalan[] = {1, 2, 5, 14};
    const std::uint64_t fc2[] = {1, 3, 12, 55};
    const std::uint64_t fc3[] = {1, 4, 22, 140};
    for (int p = 1; p <= 4; ++p) {
      CHECK(fuss_catalan(1, p) == Rational{catalan[p - 1], 1});
      CHECK(fuss_catalan(2, p) == Rational{fc2[p - 1], 1});
      CHECK(fuss_catalan(3, p) == Rational{fc3[p - 1], 1});
    }
  }

  TEST_CASE("fuss-catalan at m = 1 follows the Catalan recurrence") {
    std::vector<std::uint64_t> c{1};
    for (int p = 1; p <= kFussCatalanMaxP; ++p) {
      std::uint64_t next = 0;
      for (int i = 0; i < p; ++i)
        next += c[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(p - 1 - i)];
      c.push_back(next);
      CHECK(fuss_catalan(1, p) == Rational{next, 1});
    }
  }

  TEST_CASE("fuss-catalan guards") {
    CHECK_THROWS_AS(fuss_catalan(1, kFussCatalanMaxP + 1), std::overflow_error);
    CHECK_THROWS_AS(fuss_catalan(40, 12), std::overflow_error);
    CHECK_THROWS_AS(fuss_catalan(0, 1), std::invalid_argument);
    CHECK_THROWS_AS(fuss_catalan(1, -1), std::invalid_argument);
    CHECK(fuss_catalan(3, 12).value() > 0.0);
  }

  TEST_CASE("alternative normalization disagrees with Catalan") {
    CHECK(fuss_catalan(1, 2, FussCatalanVariant::alternate) == Rational{3, 2});
    CHECK(fuss_catalan(1, 1, FussCatalanVariant::alternate) == Rational{1, 1});
    CHECK(fuss_catalan(2, 2, FussCatalanVariant::alternate) == Rational{5, 2});
    CHECK_THROWS_AS(fuss_catalan(1, 0, FussCatalanVariant::alternate), std::invalid_argument);
  }

  TEST_CASE("support edge") {
    CHECK(support_edge(1) == doctest::Approx(2.0));
    CHECK(support_edge(2) == doctest::Approx(2.598076211));
    CHECK(support_edge(3) == doctest::Approx(3.079201436));
    CHECK_THROWS_AS(support_edge(0), std::invalid_argument);
  }
}
