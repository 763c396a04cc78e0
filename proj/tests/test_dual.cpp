#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "pk/dual.hpp"

using namespace pk;

TEST_CASE("first derivative of sin(x)*x at x=1") {
  const Dual1 x = dual1_active(1.0, 0, 1);
  const Dual1 y = sin(x) * x;
  const double expect = std::cos(1.0) * 1.0 + std::sin(1.0);
  CHECK(y.v == doctest::Approx(std::sin(1.0)).epsilon(1e-15));
  CHECK(std::fabs(y.d[0] - expect) < 1e-12);
}

TEST_CASE("multi-direction gradient") {
  // f(a, b) = a*b + cos(a)
  const Dual1 a = dual1_active(0.3, 0, 2);
  const Dual1 b = dual1_active(-1.2, 1, 2);
  const Dual1 f = a * b + cos(a);
  CHECK(std::fabs(f.d[0] - (-1.2 - std::sin(0.3))) < 1e-12);
  CHECK(std::fabs(f.d[1] - 0.3) < 1e-12);
}

TEST_CASE("division and pow rules") {
  const Dual1 x = dual1_active(2.0, 0, 1);
  const Dual1 q = 1.0 / x;
  CHECK(std::fabs(q.d[0] - (-0.25)) < 1e-14);
  const Dual1 p = pow(x, 3.0);
  CHECK(std::fabs(p.v - 8.0) < 1e-14);
  CHECK(std::fabs(p.d[0] - 12.0) < 1e-12);
  const Dual1 s = sqrt(x);
  CHECK(std::fabs(s.d[0] - 0.5 / std::sqrt(2.0)) < 1e-14);
}

TEST_CASE("second derivative of x^3 at x=2 is 12") {
  // outer and inner both seeded on the same variable
  Dual2 x = dual2_outer(2.0, 0, 1);
  x.v = dual1_active(2.0, 0, 1);
  const Dual2 y = x * x * x;
  CHECK(std::fabs(value(y) - 8.0) < 1e-12);
  CHECK(std::fabs(y.v.d[0] - 12.0) < 1e-12);       // first derivative
  CHECK(std::fabs(y.d[0].v - 12.0) < 1e-12);       // first derivative, outer route
  CHECK(std::fabs(y.d[0].d[0] - 12.0) < 1e-12);    // second derivative
}

TEST_CASE("mixed partials are symmetric") {
  // f(p, x) = sin(p*x) + p*x*x; compare d2f/dp dx against d2f/dx dp by
  // swapping which variable carries the inner and outer seed.
  const double pv = 0.7, xv = -0.4;
  auto eval = [&](bool p_outer) {
    Dual2 p, x;
    if (p_outer) {
      p = dual2_outer(pv, 0, 1);
      x = dual2_inner(xv, 0, 1, 1);
    } else {
      p = dual2_inner(pv, 0, 1, 1);
      x = dual2_outer(xv, 0, 1);
    }
    const Dual2 f = sin(p * x) + p * x * x;
    return f.d[0].d[0];
  };
  const double m1 = eval(true);
  const double m2 = eval(false);
  CHECK(std::fabs(m1 - m2) < 1e-12);
  // analytic: d2f/dpdx = cos(px) - px sin(px) + 2x
  const double analytic =
      std::cos(pv * xv) - pv * xv * std::sin(pv * xv) + 2.0 * xv;
  CHECK(std::fabs(m1 - analytic) < 1e-12);
}

TEST_CASE("constants compose with active values") {
  const Dual1 x = dual1_active(1.5, 0, 3);
  const Dual1 y = 2.0 * x + 1.0 - x / 4.0;
  CHECK(std::fabs(y.d[0] - 1.75) < 1e-14);
  CHECK(y.d[1] == 0.0);
  CHECK(y.d[2] == 0.0);
}
