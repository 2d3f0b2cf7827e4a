#pragma once

// Test-side reference values: Boost.Math at 50 significant digits plus hand-rolled
// truncated sums in the same precision.

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using mp = boost::multiprecision::cpp_bin_float_50;

inline double j0(double x) { return static_cast<double>(boost::math::cyl_bessel_j(0, mp(x))); }
inline double j1(double x) { return static_cast<double>(boost::math::cyl_bessel_j(1, mp(x))); }
inline double y0(double x) { return static_cast<double>(boost::math::cyl_neumann(0, mp(x))); }
inline double y1(double x) { return static_cast<double>(boost::math::cyl_neumann(1, mp(x))); }

// n = 0 .. terms-1 of sum (-1)^n (x/2)^{2n} / (n!)^2
inline mp j0_partial(const mp& x, int terms) {
  mp t = 1, s = 0;
  const mp q = x * x / 4;
  for (int n = 0; n < terms; ++n) {
    s += t;
    t *= -q / ((n + 1) * (n + 1));
  }
  return s;
}

// Y0 with both series truncated after `terms` terms
inline mp y0_partial(const mp& x, int terms) {
  using boost::math::constants::pi;
  using boost::math::constants::euler;
  mp t = 1, s = 0, h = 0;
  const mp q = x * x / 4;
  for (int n = 0; n < terms; ++n) {
    s += t * h;
    t *= -q / ((n + 1) * (n + 1));
    h += mp(1) / (n + 1);
  }
  return 2 / pi<mp>() * (j0_partial(x, terms) * (log(x / 2) + euler<mp>()) - s);
}

}  // namespace oracle
