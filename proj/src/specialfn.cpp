#include "anibem/specialfn.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "anibem/error.hpp"

namespace anibem {

namespace {

constexpr std::array<double, kMaxSeriesTerms + 2> make_harmonics() {
  std::array<double, kMaxSeriesTerms + 2> h{};
  h[0] = 0.0;
  for (std::size_t n = 1; n < h.size(); ++n) h[n] = h[n - 1] + 1.0 / static_cast<double>(n);
  return h;
}

constexpr auto kHarmonic = make_harmonics();

bool small_enough(double term, double abs_sum, double tol) {
  return std::abs(term) <= tol * abs_sum;
}

}  // namespace

void TermPolicy::validate() const {
  if (fixed_terms < 1) throw Error(Errc::InvalidSpec, "fixed_terms must be >= 1");
  if (!(adaptive_rel_tol > 0.0 && adaptive_rel_tol <= 1e-6))
    throw Error(Errc::InvalidSpec, "adaptive_rel_tol must lie in (0, 1e-6]");
  if (max_terms < fixed_terms) throw Error(Errc::InvalidSpec, "max_terms must be >= fixed_terms");
  if (max_terms > kMaxSeriesTerms)
    throw Error(Errc::InvalidSpec, "max_terms exceeds " + std::to_string(kMaxSeriesTerms));
}

double harmonic_number(int n) {
  if (n < 0 || n > kMaxSeriesTerms + 1) throw Error(Errc::DomainError, "harmonic index out of range");
  return kHarmonic[static_cast<std::size_t>(n)];
}

BesselValues bessel_series(double x, const TermPolicy& policy) {
  if (!std::isfinite(x)) throw Error(Errc::DomainError, "non-finite Bessel argument");
  const bool adaptive = policy.mode == TermMode::Adaptive;
  if (adaptive && std::abs(x) > kSeriesDomainLimit)
    throw Error(Errc::NonConvergent, "|x| = " + std::to_string(std::abs(x)) + " beyond series domain");

  const double half = 0.5 * x;
  const double mq = -half * half;
  const int limit = adaptive ? policy.max_terms : policy.fixed_terms;

  // t0 = (-q)^n/(n!)^2, t1 = (x/2)(-q)^n/(n!(n+1)!)
  double t0 = 1.0;
  double t1 = half;
  double sj0 = 0.0, sj1 = 0.0, sy0 = 0.0, sy1 = 0.0;
  double aj0 = 0.0, aj1 = 0.0, ay0 = 0.0, ay1 = 0.0;
  int used = 0;
  bool converged = !adaptive;
  for (int n = 0; n < limit; ++n) {
    const double hn = kHarmonic[static_cast<std::size_t>(n)];
    const double c0 = t0 * hn;
    const double c1 = t1 * (hn + 0.5 / (n + 1));
    sj0 += t0;
    sj1 += t1;
    sy0 += c0;
    sy1 += c1;
    used = n + 1;
    if (adaptive) {
      aj0 += std::abs(t0);
      aj1 += std::abs(t1);
      ay0 += std::abs(c0);
      ay1 += std::abs(c1);
      const double tol = policy.adaptive_rel_tol;
      if (n > std::abs(half) && small_enough(t0, aj0, tol) && small_enough(t1, aj1, tol) &&
          small_enough(c0, ay0, tol) && small_enough(c1, ay1, tol)) {
        converged = true;
        break;
      }
    }
    t0 *= mq / static_cast<double>((n + 1) * (n + 1));
    t1 *= mq / static_cast<double>((n + 1) * (n + 2));
  }
  if (!converged)
    throw Error(Errc::NonConvergent,
                "Bessel series at x = " + std::to_string(x) + " not converged in " +
                    std::to_string(limit) + " terms");

  BesselValues out;
  out.j0 = sj0;
  out.j1 = sj1;
  out.terms = used;
  constexpr double two_pi = 2.0 / std::numbers::pi;
  out.y0_regular = two_pi * (sj0 * kEulerGamma - sy0);
  if (x > 0.0) {
    const double lg = std::log(half) + kEulerGamma;
    out.y0 = two_pi * (sj0 * lg - sy0);
    out.y1 = two_pi * (sj1 * lg - sy1) - two_pi / x;
  } else {
    out.y0 = std::numeric_limits<double>::quiet_NaN();
    out.y1 = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

double bessel_j0(double x, const TermPolicy& policy) { return bessel_series(x, policy).j0; }

double bessel_j1(double x, const TermPolicy& policy) { return bessel_series(x, policy).j1; }

double bessel_y0(double x, const TermPolicy& policy) {
  if (!(x > 0.0)) throw Error(Errc::DomainError, "Y0 requires x > 0");
  return bessel_series(x, policy).y0;
}

double bessel_y1(double x, const TermPolicy& policy) {
  if (!(x > 0.0)) throw Error(Errc::DomainError, "Y1 requires x > 0");
  return bessel_series(x, policy).y1;
}

}  // namespace anibem
