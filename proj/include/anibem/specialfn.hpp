#pragma once

namespace anibem {

enum class TermMode { PaperFixed, Adaptive };

struct TermPolicy {
  TermMode mode = TermMode::Adaptive;
  int fixed_terms = 5;
  double adaptive_rel_tol = 1e-15;
  int max_terms = 60;

  /// Throws Error(InvalidSpec) when a field is out of range.
  void validate() const;

  static TermPolicy paper() { return {TermMode::PaperFixed, 5, 1e-15, 60}; }
  static TermPolicy adaptive() { return {}; }

  bool operator==(const TermPolicy&) const = default;
};

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

/// Largest |x| accepted by the adaptive series.
inline constexpr double kSeriesDomainLimit = 30.0;

/// Upper bound accepted for TermPolicy::max_terms.
inline constexpr int kMaxSeriesTerms = 200;

/// All four power series share the factor (x/2)^{2n}/(n!)^2, so they are summed together.
struct BesselValues {
  double j0 = 0.0;
  double j1 = 0.0;
  double y0 = 0.0;  // NaN when x <= 0
  double y1 = 0.0;  // NaN when x <= 0
  double y0_regular = 0.0;  // y0 - (2/pi) j0 ln(x/2); finite at x = 0
  int terms = 0;
};

/// Sums J0, J1 and, for x > 0, Y0 and Y1. Throws NonConvergent / DomainError.
BesselValues bessel_series(double x, const TermPolicy& policy);

double bessel_j0(double x, const TermPolicy& policy = {});
double bessel_j1(double x, const TermPolicy& policy = {});
double bessel_y0(double x, const TermPolicy& policy = {});
double bessel_y1(double x, const TermPolicy& policy = {});

/// H_n = 1 + 1/2 + ... + 1/n, H_0 = 0; n <= kMaxSeriesTerms.
double harmonic_number(int n);

}  // namespace anibem
