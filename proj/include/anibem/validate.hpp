#pragma once

#include <string>
#include <vector>

#include "anibem/config.hpp"

namespace anibem {

struct CheckResult {
  std::string suite;
  std::string name;
  double measured;
  double tolerance;
  bool passed;
  std::string note;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  std::vector<std::string> warnings;
  std::vector<double> detected;  // eigenvalues found by the spectral suite

  bool passed() const;
  std::string text() const;
  std::string json() const;
};

/// Analytic Neumann eigenvalues pi sqrt(ax (m/a)^2 + ay (n/b)^2) inside [lo, hi], ascending, duplicates kept once.
std::vector<double> rectangle_eigenvalues(double a, double b, AnisoPair pair, double lo, double hi);

/// Special functions against the standard library, jump relations, and the spectral suite for cfg.
ValidationReport run_validation(const RunConfig& cfg, int threads);

}  // namespace anibem
