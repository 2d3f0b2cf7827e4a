#pragma once

#include <Eigen/Dense>
#include <vector>

#include "anibem/assembly.hpp"

namespace anibem {

struct IndicatorValues {
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double indicator = 0.0;  // sigma_min / sigma_max
  double log_abs_det = 0.0;
  int det_sign = 0;
};

/// Singular values by divide-and-conquer SVD, determinant by partial-pivot LU.
IndicatorValues indicator_values(const Eigen::MatrixXd& a);

struct SweepRow {
  double lambda;
  double sigma_min;
  double sigma_max;
  double indicator;
  double log_abs_det;
  int det_sign;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  bool near_singular_warning = false;

  std::size_t size() const { return rows.size(); }
  std::vector<double> lambdas() const;
  std::vector<double> indicators() const;
};

/// Uniform grid of `steps` points on [lambda_min, lambda_max]; grid points run concurrently.
SweepTable sweep(const Assembler& assembler, double lambda_min, double lambda_max, int steps, int threads = 1);

struct Bracket {
  double lo;
  double hi;
  int index;         // grid index of the minimum, or of the left end of a sign change
  bool sign_change;  // from a determinant sign change rather than an indicator minimum
};

/// Strict interior local minima of the indicator, plus determinant sign changes not already covered.
std::vector<Bracket> candidate_brackets(const SweepTable& table);

struct RefineOptions {
  double tol = 1e-8;            // stop when bracket width < tol * lambda
  double indicator_floor = 1e-4;
  int threads = 1;
};

struct EigenResult {
  double lambda_star = 0.0;
  double indicator_at_min = 0.0;
  Eigen::VectorXd null_density;
  double residual = 0.0;  // ||A d|| / (||d|| ||A||_2)
  double refinement_width = 0.0;
  AssemblyMode mode = AssemblyMode::Consistent;
};

/// Golden-section refinement around table index `which`. Throws NotBracketed or NoRankLoss.
EigenResult refine(const SweepTable& table, int which, const Assembler& assembler, const RefineOptions& opt = {});

/// Golden-section refinement on [lo, hi]. Throws NoRankLoss.
EigenResult refine_bracket(double lo, double hi, const Assembler& assembler, const RefineOptions& opt = {});

/// Right singular vector of the smallest singular value; unit norm, largest-magnitude entry positive.
Eigen::VectorXd null_density(const SystemMatrix& matrix);

struct Rejected {
  double lambda;
  double indicator;
};

struct Detection {
  std::vector<EigenResult> eigenvalues;  // ascending, duplicates merged
  std::vector<Rejected> rejected;        // minima above the indicator floor
};

/// Refines every candidate bracket of the table.
Detection detect(const SweepTable& table, const Assembler& assembler, const RefineOptions& opt = {});

}  // namespace anibem
