#include "anibem/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "anibem/error.hpp"

namespace anibem {

namespace {

double indicator_at(const Assembler& as, double lambda, int threads) {
  const SystemMatrix m = as.assemble(lambda, threads);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m.entries);
  const auto& sv = svd.singularValues();
  return sv(sv.size() - 1) / sv(0);
}

}  // namespace

IndicatorValues indicator_values(const Eigen::MatrixXd& a) {
  IndicatorValues out;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  out.sigma_max = sv(0);
  out.sigma_min = sv(sv.size() - 1);
  out.indicator = out.sigma_max > 0.0 ? out.sigma_min / out.sigma_max : 0.0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const Eigen::MatrixXd& u = lu.matrixLU();
  double logdet = 0.0;
  int sign = static_cast<int>(std::lround(lu.permutationP().determinant()));
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const double d = u(i, i);
    if (d == 0.0) {
      sign = 0;
      logdet = -HUGE_VAL;
      break;
    }
    if (d < 0.0) sign = -sign;
    logdet += std::log(std::abs(d));
  }
  out.log_abs_det = logdet;
  out.det_sign = sign;
  return out;
}

std::vector<double> SweepTable::lambdas() const {
  std::vector<double> v;
  for (const auto& r : rows) v.push_back(r.lambda);
  return v;
}

std::vector<double> SweepTable::indicators() const {
  std::vector<double> v;
  for (const auto& r : rows) v.push_back(r.indicator);
  return v;
}

SweepTable sweep(const Assembler& assembler, double lambda_min, double lambda_max, int steps, int threads) {
  if (!(lambda_min > 0.0 && lambda_max > lambda_min)) throw Error(Errc::InvalidSpec, "need 0 < lambda_min < lambda_max");
  if (steps < 2) throw Error(Errc::InvalidSpec, "steps must be >= 2");
  SweepTable table;
  table.rows.resize(static_cast<std::size_t>(steps));
  bool warn = false;
  parallel_for(steps, threads, [&](int begin, int end) {
    for (int k = begin; k < end; ++k) {
      const double lam = lambda_min + (lambda_max - lambda_min) * k / (steps - 1);
      SystemMatrix m;
      try {
        m = assembler.assemble(lam, 1);
      } catch (const Error& e) {
        throw Error(e.code(), std::string(e.what()) + " (sweep lambda " + std::to_string(lam) + ")");
      }
      if (m.near_singular_warning) warn = true;
      const IndicatorValues iv = indicator_values(m.entries);
      table.rows[static_cast<std::size_t>(k)] = {lam, iv.sigma_min, iv.sigma_max, iv.indicator, iv.log_abs_det,
                                                 iv.det_sign};
    }
  });
  table.near_singular_warning = warn;
  return table;
}

std::vector<Bracket> candidate_brackets(const SweepTable& t) {
  std::vector<Bracket> out;
  const auto& r = t.rows;
  const std::size_t n = r.size();
  std::vector<bool> covered(n > 0 ? n - 1 : 0, false);  // interval k = [k, k+1]
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (r[i].indicator < r[i - 1].indicator && r[i].indicator < r[i + 1].indicator) {
      out.push_back({r[i - 1].lambda, r[i + 1].lambda, static_cast<int>(i), false});
      covered[i - 1] = covered[i] = true;
    }
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (covered[k]) continue;
    if (r[k].det_sign != 0 && r[k + 1].det_sign != 0 && r[k].det_sign != r[k + 1].det_sign)
      out.push_back({r[k].lambda, r[k + 1].lambda, static_cast<int>(k), true});
  }
  std::sort(out.begin(), out.end(), [](const Bracket& a, const Bracket& b) { return a.lo < b.lo; });
  return out;
}

Eigen::VectorXd null_density(const SystemMatrix& matrix) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(matrix.entries, Eigen::ComputeThinV);
  Eigen::VectorXd v = svd.matrixV().col(svd.matrixV().cols() - 1);
  v /= v.norm();
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v(imax) < 0.0) v = -v;
  return v;
}

namespace {

EigenResult golden(double lo, double hi, const Assembler& assembler, const RefineOptions& opt) {
  if (!(lo > 0.0 && hi > lo)) throw Error(Errc::NotBracketed, "invalid bracket");
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = indicator_at(assembler, c, opt.threads);
  double fd = indicator_at(assembler, d, opt.threads);
  for (int it = 0; it < 200 && (b - a) >= opt.tol * 0.5 * (a + b); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = indicator_at(assembler, c, opt.threads);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = indicator_at(assembler, d, opt.threads);
    }
  }
  const double lam = fc < fd ? c : d;
  const SystemMatrix m = assembler.assemble(lam, opt.threads);
  EigenResult res;
  res.lambda_star = lam;
  res.refinement_width = b - a;
  res.mode = m.mode;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m.entries, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  res.indicator_at_min = sv(sv.size() - 1) / sv(0);
  Eigen::VectorXd v = svd.matrixV().col(svd.matrixV().cols() - 1);
  v /= v.norm();
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v(imax) < 0.0) v = -v;
  res.null_density = v;
  res.residual = (m.entries * v).norm() / sv(0);
  return res;
}

}  // namespace

EigenResult refine_bracket(double lo, double hi, const Assembler& assembler, const RefineOptions& opt) {
  EigenResult res = golden(lo, hi, assembler, opt);
  if (res.indicator_at_min > opt.indicator_floor)
    throw Error(Errc::NoRankLoss, "indicator " + std::to_string(res.indicator_at_min) + " at lambda " +
                                      std::to_string(res.lambda_star) + " above floor");
  return res;
}

EigenResult refine(const SweepTable& table, int which, const Assembler& assembler, const RefineOptions& opt) {
  const auto& r = table.rows;
  if (which <= 0 || which + 1 >= static_cast<int>(r.size()))
    throw Error(Errc::NotBracketed, "index " + std::to_string(which) + " is not interior");
  const auto i = static_cast<std::size_t>(which);
  if (!(r[i].indicator < r[i - 1].indicator && r[i].indicator < r[i + 1].indicator))
    throw Error(Errc::NotBracketed, "index " + std::to_string(which) + " is not a strict local minimum");
  return refine_bracket(r[i - 1].lambda, r[i + 1].lambda, assembler, opt);
}

Detection detect(const SweepTable& table, const Assembler& assembler, const RefineOptions& opt) {
  Detection out;
  for (const Bracket& b : candidate_brackets(table)) {
    EigenResult res = golden(b.lo, b.hi, assembler, opt);
    if (res.indicator_at_min > opt.indicator_floor)
      out.rejected.push_back({res.lambda_star, res.indicator_at_min});
    else
      out.eigenvalues.push_back(std::move(res));
  }
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(),
            [](const EigenResult& a, const EigenResult& b) { return a.lambda_star < b.lambda_star; });
  std::vector<EigenResult> merged;
  for (auto& e : out.eigenvalues) {
    if (!merged.empty() && std::abs(e.lambda_star - merged.back().lambda_star) <= 10.0 * opt.tol * e.lambda_star) {
      if (e.indicator_at_min < merged.back().indicator_at_min) merged.back() = std::move(e);
      continue;
    }
    merged.push_back(std::move(e));
  }
  out.eigenvalues = std::move(merged);
  return out;
}

}  // namespace anibem
