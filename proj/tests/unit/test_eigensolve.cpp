#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "anibem/eigensolve.hpp"
#include "anibem/error.hpp"

using namespace anibem;

namespace {

DomainSpec iso() {
  DomainSpec s;
  s.sigma_l = s.sigma_t = 1.0;
  s.orientation = Orientation::Uniform;
  return s;
}

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::NonFinite;
}

// deepest strict local minimum
int deepest_min(const SweepTable& t) {
  int best = -1;
  for (std::size_t i = 1; i + 1 < t.rows.size(); ++i)
    if (t.rows[i].indicator < t.rows[i - 1].indicator && t.rows[i].indicator < t.rows[i + 1].indicator &&
        (best < 0 || t.rows[i].indicator < t.rows[static_cast<std::size_t>(best)].indicator))
      best = static_cast<int>(i);
  return best;
}

}  // namespace

TEST_CASE("two-step sweep makes no claims") {
  const auto m = build_mesh(iso(), 10);
  const Assembler as(m, {});
  const auto t = sweep(as, 1.0, 2.0, 2);
  CHECK(t.rows.size() == 2);
  for (const auto& b : candidate_brackets(t)) CHECK(b.sign_change);
  CHECK(code_of([&] { sweep(as, 2.0, 1.0, 5); }) == Errc::InvalidSpec);
  CHECK(code_of([&] { sweep(as, 1.0, 2.0, 1); }) == Errc::InvalidSpec);
}

TEST_CASE("refinement near pi") {
  const auto m = build_mesh(iso(), 20);
  const Assembler as(m, {});
  const auto t = sweep(as, 2.9, 3.4, 11, 2);
  for (std::size_t i = 1; i < t.rows.size(); ++i) CHECK(t.rows[i].lambda > t.rows[i - 1].lambda);
  const int k = deepest_min(t);
  REQUIRE(k > 0);
  const auto r = refine(t, k, as, {});
  CHECK(std::abs(r.lambda_star - std::numbers::pi) < 5e-3);
  CHECK(r.refinement_width < 1e-8 * r.lambda_star);
  CHECK(r.residual <= 1e-6);
  CHECK(r.mode == AssemblyMode::Consistent);
  CHECK(r.null_density.norm() == doctest::Approx(1.0).epsilon(1e-12));
  Eigen::Index imax;
  r.null_density.cwiseAbs().maxCoeff(&imax);
  CHECK(r.null_density(imax) > 0);
  const auto a = as.assemble(r.lambda_star);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a.entries);
  const double rel = apply(a, r.null_density).norm() / svd.singularValues()(0);
  CHECK(rel <= 1e-6);

  CHECK(code_of([&] { refine(t, 0, as, {}); }) == Errc::NotBracketed);
  CHECK(code_of([&] { refine(t, k + 1, as, {}); }) == Errc::NotBracketed);
}

TEST_CASE("shallow minimum is rejected") {
  const auto m = build_mesh(iso(), 12);
  const Assembler as(m, {});
  CHECK(code_of([&] { refine_bracket(1.4, 1.6, as, {}); }) == Errc::NoRankLoss);
}

TEST_CASE("null density of a known rank-one-deficient matrix") {
  SystemMatrix s;
  s.entries = Eigen::MatrixXd::Identity(4, 4);
  s.entries(2, 2) = 0.0;
  const auto v = null_density(s);
  CHECK(v.norm() == doctest::Approx(1.0));
  CHECK(v(2) == doctest::Approx(1.0));
  const auto iv = indicator_values(s.entries);
  CHECK(iv.sigma_min == doctest::Approx(0.0));
}

TEST_CASE("row scaling leaves the refined eigenvalue unchanged") {
  const auto m = build_mesh(iso(), 16);
  const Assembler as(m, {});
  const auto rows = row_blocks(as.layout());
  auto ind = [&](double lam, bool scaled) {
    Eigen::MatrixXd a = as.assemble(lam).entries;
    if (scaled) a.middleRows(rows[2].offset, rows[2].count) *= 2.0;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
    const auto& s = svd.singularValues();
    return s(s.size() - 1) / s(0);
  };
  auto golden = [&](bool scaled) {
    const double g = (std::sqrt(5.0) - 1) / 2;
    double lo = 3.05, hi = 3.25;
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = ind(x1, scaled), f2 = ind(x2, scaled);
    while (hi - lo > 1e-9) {
      if (f1 < f2) {
        hi = x2, x2 = x1, f2 = f1, x1 = hi - g * (hi - lo), f1 = ind(x1, scaled);
      } else {
        lo = x1, x1 = x2, f1 = f2, x2 = lo + g * (hi - lo), f2 = ind(x2, scaled);
      }
    }
    return 0.5 * (lo + hi);
  };
  CHECK(std::abs(golden(false) - golden(true)) < 1e-7);
}

TEST_CASE("sweep continuity and determinant sign changes") {
  const auto m = build_mesh(iso(), 16);
  const Assembler as(m, {});
  const auto t = sweep(as, 1.0, 7.0, 61, 2);
  std::vector<double> jumps;
  for (std::size_t i = 1; i < t.rows.size(); ++i) jumps.push_back(std::abs(t.rows[i].sigma_min - t.rows[i - 1].sigma_min));
  std::vector<double> sorted = jumps;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  CHECK(sorted.back() < 20.0 * median);
  for (std::size_t k = 0; k + 1 < t.rows.size(); ++k) {
    // a change in the last interval has no grid point beyond it
    if (t.rows[k].det_sign == t.rows[k + 1].det_sign || k + 2 >= t.rows.size()) continue;
    bool found = false;
    for (std::size_t i = k > 0 ? k - 1 : 1; i <= k + 2 && i + 1 < t.rows.size(); ++i)
      if (i > 0 && t.rows[i].indicator < t.rows[i - 1].indicator && t.rows[i].indicator < t.rows[i + 1].indicator)
        found = true;
    CAPTURE(t.rows[k].lambda);
    CHECK(found);
  }
}

TEST_CASE("detect and parallel sweep agree with the serial path") {
  const auto m = build_mesh(iso(), 12);
  const Assembler as(m, {});
  const auto t1 = sweep(as, 2.5, 5.0, 26, 1);
  const auto t3 = sweep(as, 2.5, 5.0, 26, 3);
  for (std::size_t i = 0; i < t1.rows.size(); ++i) {
    CHECK(t1.rows[i].indicator == t3.rows[i].indicator);
    CHECK(t1.rows[i].log_abs_det == t3.rows[i].log_abs_det);
  }
  RefineOptions o1, o3;
  o3.threads = 3;
  const auto d1 = detect(t1, as, o1), d3 = detect(t3, as, o3);
  REQUIRE(d1.eigenvalues.size() == d3.eigenvalues.size());
  for (std::size_t i = 0; i < d1.eigenvalues.size(); ++i)
    CHECK(d1.eigenvalues[i].lambda_star == d3.eigenvalues[i].lambda_star);
  bool near_pi = false;
  for (const auto& e : d1.eigenvalues) near_pi = near_pi || std::abs(e.lambda_star - std::numbers::pi) < 1e-2;
  CHECK(near_pi);
}

TEST_CASE("mesh refinement sequence contracts") {
  double prev = 0, prev_diff = HUGE_VAL;
  for (int n : {20, 40, 80}) {
    const auto m = build_mesh(iso(), n);
    const Assembler as(m, {});
    RefineOptions o;
    o.tol = 1e-9;
    const double lam = refine_bracket(3.05, 3.25, as, o).lambda_star;
    if (n > 20) {
      const double d = std::abs(lam - prev);
      CHECK(d < prev_diff);
      prev_diff = d;
    }
    prev = lam;
  }
}
