#include "anibem/validate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "anibem/eigensolve.hpp"
#include "anibem/error.hpp"
#include "json.hpp"

namespace anibem {

namespace {

void add(ValidationReport& r, std::string suite, std::string name, double measured, double tol, bool ok,
         std::string note = {}) {
  r.checks.push_back({std::move(suite), std::move(name), measured, tol, ok && std::isfinite(measured), std::move(note)});
}

void special_suite(ValidationReport& rep) {
  const TermPolicy pol;
  double worst = 0.0, wr = 0.0;
  for (double x : {0.25, 0.5, 1.0, 2.0, 5.0}) {
    const BesselValues v = bessel_series(x, pol);
    worst = std::max({worst, std::abs(v.j0 - std::cyl_bessel_j(0.0, x)), std::abs(v.j1 - std::cyl_bessel_j(1.0, x)),
                      std::abs(v.y0 - std::cyl_neumann(0.0, x)), std::abs(v.y1 - std::cyl_neumann(1.0, x))});
    wr = std::max(wr, std::abs(v.j1 * v.y0 - v.j0 * v.y1 - 2.0 / (std::numbers::pi * x)));
  }
  add(rep, "specialfn", "series vs std::cyl_* max abs error", worst, 1e-10, worst < 1e-10);
  add(rep, "specialfn", "Wronskian residual", wr, 1e-9, wr < 1e-9);
}

void jump_suite(ValidationReport& rep) {
  const int per_side = 80;
  const double delta = 1e-4;
  const auto panels = closed_rectangle(0.0, 1.0, 0.0, 1.0, per_side);
  const std::vector<double> one(panels.size(), 1.0);
  KernelSpec k;
  k.scaling = LaplaceScaling::Unit;
  const QuadratureConfig q;
  const Panel& p = panels[per_side / 2];
  auto pot = [&](Layer l, double t) { return layer_potential(l, panels, one, p.midpoint + p.normal * t, k, q).value; };
  const double dl = pot(Layer::Double, -delta) - pot(Layer::Double, delta);
  const double sl = pot(Layer::Single, -delta) - pot(Layer::Single, delta);
  auto dn = [&](Layer l, double s) {
    return s > 0 ? (pot(l, 2 * delta) - pot(l, delta)) / delta : (pot(l, -delta) - pot(l, -2 * delta)) / delta;
  };
  const double sl_jump = dn(Layer::Single, 1) - dn(Layer::Single, -1);
  add(rep, "jumps", "double-layer gap |1 - |gap||", std::abs(1.0 - std::abs(dl)), 0.02, std::abs(1.0 - std::abs(dl)) < 0.02,
      "gap sign " + std::string(dl < 0 ? "negative" : "positive"));
  add(rep, "jumps", "single-layer gap", std::abs(sl), 1e-3, std::abs(sl) < 1e-3);
  add(rep, "jumps", "conormal single-layer jump |1 - |jump||", std::abs(1.0 - std::abs(sl_jump)), 0.02,
      std::abs(1.0 - std::abs(sl_jump)) < 0.02);
}

void spectral_suite(ValidationReport& rep, const RunConfig& cfg, int threads) {
  const BoundaryMesh mesh = build_mesh(cfg.domain, cfg.nodes_per_curve);
  const Assembler as(mesh, cfg.assembly_options(1));
  const SweepTable table = sweep(as, cfg.lambda_min, cfg.lambda_max, cfg.steps, threads);
  const Detection det = detect(table, as, cfg.refine_options(threads));
  if (table.near_singular_warning) rep.warnings.push_back("near-singular subdivision capped during assembly");
  bool finite = true;
  for (const auto& r : table.rows) finite = finite && std::isfinite(r.sigma_min) && std::isfinite(r.sigma_max);
  add(rep, "spectral", "sweep finite", finite ? 0.0 : 1.0, 0.0, finite);
  for (const auto& e : det.eigenvalues) rep.detected.push_back(e.lambda_star);

  const bool homogeneous = cfg.domain.orientation == Orientation::Uniform || cfg.domain.sigma_l == cfg.domain.sigma_t;
  if (!homogeneous) {
    rep.warnings.push_back("no analytic spectrum for fibered tensors; detected eigenvalues reported only");
    return;
  }
  const double tol = cfg.domain.sigma_l == cfg.domain.sigma_t ? 5e-3 : 1e-2;
  const AnisoPair pair{cfg.domain.sigma_l, cfg.domain.sigma_t};
  const double scale = cfg.domain.scale_length();
  for (double ex : rectangle_eigenvalues(cfg.domain.a, cfg.domain.b, pair, cfg.lambda_min, cfg.lambda_max)) {
    double best = HUGE_VAL;
    for (double d : rep.detected) best = std::min(best, std::abs(d - ex));
    // tolerances are stated for unit geometry; scale with 1/length
    const double t = tol / scale;
    std::ostringstream nm;
    nm << "eigenvalue near " << ex;
    add(rep, "spectral", nm.str(), best, t, best < t);
  }
}

}  // namespace

std::vector<double> rectangle_eigenvalues(double a, double b, AnisoPair pair, double lo, double hi) {
  std::vector<double> out;
  for (int m = 0; m < 64; ++m)
    for (int n = 0; n < 64; ++n) {
      if (m == 0 && n == 0) continue;
      const double v = std::numbers::pi * std::sqrt(pair.ax * (m / a) * (m / a) + pair.ay * (n / b) * (n / b));
      if (v >= lo && v <= hi) out.push_back(v);
    }
  std::sort(out.begin(), out.end());
  std::vector<double> uniq;
  for (double v : out)
    if (uniq.empty() || std::abs(v - uniq.back()) > 1e-12 * v) uniq.push_back(v);
  return uniq;
}

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::string ValidationReport::text() const {
  std::ostringstream os;
  os.precision(6);
  for (const auto& c : checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.suite << ": " << c.name << " = " << c.measured << " (tol " << c.tolerance
       << ")";
    if (!c.note.empty()) os << " [" << c.note << "]";
    os << '\n';
  }
  if (!detected.empty()) {
    os << "detected eigenvalues:";
    os.precision(9);
    for (double d : detected) os << ' ' << d;
    os << '\n';
  }
  for (const auto& w : warnings) os << "WARNING " << w << '\n';
  os << (passed() ? "validation passed" : "validation FAILED") << '\n';
  return os.str();
}

std::string ValidationReport::json() const {
  nlohmann::ordered_json j;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : checks)
    arr.push_back({{"suite", c.suite},
                   {"name", c.name},
                   {"measured", c.measured},
                   {"tolerance", c.tolerance},
                   {"passed", c.passed},
                   {"note", c.note}});
  j["checks"] = arr;
  j["detected"] = detected;
  j["warnings"] = warnings;
  j["passed"] = passed();
  return j.dump(2) + "\n";
}

ValidationReport run_validation(const RunConfig& cfg, int threads) {
  cfg.validate();
  ValidationReport rep;
  if (cfg.domain.ill_conditioned())
    rep.warnings.push_back("ill-conditioned geometry: length scale " + format_double(cfg.domain.scale_length()) +
                           " is far below unity");
  special_suite(rep);
  jump_suite(rep);
  spectral_suite(rep, cfg, threads);
  return rep;
}

}  // namespace anibem
