#include "anibem/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "anibem/error.hpp"

namespace anibem {

namespace {

GaussRule compute_rule(int n) {
  GaussRule rule;
  rule.x.resize(static_cast<std::size_t>(n));
  rule.w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = (n == 1) ? 1.0 : n * (z * p1 - p0) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.x[lo] = -z;
    rule.x[hi] = z;
    rule.w[lo] = w;
    rule.w[hi] = w;
  }
  if (n % 2 == 1) rule.x[static_cast<std::size_t>(n / 2)] = 0.0;
  if (n == 1) rule.w[0] = 2.0;
  return rule;
}

void refine(double s0, double s1, const Panel& panel, Vec2 target, const QuadratureConfig& cfg, int level,
            const GaussRule& g, PanelRule& out) {
  const double len = s1 - s0;
  const double sm = 0.5 * (s0 + s1);
  const bool near = distance(panel.at(sm), target) < cfg.near_threshold * len;
  if (near && level < cfg.max_levels) {
    refine(s0, sm, panel, target, cfg, level + 1, g, out);
    refine(sm, s1, panel, target, cfg, level + 1, g, out);
    return;
  }
  if (near) out.capped = true;
  for (std::size_t q = 0; q < g.x.size(); ++q) out.nodes.push_back({sm + 0.5 * len * g.x[q], 0.5 * len * g.w[q]});
}

QuadResult sum_rule(const PanelIntegrand& f, const Panel& panel, const PanelRule& rule) {
  QuadResult r;
  for (const auto& nd : rule.nodes) {
    const double v = f(panel.at(nd.s), nd.s);
    if (!std::isfinite(v)) throw Error(Errc::NonFinite, "integrand not finite at s = " + std::to_string(nd.s));
    r.value += nd.w * v;
  }
  r.near_singular_warning = rule.capped;
  return r;
}

double tangent_rho(const Panel& panel, AnisoPair pair) {
  const Vec2 t = panel.tangent();
  return std::sqrt(t.x * t.x / pair.ax + t.y * t.y / pair.ay);
}

}  // namespace

void QuadratureConfig::validate(double min_panel_length) const {
  if (gauss_order < 2 || gauss_order > 32) throw Error(Errc::InvalidSpec, "gauss_order must lie in [2, 32]");
  if (!(near_threshold >= 0.0)) throw Error(Errc::InvalidSpec, "near_threshold must be >= 0");
  if (max_levels < 0 || max_levels > 30) throw Error(Errc::InvalidSpec, "max_levels must lie in [0, 30]");
  if (!std::isfinite(epsilon_c)) throw Error(Errc::InvalidSpec, "epsilon_c not finite");
  if (epsilon_c > 0.0 && min_panel_length > 0.0 && !(epsilon_c < 0.1 * min_panel_length))
    throw Error(Errc::InvalidSpec, "epsilon_c must be below a tenth of the shortest panel");
}

const GaussRule& gauss_legendre(int order) {
  if (order < 1 || order > 64) throw Error(Errc::InvalidSpec, "Gauss order out of range");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<GaussRule>(compute_rule(order));
  return *slot;
}

void panel_rule(const Panel& panel, Vec2 target, const QuadratureConfig& cfg, PanelRule& out) {
  const GaussRule& g = gauss_legendre(cfg.gauss_order);
  refine(-0.5 * panel.length, 0.5 * panel.length, panel, target, cfg, 0, g, out);
}

QuadResult integrate_regular(const PanelIntegrand& f, const Panel& panel, const QuadratureConfig& cfg) {
  const GaussRule& g = gauss_legendre(cfg.gauss_order);
  PanelRule rule;
  for (std::size_t q = 0; q < g.x.size(); ++q)
    rule.nodes.push_back({0.5 * panel.length * g.x[q], 0.5 * panel.length * g.w[q]});
  return sum_rule(f, panel, rule);
}

QuadResult integrate_regular(const PanelIntegrand& f, const Panel& panel, Vec2 target, const QuadratureConfig& cfg) {
  PanelRule rule;
  panel_rule(panel, target, cfg, rule);
  return sum_rule(f, panel, rule);
}

double log_moment(int p, double H, double c) {
  if (p % 2 == 1) return 0.0;
  const double k = p + 1.0;
  const double hp = std::pow(H, k) / k;
  return 2.0 * (hp * (std::log(H) - 1.0 / k) + c * hp);
}

std::array<double, 3> self_moments_phi(const Panel& panel, AnisoPair pair, double lambda, const TermPolicy& policy,
                                       KernelNormalization norm, const QuadratureConfig& cfg, bool* capped) {
  if (!(lambda > 0.0)) throw Error(Errc::DomainError, "self integral requires lambda > 0");
  const double pre = normalization_sign(norm) / (4.0 * std::sqrt(pair.ax * pair.ay));
  const double rho = tangent_rho(panel, pair);
  std::array<double, 3> m{0.0, 0.0, 0.0};

  if (cfg.self_mode == SelfMode::PaperEpsilon) {
    const double eps = cfg.epsilon_c > 0.0 ? cfg.epsilon_c : 1e-7 * panel.length;
    const Vec2 z = panel.midpoint + panel.normal * eps;
    PanelRule rule;
    panel_rule(panel, z, cfg, rule);
    for (const auto& nd : rule.nodes) {
      const double r = aniso_distance(z, panel.at(nd.s), pair);
      const double g = pre * bessel_series(lambda * r, policy).y0;
      m[0] += nd.w * g;
      m[1] += nd.w * g * nd.s;
      m[2] += nd.w * g * nd.s * nd.s;
    }
    if (capped) *capped = rule.capped;
    return m;
  }

  // singular part pre (2/pi) J0(k|s|) ln(k|s|/2), k = lambda rho, integrated term by term
  const double H = 0.5 * panel.length;
  const double k = lambda * rho;
  const double c = std::log(0.5 * k);
  const bool adaptive = policy.mode == TermMode::Adaptive;
  const int limit = adaptive ? policy.max_terms : policy.fixed_terms;
  double coef = 1.0;  // (-1)^n (k/2)^{2n} / (n!)^2
  bool done = !adaptive;
  for (int n = 0; n < limit; ++n) {
    const double t0 = coef * log_moment(2 * n, H, c);
    const double t2 = coef * log_moment(2 * n + 2, H, c);
    m[0] += t0;
    m[2] += t2;
    if (adaptive && std::abs(t0) <= policy.adaptive_rel_tol * std::abs(m[0]) &&
        std::abs(t2) <= policy.adaptive_rel_tol * std::abs(m[2])) {
      done = true;
      break;
    }
    coef *= -(0.5 * k) * (0.5 * k) / static_cast<double>((n + 1) * (n + 1));
  }
  if (!done) throw Error(Errc::NonConvergent, "self-panel log expansion did not converge");
  const double sing = pre * 2.0 / std::numbers::pi;
  m[0] *= sing;
  m[2] *= sing;

  const GaussRule& g = gauss_legendre(cfg.gauss_order);
  for (std::size_t q = 0; q < g.x.size(); ++q) {
    const double s = H * g.x[q];
    const double w = H * g.w[q];
    const double reg = pre * bessel_series(k * std::abs(s), policy).y0_regular;
    m[0] += w * reg;
    m[1] += w * reg * s;
    m[2] += w * reg * s * s;
  }
  if (capped) *capped = false;
  return m;
}

double integrate_self(SelfKernel kernel, const Panel& panel, AnisoPair pair, double lambda, const TermPolicy& policy,
                      KernelNormalization norm, const QuadratureConfig& cfg) {
  if (kernel == SelfKernel::Phi) return self_moments_phi(panel, pair, lambda, policy, norm, cfg)[0];
  if (cfg.self_mode == SelfMode::LogSplit) return 0.0;
  const double eps = cfg.epsilon_c > 0.0 ? cfg.epsilon_c : 1e-7 * panel.length;
  const Vec2 z = panel.midpoint + panel.normal * eps;
  auto f = [&](Vec2 y, double) { return p_star(z, y, panel.normal, pair, lambda, policy, norm); };
  return integrate_regular(f, panel, z, cfg).value;
}

double self_laplace_single(const Panel& panel, AnisoPair pair, LaplaceScaling scaling) {
  const double L = panel.length;
  const double rho = tangent_rho(panel, pair);
  double pre = 1.0 / std::sqrt(pair.ax * pair.ay);
  if (scaling == LaplaceScaling::Unit) pre /= 2.0 * std::numbers::pi;
  return pre * (L * (std::log(0.5 * L) - 1.0) + L * std::log(rho));
}

}  // namespace anibem

namespace anibem {

QuadResult layer_potential(Layer layer, std::span<const Panel> panels, std::span<const double> density, Vec2 x,
                           const KernelSpec& k, const QuadratureConfig& cfg) {
  if (density.size() != panels.size()) throw Error(Errc::DimensionMismatch, "one density value per panel");
  QuadResult out;
  for (std::size_t j = 0; j < panels.size(); ++j) {
    const Panel& p = panels[j];
    if (density[j] == 0.0) continue;
    double v = 0.0;
    if (distance(x, p.midpoint) == 0.0) {
      if (layer == Layer::Double) continue;
      v = k.lambda > 0.0 ? integrate_self(SelfKernel::Phi, p, k.pair, k.lambda, k.policy, k.norm, cfg)
                         : self_laplace_single(p, k.pair, k.scaling);
    } else {
      auto f = [&](Vec2 y, double) {
        if (layer == Layer::Single)
          return k.lambda > 0.0 ? phi(x, y, k.pair, k.lambda, k.policy, k.norm).value
                                : phi_laplace(x, y, k.pair, k.scaling);
        return k.lambda > 0.0 ? p_star(x, y, p.normal, k.pair, k.lambda, k.policy, k.norm)
                              : p_star_laplace(x, y, p.normal, k.pair, k.scaling);
      };
      const QuadResult q = integrate_regular(f, p, x, cfg);
      v = q.value;
      out.near_singular_warning = out.near_singular_warning || q.near_singular_warning;
    }
    out.value += density[j] * v;
  }
  return out;
}

}  // namespace anibem
