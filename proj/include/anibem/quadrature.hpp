#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "anibem/geometry.hpp"
#include "anibem/kernels.hpp"

namespace anibem {

enum class SelfMode { PaperEpsilon, LogSplit };

struct QuadratureConfig {
  int gauss_order = 8;
  SelfMode self_mode = SelfMode::LogSplit;
  double epsilon_c = 0.0;  // <= 0: h * 1e-7 of the domain in use
  double near_threshold = 2.0;
  int max_levels = 8;

  /// Throws InvalidSpec; epsilon_c is checked against the shortest panel when it is set.
  void validate(double min_panel_length = 0.0) const;
  double epsilon_for(const DomainSpec& spec) const { return epsilon_c > 0.0 ? epsilon_c : spec.h * 1e-7; }

  bool operator==(const QuadratureConfig&) const = default;
};

struct GaussRule {
  std::vector<double> x;  // on [-1, 1], ascending
  std::vector<double> w;
};

/// Cached Gauss-Legendre rule, 1 <= order <= 64.
const GaussRule& gauss_legendre(int order);

/// s is arclength from the panel midpoint.
struct QuadNode {
  double s;
  double w;
};

struct PanelRule {
  std::vector<QuadNode> nodes;
  bool capped = false;  // subdivision hit max_levels while still near the target
};

/// Gauss nodes on the panel, refined dyadically where the target lies within
/// near_threshold times the sub-panel length. Appends to out.
void panel_rule(const Panel& panel, Vec2 target, const QuadratureConfig& cfg, PanelRule& out);

struct QuadResult {
  double value = 0.0;
  bool near_singular_warning = false;
};

using PanelIntegrand = std::function<double(Vec2 y, double s)>;

/// Plain Gauss-Legendre over the panel.
QuadResult integrate_regular(const PanelIntegrand& f, const Panel& panel, const QuadratureConfig& cfg);

/// Gauss-Legendre with near-singular refinement toward target. Throws NonFinite.
QuadResult integrate_regular(const PanelIntegrand& f, const Panel& panel, Vec2 target, const QuadratureConfig& cfg);

enum class SelfKernel { Phi, PStar };

/// Integral of s^m Phi(mid, y) over the panel for m = 0, 1, 2; the collocation point is the midpoint.
std::array<double, 3> self_moments_phi(const Panel& panel, AnisoPair pair, double lambda, const TermPolicy& policy,
                                       KernelNormalization norm, const QuadratureConfig& cfg,
                                       bool* capped = nullptr);

/// Moment 0 of the self-panel integral. PStar: 0 in LogSplit mode; the epsilon-displaced value otherwise.
double integrate_self(SelfKernel kernel, const Panel& panel, AnisoPair pair, double lambda, const TermPolicy& policy,
                      KernelNormalization norm, const QuadratureConfig& cfg);

/// Closed-form integral of phi_laplace(mid, y) over the panel.
double self_laplace_single(const Panel& panel, AnisoPair pair, LaplaceScaling scaling);

/// Integral of s^p (ln|s| + c) over [-H, H].
double log_moment(int p, double H, double c);

}  // namespace anibem

namespace anibem {

enum class Layer { Single, Double };

/// Kernel family for layer potentials: lambda == 0 selects the Laplace kernels.
struct KernelSpec {
  AnisoPair pair{};
  double lambda = 0.0;
  LaplaceScaling scaling = LaplaceScaling::Verbatim;
  TermPolicy policy{};
  KernelNormalization norm = KernelNormalization::Verbatim;
};

/// Layer potential of a panel-wise constant density at x. When x is a panel midpoint the
/// self panel is handled by the self-panel rules (double layer: 0). Normals are the panels' own.
QuadResult layer_potential(Layer layer, std::span<const Panel> panels, std::span<const double> density, Vec2 x,
                           const KernelSpec& kernel, const QuadratureConfig& cfg);

}  // namespace anibem
