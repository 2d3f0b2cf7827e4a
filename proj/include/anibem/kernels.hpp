#pragma once

#include <span>

#include "anibem/specialfn.hpp"
#include "anibem/vec2.hpp"

namespace anibem {

/// Verbatim: +Y0/(4 sqrt(ab)). Negated: the opposite sign on both Phi and p*.
enum class KernelNormalization { Verbatim, Negated };

/// Verbatim: ln r / sqrt(ab). Unit: ln r / (2 pi sqrt(ab)), which makes the layer jumps unit size.
enum class LaplaceScaling { Verbatim, Unit };

inline double normalization_sign(KernelNormalization n) { return n == KernelNormalization::Negated ? -1.0 : 1.0; }

struct KernelEval {
  double value = 0.0;
  double r = 0.0;
  double singular_part = 0.0;
  double regular_part = 0.0;
};

/// Absolute threshold below which two points are treated as coincident.
inline constexpr double kCoincidentThreshold = 1e-300;

double aniso_distance(Vec2 x, Vec2 y, AnisoPair pair);

KernelEval phi(Vec2 x, Vec2 y, AnisoPair pair, double lambda, const TermPolicy& policy = {},
               KernelNormalization norm = KernelNormalization::Verbatim);

double p_star(Vec2 x, Vec2 y, Vec2 n_y, AnisoPair pair, double lambda, const TermPolicy& policy = {},
              KernelNormalization norm = KernelNormalization::Verbatim);

double phi_laplace(Vec2 x, Vec2 y, AnisoPair pair, LaplaceScaling scaling = LaplaceScaling::Verbatim);

double p_star_laplace(Vec2 x, Vec2 y, Vec2 n_y, AnisoPair pair, LaplaceScaling scaling = LaplaceScaling::Verbatim);

/// Radial parts at anisotropic distance r: Phi = g, p* = q * ((x - y) . n).
struct RadialKernel {
  double g = 0.0;
  double q = 0.0;
};

/// `prefactor` is sign / (4 sqrt(ab)).
RadialKernel radial_kernel(double r, double lambda, double prefactor, const TermPolicy& policy);

/// Max |(ax d11 + ay d22 + lambda^2) Phi(., source)| over the points, five-point stencil of width fd_step.
/// lambda == 0 applies the operator to phi_laplace. Throws DomainError if a point is within 10 fd_step of source.
double pde_residual(std::span<const Vec2> points, Vec2 source, AnisoPair pair, double lambda, double fd_step,
                    const TermPolicy& policy = {});

}  // namespace anibem
