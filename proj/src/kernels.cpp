#include "anibem/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "anibem/error.hpp"

namespace anibem {

namespace {

void check_pair(AnisoPair p) {
  if (!(p.ax > 0.0 && p.ay > 0.0)) throw Error(Errc::InvalidSpec, "anisotropy pair must be positive");
}

double laplace_prefactor(AnisoPair pair, LaplaceScaling s) {
  const double base = 1.0 / std::sqrt(pair.ax * pair.ay);
  return s == LaplaceScaling::Unit ? base / (2.0 * std::numbers::pi) : base;
}

}  // namespace

double aniso_distance(Vec2 x, Vec2 y, AnisoPair pair) {
  check_pair(pair);
  const Vec2 d = x - y;
  if (norm(d) < kCoincidentThreshold) throw Error(Errc::CoincidentPoints, "x and y coincide");
  return std::sqrt(d.x * d.x / pair.ax + d.y * d.y / pair.ay);
}

KernelEval phi(Vec2 x, Vec2 y, AnisoPair pair, double lambda, const TermPolicy& policy, KernelNormalization norm) {
  if (!(lambda > 0.0)) throw Error(Errc::DomainError, "phi requires lambda > 0");
  KernelEval out;
  out.r = aniso_distance(x, y, pair);
  const double z = lambda * out.r;
  const double pre = normalization_sign(norm) / (4.0 * std::sqrt(pair.ax * pair.ay));
  if (!(z > 0.0)) throw Error(Errc::DomainError, "lambda * r underflowed to zero");
  const BesselValues bv = bessel_series(z, policy);
  out.value = pre * bv.y0;
  out.singular_part = pre * (2.0 / std::numbers::pi) * bv.j0 * std::log(0.5 * z);
  out.regular_part = out.value - out.singular_part;
  return out;
}

double p_star(Vec2 x, Vec2 y, Vec2 n_y, AnisoPair pair, double lambda, const TermPolicy& policy,
              KernelNormalization norm) {
  if (!(lambda > 0.0)) throw Error(Errc::DomainError, "p_star requires lambda > 0");
  const double r = aniso_distance(x, y, pair);
  const double pre = normalization_sign(norm) / (4.0 * std::sqrt(pair.ax * pair.ay));
  return radial_kernel(r, lambda, pre, policy).q * dot(x - y, n_y);
}

double phi_laplace(Vec2 x, Vec2 y, AnisoPair pair, LaplaceScaling scaling) {
  const double r = aniso_distance(x, y, pair);
  return laplace_prefactor(pair, scaling) * std::log(r);
}

double p_star_laplace(Vec2 x, Vec2 y, Vec2 n_y, AnisoPair pair, LaplaceScaling scaling) {
  const double r = aniso_distance(x, y, pair);
  return laplace_prefactor(pair, scaling) * dot(x - y, n_y) / (r * r);
}

RadialKernel radial_kernel(double r, double lambda, double prefactor, const TermPolicy& policy) {
  const double z = lambda * r;
  if (!(z > 0.0)) throw Error(Errc::DomainError, "lambda * r must be positive");
  const BesselValues bv = bessel_series(z, policy);
  return {prefactor * bv.y0, prefactor * lambda * bv.y1 / r};
}

double pde_residual(std::span<const Vec2> points, Vec2 source, AnisoPair pair, double lambda, double fd_step,
                    const TermPolicy& policy) {
  check_pair(pair);
  if (!(fd_step > 0.0)) throw Error(Errc::DomainError, "fd_step must be positive");
  auto u = [&](Vec2 x) {
    return lambda > 0.0 ? phi(x, source, pair, lambda, policy).value : phi_laplace(x, source, pair);
  };
  const double h2 = fd_step * fd_step;
  double worst = 0.0;
  for (Vec2 x : points) {
    if (distance(x, source) < 10.0 * fd_step)
      throw Error(Errc::DomainError, "evaluation point too close to the source");
    const double c = u(x);
    const double dxx = (u({x.x + fd_step, x.y}) - 2.0 * c + u({x.x - fd_step, x.y})) / h2;
    const double dyy = (u({x.x, x.y + fd_step}) - 2.0 * c + u({x.x, x.y - fd_step})) / h2;
    worst = std::max(worst, std::abs(pair.ax * dxx + pair.ay * dyy + lambda * lambda * c));
  }
  return worst;
}

}  // namespace anibem
