#include "anibem/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "anibem/error.hpp"

namespace anibem {

namespace {

struct Box {
  double x0, x1, y0, y1;
};

Box region_box(const DomainSpec& s, Region r) {
  switch (r) {
    case Region::I: return {0.0, s.x_left(), 0.0, s.b};
    case Region::S: return {s.x_left(), s.x_right(), 0.0, s.b};
    case Region::D: return {s.x_right(), s.a, 0.0, s.b};
  }
  return {};
}

}  // namespace

double region_clearance(const DomainSpec& spec, Region region, Vec2 x) {
  const Box b = region_box(spec, region);
  return std::min({x.x - b.x0, b.x1 - x.x, x.y - b.y0, b.y1 - x.y});
}

double region_guard(const BoundaryMesh& mesh, Region region) {
  double g = 0.0;
  for (const Panel& p : mesh.panels)
    if (curve_bounds(p.curve, region)) g = std::max(g, p.length);
  return g;
}

PointValue evaluate_point(Vec2 x, Region region, const Eigen::VectorXd& densities, double lambda,
                          const BoundaryMesh& mesh, const AssemblyOptions& options) {
  const DensityLayout lay = layout(mesh);
  if (densities.size() != lay.total_size)
    throw Error(Errc::DimensionMismatch, "density vector does not match the mesh layout");
  if (!(lambda > 0.0)) throw Error(Errc::DomainError, "lambda must be positive");
  const double clear = region_clearance(mesh.spec, region, x);
  if (!(clear > 0.0))
    throw Error(Errc::OutsideRegion, "point is not interior to region " + std::string(to_string(region)));

  PointValue out;
  out.near_boundary = clear < region_guard(mesh, region);
  const AnisoPair pair = mesh.spec.pair(region);
  const double pre = normalization_sign(options.norm) / (4.0 * std::sqrt(pair.ax * pair.ay));
  QuadratureConfig qc = options.quad;
  PanelRule rule;
  double total = 0.0;
  for (const LayerTerm& t : region_terms(region, options.mode, options.norm)) {
    const CurveRange cr = mesh.ranges[static_cast<std::size_t>(t.curve)];
    const DensityBlock& blk = lay.block(t.trace);
    for (int j = cr.begin; j < cr.begin + cr.count; ++j) {
      const Panel& src = mesh.panels[static_cast<std::size_t>(j)];
      const auto stencil = basis_stencil(mesh, j, options.basis);
      std::array<double, 3> poly{0.0, 0.0, 0.0};
      for (const StencilEntry& se : stencil) {
        const double dk = densities(blk.offset + (se.panel - cr.begin));
        for (std::size_t m = 0; m < 3; ++m) poly[m] += dk * se.c[m];
      }
      const Vec2 n = outward_normal(src, region);
      rule.nodes.clear();
      rule.capped = false;
      panel_rule(src, x, qc, rule);
      double acc = 0.0;
      for (const QuadNode& nd : rule.nodes) {
        const Vec2 y = src.at(nd.s);
        const double r = aniso_distance(x, y, pair);
        const BesselValues bv = bessel_series(lambda * r, options.policy);
        const double k = t.double_layer ? pre * lambda * bv.y1 / r * dot(x - y, n) : pre * bv.y0;
        acc += nd.w * k * (poly[0] + nd.s * (poly[1] + nd.s * poly[2]));
      }
      total += t.coefficient * acc;
    }
  }
  if (!std::isfinite(total)) throw Error(Errc::NonFinite, "field value not finite");
  out.value = total;
  return out;
}

FieldGrid field_grid(const BoundaryMesh& mesh, const Eigen::VectorXd& densities, double lambda, int nx, int ny,
                     const AssemblyOptions& options, int threads) {
  if (nx < 2 || ny < 2) throw Error(Errc::InvalidSpec, "field resolution must be at least 2 x 2");
  FieldGrid grid;
  grid.lambda = lambda;
  grid.nx = nx;
  grid.ny = ny;
  for (Region r : {Region::I, Region::S, Region::D}) {
    const Box b = region_box(mesh.spec, r);
    double g = 1.01 * region_guard(mesh, r);
    // thin regions on coarse meshes cannot honour the guard; points are flagged instead
    g = std::min({g, 0.25 * (b.x1 - b.x0), 0.25 * (b.y1 - b.y0)});
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const double x = b.x0 + g + (b.x1 - b.x0 - 2.0 * g) * i / (nx - 1);
        const double y = b.y0 + g + (b.y1 - b.y0 - 2.0 * g) * j / (ny - 1);
        grid.points.push_back({r, {x, y}, 0.0, 0.0, false});
      }
  }
  parallel_for(static_cast<int>(grid.points.size()), threads, [&](int begin, int end) {
    for (int k = begin; k < end; ++k) {
      FieldPoint& p = grid.points[static_cast<std::size_t>(k)];
      const PointValue v = evaluate_point(p.x, p.region, densities, lambda, mesh, options);
      p.raw = v.value;
      p.near_boundary = v.near_boundary;
    }
  });
  for (const auto& p : grid.points) grid.max_abs = std::max(grid.max_abs, std::abs(p.raw));
  for (auto& p : grid.points) p.normalized = grid.max_abs > 0.0 ? p.raw / grid.max_abs : 0.0;
  return grid;
}

double interface_gap(const BoundaryMesh& mesh, const Eigen::VectorXd& densities, double lambda, double delta,
                     int samples, const AssemblyOptions& options) {
  const double xl = mesh.spec.x_left();
  const double b = mesh.spec.b;
  double gap = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double y = b * (0.25 + 0.5 * (k + 0.5) / samples);
    auto at = [&](double x, Region r) { return evaluate_point({x, y}, r, densities, lambda, mesh, options).value; };
    const double ui = 2.0 * at(xl - delta, Region::I) - at(xl - 2.0 * delta, Region::I);
    const double us = 2.0 * at(xl + delta, Region::S) - at(xl + 2.0 * delta, Region::S);
    gap = std::max(gap, std::abs(ui - us));
  }
  return gap;
}

}  // namespace anibem
