#pragma once

#include <Eigen/Dense>
#include <vector>

#include "anibem/assembly.hpp"

namespace anibem {

/// Distance from x to the boundary of region's rectangle; negative outside.
double region_clearance(const DomainSpec& spec, Region region, Vec2 x);

/// Longest panel on the region's boundary.
double region_guard(const BoundaryMesh& mesh, Region region);

struct PointValue {
  double value = 0.0;
  bool near_boundary = false;  // closer than one boundary panel length
};

/// Representation formula of `region` at an interior point (no kappa). Throws OutsideRegion, DimensionMismatch.
PointValue evaluate_point(Vec2 x, Region region, const Eigen::VectorXd& densities, double lambda,
                          const BoundaryMesh& mesh, const AssemblyOptions& options);

struct FieldPoint {
  Region region;
  Vec2 x;
  double raw;
  double normalized;
  bool near_boundary;
};

struct FieldGrid {
  std::vector<FieldPoint> points;
  double lambda = 0.0;
  int nx = 0;
  int ny = 0;
  double max_abs = 0.0;
};

/// nx * ny points per subregion, inset from its boundary by one panel length; values normalized by max |u|.
FieldGrid field_grid(const BoundaryMesh& mesh, const Eigen::VectorXd& densities, double lambda, int nx, int ny,
                     const AssemblyOptions& options, int threads = 1);

/// Max gap at Gamma_IS between u_I and u_S, each linearly extrapolated from distances delta and 2 delta,
/// over `samples` heights in the middle half of the interface. Needs 2 delta < h-side widths.
double interface_gap(const BoundaryMesh& mesh, const Eigen::VectorXd& densities, double lambda, double delta,
                     int samples, const AssemblyOptions& options);

}  // namespace anibem
