#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "anibem/vec2.hpp"

namespace anibem {

enum class Region { I, S, D };
enum class Curve { GammaI, GammaIS, GammaS, GammaSD, GammaD };
enum class ScalePreset { Unit, Paper };

/// Fibered: S carries the transposed tensor. Uniform: every region carries (sigma_l, sigma_t).
enum class Orientation { Fibered, Uniform };

inline constexpr std::array<Curve, 5> kAllCurves = {Curve::GammaI, Curve::GammaIS, Curve::GammaS,
                                                    Curve::GammaSD, Curve::GammaD};

std::string_view to_string(Region r);
std::string_view to_string(Curve c);

struct DomainSpec {
  double a = 1.0;
  double b = 1.0;
  double h = 0.1;
  double sigma_l = 3.0;
  double sigma_t = 1.0;
  Orientation orientation = Orientation::Fibered;
  ScalePreset scale = ScalePreset::Unit;

  void validate() const;
  AnisoPair pair(Region r) const;

  double x_left() const { return 0.5 * a - h; }
  double x_right() const { return 0.5 * a + h; }
  double scale_length() const { return a > b ? a : b; }

  /// True when the geometry is so small that kernel sums lose meaning in double precision.
  bool ill_conditioned() const { return scale_length() < 1e-6; }

  static DomainSpec unit() { return {}; }
  static DomainSpec paper();

  bool operator==(const DomainSpec&) const = default;
};

struct RegionAniso {
  Region region;
  double ax;
  double ay;
};

std::array<RegionAniso, 3> region_tensors(const DomainSpec& spec);

struct Panel {
  Curve curve;
  Vec2 start;
  Vec2 end;
  Vec2 midpoint;
  double length;
  Vec2 normal;  // outward w.r.t. owner
  Region owner;
  int side;           // global straight-side id; panels sharing it are collinear and contiguous
  int index_in_side;  // position along the side, from start of side

  Vec2 tangent() const { return (end - start) * (1.0 / length); }
  Vec2 at(double s) const { return midpoint + tangent() * s; }  // s: arclength from midpoint
};

/// Normal of an interface panel as seen from `region`; throws InvalidSpec if the panel does not bound it.
Vec2 outward_normal(const Panel& p, Region region);

/// Whether `region` is one of the (one or two) regions the curve bounds.
bool curve_bounds(Curve c, Region region);

struct CornerInfo {
  Vec2 location;
  double interior_angle_theta;
  double c_coefficient;  // interior branch, -theta/(2 pi)
  Region region;
};

struct CurveRange {
  int begin = 0;
  int count = 0;
};

struct BoundaryMesh {
  DomainSpec spec;
  int nodes_per_curve = 0;
  std::vector<Panel> panels;
  std::vector<CornerInfo> corners;
  std::array<CurveRange, 5> ranges{};

  std::span<const Panel> curve(Curve c) const;
  double max_panel_length() const;
  double min_panel_length() const;
  int side_count(int side) const;
};

/// Splits each curve into nodes_per_curve panels; multi-side curves share them by arclength.
BoundaryMesh build_mesh(const DomainSpec& spec, int nodes_per_curve);

/// Per-curve panel counts; counts[c] >= number of straight sides of c.
BoundaryMesh build_mesh(const DomainSpec& spec, const std::array<int, 5>& counts);

/// Largest-remainder split of n over the given lengths, at least one per entry.
std::vector<int> allocate_panels(std::span<const double> lengths, int n);

int side_count_of(Curve c);

enum class KappaContext { I, IS, ISS, SD, SDD };

/// Fixed weights: 2/3 on the curve set, 4/5 at the two designated endpoints. Throws OffCurve.
double kappa(const DomainSpec& spec, KappaContext ctx, Vec2 z);

/// 2 pi / theta, with theta the interior angle of `region` at z (pi or pi/2).
double kappa_consistent(const DomainSpec& spec, Region region, Vec2 z);

enum class Side { Interior, Exterior };

/// -theta/(2 pi) (interior) or +theta/(2 pi) (exterior); theta = pi off the listed corners.
double corner_coefficient(std::span<const CornerInfo> corners, Vec2 z, Side side);

/// Region corner list for the three-phase rectangle (right angles only).
std::vector<CornerInfo> region_corners(const DomainSpec& spec);

/// Closed axis-aligned rectangle [x0,x1]x[y0,y1], n panels per side, outward normals.
std::vector<Panel> closed_rectangle(double x0, double x1, double y0, double y1, int per_side);

}  // namespace anibem
