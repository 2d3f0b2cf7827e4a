#include "anibem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "anibem/error.hpp"

namespace anibem {

namespace {

struct SideDef {
  Vec2 from;
  Vec2 to;
  Vec2 normal;
};

std::vector<SideDef> sides_of(const DomainSpec& s, Curve c) {
  const double a = s.a, b = s.b, xl = s.x_left(), xr = s.x_right();
  switch (c) {
    case Curve::GammaI:
      return {{{0, b}, {xl, b}, {0, 1}}, {{0, 0}, {0, b}, {-1, 0}}, {{0, 0}, {xl, 0}, {0, -1}}};
    case Curve::GammaIS:
      return {{{xl, 0}, {xl, b}, {1, 0}}};
    case Curve::GammaS:
      return {{{xl, b}, {xr, b}, {0, 1}}, {{xl, 0}, {xr, 0}, {0, -1}}};
    case Curve::GammaSD:
      return {{{xr, 0}, {xr, b}, {1, 0}}};
    case Curve::GammaD:
      return {{{xr, b}, {a, b}, {0, 1}}, {{a, 0}, {a, b}, {1, 0}}, {{xr, 0}, {a, 0}, {0, -1}}};
  }
  return {};
}

Region owner_of(Curve c) {
  switch (c) {
    case Curve::GammaI:
    case Curve::GammaIS: return Region::I;
    case Curve::GammaS:
    case Curve::GammaSD: return Region::S;
    case Curve::GammaD: return Region::D;
  }
  return Region::I;
}

void append_side(std::vector<Panel>& out, Curve c, Region owner, const SideDef& sd, int m, int side_id) {
  const Vec2 d = sd.to - sd.from;
  for (int k = 0; k < m; ++k) {
    Panel p;
    p.curve = c;
    p.start = sd.from + d * (static_cast<double>(k) / m);
    p.end = (k + 1 == m) ? sd.to : sd.from + d * (static_cast<double>(k + 1) / m);
    p.midpoint = (p.start + p.end) * 0.5;
    p.length = distance(p.start, p.end);
    p.normal = sd.normal;
    p.owner = owner;
    p.side = side_id;
    p.index_in_side = k;
    out.push_back(p);
  }
}

bool near(Vec2 p, Vec2 q, double tol) { return std::abs(p.x - q.x) <= tol && std::abs(p.y - q.y) <= tol; }

bool on_segment(Vec2 z, Vec2 p, Vec2 q, double tol) {
  const double lo_x = std::min(p.x, q.x) - tol, hi_x = std::max(p.x, q.x) + tol;
  const double lo_y = std::min(p.y, q.y) - tol, hi_y = std::max(p.y, q.y) + tol;
  if (z.x < lo_x || z.x > hi_x || z.y < lo_y || z.y > hi_y) return false;
  // axis-aligned segments only
  if (p.x == q.x) return std::abs(z.x - p.x) <= tol;
  return std::abs(z.y - p.y) <= tol;
}

}  // namespace

std::string_view to_string(Region r) {
  switch (r) {
    case Region::I: return "I";
    case Region::S: return "S";
    case Region::D: return "D";
  }
  return "?";
}

std::string_view to_string(Curve c) {
  switch (c) {
    case Curve::GammaI: return "Gamma_I";
    case Curve::GammaIS: return "Gamma_IS";
    case Curve::GammaS: return "Gamma_S";
    case Curve::GammaSD: return "Gamma_SD";
    case Curve::GammaD: return "Gamma_D";
  }
  return "?";
}

DomainSpec DomainSpec::paper() {
  DomainSpec s;
  s.a = 4.5e-15;
  s.b = 2.5e-15;
  s.h = 0.1 * s.a;
  s.sigma_l = 3.0;
  s.sigma_t = 1.0;
  s.scale = ScalePreset::Paper;
  return s;
}

void DomainSpec::validate() const {
  auto fin = [](double v) { return std::isfinite(v); };
  if (!(fin(a) && fin(b) && fin(h) && fin(sigma_l) && fin(sigma_t)))
    throw Error(Errc::InvalidSpec, "non-finite domain parameter");
  if (!(a > 0.0 && b > 0.0)) throw Error(Errc::InvalidSpec, "a and b must be positive");
  if (!(h > 0.0 && h < 0.5 * a)) throw Error(Errc::InvalidSpec, "septum half-width must satisfy 0 < h < a/2");
  if (!(sigma_t > 0.0)) throw Error(Errc::InvalidSpec, "sigma_t must be positive");
  if (orientation == Orientation::Fibered) {
    if (!(sigma_l > sigma_t)) throw Error(Errc::InvalidSpec, "fibered tensors require sigma_l > sigma_t");
  } else if (!(sigma_l >= sigma_t)) {
    throw Error(Errc::InvalidSpec, "sigma_l must be >= sigma_t");
  }
}

AnisoPair DomainSpec::pair(Region r) const {
  if (r == Region::S && orientation == Orientation::Fibered) return {sigma_t, sigma_l};
  return {sigma_l, sigma_t};
}

std::array<RegionAniso, 3> region_tensors(const DomainSpec& spec) {
  std::array<RegionAniso, 3> out{};
  const std::array<Region, 3> rs = {Region::I, Region::S, Region::D};
  for (std::size_t i = 0; i < 3; ++i) {
    const AnisoPair p = spec.pair(rs[i]);
    out[i] = {rs[i], p.ax, p.ay};
  }
  return out;
}

bool curve_bounds(Curve c, Region region) {
  switch (c) {
    case Curve::GammaI: return region == Region::I;
    case Curve::GammaIS: return region == Region::I || region == Region::S;
    case Curve::GammaS: return region == Region::S;
    case Curve::GammaSD: return region == Region::S || region == Region::D;
    case Curve::GammaD: return region == Region::D;
  }
  return false;
}

Vec2 outward_normal(const Panel& p, Region region) {
  if (region == p.owner) return p.normal;
  if (curve_bounds(p.curve, region)) return -p.normal;
  throw Error(Errc::InvalidSpec,
              std::string(to_string(p.curve)) + " does not bound region " + std::string(to_string(region)));
}

std::span<const Panel> BoundaryMesh::curve(Curve c) const {
  const CurveRange r = ranges[static_cast<std::size_t>(c)];
  return std::span<const Panel>(panels).subspan(static_cast<std::size_t>(r.begin),
                                                static_cast<std::size_t>(r.count));
}

double BoundaryMesh::max_panel_length() const {
  double m = 0.0;
  for (const auto& p : panels) m = std::max(m, p.length);
  return m;
}

double BoundaryMesh::min_panel_length() const {
  double m = panels.empty() ? 0.0 : panels.front().length;
  for (const auto& p : panels) m = std::min(m, p.length);
  return m;
}

int BoundaryMesh::side_count(int side) const {
  return static_cast<int>(std::count_if(panels.begin(), panels.end(), [&](const Panel& p) { return p.side == side; }));
}

int side_count_of(Curve c) {
  switch (c) {
    case Curve::GammaI:
    case Curve::GammaD: return 3;
    case Curve::GammaS: return 2;
    default: return 1;
  }
}

std::vector<int> allocate_panels(std::span<const double> lengths, int n) {
  const int k = static_cast<int>(lengths.size());
  if (n < k) throw Error(Errc::InvalidSpec, "need at least one panel per side");
  double total = 0.0;
  for (double l : lengths) total += l;
  std::vector<int> counts(lengths.size());
  std::vector<double> rem(lengths.size());
  int used = 0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    const double raw = n * lengths[i] / total;
    counts[i] = std::max(1, static_cast<int>(std::floor(raw)));
    rem[i] = raw - counts[i];
    used += counts[i];
  }
  while (used > n) {
    // floor-with-minimum overshoot: take back from the largest count above one
    std::size_t j = 0;
    for (std::size_t i = 0; i < counts.size(); ++i)
      if (counts[i] > 1 && (counts[j] <= 1 || rem[i] < rem[j])) j = i;
    --counts[j];
    rem[j] += 1.0;
    --used;
  }
  while (used < n) {
    std::size_t j = 0;
    for (std::size_t i = 1; i < counts.size(); ++i)
      if (rem[i] > rem[j]) j = i;
    ++counts[j];
    rem[j] -= 1.0;
    ++used;
  }
  return counts;
}

BoundaryMesh build_mesh(const DomainSpec& spec, const std::array<int, 5>& counts) {
  spec.validate();
  BoundaryMesh mesh;
  mesh.spec = spec;
  mesh.nodes_per_curve = counts[0];
  for (Curve c : kAllCurves) {
    const int n = counts[static_cast<std::size_t>(c)];
    const auto sides = sides_of(spec, c);
    if (n < static_cast<int>(sides.size()))
      throw Error(Errc::InvalidSpec, std::string(to_string(c)) + " needs at least " +
                                         std::to_string(sides.size()) + " panels");
    std::vector<double> lengths;
    for (const auto& sd : sides) lengths.push_back(distance(sd.from, sd.to));
    const auto alloc = allocate_panels(lengths, n);
    CurveRange& range = mesh.ranges[static_cast<std::size_t>(c)];
    range.begin = static_cast<int>(mesh.panels.size());
    for (std::size_t i = 0; i < sides.size(); ++i) {
      const int side_id = static_cast<int>(c) * 3 + static_cast<int>(i);
      append_side(mesh.panels, c, owner_of(c), sides[i], alloc[i], side_id);
    }
    range.count = static_cast<int>(mesh.panels.size()) - range.begin;
  }
  mesh.corners = region_corners(spec);
  return mesh;
}

BoundaryMesh build_mesh(const DomainSpec& spec, int nodes_per_curve) {
  if (nodes_per_curve < 3) throw Error(Errc::InvalidSpec, "nodes_per_curve must be >= 3");
  std::array<int, 5> counts{};
  counts.fill(nodes_per_curve);
  return build_mesh(spec, counts);
}

std::vector<CornerInfo> region_corners(const DomainSpec& s) {
  const double a = s.a, b = s.b, xl = s.x_left(), xr = s.x_right();
  const double theta = 0.5 * std::numbers::pi;
  const double c = -theta / (2.0 * std::numbers::pi);
  std::vector<CornerInfo> out;
  auto add = [&](Region r, double x0, double x1) {
    for (Vec2 p : {Vec2{x0, 0}, Vec2{x0, b}, Vec2{x1, 0}, Vec2{x1, b}}) out.push_back({p, theta, c, r});
  };
  add(Region::I, 0.0, xl);
  add(Region::S, xl, xr);
  add(Region::D, xr, a);
  return out;
}

double kappa(const DomainSpec& spec, KappaContext ctx, Vec2 z) {
  const double tol = 1e-12 * spec.scale_length();
  const double a = spec.a, b = spec.b, xl = spec.x_left(), xr = spec.x_right();
  bool on = false;
  Vec2 e0, e1;
  switch (ctx) {
    case KappaContext::I:
      on = on_segment(z, {0, b}, {xl, b}, tol) || on_segment(z, {0, 0}, {0, b}, tol) ||
           on_segment(z, {0, 0}, {xl, 0}, tol);
      e0 = {0, 0};
      e1 = {0, b};
      break;
    case KappaContext::IS:
      on = on_segment(z, {xl, 0}, {xl, b}, tol);
      e0 = {xl, 0};
      e1 = {xl, b};
      break;
    case KappaContext::ISS:
      on = on_segment(z, {xl, 0}, {xl, b}, tol) || on_segment(z, {xl, b}, {xr, b}, tol) ||
           on_segment(z, {xl, 0}, {xr, 0}, tol);
      e0 = {xl, 0};
      e1 = {xl, b};
      break;
    case KappaContext::SD:
      on = on_segment(z, {xr, 0}, {xr, b}, tol);
      e0 = {xr, 0};
      e1 = {xr, b};
      break;
    case KappaContext::SDD:
      on = on_segment(z, {xr, 0}, {xr, b}, tol) || on_segment(z, {xr, b}, {a, b}, tol) ||
           on_segment(z, {a, 0}, {a, b}, tol) || on_segment(z, {xr, 0}, {a, 0}, tol);
      e0 = {a, 0};
      e1 = {a, b};
      break;
  }
  if (!on) throw Error(Errc::OffCurve, "point not on the curve set of this kappa context");
  if (near(z, e0, tol) || near(z, e1, tol)) return 4.0 / 5.0;
  return 2.0 / 3.0;
}

double kappa_consistent(const DomainSpec& spec, Region region, Vec2 z) {
  const double tol = 1e-12 * spec.scale_length();
  for (const auto& c : region_corners(spec))
    if (c.region == region && near(z, c.location, tol)) return 2.0 * std::numbers::pi / c.interior_angle_theta;
  return 2.0;
}

double corner_coefficient(std::span<const CornerInfo> corners, Vec2 z, Side side) {
  double theta = std::numbers::pi;
  double scale = 0.0;
  for (const auto& c : corners) scale = std::max({scale, std::abs(c.location.x), std::abs(c.location.y)});
  const double tol = 1e-12 * std::max(scale, 1e-300);
  for (const auto& c : corners)
    if (near(z, c.location, tol)) {
      theta = c.interior_angle_theta;
      break;
    }
  const double mag = theta / (2.0 * std::numbers::pi);
  return side == Side::Interior ? -mag : mag;
}

std::vector<Panel> closed_rectangle(double x0, double x1, double y0, double y1, int per_side) {
  if (per_side < 1 || !(x1 > x0) || !(y1 > y0)) throw Error(Errc::InvalidSpec, "bad rectangle");
  std::vector<Panel> out;
  // counter-clockwise
  const SideDef sides[4] = {{{x0, y0}, {x1, y0}, {0, -1}},
                            {{x1, y0}, {x1, y1}, {1, 0}},
                            {{x1, y1}, {x0, y1}, {0, 1}},
                            {{x0, y1}, {x0, y0}, {-1, 0}}};
  for (int i = 0; i < 4; ++i) append_side(out, Curve::GammaI, Region::I, sides[i], per_side, i);
  return out;
}

}  // namespace anibem
