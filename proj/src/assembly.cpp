#include "anibem/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <exception>
#include <istream>
#include <ostream>
#include <string>
#include <thread>

#include "anibem/error.hpp"

namespace anibem {

namespace {

std::vector<Curve> boundary_of(Region r) {
  switch (r) {
    case Region::I: return {Curve::GammaI, Curve::GammaIS};
    case Region::S: return {Curve::GammaS, Curve::GammaIS, Curve::GammaSD};
    case Region::D: return {Curve::GammaSD, Curve::GammaD};
  }
  return {};
}

KappaContext kappa_context(Region r, Curve c) {
  if (r == Region::I) return c == Curve::GammaI ? KappaContext::I : KappaContext::IS;
  if (r == Region::S) return c == Curve::GammaSD ? KappaContext::SD : KappaContext::ISS;
  return KappaContext::SDD;
}

// ascending coefficients of the Lagrange basis polynomial for node a
std::array<double, 3> lagrange(const std::vector<double>& nodes, std::size_t a) {
  std::array<double, 3> poly{1.0, 0.0, 0.0};
  int deg = 0;
  for (std::size_t b = 0; b < nodes.size(); ++b) {
    if (b == a) continue;
    const double inv = 1.0 / (nodes[a] - nodes[b]);
    std::array<double, 3> next{0.0, 0.0, 0.0};
    for (int k = 0; k <= deg; ++k) {
      next[static_cast<std::size_t>(k)] += -nodes[b] * poly[static_cast<std::size_t>(k)] * inv;
      next[static_cast<std::size_t>(k + 1)] += poly[static_cast<std::size_t>(k)] * inv;
    }
    poly = next;
    ++deg;
  }
  return poly;
}

}  // namespace

std::string_view to_string(Trace t) {
  switch (t) {
    case Trace::U_I_GammaI: return "u_I|Gamma_I";
    case Trace::U_S_GammaIS: return "u_S|Gamma_IS";
    case Trace::U_S_GammaS: return "u_S|Gamma_S";
    case Trace::U_D_GammaSD: return "u_D|Gamma_SD";
    case Trace::U_D_GammaD: return "u_D|Gamma_D";
    case Trace::P_S_GammaIS: return "p_S|Gamma_IS";
    case Trace::P_D_GammaSD: return "p_D|Gamma_SD";
  }
  return "?";
}

Curve curve_of(Trace t) {
  switch (t) {
    case Trace::U_I_GammaI: return Curve::GammaI;
    case Trace::U_S_GammaIS:
    case Trace::P_S_GammaIS: return Curve::GammaIS;
    case Trace::U_S_GammaS: return Curve::GammaS;
    case Trace::U_D_GammaSD:
    case Trace::P_D_GammaSD: return Curve::GammaSD;
    case Trace::U_D_GammaD: return Curve::GammaD;
  }
  return Curve::GammaI;
}

bool is_flux(Trace t) { return t == Trace::P_S_GammaIS || t == Trace::P_D_GammaSD; }

DensityLayout DensityLayout::from_counts(const std::array<int, 5>& counts) {
  DensityLayout out;
  int offset = 0;
  for (std::size_t i = 0; i < kAllTraces.size(); ++i) {
    const Trace t = kAllTraces[i];
    const Curve c = curve_of(t);
    const int n = counts[static_cast<std::size_t>(c)];
    if (n < 1) throw Error(Errc::InvalidSpec, "every block needs at least one node");
    out.blocks[i] = {t, c, offset, n};
    offset += n;
  }
  out.total_size = offset;
  return out;
}

bool DensityLayout::operator==(const DensityLayout& o) const {
  if (total_size != o.total_size) return false;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto &x = blocks[i], &y = o.blocks[i];
    if (x.trace != y.trace || x.curve != y.curve || x.offset != y.offset || x.count != y.count) return false;
  }
  return true;
}

DensityLayout layout(const BoundaryMesh& mesh) {
  std::array<int, 5> counts{};
  for (Curve c : kAllCurves) counts[static_cast<std::size_t>(c)] = mesh.ranges[static_cast<std::size_t>(c)].count;
  return DensityLayout::from_counts(counts);
}

std::array<RowBlock, 7> row_blocks(const DensityLayout& lay) {
  const std::array<std::tuple<Region, Curve, Trace>, 7> defs = {{
      {Region::I, Curve::GammaI, Trace::U_I_GammaI},
      {Region::I, Curve::GammaIS, Trace::U_S_GammaIS},
      {Region::S, Curve::GammaS, Trace::U_S_GammaS},
      {Region::S, Curve::GammaIS, Trace::U_S_GammaIS},
      {Region::S, Curve::GammaSD, Trace::U_D_GammaSD},
      {Region::D, Curve::GammaD, Trace::U_D_GammaD},
      {Region::D, Curve::GammaSD, Trace::U_D_GammaSD},
  }};
  std::array<RowBlock, 7> out{};
  int offset = 0;
  for (std::size_t i = 0; i < defs.size(); ++i) {
    const auto [r, c, t] = defs[i];
    const int n = lay.block(t).count;
    out[i] = {r, c, t, offset, n};
    offset += n;
  }
  return out;
}

std::vector<LayerTerm> region_terms(Region region, AssemblyMode mode, KernelNormalization norm) {
  const bool paper = mode == AssemblyMode::PaperVerbatim;
  // with the kernel sign flipped, Green's identity flips the whole right-hand side
  const double g = paper ? 1.0 : normalization_sign(norm);
  const double cross = paper ? -1.0 : 1.0;  // flux owned by the neighbouring region
  switch (region) {
    case Region::I:
      return {{Curve::GammaI, Trace::U_I_GammaI, true, g, false},
              {Curve::GammaIS, Trace::U_S_GammaIS, true, g, false},
              {Curve::GammaIS, Trace::P_S_GammaIS, false, g * cross, false}};
    case Region::S:
      return {{Curve::GammaS, Trace::U_S_GammaS, true, g, false},
              {Curve::GammaIS, Trace::U_S_GammaIS, true, g, false},
              {Curve::GammaIS, Trace::P_S_GammaIS, false, -g, false},
              {Curve::GammaSD, Trace::U_D_GammaSD, true, g, false},
              {Curve::GammaSD, Trace::P_D_GammaSD, false, g * cross, paper}};
    case Region::D:
      return {{Curve::GammaSD, Trace::U_D_GammaSD, true, g, false},
              {Curve::GammaSD, Trace::P_D_GammaSD, false, -g, false},
              {Curve::GammaD, Trace::U_D_GammaD, true, g, false}};
  }
  return {};
}

std::vector<StencilEntry> basis_stencil(const BoundaryMesh& mesh, int panel, DensityBasis basis) {
  const Panel& p = mesh.panels[static_cast<std::size_t>(panel)];
  if (basis == DensityBasis::Constant) return {{panel, {1.0, 0.0, 0.0}}};
  // panels of one side are contiguous in the mesh
  int first = panel;
  while (first > 0 && mesh.panels[static_cast<std::size_t>(first - 1)].side == p.side) --first;
  int last = panel;
  while (last + 1 < static_cast<int>(mesh.panels.size()) && mesh.panels[static_cast<std::size_t>(last + 1)].side == p.side)
    ++last;
  const int m = last - first + 1;
  const int k = std::min(3, m);
  const int idx = panel - first;
  const int lo = std::clamp(idx - (k - 1) / 2, 0, m - k);
  const Vec2 t = p.tangent();
  std::vector<double> nodes;
  for (int q = 0; q < k; ++q) nodes.push_back(dot(mesh.panels[static_cast<std::size_t>(first + lo + q)].midpoint - p.midpoint, t));
  std::vector<StencilEntry> out;
  for (int q = 0; q < k; ++q) out.push_back({first + lo + q, lagrange(nodes, static_cast<std::size_t>(q))});
  return out;
}

Assembler::Assembler(const BoundaryMesh& mesh, AssemblyOptions options)
    : mesh_(mesh), options_(std::move(options)), layout_(anibem::layout(mesh)) {
  options_.policy.validate();
  if (options_.quad.epsilon_c <= 0.0) options_.quad.epsilon_c = options_.quad.epsilon_for(mesh_.spec);
  options_.quad.validate(mesh_.min_panel_length());
  build();
}

void Assembler::build() {
  const auto blocks = row_blocks(layout_);
  const KappaConvention kc = options_.kappa_convention();
  const QuadratureConfig& qc = options_.quad;

  // stencils, per mesh panel, for each basis
  std::vector<std::vector<StencilEntry>> stencil(mesh_.panels.size());
  for (std::size_t j = 0; j < mesh_.panels.size(); ++j)
    stencil[j] = basis_stencil(mesh_, static_cast<int>(j), options_.basis);

  PanelRule rule;
  for (const RowBlock& rb : blocks) {
    const CurveRange target_range = mesh_.ranges[static_cast<std::size_t>(rb.curve)];
    const auto terms = region_terms(rb.region, options_.mode, options_.norm);
    for (int i = 0; i < rb.count; ++i) {
      const int tpanel = target_range.begin + i;
      const Vec2 z = mesh_.panels[static_cast<std::size_t>(tpanel)].midpoint;
      Row row;
      row.lhs_col = layout_.block(rb.lhs).offset + i;
      row.panel = tpanel;
      row.region = rb.region;
      row.kappa = kc == KappaConvention::Paper ? kappa(mesh_.spec, kappa_context(rb.region, rb.curve), z)
                                               : kappa_consistent(mesh_.spec, rb.region, z);
      row.pair_begin = static_cast<int>(pairs_.size());
      for (Curve sc : boundary_of(rb.region)) {
        const CurveRange sr = mesh_.ranges[static_cast<std::size_t>(sc)];
        for (int j = sr.begin; j < sr.begin + sr.count; ++j) {
          const Panel& src = mesh_.panels[static_cast<std::size_t>(j)];
          PairRecord pr;
          pr.source_panel = j;
          pr.self = j == tpanel;
          pr.node_begin = pr.node_end = static_cast<int>(node_r_.size());
          pr.contrib_begin = static_cast<int>(contribs_.size());
          for (const LayerTerm& t : terms) {
            if (t.curve != sc) continue;
            if (pr.self && t.double_layer) continue;  // flat panel
            const bool exempt = t.kappa_exempt && rb.curve != Curve::GammaSD;
            Contribution cb;
            cb.scale = t.coefficient * (exempt ? 1.0 : row.kappa);
            cb.double_layer = t.double_layer;
            cb.col_begin = static_cast<int>(cols_.size());
            const DensityBlock& blk = layout_.block(t.trace);
            for (const StencilEntry& se : stencil[static_cast<std::size_t>(j)])
              cols_.push_back({blk.offset + (se.panel - sr.begin), se.c});
            cb.col_end = static_cast<int>(cols_.size());
            contribs_.push_back(cb);
          }
          pr.contrib_end = static_cast<int>(contribs_.size());
          if (pr.contrib_end == pr.contrib_begin) continue;
          if (!pr.self) {
            rule.nodes.clear();
            rule.capped = false;
            panel_rule(src, z, qc, rule);
            capped_ = capped_ || rule.capped;
            const Vec2 n = outward_normal(src, rb.region);
            const AnisoPair pair = mesh_.spec.pair(rb.region);
            for (const QuadNode& nd : rule.nodes) {
              const Vec2 y = src.at(nd.s);
              node_r_.push_back(aniso_distance(z, y, pair));
              node_dn_.push_back(dot(z - y, n));
              node_w_.push_back(nd.w);
              node_ws_.push_back(nd.w * nd.s);
              node_wss_.push_back(nd.w * nd.s * nd.s);
            }
            pr.node_end = static_cast<int>(node_r_.size());
          }
          pairs_.push_back(pr);
        }
      }
      row.pair_end = static_cast<int>(pairs_.size());
      rows_.push_back(row);
    }
  }
}

void Assembler::fill_row(int ri, double lambda, Eigen::MatrixXd& a) const {
  const Row& row = rows_[static_cast<std::size_t>(ri)];
  const AnisoPair pair = mesh_.spec.pair(row.region);
  const double pre = normalization_sign(options_.norm) / (4.0 * std::sqrt(pair.ax * pair.ay));
  a(ri, row.lhs_col) += 1.0;
  for (int pi = row.pair_begin; pi < row.pair_end; ++pi) {
    const PairRecord& pr = pairs_[static_cast<std::size_t>(pi)];
    std::array<double, 3> mg{0.0, 0.0, 0.0};
    std::array<double, 3> md{0.0, 0.0, 0.0};
    if (pr.self) {
      mg = self_moments_phi(mesh_.panels[static_cast<std::size_t>(pr.source_panel)], pair, lambda, options_.policy,
                            options_.norm, options_.quad);
    } else {
      for (int q = pr.node_begin; q < pr.node_end; ++q) {
        const auto uq = static_cast<std::size_t>(q);
        const double rq = node_r_[uq];
        const BesselValues bv = bessel_series(lambda * rq, options_.policy);
        const double g = pre * bv.y0;
        const double d = pre * lambda * bv.y1 / rq * node_dn_[uq];
        mg[0] += g * node_w_[uq];
        mg[1] += g * node_ws_[uq];
        mg[2] += g * node_wss_[uq];
        md[0] += d * node_w_[uq];
        md[1] += d * node_ws_[uq];
        md[2] += d * node_wss_[uq];
      }
    }
    for (int ci = pr.contrib_begin; ci < pr.contrib_end; ++ci) {
      const Contribution& cb = contribs_[static_cast<std::size_t>(ci)];
      const auto& m = cb.double_layer ? md : mg;
      for (int k = cb.col_begin; k < cb.col_end; ++k) {
        const Column& col = cols_[static_cast<std::size_t>(k)];
        a(ri, col.col) -= cb.scale * (col.c[0] * m[0] + col.c[1] * m[1] + col.c[2] * m[2]);
      }
    }
  }
}

SystemMatrix Assembler::assemble(double lambda, int threads) const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(Errc::DomainError, "assembly requires lambda > 0");
  SystemMatrix out;
  out.lambda = lambda;
  out.layout = layout_;
  out.mode = options_.mode;
  out.near_singular_warning = capped_;
  out.entries = Eigen::MatrixXd::Zero(layout_.total_size, layout_.total_size);
  Eigen::MatrixXd& a = out.entries;
  parallel_for(static_cast<int>(rows_.size()), threads, [&](int begin, int end) {
    for (int i = begin; i < end; ++i) fill_row(i, lambda, a);
  });
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (!std::isfinite(a(i, j)))
        throw Error(Errc::QuadratureFailure, "non-finite entry at row " + std::to_string(i) + ", column " +
                                                 std::to_string(j) + ", lambda " + std::to_string(lambda));
  return out;
}

SystemMatrix assemble(double lambda, const BoundaryMesh& mesh, const AssemblyOptions& options) {
  return Assembler(mesh, options).assemble(lambda);
}

Eigen::VectorXd apply(const SystemMatrix& matrix, const Eigen::VectorXd& d) {
  if (d.size() != matrix.entries.cols())
    throw Error(Errc::DimensionMismatch, "density has " + std::to_string(d.size()) + " entries, matrix has " +
                                             std::to_string(matrix.entries.cols()) + " columns");
  return matrix.entries * d;
}

void write_binary(const SystemMatrix& matrix, std::ostream& out) {
  const auto n = static_cast<std::uint32_t>(matrix.entries.rows());
  const std::uint64_t reserved = 0;
  out.write("BIEM", 4);
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(&reserved), sizeof reserved);
  for (Eigen::Index i = 0; i < matrix.entries.rows(); ++i)
    for (Eigen::Index j = 0; j < matrix.entries.cols(); ++j) {
      const double v = matrix.entries(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
  if (!out) throw Error(Errc::IoError, "matrix dump write failed");
}

Eigen::MatrixXd read_binary(std::istream& in) {
  char magic[4];
  std::uint32_t n = 0;
  std::uint64_t reserved = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  in.read(reinterpret_cast<char*>(&reserved), sizeof reserved);
  if (!in || std::memcmp(magic, "BIEM", 4) != 0) throw Error(Errc::IoError, "not a BIEM matrix dump");
  Eigen::MatrixXd m(n, n);
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < n; ++j) in.read(reinterpret_cast<char*>(&m(i, j)), sizeof(double));
  if (!in) throw Error(Errc::IoError, "truncated BIEM matrix dump");
  return m;
}

void parallel_for(int n, int threads, const std::function<void(int, int)>& f) {
  if (n <= 0) return;
  const int t = std::clamp(threads, 1, n);
  if (t == 1) {
    f(0, n);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(t));
  std::vector<std::thread> pool;
  for (int k = 0; k < t; ++k) {
    const int b = static_cast<int>(static_cast<long long>(n) * k / t);
    const int e = static_cast<int>(static_cast<long long>(n) * (k + 1) / t);
    pool.emplace_back([&, k, b, e] {
      try {
        f(b, e);
      } catch (...) {
        errors[static_cast<std::size_t>(k)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& ep : errors)
    if (ep) std::rethrow_exception(ep);
}

}  // namespace anibem
