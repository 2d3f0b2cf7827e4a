#pragma once

#include <Eigen/Dense>
#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

#include "anibem/geometry.hpp"
#include "anibem/kernels.hpp"
#include "anibem/quadrature.hpp"
#include "anibem/specialfn.hpp"

namespace anibem {

/// PaperVerbatim transcribes the equation system as written; Consistent re-derives every row from Green's identity.
enum class AssemblyMode { PaperVerbatim, Consistent };

/// Constant: one value per panel. Quadratic: Lagrange interpolation through three neighbouring midpoints.
enum class DensityBasis { Constant, Quadratic };

/// Paper: 2/3 (4/5 at the listed endpoints). Consistent: 2 pi / theta.
enum class KappaConvention { Paper, Consistent };

enum class Trace { U_I_GammaI, U_S_GammaIS, U_S_GammaS, U_D_GammaSD, U_D_GammaD, P_S_GammaIS, P_D_GammaSD };

inline constexpr std::array<Trace, 7> kAllTraces = {Trace::U_I_GammaI,  Trace::U_S_GammaIS, Trace::U_S_GammaS,
                                                    Trace::U_D_GammaSD, Trace::U_D_GammaD,  Trace::P_S_GammaIS,
                                                    Trace::P_D_GammaSD};

std::string_view to_string(Trace t);
Curve curve_of(Trace t);
bool is_flux(Trace t);

struct DensityBlock {
  Trace trace;
  Curve curve;
  int offset;
  int count;
};

struct DensityLayout {
  std::array<DensityBlock, 7> blocks{};
  int total_size = 0;

  const DensityBlock& block(Trace t) const { return blocks[static_cast<std::size_t>(t)]; }

  /// Layout from per-curve node counts (indexed by Curve).
  static DensityLayout from_counts(const std::array<int, 5>& counts);

  bool operator==(const DensityLayout& o) const;
};

DensityLayout layout(const BoundaryMesh& mesh);

/// One collocated equation block: rows on `curve`, kernels of `region`, left-hand trace `lhs`.
struct RowBlock {
  Region region;
  Curve curve;
  Trace lhs;
  int offset;
  int count;
};

std::array<RowBlock, 7> row_blocks(const DensityLayout& layout);

struct AssemblyOptions {
  AssemblyMode mode = AssemblyMode::Consistent;
  KernelNormalization norm = KernelNormalization::Verbatim;
  TermPolicy policy{};
  QuadratureConfig quad{};
  DensityBasis basis = DensityBasis::Quadratic;
  std::optional<KappaConvention> kappa;  // unset: Paper for PaperVerbatim, Consistent otherwise
  int threads = 1;

  KappaConvention kappa_convention() const {
    return kappa.value_or(mode == AssemblyMode::PaperVerbatim ? KappaConvention::Paper : KappaConvention::Consistent);
  }
};

/// A boundary integral contributing to a region's representation formula.
struct LayerTerm {
  Curve curve;
  Trace trace;
  bool double_layer;    // true: u p*, false: p u*
  double coefficient;   // sign of the integral in u = sum coefficient * integral
  bool kappa_exempt;    // verbatim mode: integral carries no kappa in rows on Gamma_S and Gamma_IS
};

/// Terms of region's representation formula. Rows on Gamma_SD of region S never use kappa_exempt.
std::vector<LayerTerm> region_terms(Region region, AssemblyMode mode, KernelNormalization norm);

/// Density on panel `panel` is sum_k u_k (c[0] + c[1] s + c[2] s^2), s measured from the panel midpoint.
struct StencilEntry {
  int panel;  // mesh panel index
  std::array<double, 3> c;
};

std::vector<StencilEntry> basis_stencil(const BoundaryMesh& mesh, int panel, DensityBasis basis);

struct SystemMatrix {
  double lambda = 0.0;
  Eigen::MatrixXd entries;
  DensityLayout layout;
  AssemblyMode mode = AssemblyMode::Consistent;
  bool near_singular_warning = false;
};

/// Reusable assembler: geometry (distances, normal projections, quadrature weights) is tabulated once.
class Assembler {
 public:
  Assembler(const BoundaryMesh& mesh, AssemblyOptions options);

  SystemMatrix assemble(double lambda) const { return assemble(lambda, options_.threads); }
  SystemMatrix assemble(double lambda, int threads) const;

  const DensityLayout& layout() const { return layout_; }
  const BoundaryMesh& mesh() const { return mesh_; }
  const AssemblyOptions& options() const { return options_; }
  double row_kappa(int row) const { return rows_[static_cast<std::size_t>(row)].kappa; }
  std::size_t node_count() const { return node_r_.size(); }

 private:
  struct Column {
    int col;
    std::array<double, 3> c;
  };
  struct Contribution {
    double scale;  // coefficient * kappa
    bool double_layer;
    int col_begin, col_end;  // into cols_
  };
  struct PairRecord {
    int source_panel;
    bool self;
    int node_begin, node_end;
    int contrib_begin, contrib_end;
  };
  struct Row {
    int lhs_col;
    int panel;
    Region region;
    double kappa;
    int pair_begin, pair_end;
  };

  void build();
  void fill_row(int row, double lambda, Eigen::MatrixXd& a) const;

  BoundaryMesh mesh_;
  AssemblyOptions options_;
  DensityLayout layout_;
  std::vector<Row> rows_;
  std::vector<PairRecord> pairs_;
  std::vector<Contribution> contribs_;
  std::vector<Column> cols_;
  // per quadrature node
  std::vector<double> node_r_, node_dn_, node_w_, node_ws_, node_wss_;
  bool capped_ = false;
};

/// One-shot assembly.
SystemMatrix assemble(double lambda, const BoundaryMesh& mesh, const AssemblyOptions& options);

/// Throws DimensionMismatch.
Eigen::VectorXd apply(const SystemMatrix& matrix, const Eigen::VectorXd& d);

/// Binary dump: "BIEM", u32 size, u64 reserved (0), then size*size row-major little-endian doubles.
void write_binary(const SystemMatrix& matrix, std::ostream& out);
Eigen::MatrixXd read_binary(std::istream& in);

/// Runs f(begin, end) over [0, n) split into `threads` contiguous chunks.
void parallel_for(int n, int threads, const std::function<void(int, int)>& f);

}  // namespace anibem
