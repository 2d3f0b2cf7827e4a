#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "anibem/assembly.hpp"
#include "anibem/eigensolve.hpp"

namespace anibem {

enum class Preset { Unit, Paper, HomogeneousIso, HomogeneousAniso };

/// intra: (sigma_l, sigma_t) = (3, 1); extra: (2, 1.65).
enum class CellPair { Intra, Extra };

struct RunConfig {
  Preset preset = Preset::Unit;
  CellPair cell_pair = CellPair::Intra;
  DomainSpec domain{};
  int nodes_per_curve = 40;
  TermPolicy policy{};
  QuadratureConfig quad{};
  AssemblyMode mode = AssemblyMode::Consistent;
  KernelNormalization norm = KernelNormalization::Verbatim;
  DensityBasis basis = DensityBasis::Quadratic;
  std::optional<KappaConvention> kappa;
  double lambda_min = 1.0;
  double lambda_max = 7.0;
  int steps = 600;
  double refine_tol = 1e-8;
  double indicator_floor = 1e-4;
  int refine_index = 0;  // which detected eigenvalue feeds density/field output
  int field_nx = 20;
  int field_ny = 20;
  double table_lambda = 1.0;
  bool table_self = false;
  std::string output_dir = "out";

  /// Throws Error(InvalidSpec) or Error(ConfigError).
  void validate() const;
  AssemblyOptions assembly_options(int threads) const;
  RefineOptions refine_options(int threads) const;

  bool operator==(const RunConfig&) const = default;
};

/// Pure expansion: every call with the same preset returns the same config.
RunConfig expand_preset(Preset preset);

/// key = value lines; '#' starts a comment. `preset` is applied first, then `cell_pair`, then other keys in order.
RunConfig parse_config(std::string_view text);

/// Applies `key=value` overrides to an existing config.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

/// Every key, fixed order, doubles printed to round-trip exactly.
std::string serialize_config(const RunConfig& cfg);

/// Same content as JSON.
std::string config_json(const RunConfig& cfg);

std::string_view to_string(Preset p);
std::string_view to_string(AssemblyMode m);
std::string_view to_string(KernelNormalization n);
std::string_view to_string(SelfMode m);
Preset parse_preset(std::string_view s);
AssemblyMode parse_mode(std::string_view s);
SelfMode parse_self_mode(std::string_view s);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace anibem
