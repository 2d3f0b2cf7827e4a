#pragma once

#include <iosfwd>
#include <string>

#include "anibem/config.hpp"
#include "anibem/eigensolve.hpp"
#include "anibem/field.hpp"

namespace anibem {

inline constexpr const char* kVersion = "0.1.0";

/// First line of every CSV: "# mode=<m> kernel_normalization=<n>".
std::string provenance_line(const RunConfig& cfg);

void write_sweep_csv(std::ostream& out, const SweepTable& table, const RunConfig& cfg);
SweepTable read_sweep_csv(std::istream& in);

void write_field_csv(std::ostream& out, const FieldGrid& grid, const RunConfig& cfg);
void write_mesh_csv(std::ostream& out, const BoundaryMesh& mesh, const RunConfig& cfg);
void write_density_csv(std::ostream& out, const Eigen::VectorXd& d, const DensityLayout& lay, const RunConfig& cfg);

/// Ordered panel pairs (i, j), i != j unless cfg.table_self; kernels of the source panel's owner region.
void write_kernel_table_csv(std::ostream& out, const BoundaryMesh& mesh, const RunConfig& cfg);

std::string eigen_json(const Detection& det, const BoundaryMesh& mesh, const RunConfig& cfg);
std::string run_meta_json(const RunConfig& cfg, const std::string& command);

}  // namespace anibem
