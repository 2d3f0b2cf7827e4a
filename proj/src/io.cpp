#include "anibem/io.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "anibem/error.hpp"
#include "json.hpp"

namespace anibem {

namespace {

std::string f(double v) { return format_double(v); }

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

nlohmann::ordered_json result_json(const EigenResult& e) {
  nlohmann::ordered_json j;
  j["lambda_star"] = e.lambda_star;
  j["lambda_star_squared"] = e.lambda_star * e.lambda_star;
  j["indicator"] = e.indicator_at_min;
  j["residual"] = e.residual;
  j["refinement_width"] = e.refinement_width;
  j["mode"] = std::string(to_string(e.mode));
  return j;
}

}  // namespace

std::string provenance_line(const RunConfig& cfg) {
  return "# mode=" + std::string(to_string(cfg.mode)) + " kernel_normalization=" + std::string(to_string(cfg.norm));
}

void write_sweep_csv(std::ostream& out, const SweepTable& t, const RunConfig& cfg) {
  out << provenance_line(cfg) << '\n';
  out << "lambda,sigma_min,sigma_max,indicator,log_abs_det,det_sign\n";
  for (const auto& r : t.rows)
    out << f(r.lambda) << ',' << f(r.sigma_min) << ',' << f(r.sigma_max) << ',' << f(r.indicator) << ','
        << f(r.log_abs_det) << ',' << r.det_sign << '\n';
  if (!out) throw Error(Errc::IoError, "writing sweep table failed");
}

SweepTable read_sweep_csv(std::istream& in) {
  SweepTable t;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "lambda,sigma_min,sigma_max,indicator,log_abs_det,det_sign")
        throw Error(Errc::IoError, "unexpected sweep header");
      header = true;
      continue;
    }
    const auto c = split(line);
    if (c.size() != 6) throw Error(Errc::IoError, "malformed sweep row: " + line);
    try {
      t.rows.push_back({std::stod(c[0]), std::stod(c[1]), std::stod(c[2]), std::stod(c[3]), std::stod(c[4]),
                        std::stoi(c[5])});
    } catch (const std::exception&) {
      throw Error(Errc::IoError, "malformed sweep row: " + line);
    }
  }
  if (!header) throw Error(Errc::IoError, "sweep table has no header");
  return t;
}

void write_field_csv(std::ostream& out, const FieldGrid& g, const RunConfig& cfg) {
  out << provenance_line(cfg) << '\n';
  out << "region,x1,x2,u_raw,u_normalized,lambda\n";
  for (const auto& p : g.points)
    out << to_string(p.region) << ',' << f(p.x.x) << ',' << f(p.x.y) << ',' << f(p.raw) << ',' << f(p.normalized)
        << ',' << f(g.lambda) << '\n';
  if (!out) throw Error(Errc::IoError, "writing field failed");
}

void write_mesh_csv(std::ostream& out, const BoundaryMesh& mesh, const RunConfig& cfg) {
  out << provenance_line(cfg) << '\n';
  out << "curve,panel_index,midpoint_x,midpoint_y,normal_x,normal_y,length\n";
  for (Curve c : kAllCurves) {
    int k = 0;
    for (const Panel& p : mesh.curve(c))
      out << to_string(c) << ',' << k++ << ',' << f(p.midpoint.x) << ',' << f(p.midpoint.y) << ',' << f(p.normal.x)
          << ',' << f(p.normal.y) << ',' << f(p.length) << '\n';
  }
  if (!out) throw Error(Errc::IoError, "writing mesh failed");
}

void write_density_csv(std::ostream& out, const Eigen::VectorXd& d, const DensityLayout& lay, const RunConfig& cfg) {
  out << provenance_line(cfg) << '\n';
  out << "index,block,local_index,value\n";
  for (const auto& b : lay.blocks)
    for (int k = 0; k < b.count; ++k)
      out << b.offset + k << ',' << to_string(b.trace) << ',' << k << ',' << f(d(b.offset + k)) << '\n';
  if (!out) throw Error(Errc::IoError, "writing density failed");
}

void write_kernel_table_csv(std::ostream& out, const BoundaryMesh& mesh, const RunConfig& cfg) {
  out << provenance_line(cfg) << '\n';
  out << "x_panel,y_panel,x_curve,y_curve,region,x1,x2,y1,y2,r,phi,p_star\n";
  const double lam = cfg.table_lambda;
  QuadratureConfig qc = cfg.quad;
  qc.epsilon_c = qc.epsilon_for(mesh.spec);
  for (std::size_t i = 0; i < mesh.panels.size(); ++i) {
    const Panel& px = mesh.panels[i];
    for (std::size_t j = 0; j < mesh.panels.size(); ++j) {
      if (i == j && !cfg.table_self) continue;
      const Panel& py = mesh.panels[j];
      const AnisoPair pair = mesh.spec.pair(py.owner);
      double r = 0.0, ph = 0.0, ps = 0.0;
      if (i == j) {
        ph = integrate_self(SelfKernel::Phi, py, pair, lam, cfg.policy, cfg.norm, qc) / py.length;
      } else {
        const KernelEval k = phi(px.midpoint, py.midpoint, pair, lam, cfg.policy, cfg.norm);
        r = k.r;
        ph = k.value;
        ps = p_star(px.midpoint, py.midpoint, py.normal, pair, lam, cfg.policy, cfg.norm);
      }
      out << i << ',' << j << ',' << to_string(px.curve) << ',' << to_string(py.curve) << ',' << to_string(py.owner)
          << ',' << f(px.midpoint.x) << ',' << f(px.midpoint.y) << ',' << f(py.midpoint.x) << ',' << f(py.midpoint.y)
          << ',' << f(r) << ',' << f(ph) << ',' << f(ps) << '\n';
    }
  }
  if (!out) throw Error(Errc::IoError, "writing kernel table failed");
}

std::string eigen_json(const Detection& det, const BoundaryMesh& mesh, const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["mode"] = std::string(to_string(cfg.mode));
  j["kernel_normalization"] = std::string(to_string(cfg.norm));
  j["mesh"] = {{"nodes_per_curve", mesh.nodes_per_curve},
               {"panels", mesh.panels.size()},
               {"total_size", layout(mesh).total_size},
               {"max_panel_length", mesh.max_panel_length()}};
  if (cfg.refine_index < static_cast<int>(det.eigenvalues.size())) {
    j["selected_index"] = cfg.refine_index;
    j["selected"] = result_json(det.eigenvalues[static_cast<std::size_t>(cfg.refine_index)]);
  } else {
    j["selected_index"] = nullptr;
  }
  auto all = nlohmann::ordered_json::array();
  for (const auto& e : det.eigenvalues) all.push_back(result_json(e));
  j["eigenvalues"] = all;
  auto rej = nlohmann::ordered_json::array();
  for (const auto& r : det.rejected) rej.push_back({{"lambda", r.lambda}, {"indicator", r.indicator}});
  j["rejected"] = rej;
  return j.dump(2) + "\n";
}

std::string run_meta_json(const RunConfig& cfg, const std::string& command) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["version"] = kVersion;
  j["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                       std::to_string(EIGEN_MINOR_VERSION);
  j["mode"] = std::string(to_string(cfg.mode));
  j["kernel_normalization"] = std::string(to_string(cfg.norm));
  j["ill_conditioned_geometry"] = cfg.domain.ill_conditioned();
  j["config"] = nlohmann::ordered_json::parse(config_json(cfg));
  return j.dump(2) + "\n";
}

}  // namespace anibem
