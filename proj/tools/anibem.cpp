#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "anibem/error.hpp"
#include "anibem/io.hpp"
#include "anibem/validate.hpp"

namespace fs = std::filesystem;
using namespace anibem;

namespace {

enum Exit { Ok = 0, ValidationFailed = 1, ConfigFailure = 2, NumericalFailure = 3 };

struct Flags {
  std::string config_path;
  std::string preset;
  std::string mode;
  std::string self_quad;
  std::string out;
  std::vector<std::string> sets;
  int threads = 0;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// command-line values are appended as config lines so the last one wins
RunConfig load(const Flags& f) {
  std::string text;
  if (!f.config_path.empty()) {
    try {
      text = slurp(f.config_path);
    } catch (const Error& e) {
      throw Error(Errc::ConfigError, e.what());
    }
  }
  text += '\n';
  if (!f.preset.empty()) text += "preset = " + f.preset + '\n';
  for (const auto& s : f.sets) {
    if (s.find('=') == std::string::npos) throw Error(Errc::ConfigError, "--set expects key=value, got '" + s + "'");
    text += s + '\n';
  }
  if (!f.mode.empty()) text += "mode = " + f.mode + '\n';
  if (!f.self_quad.empty()) text += "self_quad = " + f.self_quad + '\n';
  if (!f.out.empty()) text += "output_dir = " + f.out + '\n';
  RunConfig cfg = parse_config(text);
  cfg.validate();
  return cfg;
}

int thread_count(const Flags& f) {
  if (f.threads > 0) return f.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

fs::path out_dir(const RunConfig& cfg) {
  fs::path d(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(d, ec);
  if (ec) throw Error(Errc::IoError, "cannot create " + d.string() + ": " + ec.message());
  return d;
}

template <class F>
void write_file(const fs::path& p, F&& body) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + p.string());
  body(out);
  out.flush();
  if (!out) throw Error(Errc::IoError, "write failed: " + p.string());
}

void write_text(const fs::path& p, const std::string& s) {
  write_file(p, [&](std::ostream& o) { o << s; });
}

void write_meta(const RunConfig& cfg, const std::string& cmd) {
  write_text(out_dir(cfg) / "run_meta.json", run_meta_json(cfg, cmd));
}

SweepTable run_sweep(const RunConfig& cfg, const Assembler& as, int threads) {
  const SweepTable t = sweep(as, cfg.lambda_min, cfg.lambda_max, cfg.steps, threads);
  write_file(out_dir(cfg) / "sweep.csv", [&](std::ostream& o) { write_sweep_csv(o, t, cfg); });
  if (t.near_singular_warning) std::cerr << "warning: near-singular subdivision depth capped\n";
  return t;
}

// the stored sweep is reused only when its grid matches the config
SweepTable sweep_or_load(const RunConfig& cfg, const Assembler& as, int threads) {
  const fs::path p = fs::path(cfg.output_dir) / "sweep.csv";
  if (fs::exists(p)) {
    std::ifstream in(p, std::ios::binary);
    SweepTable t = read_sweep_csv(in);
    if (static_cast<int>(t.rows.size()) == cfg.steps && std::abs(t.rows.front().lambda - cfg.lambda_min) <= 1e-12 * cfg.lambda_max &&
        std::abs(t.rows.back().lambda - cfg.lambda_max) <= 1e-12 * cfg.lambda_max)
      return t;
    std::cerr << "note: " << p.string() << " does not match the configured grid; sweeping again\n";
  }
  return run_sweep(cfg, as, threads);
}

struct Refined {
  Detection det;
  const EigenResult* selected = nullptr;
};

Refined run_refine(const RunConfig& cfg, const BoundaryMesh& mesh, const Assembler& as, int threads) {
  const SweepTable t = sweep_or_load(cfg, as, threads);
  Refined r{detect(t, as, cfg.refine_options(threads))};
  const fs::path d = out_dir(cfg);
  write_text(d / "eigen.json", eigen_json(r.det, mesh, cfg));
  if (cfg.refine_index >= static_cast<int>(r.det.eigenvalues.size()))
    throw Error(Errc::NoRankLoss, "no eigenvalue with index " + std::to_string(cfg.refine_index) + " (found " +
                                      std::to_string(r.det.eigenvalues.size()) + ")");
  r.selected = &r.det.eigenvalues[static_cast<std::size_t>(cfg.refine_index)];
  write_file(d / "density.csv",
             [&](std::ostream& o) { write_density_csv(o, r.selected->null_density, as.layout(), cfg); });
  std::cout.precision(12);
  for (std::size_t i = 0; i < r.det.eigenvalues.size(); ++i) {
    const auto& e = r.det.eigenvalues[i];
    std::cout << i << ' ' << e.lambda_star << " indicator=" << e.indicator_at_min << " residual=" << e.residual
              << '\n';
  }
  return r;
}

int dispatch(const std::string& cmd, const Flags& f) {
  const RunConfig cfg = load(f);
  const int threads = thread_count(f);
  if (cmd == "validate") {
    const ValidationReport rep = run_validation(cfg, threads);
    std::cout << rep.text();
    write_text(out_dir(cfg) / "validate.json", rep.json());
    write_meta(cfg, cmd);
    return rep.passed() ? Ok : ValidationFailed;
  }
  const BoundaryMesh mesh = build_mesh(cfg.domain, cfg.nodes_per_curve);
  if (cmd == "mesh-dump") {
    write_file(out_dir(cfg) / "mesh.csv", [&](std::ostream& o) { write_mesh_csv(o, mesh, cfg); });
  } else if (cmd == "kernel-table") {
    write_file(out_dir(cfg) / "kernel_table.csv", [&](std::ostream& o) { write_kernel_table_csv(o, mesh, cfg); });
  } else {
    const Assembler as(mesh, cfg.assembly_options(1));
    if (cmd == "sweep") {
      run_sweep(cfg, as, threads);
    } else {
      const Refined r = run_refine(cfg, mesh, as, threads);
      if (cmd == "field") {
        const FieldGrid g =
            field_grid(mesh, r.selected->null_density, r.selected->lambda_star, cfg.field_nx, cfg.field_ny,
                       cfg.assembly_options(1), threads);
        write_file(out_dir(cfg) / "field.csv", [&](std::ostream& o) { write_field_csv(o, g, cfg); });
      }
    }
  }
  write_meta(cfg, cmd);
  return Ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary-element eigenvalues of the anisotropic Helmholtz operator on a three-phase rectangle"};
  app.require_subcommand(1, 1);
  Flags f;
  app.add_option("--config", f.config_path, "key = value config file");
  app.add_option("--preset", f.preset, "unit | paper | homogeneous-iso | homogeneous-aniso");
  app.add_option("--mode", f.mode, "assembly mode")->check(CLI::IsMember({"paper", "consistent"}));
  app.add_option("--self-quad", f.self_quad, "self-panel quadrature")->check(CLI::IsMember({"epsilon", "logsplit"}));
  app.add_option("--threads", f.threads, "worker threads (default: available cores)")->check(CLI::PositiveNumber);
  app.add_option("--out", f.out, "output directory");
  app.add_option("--set", f.sets, "override one config key (key=value), repeatable");

  const std::vector<std::pair<std::string, std::string>> subs = {
      {"validate", "special functions, jump relations, homogeneous spectrum"},
      {"sweep", "indicator sweep over [lambda_min, lambda_max] -> sweep.csv"},
      {"refine", "refine sweep minima -> eigen.json, density.csv"},
      {"field", "refine, then evaluate the eigenfunction -> field.csv"},
      {"mesh-dump", "panel table -> mesh.csv"},
      {"kernel-table", "pairwise kernel values -> kernel_table.csv"}};
  for (const auto& [name, help] : subs) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? Ok : ConfigFailure;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    return dispatch(cmd, f);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.code()) {
      case Errc::ConfigError:
      case Errc::InvalidSpec:
      case Errc::IoError:
        return ConfigFailure;
      default:
        return NumericalFailure;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return NumericalFailure;
  }
}
