#include "anibem/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "anibem/error.hpp"
#include "json.hpp"

namespace anibem {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(std::string_view key, std::string_view value) {
  throw Error(Errc::ConfigError, "invalid value '" + std::string(value) + "' for key '" + std::string(key) + "'");
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) bad(key, v);
  return out;
}

int to_int(std::string_view key, std::string_view v) {
  int out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) bad(key, v);
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad(key, v);
}

std::string_view to_string(CellPair c) { return c == CellPair::Intra ? "intra" : "extra"; }
std::string_view to_string(Orientation o) { return o == Orientation::Fibered ? "fibered" : "uniform"; }
std::string_view to_string(ScalePreset s) { return s == ScalePreset::Unit ? "unit" : "paper"; }
std::string_view to_string(TermMode m) { return m == TermMode::Adaptive ? "adaptive" : "paper"; }
std::string_view to_string(DensityBasis b) { return b == DensityBasis::Quadratic ? "quadratic" : "constant"; }

std::string_view kappa_string(const std::optional<KappaConvention>& k) {
  if (!k) return "auto";
  return *k == KappaConvention::Paper ? "paper" : "consistent";
}

void apply_cell_pair(RunConfig& c) {
  if (c.cell_pair == CellPair::Intra) {
    c.domain.sigma_l = 3.0;
    c.domain.sigma_t = 1.0;
  } else {
    c.domain.sigma_l = 2.0;
    c.domain.sigma_t = 1.65;
  }
}

struct Entry {
  std::string key;
  std::string value;
};

std::vector<Entry> entries(const RunConfig& c) {
  return {
      {"preset", std::string(to_string(c.preset))},
      {"cell_pair", std::string(to_string(c.cell_pair))},
      {"a", format_double(c.domain.a)},
      {"b", format_double(c.domain.b)},
      {"h", format_double(c.domain.h)},
      {"sigma_l", format_double(c.domain.sigma_l)},
      {"sigma_t", format_double(c.domain.sigma_t)},
      {"orientation", std::string(to_string(c.domain.orientation))},
      {"scale", std::string(to_string(c.domain.scale))},
      {"nodes_per_curve", std::to_string(c.nodes_per_curve)},
      {"term_mode", std::string(to_string(c.policy.mode))},
      {"fixed_terms", std::to_string(c.policy.fixed_terms)},
      {"adaptive_rel_tol", format_double(c.policy.adaptive_rel_tol)},
      {"max_terms", std::to_string(c.policy.max_terms)},
      {"gauss_order", std::to_string(c.quad.gauss_order)},
      {"self_quad", std::string(to_string(c.quad.self_mode))},
      {"epsilon_c", format_double(c.quad.epsilon_c)},
      {"near_threshold", format_double(c.quad.near_threshold)},
      {"max_levels", std::to_string(c.quad.max_levels)},
      {"mode", std::string(to_string(c.mode))},
      {"kernel_normalization", std::string(to_string(c.norm))},
      {"density_basis", std::string(to_string(c.basis))},
      {"kappa", std::string(kappa_string(c.kappa))},
      {"lambda_min", format_double(c.lambda_min)},
      {"lambda_max", format_double(c.lambda_max)},
      {"steps", std::to_string(c.steps)},
      {"refine_tol", format_double(c.refine_tol)},
      {"indicator_floor", format_double(c.indicator_floor)},
      {"refine_index", std::to_string(c.refine_index)},
      {"field_nx", std::to_string(c.field_nx)},
      {"field_ny", std::to_string(c.field_ny)},
      {"table_lambda", format_double(c.table_lambda)},
      {"table_self", c.table_self ? "true" : "false"},
      {"output_dir", c.output_dir},
  };
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string_view to_string(Preset p) {
  switch (p) {
    case Preset::Unit: return "unit";
    case Preset::Paper: return "paper";
    case Preset::HomogeneousIso: return "homogeneous-iso";
    case Preset::HomogeneousAniso: return "homogeneous-aniso";
  }
  return "?";
}

std::string_view to_string(AssemblyMode m) { return m == AssemblyMode::Consistent ? "consistent" : "paper"; }
std::string_view to_string(KernelNormalization n) { return n == KernelNormalization::Verbatim ? "verbatim" : "negated"; }
std::string_view to_string(SelfMode m) { return m == SelfMode::LogSplit ? "logsplit" : "epsilon"; }

Preset parse_preset(std::string_view s) {
  if (s == "unit") return Preset::Unit;
  if (s == "paper") return Preset::Paper;
  if (s == "homogeneous-iso") return Preset::HomogeneousIso;
  if (s == "homogeneous-aniso") return Preset::HomogeneousAniso;
  bad("preset", s);
}

AssemblyMode parse_mode(std::string_view s) {
  if (s == "consistent") return AssemblyMode::Consistent;
  if (s == "paper") return AssemblyMode::PaperVerbatim;
  bad("mode", s);
}

SelfMode parse_self_mode(std::string_view s) {
  if (s == "logsplit") return SelfMode::LogSplit;
  if (s == "epsilon") return SelfMode::PaperEpsilon;
  bad("self_quad", s);
}

RunConfig expand_preset(Preset preset) {
  RunConfig c;
  c.preset = preset;
  switch (preset) {
    case Preset::Unit:
      break;
    case Preset::Paper:
      c.domain = DomainSpec::paper();
      c.nodes_per_curve = 5;
      c.policy = TermPolicy::paper();
      c.quad.self_mode = SelfMode::PaperEpsilon;
      c.mode = AssemblyMode::PaperVerbatim;
      // same dimensionless range as the unit presets
      c.lambda_min = 1.0 / c.domain.a;
      c.lambda_max = 7.0 / c.domain.a;
      c.table_lambda = 1.0 / c.domain.a;
      break;
    case Preset::HomogeneousIso:
      c.domain.sigma_l = 1.0;
      c.domain.sigma_t = 1.0;
      c.domain.orientation = Orientation::Uniform;
      break;
    case Preset::HomogeneousAniso:
      c.domain.orientation = Orientation::Uniform;
      break;
  }
  return c;
}

void apply_setting(RunConfig& c, std::string_view key, std::string_view v) {
  if (key == "preset") {
    c = expand_preset(parse_preset(v));
  } else if (key == "cell_pair") {
    if (v == "intra") c.cell_pair = CellPair::Intra;
    else if (v == "extra") c.cell_pair = CellPair::Extra;
    else bad(key, v);
    apply_cell_pair(c);
  } else if (key == "a") c.domain.a = to_double(key, v);
  else if (key == "b") c.domain.b = to_double(key, v);
  else if (key == "h") c.domain.h = to_double(key, v);
  else if (key == "sigma_l") c.domain.sigma_l = to_double(key, v);
  else if (key == "sigma_t") c.domain.sigma_t = to_double(key, v);
  else if (key == "orientation") {
    if (v == "fibered") c.domain.orientation = Orientation::Fibered;
    else if (v == "uniform") c.domain.orientation = Orientation::Uniform;
    else bad(key, v);
  } else if (key == "scale") {
    if (v == "unit") c.domain.scale = ScalePreset::Unit;
    else if (v == "paper") c.domain.scale = ScalePreset::Paper;
    else bad(key, v);
  } else if (key == "nodes_per_curve") c.nodes_per_curve = to_int(key, v);
  else if (key == "term_mode") {
    if (v == "adaptive") c.policy.mode = TermMode::Adaptive;
    else if (v == "paper") c.policy.mode = TermMode::PaperFixed;
    else bad(key, v);
  } else if (key == "fixed_terms") c.policy.fixed_terms = to_int(key, v);
  else if (key == "adaptive_rel_tol") c.policy.adaptive_rel_tol = to_double(key, v);
  else if (key == "max_terms") c.policy.max_terms = to_int(key, v);
  else if (key == "gauss_order") c.quad.gauss_order = to_int(key, v);
  else if (key == "self_quad") c.quad.self_mode = parse_self_mode(v);
  else if (key == "epsilon_c") c.quad.epsilon_c = to_double(key, v);
  else if (key == "near_threshold") c.quad.near_threshold = to_double(key, v);
  else if (key == "max_levels") c.quad.max_levels = to_int(key, v);
  else if (key == "mode") c.mode = parse_mode(v);
  else if (key == "kernel_normalization") {
    if (v == "verbatim") c.norm = KernelNormalization::Verbatim;
    else if (v == "negated") c.norm = KernelNormalization::Negated;
    else bad(key, v);
  } else if (key == "density_basis") {
    if (v == "quadratic") c.basis = DensityBasis::Quadratic;
    else if (v == "constant") c.basis = DensityBasis::Constant;
    else bad(key, v);
  } else if (key == "kappa") {
    if (v == "auto") c.kappa.reset();
    else if (v == "paper") c.kappa = KappaConvention::Paper;
    else if (v == "consistent") c.kappa = KappaConvention::Consistent;
    else bad(key, v);
  } else if (key == "lambda_min") c.lambda_min = to_double(key, v);
  else if (key == "lambda_max") c.lambda_max = to_double(key, v);
  else if (key == "steps") c.steps = to_int(key, v);
  else if (key == "refine_tol") c.refine_tol = to_double(key, v);
  else if (key == "indicator_floor") c.indicator_floor = to_double(key, v);
  else if (key == "refine_index") c.refine_index = to_int(key, v);
  else if (key == "field_nx") c.field_nx = to_int(key, v);
  else if (key == "field_ny") c.field_ny = to_int(key, v);
  else if (key == "table_lambda") c.table_lambda = to_double(key, v);
  else if (key == "table_self") c.table_self = to_bool(key, v);
  else if (key == "output_dir") c.output_dir = std::string(v);
  else throw Error(Errc::ConfigError, "unknown key '" + std::string(key) + "'");
}

RunConfig parse_config(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> kv;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(Errc::ConfigError, "line " + std::to_string(line_no) + ": expected key = value");
    kv.emplace_back(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
  }
  RunConfig c;
  for (const auto& [k, v] : kv)
    if (k == "preset") apply_setting(c, k, v);
  for (const auto& [k, v] : kv)
    if (k == "cell_pair") apply_setting(c, k, v);
  for (const auto& [k, v] : kv)
    if (k != "preset" && k != "cell_pair") apply_setting(c, k, v);
  return c;
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  for (const auto& e : entries(c)) os << e.key << " = " << e.value << '\n';
  return os.str();
}

std::string config_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  for (const auto& e : entries(c)) j[e.key] = e.value;
  return j.dump(2);
}

void RunConfig::validate() const {
  domain.validate();
  if (nodes_per_curve < 3) throw Error(Errc::InvalidSpec, "nodes_per_curve must be >= 3");
  policy.validate();
  quad.validate();
  if (!(lambda_min > 0.0 && lambda_max > lambda_min)) throw Error(Errc::InvalidSpec, "need 0 < lambda_min < lambda_max");
  if (steps < 2) throw Error(Errc::InvalidSpec, "steps must be >= 2");
  if (!(refine_tol > 0.0)) throw Error(Errc::InvalidSpec, "refine_tol must be positive");
  if (!(indicator_floor > 0.0)) throw Error(Errc::InvalidSpec, "indicator_floor must be positive");
  if (refine_index < 0) throw Error(Errc::InvalidSpec, "refine_index must be >= 0");
  if (field_nx < 2 || field_ny < 2) throw Error(Errc::InvalidSpec, "field resolution must be at least 2 x 2");
  if (!(table_lambda > 0.0)) throw Error(Errc::InvalidSpec, "table_lambda must be positive");
  if (output_dir.empty()) throw Error(Errc::ConfigError, "output_dir is empty");
}

AssemblyOptions RunConfig::assembly_options(int threads) const {
  AssemblyOptions o;
  o.mode = mode;
  o.norm = norm;
  o.policy = policy;
  o.quad = quad;
  o.basis = basis;
  o.kappa = kappa;
  o.threads = threads;
  return o;
}

RefineOptions RunConfig::refine_options(int threads) const {
  RefineOptions r;
  r.tol = refine_tol;
  r.indicator_floor = indicator_floor;
  r.threads = threads;
  return r;
}

}  // namespace anibem
