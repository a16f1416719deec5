#include "concentra/config.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "concentra/errors.hpp"

namespace concentra {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

[[noreturn]] void invalid(const std::string& what) { throw ConcentraError(ErrorKind::Validation, what); }

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) invalid("unknown key '" + k + "' in " + where);
}

double number(const json& j, const std::string& key) {
  if (!j.is_number()) invalid("'" + key + "' must be a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& key) {
  if (!j.is_number_integer() && !(j.is_number() && j.get<double>() == std::floor(j.get<double>())))
    invalid("'" + key + "' must be an integer");
  return static_cast<int>(j.get<double>());
}

std::string text(const json& j, const std::string& key) {
  if (!j.is_string()) invalid("'" + key + "' must be a string");
  return j.get<std::string>();
}

std::vector<double> numbers(const json& j, const std::string& key) {
  if (j.is_string()) return parse_number_list(j.get<std::string>());
  if (j.is_number()) return {j.get<double>()};
  if (!j.is_array()) invalid("'" + key + "' must be a list of numbers");
  std::vector<double> out;
  for (const auto& x : j) out.push_back(number(x, key));
  return out;
}

GeometryConfig geometry_from_json(const json& j) {
  if (j.is_string()) return parse_geometry_spec(j.get<std::string>());
  if (!j.is_object()) invalid("'geometry' must be a string or a block");
  GeometryConfig g;
  if (j.contains("synthetic")) {
    g.name = "synthetic";
    g.synthetic = j.at("synthetic");
    if (!g.synthetic.is_object()) invalid("'geometry.synthetic' must be a block");
    if (j.contains("n")) g.n = integer(j.at("n"), "geometry.n");
    if (g.synthetic.contains("n")) g.n = integer(g.synthetic.at("n"), "geometry.synthetic.n");
    return g;
  }
  reject_unknown(j, {"name", "params", "n", "amp", "aspect", "L"}, "geometry");
  if (!j.contains("name")) invalid("'geometry.name' is required");
  const std::string name = text(j.at("name"), "geometry.name");
  g = parse_geometry_spec(name);
  json params = j.contains("params") ? j.at("params") : json::object();
  for (const char* k : {"n", "amp", "aspect", "L"})
    if (j.contains(k)) params[k] = j.at(k);
  reject_unknown(params, {"n", "amp", "aspect", "L"}, "geometry.params");
  g.n = -1;
  if (params.contains("n")) g.n = integer(params.at("n"), "geometry.n");
  if (params.contains("amp")) g.amp = number(params.at("amp"), "geometry.amp");
  if (params.contains("aspect")) g.aspect = number(params.at("aspect"), "geometry.aspect");
  if (params.contains("L")) g.L = number(params.at("L"), "geometry.L");
  return g;
}

FourierEntry fourier_entry(const json& e, std::size_t arity, const std::string& where) {
  if (!e.is_object()) invalid(where + " entries must be blocks");
  reject_unknown(e, {"index", "constant", "cos", "sin"}, where);
  FourierEntry f;
  if (!e.contains("index") || !e.at("index").is_array() || e.at("index").size() != arity)
    invalid(where + " entries need an index of length " + std::to_string(arity));
  for (const auto& i : e.at("index")) f.index.push_back(integer(i, where + ".index"));
  if (e.contains("constant")) f.constant = number(e.at("constant"), where + ".constant");
  if (e.contains("cos")) f.cos_coef = numbers(e.at("cos"), where + ".cos");
  if (e.contains("sin")) f.sin_coef = numbers(e.at("sin"), where + ".sin");
  return f;
}

}  // namespace

std::vector<double> parse_number_list(const std::string& s) {
  std::vector<double> out;
  std::string body = trim(s);
  if (!body.empty() && body.front() == '[' && body.back() == ']') body = body.substr(1, body.size() - 2);
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) invalid("not a number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::pair<int, int> parse_level_range(const std::string& s) {
  static const std::regex range(R"(^\s*(\d+)\s*(?:\.\.\s*(\d+))?\s*$)");
  std::smatch m;
  if (!std::regex_match(s, m, range)) invalid("level range must look like 6..12, got '" + s + "'");
  const int lo = std::stoi(m[1]);
  const int hi = m[2].matched ? std::stoi(m[2]) : lo;
  return {lo, hi};
}

GeometryConfig parse_geometry_spec(const std::string& spec) {
  static const std::regex call(R"(^\s*([a-z_]+)\s*(?:\(([^)]*)\))?\s*$)");
  std::smatch m;
  if (!std::regex_match(spec, m, call)) invalid("cannot read geometry '" + spec + "'");
  GeometryConfig g;
  g.name = m[1];
  if (g.name == "flat_geometry") g.name = "flat";
  if (g.name == "spheroid") g.name = "spheroid_equator";
  static const std::set<std::string> known{"round_sphere", "spheroid_equator", "flat", "perturbed_sphere"};
  if (!known.count(g.name)) invalid("unknown geometry '" + g.name + "'");
  const std::vector<double> args = m[2].matched ? parse_number_list(m[2]) : std::vector<double>{};
  g.n = -1;
  if (!args.empty()) {
    if (args[0] != std::floor(args[0])) invalid("geometry dimension must be an integer");
    g.n = static_cast<int>(args[0]);
  }
  const std::size_t max_args = g.name == "round_sphere" ? 1 : 2;
  if (args.size() > max_args) invalid("too many arguments for geometry '" + g.name + "'");
  if (args.size() == 2) {
    if (g.name == "perturbed_sphere") g.amp = args[1];
    if (g.name == "spheroid_equator") g.aspect = args[1];
    if (g.name == "flat") g.L = args[1];
  }
  return g;
}

json parse_config_text(const std::string& input) {
  const std::string body = trim(input);
  if (!body.empty() && body.front() == '{') {
    try {
      return json::parse(body);
    } catch (const json::parse_error& e) {
      throw ConcentraError(ErrorKind::Parse, std::string("JSON config: ") + e.what());
    }
  }
  json root = json::object();
  std::vector<json*> stack{&root};
  std::vector<int> opened;
  std::istringstream in(input);
  std::string raw;
  int lineno = 0;
  static const std::regex key_re(R"(^[A-Za-z_][A-Za-z0-9_]*$)");
  auto fail = [&](const std::string& what) {
    throw ConcentraError(ErrorKind::Parse, "line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line == "}") {
      if (stack.size() == 1) fail("unmatched '}'");
      stack.pop_back();
      opened.pop_back();
      continue;
    }
    if (line.back() == '{' && line.find('=') == std::string::npos) {
      const std::string key = trim(line.substr(0, line.size() - 1));
      if (!std::regex_match(key, key_re)) fail("bad block name '" + key + "'");
      json& parent = *stack.back();
      if (parent.contains(key)) fail("duplicate key '" + key + "'");
      parent[key] = json::object();
      stack.push_back(&parent[key]);
      opened.push_back(lineno);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value', 'name {' or '}'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!std::regex_match(key, key_re)) fail("bad key '" + key + "'");
    if (value.empty()) fail("missing value for '" + key + "'");
    json& parent = *stack.back();
    if (parent.contains(key)) fail("duplicate key '" + key + "'");
    json v = json::parse(value, nullptr, false);
    if (v.is_discarded()) {
      if (value.front() == '"' || value.front() == '[' || value.front() == '{') fail("malformed value for '" + key + "'");
      v = value;
    }
    parent[key] = std::move(v);
  }
  if (stack.size() != 1) {
    lineno = opened.back();
    fail("block opened here is never closed");
  }
  return root;
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) invalid("config must be a block of keys");
  reject_unknown(j, {"N", "k", "dims", "grid", "geometry", "solver", "expansion", "spectrum", "output", "seed"},
                 "config");
  RunConfig c;
  c.geometry.n = -1;
  bool have_N = false;
  json dims = j.contains("dims") ? j.at("dims") : json::object();
  if (j.contains("N")) dims["N"] = j.at("N");
  if (j.contains("k")) dims["k"] = j.at("k");
  reject_unknown(dims, {"N", "k"}, "dims");
  if (dims.contains("N")) {
    c.N = integer(dims.at("N"), "N");
    have_N = true;
  }
  if (dims.contains("k") && integer(dims.at("k"), "k") != 1) invalid("k = 1 required");
  if (j.contains("grid")) c.grid = integer(j.at("grid"), "grid");
  if (j.contains("geometry")) c.geometry = geometry_from_json(j.at("geometry"));
  if (c.geometry.n < 0) c.geometry.n = c.N + 1;
  if (!have_N) c.N = c.geometry.n - 1;
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    reject_unknown(s, {"r_weight", "sigma", "R_max", "h", "n_theta"}, "solver");
    if (s.contains("r_weight")) c.solver.r_weight = number(s.at("r_weight"), "solver.r_weight");
    if (s.contains("sigma")) c.solver.sigma = number(s.at("sigma"), "solver.sigma");
    if (s.contains("R_max")) c.solver.R_max = number(s.at("R_max"), "solver.R_max");
    if (s.contains("h")) c.solver.h = number(s.at("h"), "solver.h");
    if (s.contains("n_theta")) c.solver.n_theta = integer(s.at("n_theta"), "solver.n_theta");
  }
  if (j.contains("expansion")) {
    const json& e = j.at("expansion");
    reject_unknown(e, {"order", "eps_list", "gamma", "y_nodes"}, "expansion");
    if (e.contains("order")) c.expansion.order = integer(e.at("order"), "expansion.order");
    if (e.contains("eps_list")) c.expansion.eps_list = numbers(e.at("eps_list"), "expansion.eps_list");
    if (e.contains("gamma")) c.expansion.gamma = number(e.at("gamma"), "expansion.gamma");
    if (e.contains("y_nodes")) c.expansion.y_nodes = integer(e.at("y_nodes"), "expansion.y_nodes");
  }
  if (j.contains("spectrum")) {
    const json& s = j.at("spectrum");
    reject_unknown(s, {"levels", "c_target", "J", "sigma_points"}, "spectrum");
    if (s.contains("levels")) {
      const json& l = s.at("levels");
      if (l.is_string()) {
        std::tie(c.spectrum.level_lo, c.spectrum.level_hi) = parse_level_range(l.get<std::string>());
      } else if (l.is_array() && l.size() == 2) {
        c.spectrum.level_lo = integer(l[0], "spectrum.levels");
        c.spectrum.level_hi = integer(l[1], "spectrum.levels");
      } else {
        c.spectrum.level_lo = c.spectrum.level_hi = integer(l, "spectrum.levels");
      }
    }
    if (s.contains("c_target")) c.spectrum.c_target = number(s.at("c_target"), "spectrum.c_target");
    if (s.contains("J")) c.spectrum.J = integer(s.at("J"), "spectrum.J");
    if (s.contains("sigma_points")) c.spectrum.sigma_points = integer(s.at("sigma_points"), "spectrum.sigma_points");
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    reject_unknown(o, {"directory", "formats"}, "output");
    if (o.contains("directory")) c.output.directory = text(o.at("directory"), "output.directory");
    if (o.contains("formats")) {
      const json& f = o.at("formats");
      c.output.formats.clear();
      if (f.is_string()) {
        std::stringstream ss(trim(f.get<std::string>()));
        std::string item;
        while (std::getline(ss, item, ',')) c.output.formats.push_back(trim(item));
      } else if (f.is_array()) {
        for (const auto& x : f) c.output.formats.push_back(text(x, "output.formats"));
      } else {
        invalid("'output.formats' must be a list");
      }
    }
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer()) invalid("'seed' must be an integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  return c;
}

void RunConfig::validate() const {
  if (N < 7) invalid("N ≥ 7 required");
  if (geometry.n != N + 1)
    invalid("geometry dimension n = " + std::to_string(geometry.n) + " does not match N + 1 = " + std::to_string(N + 1));
  if (grid < 16 || grid % 2) invalid("grid must be an even number >= 16");
  if (!(expansion.gamma > 0.5 && expansion.gamma < 1.0)) invalid("gamma must lie in (1/2, 1)");
  if (expansion.eps_list.empty()) invalid("eps_list must not be empty");
  for (std::size_t i = 0; i < expansion.eps_list.size(); ++i) {
    if (!(expansion.eps_list[i] > 0.0)) invalid("eps_list entries must be positive");
    if (i > 0 && !(expansion.eps_list[i] < expansion.eps_list[i - 1])) invalid("eps_list must be strictly decreasing");
  }
  if (expansion.order < 1 || expansion.order > 3) invalid("expansion order must be 1, 2 or 3");
  if (expansion.y_nodes < 4 || expansion.y_nodes > grid) invalid("y_nodes must lie in [4, grid]");
  if (!(solver.r_weight > 2.0 && solver.r_weight < N)) invalid("solver r_weight must lie in (2, N)");
  if (!(solver.sigma > 0.0 && solver.sigma < 1.0)) invalid("solver sigma must lie in (0, 1)");
  if (!(solver.R_max > 10.0)) invalid("solver R_max must exceed 10");
  if (!(solver.h > 0.0 && solver.h <= 0.5)) invalid("solver h must lie in (0, 0.5]");
  if (solver.n_theta < 4) invalid("solver n_theta must be at least 4");
  if (spectrum.level_lo < 0 || spectrum.level_hi < spectrum.level_lo || spectrum.level_hi > 30)
    invalid("spectrum levels must satisfy 0 <= lo <= hi <= 30");
  if (spectrum.J < 1) invalid("spectrum J must be positive");
  if (spectrum.sigma_points < 2) invalid("spectrum sigma_points must be at least 2");
  if (!(spectrum.c_target >= 0.0)) invalid("spectrum c_target must be non-negative");
  if (output.formats.empty()) invalid("output formats must not be empty");
  for (const auto& f : output.formats)
    if (f != "json" && f != "csv") invalid("unsupported output format '" + f + "'");
  if (geometry.name == "perturbed_sphere" && !(std::abs(geometry.amp) < 0.5))
    invalid("perturbed_sphere amplitude must be below 0.5");
  if (geometry.name == "spheroid_equator" && !(geometry.aspect > 0.0)) invalid("spheroid aspect must be positive");
  if (!(geometry.L > 0.0)) invalid("geometry length must be positive");
}

json RunConfig::to_json() const {
  json g{{"name", geometry.name}, {"n", geometry.n}};
  if (geometry.name == "perturbed_sphere") g["amp"] = geometry.amp;
  if (geometry.name == "spheroid_equator") g["aspect"] = geometry.aspect;
  if (geometry.name == "flat") g["L"] = geometry.L;
  if (geometry.name == "synthetic") g["synthetic"] = geometry.synthetic;
  return json{
      {"dims", {{"N", N}, {"k", 1}}},
      {"grid", grid},
      {"geometry", g},
      {"solver",
       {{"r_weight", solver.r_weight},
        {"sigma", solver.sigma},
        {"R_max", solver.R_max},
        {"h", solver.h},
        {"n_theta", solver.n_theta}}},
      {"expansion",
       {{"order", expansion.order},
        {"eps_list", expansion.eps_list},
        {"gamma", expansion.gamma},
        {"y_nodes", expansion.y_nodes}}},
      {"spectrum",
       {{"levels", {spectrum.level_lo, spectrum.level_hi}},
        {"c_target", spectrum.c_target},
        {"J", spectrum.J},
        {"sigma_points", spectrum.sigma_points}}},
      {"output", {{"directory", output.directory}, {"formats", output.formats}}},
      {"seed", seed},
  };
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConcentraError(ErrorKind::Io, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig c = config_from_json(parse_config_text(ss.str()));
  c.validate();
  return c;
}

CurvatureData build_geometry(const RunConfig& cfg) {
  const GeometryConfig& g = cfg.geometry;
  if (g.name == "round_sphere") return round_sphere(g.n, cfg.grid);
  if (g.name == "spheroid_equator") return spheroid_equator(g.n, g.aspect, cfg.grid);
  if (g.name == "flat") return flat_geometry(g.n, g.L, cfg.grid);
  if (g.name == "perturbed_sphere") return perturbed_sphere(g.n, g.amp, cfg.grid);
  if (g.name != "synthetic") invalid("unknown geometry '" + g.name + "'");
  const json& s = g.synthetic;
  reject_unknown(s, {"n", "L", "H_fourier", "R_fourier", "Gamma_fourier", "g_tilde", "R_from_gauss"},
                 "geometry.synthetic");
  SyntheticSpec spec;
  spec.n = g.n;
  spec.grid = cfg.grid;
  if (s.contains("L")) spec.L = number(s.at("L"), "geometry.synthetic.L");
  if (s.contains("g_tilde")) spec.g_tilde = number(s.at("g_tilde"), "geometry.synthetic.g_tilde");
  if (s.contains("R_from_gauss")) {
    if (!s.at("R_from_gauss").is_boolean()) invalid("'R_from_gauss' must be true or false");
    spec.R_from_gauss = s.at("R_from_gauss").get<bool>();
  }
  auto entries = [&](const char* key, std::size_t arity, std::vector<FourierEntry>& out) {
    if (!s.contains(key)) return;
    if (!s.at(key).is_array()) invalid(std::string("'") + key + "' must be a list");
    for (const auto& e : s.at(key)) out.push_back(fourier_entry(e, arity, key));
  };
  entries("H_fourier", 2, spec.H);
  entries("R_fourier", 4, spec.R);
  entries("Gamma_fourier", 1, spec.Gamma);
  return synthetic_geometry(spec);
}

}  // namespace concentra
