#include "kubo/runner/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace kubo::runner {

namespace {

std::string with_position(const std::string& msg, int line, int column) {
  if (line < 0) return msg;
  return msg + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")";
}

[[noreturn]] void fail(const std::string& msg, const YAML::Node& at) {
  const YAML::Mark m = at.Mark();
  if (m.is_null()) throw ConfigError(msg);
  throw ConfigError(msg, m.line + 1, m.column + 1);
}

void check_keys(const YAML::Node& node, const std::string& section, const std::set<std::string>& allowed) {
  if (!node.IsMap()) fail("'" + section + "' must be a mapping", node);
  for (auto it = node.begin(); it != node.end(); ++it) {
    const std::string key = it->first.as<std::string>();
    if (!allowed.count(key)) {
      const std::string where = section.empty() ? "" : " in '" + section + "'";
      fail("unknown key '" + key + "'" + where, it->first);
    }
  }
}

template <class T>
T scalar(const YAML::Node& n, const std::string& key) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    fail("invalid value for '" + key + "'", n);
  }
}

double real_value(const YAML::Node& n, const std::string& key) {
  if (n.IsScalar()) {
    const std::string s = n.Scalar();
    if (s == "inf" || s == ".inf" || s == "infinite" || s == "infinity") return kInfiniteBeta;
  }
  const double v = scalar<double>(n, key);
  if (std::isnan(v)) fail("'" + key + "' is not a number", n);
  return v;
}

template <class T>
void read(const YAML::Node& parent, const char* key, T& out) {
  const YAML::Node n = parent[key];
  if (!n) return;
  if constexpr (std::is_same_v<T, double>) {
    out = real_value(n, key);
  } else if constexpr (std::is_same_v<T, std::vector<double>>) {
    if (!n.IsSequence()) fail("'" + std::string(key) + "' must be a list", n);
    out.clear();
    for (const auto& e : n) out.push_back(real_value(e, key));
  } else if constexpr (std::is_same_v<T, std::vector<int>> || std::is_same_v<T, std::vector<std::string>>) {
    if (!n.IsSequence()) fail("'" + std::string(key) + "' must be a list", n);
    out.clear();
    for (const auto& e : n) out.push_back(scalar<typename T::value_type>(e, key));
  } else {
    out = scalar<T>(n, key);
  }
}

std::array<double, 2> pair_value(const YAML::Node& n, const std::string& key) {
  if (!n.IsSequence() || n.size() != 2) fail("'" + key + "' entries must be [x, y] pairs", n);
  return {real_value(n[0], key), real_value(n[1], key)};
}

ModelConfig parse_model(const YAML::Node& n) {
  ModelConfig m;
  check_keys(n, "model", {"name", "params", "levels", "hoppings", "spin_factor", "interaction"});
  read(n, "name", m.name);
  if (const YAML::Node p = n["params"]) {
    if (!p.IsMap()) fail("'model.params' must be a mapping", p);
    for (auto it = p.begin(); it != p.end(); ++it) {
      const std::string key = it->first.as<std::string>();
      m.params[key] = real_value(it->second, key);
    }
  }
  read(n, "levels", m.levels);
  read(n, "spin_factor", m.spin_factor);
  read(n, "interaction", m.interaction);
  if (const YAML::Node h = n["hoppings"]) {
    if (!h.IsSequence()) fail("'model.hoppings' must be a list", h);
    for (const auto& e : h) {
      check_keys(e, "model.hoppings", {"cell", "matrix"});
      HoppingSpec spec;
      const YAML::Node cell = e["cell"];
      if (!cell || !cell.IsSequence() || cell.size() != 2) fail("hopping 'cell' must be [n1, n2]", e);
      spec.cell = {scalar<int>(cell[0], "cell"), scalar<int>(cell[1], "cell")};
      const YAML::Node mat = e["matrix"];
      if (!mat || !mat.IsSequence()) fail("hopping 'matrix' must be a list of rows", e);
      for (const auto& row : mat) {
        if (!row.IsSequence()) fail("hopping matrix rows must be lists of [re, im]", row);
        std::vector<std::array<double, 2>> r;
        for (const auto& z : row) r.push_back(pair_value(z, "matrix"));
        spec.matrix.push_back(std::move(r));
      }
      m.hoppings.push_back(std::move(spec));
    }
  }
  return m;
}

LatticeConfig parse_lattice(const YAML::Node& n) {
  LatticeConfig l;
  check_keys(n, "lattice", {"name", "L", "L1", "L2", "spinful", "orbitals", "basis", "offsets"});
  read(n, "name", l.name);
  if (n["L"]) {
    read(n, "L", l.L1);
    l.L2 = l.L1;
  }
  read(n, "L1", l.L1);
  read(n, "L2", l.L2);
  read(n, "spinful", l.spinful);
  read(n, "orbitals", l.orbitals);
  if (const YAML::Node b = n["basis"]) {
    if (!b.IsSequence() || b.size() != 2) fail("'lattice.basis' must hold two vectors", b);
    l.basis = {pair_value(b[0], "basis"), pair_value(b[1], "basis")};
  }
  if (const YAML::Node o = n["offsets"]) {
    if (!o.IsSequence()) fail("'lattice.offsets' must be a list", o);
    for (const auto& e : o) l.offsets.push_back(pair_value(e, "offsets"));
  }
  return l;
}

NumericsConfig parse_numerics(const YAML::Node& n) {
  NumericsConfig c;
  check_keys(n, "numerics",
             {"mesh_n", "refine_depth", "refine_halo", "omegas", "beta", "mu", "U", "U_in_gap_units", "L_values",
              "T_max", "omega", "omega_over_gap", "chern_n", "matsubara_count", "fit", "max_sector_dim"});
  read(n, "mesh_n", c.mesh_n);
  read(n, "refine_depth", c.refine_depth);
  read(n, "refine_halo", c.refine_halo);
  read(n, "omegas", c.omegas);
  read(n, "beta", c.beta);
  read(n, "mu", c.mu);
  if (const YAML::Node u = n["U"]) {
    if (u.IsScalar()) {
      c.U = {real_value(u, "U")};
    } else {
      read(n, "U", c.U);
    }
  }
  read(n, "U_in_gap_units", c.U_in_gap_units);
  read(n, "L_values", c.L_values);
  read(n, "T_max", c.T_max);
  read(n, "omega", c.omega);
  read(n, "omega_over_gap", c.omega_over_gap);
  read(n, "chern_n", c.chern_n);
  read(n, "matsubara_count", c.matsubara_count);
  read(n, "fit", c.fit);
  read(n, "max_sector_dim", c.max_sector_dim);
  return c;
}

OutputConfig parse_output(const YAML::Node& n) {
  OutputConfig o;
  check_keys(n, "output", {"directory", "formats", "units"});
  read(n, "directory", o.directory);
  read(n, "formats", o.formats);
  read(n, "units", o.units);
  return o;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

void emit_real(YAML::Emitter& e, double v) {
  if (std::isinf(v)) {
    e << (v > 0 ? "inf" : "-inf");
  } else {
    e << v;
  }
}

void emit_reals(YAML::Emitter& e, const std::vector<double>& v) {
  e << YAML::Flow << YAML::BeginSeq;
  for (double x : v) emit_real(e, x);
  e << YAML::EndSeq;
}

void emit_pair(YAML::Emitter& e, const std::array<double, 2>& p) {
  e << YAML::Flow << YAML::BeginSeq;
  emit_real(e, p[0]);
  emit_real(e, p[1]);
  e << YAML::EndSeq;
}

}  // namespace

ConfigError::ConfigError(const std::string& msg, int line, int column)
    : std::runtime_error(with_position(msg, line, column)), line_(line), column_(column) {}

double ModelConfig::param(const std::string& key, double fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("YAML parse error: " + e.msg, e.mark.line + 1, e.mark.column + 1);
  }
  RunConfig cfg;
  if (root.IsNull()) throw ConfigError("empty configuration");
  check_keys(root, "", {"computation", "model", "lattice", "numerics", "output"});
  read(root, "computation", cfg.computation);
  if (root["model"]) cfg.model = parse_model(root["model"]);
  if (root["lattice"]) cfg.lattice = parse_lattice(root["lattice"]);
  if (root["numerics"]) cfg.numerics = parse_numerics(root["numerics"]);
  if (root["output"]) cfg.output = parse_output(root["output"]);
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const RunConfig& cfg) {
  require(std::find(kComputations.begin(), kComputations.end(), cfg.computation) != kComputations.end(),
          "unknown computation '" + cfg.computation + "'");
  const std::set<std::string> models{"graphene", "haldane", "qwz", "flat", "hubbard", "custom"};
  require(models.count(cfg.model.name), "unknown model preset '" + cfg.model.name + "'");
  const std::set<std::string> lattices{"honeycomb", "square", "custom"};
  require(lattices.count(cfg.lattice.name), "unknown lattice preset '" + cfg.lattice.name + "'");
  require(cfg.model.interaction == "bond" || cfg.model.interaction == "intracell" || cfg.model.interaction == "none",
          "model.interaction must be bond, intracell or none");
  for (const char* key : {"t", "t1"}) {
    auto it = cfg.model.params.find(key);
    if (it != cfg.model.params.end()) require(it->second > 0.0, std::string("model.params.") + key + " must be > 0");
  }
  require(cfg.model.spin_factor >= 0.0, "model.spin_factor must be >= 0");
  if (cfg.model.name == "custom") require(!cfg.model.hoppings.empty(), "custom model needs a hopping list");
  if (cfg.model.name == "flat") require(!cfg.model.levels.empty(), "flat model needs levels");
  if (cfg.lattice.name == "custom") require(!cfg.lattice.offsets.empty(), "custom lattice needs offsets");
  require(cfg.lattice.L1 >= 1 && cfg.lattice.L2 >= 1, "lattice size must be >= 1");
  require(cfg.lattice.orbitals >= 1, "lattice.orbitals must be >= 1");

  const NumericsConfig& n = cfg.numerics;
  require(n.mesh_n >= 1, "numerics.mesh_n must be >= 1");
  require(n.refine_depth >= 0 && n.refine_depth <= 40, "numerics.refine_depth must be in [0, 40]");
  require(n.refine_halo >= 1, "numerics.refine_halo must be >= 1");
  require(!n.omegas.empty(), "numerics.omegas must not be empty");
  for (double w : n.omegas) require(w > 0.0 && std::isfinite(w), "numerics.omegas must be positive and finite");
  require(n.beta > 0.0, "numerics.beta must be > 0");
  require(std::isfinite(n.mu), "numerics.mu must be finite");
  require(!n.U.empty(), "numerics.U must not be empty");
  for (double u : n.U) require(std::isfinite(u), "numerics.U must be finite");
  for (int L : n.L_values) require(L >= 1, "numerics.L_values must be >= 1");
  require(n.T_max >= 0.0 && std::isfinite(n.T_max), "numerics.T_max must be >= 0");
  require(n.omega >= 0.0 && std::isfinite(n.omega), "numerics.omega must be >= 0");
  require(n.omega_over_gap > 0.0, "numerics.omega_over_gap must be > 0");
  require(n.chern_n >= 6, "numerics.chern_n must be >= 6");
  require(n.matsubara_count >= 3, "numerics.matsubara_count must be >= 3");
  require(n.fit == "log-aware" || n.fit == "linear", "numerics.fit must be log-aware or linear");
  require(n.max_sector_dim >= 1, "numerics.max_sector_dim must be >= 1");

  for (const auto& f : cfg.output.formats) require(f == "csv" || f == "json", "output.formats accepts csv and json");
  require(cfg.output.units == "natural" || cfg.output.units == "e2h", "output.units must be natural or e2h");
  require(!cfg.output.directory.empty(), "output.directory must not be empty");
}

std::string serialize_config(const RunConfig& cfg) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "computation" << YAML::Value << cfg.computation;

  e << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "name" << YAML::Value << cfg.model.name;
  e << YAML::Key << "params" << YAML::Value << YAML::BeginMap;
  for (const auto& [k, v] : cfg.model.params) {
    e << YAML::Key << k << YAML::Value;
    emit_real(e, v);
  }
  e << YAML::EndMap;
  e << YAML::Key << "levels" << YAML::Value;
  emit_reals(e, cfg.model.levels);
  e << YAML::Key << "hoppings" << YAML::Value << YAML::BeginSeq;
  for (const HoppingSpec& h : cfg.model.hoppings) {
    e << YAML::BeginMap;
    e << YAML::Key << "cell" << YAML::Value << YAML::Flow << YAML::BeginSeq << h.cell[0] << h.cell[1] << YAML::EndSeq;
    e << YAML::Key << "matrix" << YAML::Value << YAML::BeginSeq;
    for (const auto& row : h.matrix) {
      e << YAML::Flow << YAML::BeginSeq;
      for (const auto& z : row) emit_pair(e, z);
      e << YAML::EndSeq;
    }
    e << YAML::EndSeq << YAML::EndMap;
  }
  e << YAML::EndSeq;
  e << YAML::Key << "spin_factor" << YAML::Value << cfg.model.spin_factor;
  e << YAML::Key << "interaction" << YAML::Value << cfg.model.interaction;
  e << YAML::EndMap;

  const LatticeConfig& l = cfg.lattice;
  e << YAML::Key << "lattice" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "name" << YAML::Value << l.name;
  e << YAML::Key << "L1" << YAML::Value << l.L1;
  e << YAML::Key << "L2" << YAML::Value << l.L2;
  e << YAML::Key << "spinful" << YAML::Value << l.spinful;
  e << YAML::Key << "orbitals" << YAML::Value << l.orbitals;
  e << YAML::Key << "basis" << YAML::Value << YAML::BeginSeq;
  emit_pair(e, l.basis[0]);
  emit_pair(e, l.basis[1]);
  e << YAML::EndSeq;
  e << YAML::Key << "offsets" << YAML::Value << YAML::BeginSeq;
  for (const auto& o : l.offsets) emit_pair(e, o);
  e << YAML::EndSeq;
  e << YAML::EndMap;

  const NumericsConfig& n = cfg.numerics;
  e << YAML::Key << "numerics" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "mesh_n" << YAML::Value << n.mesh_n;
  e << YAML::Key << "refine_depth" << YAML::Value << n.refine_depth;
  e << YAML::Key << "refine_halo" << YAML::Value << n.refine_halo;
  e << YAML::Key << "omegas" << YAML::Value;
  emit_reals(e, n.omegas);
  e << YAML::Key << "beta" << YAML::Value;
  emit_real(e, n.beta);
  e << YAML::Key << "mu" << YAML::Value;
  emit_real(e, n.mu);
  e << YAML::Key << "U" << YAML::Value;
  emit_reals(e, n.U);
  e << YAML::Key << "U_in_gap_units" << YAML::Value << n.U_in_gap_units;
  e << YAML::Key << "L_values" << YAML::Value << YAML::Flow << n.L_values;
  e << YAML::Key << "T_max" << YAML::Value;
  emit_real(e, n.T_max);
  e << YAML::Key << "omega" << YAML::Value;
  emit_real(e, n.omega);
  e << YAML::Key << "omega_over_gap" << YAML::Value;
  emit_real(e, n.omega_over_gap);
  e << YAML::Key << "chern_n" << YAML::Value << n.chern_n;
  e << YAML::Key << "matsubara_count" << YAML::Value << n.matsubara_count;
  e << YAML::Key << "fit" << YAML::Value << n.fit;
  e << YAML::Key << "max_sector_dim" << YAML::Value << n.max_sector_dim;
  e << YAML::EndMap;

  e << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "directory" << YAML::Value << cfg.output.directory;
  e << YAML::Key << "formats" << YAML::Value << YAML::Flow << cfg.output.formats;
  e << YAML::Key << "units" << YAML::Value << cfg.output.units;
  e << YAML::EndMap;

  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

std::string apply_overrides(const std::string& text, const std::vector<std::string>& overrides) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("YAML parse error: " + e.msg, e.mark.line + 1, e.mark.column + 1);
  }
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  for (const std::string& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + ov + "' is not key=value");
    const std::string path = ov.substr(0, eq);
    YAML::Node value;
    try {
      value = YAML::Load(ov.substr(eq + 1));
    } catch (const YAML::ParserException& e) {
      throw ConfigError("override '" + ov + "': " + e.msg);
    }
    std::vector<std::string> keys;
    std::stringstream ss(path);
    for (std::string k; std::getline(ss, k, '.');) {
      if (k.empty()) throw ConfigError("override '" + ov + "' has an empty key");
      keys.push_back(k);
    }
    YAML::Node cur = root;
    for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
      YAML::Node next = cur[keys[i]];
      if (!next.IsDefined() || next.IsNull()) {
        cur[keys[i]] = YAML::Node(YAML::NodeType::Map);
        next = cur[keys[i]];
      }
      if (!next.IsMap()) throw ConfigError("override '" + ov + "': '" + keys[i] + "' is not a section");
      cur.reset(next);
    }
    cur[keys.back()] = value;
  }
  YAML::Emitter e;
  e << root;
  return std::string(e.c_str()) + "\n";
}

}  // namespace kubo::runner
