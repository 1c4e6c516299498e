#pragma once

#include "kubo/linear_response.hpp"

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace kubo::runner {

// Malformed or out-of-range configuration. Carries the YAML position when known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, int line = -1, int column = -1);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

inline const std::vector<std::string> kComputations = {
    "conductivity", "chern",      "kubo-vs-tknn", "ed-spectrum",
    "ed-conductivity", "ed-ustability", "wick-check", "ward-check"};

struct HoppingSpec {
  std::array<int, 2> cell{0, 0};
  std::vector<std::vector<std::array<double, 2>>> matrix;  // row-major (re, im) pairs

  bool operator==(const HoppingSpec&) const = default;
};

struct ModelConfig {
  std::string name = "graphene";  // graphene | haldane | qwz | flat | hubbard | custom
  std::map<std::string, double> params;
  std::vector<double> levels;     // flat
  std::vector<HoppingSpec> hoppings;  // custom
  double spin_factor = 0.0;       // 0: preset default
  std::string interaction = "bond";  // bond | intracell | none (gapped ED)

  double param(const std::string& key, double fallback) const;
  bool operator==(const ModelConfig&) const = default;
};

struct LatticeConfig {
  std::string name = "honeycomb";  // honeycomb | square | custom
  int L1 = 1;
  int L2 = 1;
  bool spinful = false;
  int orbitals = 2;                         // square
  std::array<std::array<double, 2>, 2> basis{{{1.0, 0.0}, {0.0, 1.0}}};  // custom
  std::vector<std::array<double, 2>> offsets;                              // custom

  bool operator==(const LatticeConfig&) const = default;
};

struct NumericsConfig {
  int mesh_n = 200;
  int refine_depth = 0;
  int refine_halo = 16;
  std::vector<double> omegas = default_omegas();
  double beta = kInfiniteBeta;
  double mu = 0.0;
  std::vector<double> U{0.0};
  bool U_in_gap_units = false;
  std::vector<int> L_values;     // ed-ustability sizes; empty means lattice.L1
  double T_max = 0.0;            // 0: chosen so that e^{−ω T_max} = 1e-10
  double omega = 0.0;            // wick-check frequency; 0 means omega_over_gap · gap
  double omega_over_gap = 0.1;
  int chern_n = 24;
  int matsubara_count = 100;
  std::string fit = "log-aware";  // log-aware | linear
  int max_sector_dim = 4096;

  bool operator==(const NumericsConfig&) const = default;
};

struct OutputConfig {
  std::string directory = "kubo-output";
  std::vector<std::string> formats{"csv", "json"};
  std::string units = "natural";

  bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
  std::string computation = "conductivity";
  ModelConfig model;
  LatticeConfig lattice;
  NumericsConfig numerics;
  OutputConfig output;

  bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);
// Applies "dotted.key=yaml-value" overrides on top of a config document.
std::string apply_overrides(const std::string& text, const std::vector<std::string>& overrides);
void validate(const RunConfig& cfg);

}  // namespace kubo::runner
