#pragma once

#include "kubo/bloch.hpp"
#include "kubo/lattice_model.hpp"
#include "kubo/runner/config.hpp"

#include <json.hpp>

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace kubo::runner {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::string to_csv() const;
};

struct RunResult {
  RunConfig config;
  nlohmann::json data;        // deterministic payload
  nlohmann::json provenance;  // version, timestamp, wall time
  std::map<std::string, Table> tables;
};

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kOutputDirEnv = "KUBO_LATTICE_OUTPUT_DIR";

LatticeSpec make_run_lattice(const RunConfig& cfg);
BlochHamiltonian make_bloch(const RunConfig& cfg);
LatticeModel make_ed_model(const RunConfig& cfg, int L1, int L2, double U);
// Single-particle gap δ_μ of the configured model on a 200² mesh.
double single_particle_gap(const RunConfig& cfg);

RunResult run(const RunConfig& cfg);

// Output directory after the environment override.
std::string output_directory(const RunConfig& cfg);
// Writes data, provenance and tables with temp-file + rename. Returns the paths written.
std::vector<std::string> write_result(const RunResult& result, const std::string& directory);
void write_atomic(const std::string& path, const std::string& content);

inline const std::vector<std::string> kConvergenceParameters = {"mesh_n", "beta", "L", "omega_min", "T_max"};

// Reruns the computation for each value of `parameter` and tabulates the headline
// results with successive differences.
Table convergence_report(const RunConfig& cfg, const std::string& parameter, const std::vector<double>& values);

}  // namespace kubo::runner
