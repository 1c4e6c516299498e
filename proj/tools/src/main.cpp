#include "kubo/error.hpp"
#include "kubo/runner/config.hpp"
#include "kubo/runner/runner.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using kubo::runner::ConfigError;
using nlohmann::json;

int report_error(const std::string& kind, const std::string& message, int code, int line = -1, int column = -1) {
  json err = {{"error", {{"type", kind}, {"message", message}, {"exit_code", code}}}};
  if (line >= 0) {
    err["error"]["line"] = line;
    err["error"]["column"] = column;
  }
  std::cerr << err.dump() << std::endl;
  return code;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Options {
  std::string config;
  std::vector<std::string> set;
  std::string units;
  std::string output_dir;
  int mesh_n = 0;
  std::string beta;
  std::string mu;
  int L = 0;
  bool quiet = false;
  std::string parameter;
  std::vector<double> values;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("-c,--config", o.config, "YAML run configuration")->check(CLI::ExistingFile);
  sub->add_option("--set", o.set, "Override a config key, e.g. numerics.mesh_n=400 (repeatable)");
  sub->add_option("--units", o.units, "Conductivity units")->check(CLI::IsMember({"natural", "e2h"}));
  sub->add_option("-o,--output-dir", o.output_dir, "Output directory");
  sub->add_option("--mesh-n", o.mesh_n, "Base Brillouin-zone mesh size");
  sub->add_option("--beta", o.beta, "Inverse temperature (number or inf)");
  sub->add_option("--mu", o.mu, "Chemical potential");
  sub->add_option("--L", o.L, "Torus size L (L1 = L2 = L)");
  sub->add_flag("-q,--quiet", o.quiet, "Do not print the JSON summary");
}

std::vector<std::string> overrides(const Options& o, const std::string& computation) {
  std::vector<std::string> ov;
  if (!computation.empty()) ov.push_back("computation=" + computation);
  if (!o.units.empty()) ov.push_back("output.units=" + o.units);
  if (!o.output_dir.empty()) ov.push_back("output.directory=\"" + o.output_dir + "\"");
  if (o.mesh_n != 0) ov.push_back("numerics.mesh_n=" + std::to_string(o.mesh_n));
  if (!o.beta.empty()) ov.push_back("numerics.beta=" + o.beta);
  if (!o.mu.empty()) ov.push_back("numerics.mu=" + o.mu);
  if (o.L != 0) {
    ov.push_back("lattice.L1=" + std::to_string(o.L));
    ov.push_back("lattice.L2=" + std::to_string(o.L));
  }
  ov.insert(ov.end(), o.set.begin(), o.set.end());
  return ov;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kubo conductivities, Chern numbers and small-torus exact diagonalisation for 2d lattice models",
               "kubo-lattice"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kubo::runner::kVersion);
  Options opt;
  std::vector<CLI::App*> computations;
  for (const std::string& name : kubo::runner::kComputations) {
    CLI::App* sub = app.add_subcommand(name, "Run the '" + name + "' computation");
    add_common(sub, opt);
    computations.push_back(sub);
  }
  CLI::App* conv = app.add_subcommand("convergence", "Rerun the configured computation across parameter values");
  add_common(conv, opt);
  conv->add_option("--parameter", opt.parameter, "mesh_n, beta, L, omega_min or T_max")
      ->required()
      ->check(CLI::IsMember(kubo::runner::kConvergenceParameters));
  conv->add_option("--values", opt.values, "Parameter values")->required()->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    std::string computation;
    for (CLI::App* sub : computations) {
      if (sub->parsed()) computation = sub->get_name();
    }
    const std::string base = opt.config.empty() ? std::string("{}") : read_file(opt.config);
    const kubo::runner::RunConfig cfg = kubo::runner::parse_config(kubo::runner::apply_overrides(base, overrides(opt, computation)));
    const std::string dir = kubo::runner::output_directory(cfg);

    if (conv->parsed()) {
      const kubo::runner::Table t = kubo::runner::convergence_report(cfg, opt.parameter, opt.values);
      namespace fs = std::filesystem;
      std::error_code ec;
      fs::create_directories(dir, ec);
      if (ec) throw kubo::runner::IoError("cannot create output directory '" + dir + "'");
      const std::string path = (fs::path(dir) / (cfg.computation + "_convergence_" + opt.parameter + ".csv")).string();
      kubo::runner::write_atomic(path, t.to_csv());
      if (!opt.quiet) std::cout << t.to_csv();
      return 0;
    }

    const kubo::runner::RunResult result = kubo::runner::run(cfg);
    kubo::runner::write_result(result, dir);
    if (!opt.quiet) {
      json summary = result.data;
      summary.erase("config");
      std::cout << summary.dump(2) << std::endl;
    }
    return 0;
  } catch (const ConfigError& e) {
    return report_error("config", e.what(), 2, e.line(), e.column());
  } catch (const kubo::InvalidArgument& e) {
    return report_error("config", e.what(), 2);
  } catch (const kubo::runner::IoError& e) {
    return report_error("io", e.what(), 4);
  } catch (const kubo::Error& e) {
    return report_error("computation", e.what(), 3);
  } catch (const std::exception& e) {
    return report_error("computation", e.what(), 3);
  }
}
