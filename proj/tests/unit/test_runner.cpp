#include "kubo/runner/config.hpp"
#include "kubo/runner/runner.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace kubo;
using namespace kubo::runner;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("kubo_runner_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config defaults") {
  const RunConfig c = parse_config("computation: conductivity\nmodel:\n  name: graphene\n");
  CHECK(c.computation == "conductivity");
  CHECK(c.numerics.mesh_n == 200);
  CHECK(c.numerics.omegas == default_omegas());
  CHECK(std::isinf(c.numerics.beta));
  CHECK(c.lattice.name == "honeycomb");
  CHECK(c.output.units == "natural");
  CHECK(c.output.formats == std::vector<std::string>{"csv", "json"});
}

TEST_CASE("config errors") {
  try {
    parse_config("computation: chern\nlatice:\n  name: honeycomb\n");
    FAIL("typo accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("latice") != std::string::npos);
    CHECK(e.line() == 2);
    CHECK(e.column() == 1);
  }
  CHECK_THROWS_AS(parse_config("computation: nonsense\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("numerics:\n  mesh_n: 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("numerics:\n  mesh_n: many\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("numerics: [1, 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("output:\n  units: siemens\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(""), ConfigError);
}

TEST_CASE("config round trip") {
  RunConfig c;
  c.computation = "ed-ustability";
  c.model.name = "custom";
  c.model.params = {{"t", 1.25}, {"phi", std::numbers::pi / 3}};
  c.model.hoppings = {HoppingSpec{{0, 0}, {{{0.1, 0.0}, {0.0, 0.0}}, {{0.0, 0.0}, {-0.1, 0.0}}}},
                      HoppingSpec{{1, 0}, {{{0.0, 0.3}, {0.0, 0.0}}, {{0.0, 0.0}, {0.0, 0.0}}}},
                      HoppingSpec{{-1, 0}, {{{0.0, -0.3}, {0.0, 0.0}}, {{0.0, 0.0}, {0.0, 0.0}}}}};
  c.model.interaction = "intracell";
  c.lattice.name = "square";
  c.lattice.L1 = 2;
  c.lattice.L2 = 2;
  c.numerics.beta = 17.5;
  c.numerics.U = {0.0, 0.02, 0.05, 0.1};
  c.numerics.U_in_gap_units = true;
  c.numerics.L_values = {1, 2};
  c.numerics.omegas = {0.1, 1.0 / 3.0, 0.001};
  c.output.units = "e2h";
  c.output.formats = {"json"};
  const RunConfig back = parse_config(serialize_config(c));
  CHECK(back == c);
  CHECK(serialize_config(back) == serialize_config(c));

  const RunConfig d;
  CHECK(parse_config(serialize_config(d)) == d);
}

TEST_CASE("config overrides") {
  const std::string base = "computation: chern\nmodel:\n  name: haldane\n";
  const RunConfig c = parse_config(apply_overrides(base, {"numerics.mesh_n=400", "model.params.m=0.25", "numerics.beta=inf",
                                                           "numerics.omegas=[0.1, 0.01, 0.001]"}));
  CHECK(c.numerics.mesh_n == 400);
  CHECK(c.model.param("m", 0.0) == 0.25);
  CHECK(std::isinf(c.numerics.beta));
  CHECK(c.numerics.omegas.size() == 3);
  CHECK(c.model.name == "haldane");
  CHECK_THROWS_AS(apply_overrides(base, {"numerics.mesh_n"}), ConfigError);
  CHECK_THROWS_AS(apply_overrides(base, {"computation.x=1"}), ConfigError);
}

TEST_CASE("model construction") {
  RunConfig c;
  CHECK(make_bloch(c).spin_factor() == 2.0);
  c.model.name = "haldane";
  CHECK(make_bloch(c).spin_factor() == 1.0);
  CHECK(single_particle_gap(c) == doctest::Approx(3 * std::sqrt(3.0) * 0.1).epsilon(0.01));
  c.model.name = "qwz";
  CHECK_THROWS_AS(make_bloch(c), ConfigError);
  c.lattice.name = "square";
  CHECK(make_bloch(c).dim() == 2);
  c.model.name = "hubbard";
  c.lattice.name = "honeycomb";
  CHECK(make_ed_model(c, 1, 1, 0.5).modes() == 4);
}

TEST_CASE("chern and conductivity runs") {
  RunConfig chern;
  chern.computation = "chern";
  chern.model.name = "haldane";
  const RunResult r = run(chern);
  REQUIRE(r.data["chern"].is_number_integer());
  CHECK(std::abs(r.data["chern"].get<int>()) == 1);
  CHECK(r.provenance["version"] == kVersion);

  RunConfig cond;
  cond.numerics.refine_depth = 12;
  const RunResult g = run(cond);
  CHECK(g.data["sigma"][0][0].get<double>() == doctest::Approx(0.25).epsilon(0.02));
  CHECK(g.data["fermi_points"].size() == 2);
  CHECK(g.tables.at("correlator").rows.size() == 6);
}

TEST_CASE("determinism and output files") {
  RunConfig c;
  c.computation = "kubo-vs-tknn";
  c.model.name = "haldane";
  c.numerics.mesh_n = 60;
  const RunResult a = run(c);
  const RunResult b = run(c);
  CHECK(a.data.dump() == b.data.dump());

  const fs::path dir = scratch_dir("files");
  const std::vector<std::string> paths = write_result(a, dir.string());
  CHECK(paths.size() == 2);
  for (const auto& p : paths) CHECK(fs::exists(p));
  for (const auto& entry : fs::directory_iterator(dir)) CHECK(entry.path().extension() != ".tmp");
  CHECK(nlohmann::json::parse(slurp(dir / "kubo-vs-tknn.json")) == a.data);

  RunConfig w;
  w.computation = "ward-check";
  w.model.name = "haldane";
  w.lattice.L1 = w.lattice.L2 = 2;
  const RunResult ward = run(w);
  write_result(ward, dir.string());
  CHECK(fs::exists(dir / "ward-check.json"));
  CHECK(ward.data["runs"][0]["max_residual"].get<double>() <= 1e-12);

  CHECK_THROWS_AS(write_result(a, "/proc/kubo-no-such-dir"), IoError);
  CHECK_THROWS_AS(write_atomic("/proc/kubo-no-such-dir/x.json", "{}"), IoError);
  fs::remove_all(dir);
}

TEST_CASE("output directory override") {
  RunConfig c;
  c.output.directory = "from-config";
  ::unsetenv(kOutputDirEnv);
  CHECK(output_directory(c) == "from-config");
  ::setenv(kOutputDirEnv, "/tmp/from-env", 1);
  CHECK(output_directory(c) == "/tmp/from-env");
  ::unsetenv(kOutputDirEnv);
}

TEST_CASE("csv tables") {
  Table t;
  t.header = {"a", "b"};
  t.rows = {{1.0, 0.1}, {2.0, -1e-300}};
  const std::string csv = t.to_csv();
  CHECK(csv.rfind("a,b\n", 0) == 0);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  CHECK(std::stod(line.substr(line.find(',') + 1)) == 0.1);
}

TEST_CASE("convergence report") {
  RunConfig c;
  c.computation = "chern";
  c.model.name = "haldane";
  const Table t = convergence_report(c, "mesh_n", {12, 24, 48});
  CHECK(t.rows.size() == 3);
  CHECK_THROWS_AS(convergence_report(c, "colour", {1}), ConfigError);
  CHECK_THROWS_AS(convergence_report(c, "mesh_n", {}), ConfigError);
}
