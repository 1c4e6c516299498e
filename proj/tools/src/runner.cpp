#include "kubo/runner/runner.hpp"

#include "kubo/ed.hpp"
#include "kubo/error.hpp"
#include "kubo/linear_response.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace kubo::runner {

using nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

json mat2(const Eigen::Matrix2d& m) { return json::array({{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}}); }

json vec2(const Vec2& v) { return json::array({v.x(), v.y()}); }

Units units_of(const RunConfig& cfg) { return parse_units(cfg.output.units); }

FitModel fit_of(const RunConfig& cfg) { return cfg.numerics.fit == "linear" ? FitModel::Linear : FitModel::LogAware; }

void require_finite_beta(const RunConfig& cfg) {
  if (!std::isfinite(cfg.numerics.beta)) {
    throw ConfigError("computation '" + cfg.computation + "' needs a finite numerics.beta");
  }
}

json sigma_json(const ConductivityTensor& c) {
  json j;
  j["units"] = units_name(c.units);
  j["sigma"] = mat2(c.sigma());
  j["uncertainty"] = mat2(c.uncertainty());
  j["log_coefficient_natural"] = mat2(c.log_coefficient);
  j["log_uncertainty_natural"] = mat2(c.log_uncertainty);
  j["converged"] = c.converged;
  j["fit"] = {{"model", fit_model_name(c.fit.model)},
              {"primary_points", c.fit.primary_points},
              {"omegas", c.fit.omegas},
              {"max_imag", c.fit.max_imag}};
  json q = json::array();
  for (const auto& m : c.fit.quotients) q.push_back(mat2(m));
  j["fit"]["quotients_natural"] = q;
  return j;
}

Table correlator_table(const CorrelatorSeries& s, double tag = std::nan("")) {
  Table t;
  if (!std::isnan(tag)) t.header.push_back("U");
  for (const char* h : {"omega", "re_K11", "im_K11", "re_K12", "im_K12", "re_K21", "im_K21", "re_K22", "im_K22"}) {
    t.header.push_back(h);
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::vector<double> row;
    if (!std::isnan(tag)) row.push_back(tag);
    row.push_back(s.omegas[i]);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        row.push_back(s.values[i](a, b).real());
        row.push_back(s.values[i](a, b).imag());
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void append(Table& dst, const Table& src) {
  if (dst.header.empty()) dst.header = src.header;
  dst.rows.insert(dst.rows.end(), src.rows.begin(), src.rows.end());
}

std::vector<double> interaction_values(const RunConfig& cfg, double& gap) {
  gap = std::nan("");
  if (cfg.numerics.U_in_gap_units) gap = single_particle_gap(cfg);
  std::vector<double> out;
  for (double u : cfg.numerics.U) out.push_back(cfg.numerics.U_in_gap_units ? u * gap : u);
  return out;
}

EDOptions ed_options(const RunConfig& cfg) {
  EDOptions o;
  o.max_sector_dim = static_cast<std::size_t>(cfg.numerics.max_sector_dim);
  return o;
}

BZMesh conductivity_mesh(const RunConfig& cfg, const BlochHamiltonian& h, json& diag) {
  const LatticeSpec cell = make_lattice(h.tag(), h.l1(), h.l2(), 1, 1, h.offsets());
  const BZMesh base = bz_mesh(cell, cfg.numerics.mesh_n);
  diag["gap"] = json::object();
  const GapReport gap = spectral_gap(h, cfg.numerics.mu, base);
  diag["gap"] = {{"delta_mu", gap.delta_mu}, {"argmin_k", vec2(gap.argmin_k)}, {"mesh_n", gap.mesh_n}};
  json fps = json::array();
  std::vector<Vec2> centers;
  if (cfg.numerics.mesh_n >= 2) {
    for (const FermiPoint& p : fermi_points(h, cfg.numerics.mu, base, 1e-3, 20)) {
      centers.push_back(p.k);
      fps.push_back({{"k", vec2(p.k)}, {"residual", p.residual}, {"resolution", p.resolution}});
    }
  }
  diag["fermi_points"] = fps;
  if (cfg.numerics.refine_depth == 0 || centers.empty()) {
    diag["mesh"] = {{"n", base.n}, {"points", base.size()}, {"refine_depth", 0}};
    return base;
  }
  const RefinementSpec r{centers, cfg.numerics.refine_depth, cfg.numerics.refine_halo};
  BZMesh mesh = bz_mesh(cell, cfg.numerics.mesh_n, r);
  diag["mesh"] = {{"n", mesh.n},
                  {"points", mesh.size()},
                  {"refine_depth", r.depth},
                  {"refine_halo", r.halo},
                  {"weight_sum", mesh.weight_sum()},
                  {"area", mesh.area()}};
  return mesh;
}

RunResult run_conductivity(const RunConfig& cfg) {
  RunResult res;
  const BlochHamiltonian h = make_bloch(cfg);
  json diag;
  const BZMesh mesh = conductivity_mesh(cfg, h, diag);
  const CorrelatorSeries s = kubo_correlator_free(h, cfg.numerics.mu, cfg.numerics.beta, mesh, cfg.numerics.omegas);
  const ConductivityTensor c = kubo_sigma(s, fit_of(cfg)).in(units_of(cfg));
  res.data = sigma_json(c);
  res.data.update(diag);
  res.data["spin_factor"] = h.spin_factor();
  res.tables["correlator"] = correlator_table(s);
  return res;
}

json chern_json(const ChernReport& r) {
  return {{"chern", r.chern},       {"mesh_n", r.mesh_n},     {"max_flux", r.max_flux},
          {"mean_abs_flux", r.mean_abs_flux}, {"raw_sum", r.raw_sum}, {"bands_below_mu", r.bands_below_mu},
          {"retries", r.retries}};
}

RunResult run_chern(const RunConfig& cfg) {
  RunResult res;
  const BlochHamiltonian h = make_bloch(cfg);
  const ChernReport r = fhs_chern(h, cfg.numerics.mu, cfg.numerics.chern_n);
  res.data = chern_json(r);
  try {
    res.data["band_chern"] = band_chern_numbers(h, cfg.numerics.chern_n);
  } catch (const ComputationError& e) {
    res.data["band_chern"] = nullptr;
    res.data["band_chern_note"] = e.what();
  }
  res.data["tknn"] = sigma_json(tknn_sigma12(r).in(units_of(cfg)));
  return res;
}

RunResult run_kubo_vs_tknn(const RunConfig& cfg) {
  RunResult res;
  const BlochHamiltonian h = make_bloch(cfg);
  json diag;
  const BZMesh mesh = conductivity_mesh(cfg, h, diag);
  const KuboTknnComparison cmp = kubo_vs_tknn(h, cfg.numerics.mu, mesh, cfg.numerics.omegas, cfg.numerics.chern_n);
  res.data["kubo"] = sigma_json(cmp.kubo.in(units_of(cfg)));
  res.data["tknn"] = sigma_json(cmp.tknn.in(units_of(cfg)));
  res.data["chern"] = chern_json(cmp.chern);
  res.data["discrepancy_e2h"] = mat2(cmp.discrepancy_e2h);
  res.data.update(diag);
  return res;
}

RunResult run_ed_spectrum(const RunConfig& cfg) {
  RunResult res;
  double gap = 0.0;
  const std::vector<double> us = interaction_values(cfg, gap);
  Table levels;
  levels.header = {"U", "index", "energy"};
  json runs = json::array();
  for (double u : us) {
    const LatticeModel m = make_ed_model(cfg, cfg.lattice.L1, cfg.lattice.L2, u);
    const ExactSpectrum spec = diagonalize(m, ed_options(cfg));
    const std::vector<double> e = spec.levels(cfg.numerics.mu);
    json r = {{"U", u},
              {"modes", m.modes()},
              {"dimension", spec.dim()},
              {"ground_energy", e.front()},
              {"many_body_gap", many_body_gap(spec, cfg.numerics.mu)},
              {"lowest_levels", std::vector<double>(e.begin(), e.begin() + std::min<std::size_t>(e.size(), 16))}};
    if (std::isfinite(cfg.numerics.beta)) {
      const HalfFillingReport hf = half_filling_check(spec, cfg.numerics.beta, cfg.numerics.mu);
      r["density"] = hf.density;
      r["max_mode_deviation"] = hf.max_mode_deviation;
    }
    runs.push_back(r);
    for (std::size_t i = 0; i < e.size(); ++i) levels.rows.push_back({u, static_cast<double>(i), e[i]});
  }
  res.data["runs"] = runs;
  if (!std::isnan(gap)) res.data["single_particle_gap"] = gap;
  res.tables["levels"] = levels;
  return res;
}

RunResult run_ed_conductivity(const RunConfig& cfg) {
  require_finite_beta(cfg);
  RunResult res;
  double gap = 0.0;
  const std::vector<double> us = interaction_values(cfg, gap);
  const std::vector<double> grid = matsubara_grid(cfg.numerics.beta, cfg.numerics.matsubara_count);
  json runs = json::array();
  Table corr;
  for (double u : us) {
    const ExactSpectrum spec = diagonalize(make_ed_model(cfg, cfg.lattice.L1, cfg.lattice.L2, u), ed_options(cfg));
    const CorrelatorSeries s = matsubara_correlator_ed(spec, cfg.numerics.beta, cfg.numerics.mu, grid);
    json r = sigma_json(sigma_interacting(spec, cfg.numerics.beta, cfg.numerics.mu, grid).in(units_of(cfg)));
    r["U"] = u;
    r["many_body_gap"] = many_body_gap(spec, cfg.numerics.mu);
    runs.push_back(r);
    append(corr, correlator_table(s, u));
  }
  res.data["runs"] = runs;
  if (!std::isnan(gap)) res.data["single_particle_gap"] = gap;
  res.tables["correlator"] = corr;
  return res;
}

RunResult run_ed_ustability(const RunConfig& cfg) {
  require_finite_beta(cfg);
  RunResult res;
  double gap = 0.0;
  const std::vector<double> us = interaction_values(cfg, gap);
  const std::vector<double> grid = matsubara_grid(cfg.numerics.beta, cfg.numerics.matsubara_count);
  std::vector<int> sizes = cfg.numerics.L_values;
  if (sizes.empty()) sizes = {cfg.lattice.L1};
  const double scale = ConductivityTensor::scale(units_of(cfg));
  Table t;
  t.header = {"L", "U", "U_over_gap", "sigma12", "deviation"};
  json runs = json::array();
  for (int L : sizes) {
    auto sigma12 = [&](double u) {
      const ExactSpectrum spec = diagonalize(make_ed_model(cfg, L, L, u), ed_options(cfg));
      return sigma_interacting(spec, cfg.numerics.beta, cfg.numerics.mu, grid).sigma_natural(0, 1);
    };
    const double s0 = sigma12(0.0);
    json per = {{"L", L}, {"sigma12_U0", scale * s0}, {"points", json::array()}};
    for (double u : us) {
      const double s = u == 0.0 ? s0 : sigma12(u);
      const double dev = scale * std::abs(s - s0);
      const double ratio = std::isnan(gap) ? std::nan("") : u / gap;
      per["points"].push_back({{"U", u}, {"U_over_gap", std::isnan(ratio) ? json(nullptr) : json(ratio)},
                               {"sigma12", scale * s}, {"deviation", dev}});
      t.rows.push_back({static_cast<double>(L), u, ratio, scale * s, dev});
    }
    runs.push_back(per);
  }
  res.data["units"] = cfg.output.units;
  res.data["runs"] = runs;
  if (!std::isnan(gap)) res.data["single_particle_gap"] = gap;
  res.tables["ustability"] = t;
  return res;
}

RunResult run_wick(const RunConfig& cfg) {
  require_finite_beta(cfg);
  RunResult res;
  double gap = 0.0;
  const std::vector<double> us = interaction_values(cfg, gap);
  double omega = cfg.numerics.omega;
  if (omega == 0.0) {
    if (std::isnan(gap)) gap = single_particle_gap(cfg);
    omega = cfg.numerics.omega_over_gap * gap;
  }
  const double t_max = cfg.numerics.T_max > 0.0 ? cfg.numerics.T_max : std::log(1e10) / omega;
  json runs = json::array();
  for (double u : us) {
    const ExactSpectrum spec = diagonalize(make_ed_model(cfg, cfg.lattice.L1, cfg.lattice.L2, u), ed_options(cfg));
    const WickReport w = wick_rotation_check(spec, cfg.numerics.beta, cfg.numerics.mu, t_max, omega);
    runs.push_back({{"U", u},
                    {"imaginary_time", mat2(w.imaginary_time)},
                    {"real_time", mat2(w.real_time)},
                    {"difference", mat2(w.difference)},
                    {"max_difference", w.difference.cwiseAbs().maxCoeff()},
                    {"kubo_quotient", mat2(w.kubo_quotient)},
                    {"stiffness_over_omega", mat2(w.stiffness)},
                    {"max_imag", w.max_imag}});
  }
  res.data = {{"omega", omega}, {"T_max", t_max}, {"truncation", std::exp(-omega * t_max)}, {"runs", runs}};
  if (!std::isnan(gap)) res.data["single_particle_gap"] = gap;
  return res;
}

RunResult run_ward(const RunConfig& cfg) {
  RunResult res;
  double gap = 0.0;
  const std::vector<double> us = interaction_values(cfg, gap);
  json runs = json::array();
  for (std::size_t k = 0; k < us.size(); ++k) {
    const LatticeModel m = make_ed_model(cfg, cfg.lattice.L1, cfg.lattice.L2, us[k]);
    const FockSpace space = m.modes() <= 14 ? FockSpace::full(m.modes()) : FockSpace::sector(m.modes(), m.modes() / 2);
    const ContinuityReport r = continuity_check(m, space);
    json j = {{"U", us[k]}, {"max_residual", r.max_residual}, {"max_commutator", r.max_commutator}};
    if (k == 0) j["corrupted_residual"] = continuity_check(m, space, true).max_residual;
    runs.push_back(j);
  }
  res.data["runs"] = runs;
  return res;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

std::string Table::to_csv() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
    os << "\n";
  }
  return os.str();
}

LatticeSpec make_run_lattice(const RunConfig& cfg) {
  const LatticeConfig& l = cfg.lattice;
  if (l.name == "honeycomb") return build_honeycomb(l.L1, l.L2, l.spinful);
  if (l.name == "square") {
    return make_lattice("square", Vec2(1, 0), Vec2(0, 1), l.L1, l.L2,
                        std::vector<Vec2>(static_cast<std::size_t>(l.orbitals), Vec2::Zero()));
  }
  std::vector<Vec2> offsets;
  for (const auto& o : l.offsets) offsets.emplace_back(o[0], o[1]);
  return make_lattice("custom", Vec2(l.basis[0][0], l.basis[0][1]), Vec2(l.basis[1][0], l.basis[1][1]), l.L1, l.L2,
                      std::move(offsets));
}

BlochHamiltonian make_bloch(const RunConfig& cfg) {
  const ModelConfig& m = cfg.model;
  auto need = [&](const char* lattice) {
    if (cfg.lattice.name != lattice) {
      throw ConfigError("model '" + m.name + "' needs lattice '" + lattice + "'");
    }
  };
  BlochHamiltonian h = [&]() -> BlochHamiltonian {
    if (m.name == "graphene" || m.name == "hubbard") {
      need("honeycomb");
      return graphene_bloch(m.param("t", 1.0)).with_spin_factor(2.0);
    }
    if (m.name == "haldane") {
      need("honeycomb");
      return haldane_bloch(m.param("t1", m.param("t", 1.0)), m.param("t2", 0.1),
                           m.param("phi", std::numbers::pi / 2), m.param("m", 0.0));
    }
    if (m.name == "qwz") {
      need("square");
      return qwz_bloch(m.param("m", 1.0));
    }
    LatticeConfig lc = cfg.lattice;
    lc.spinful = false;
    RunConfig c = cfg;
    c.lattice = lc;
    const LatticeSpec lat = make_run_lattice(c);
    if (m.name == "flat") return flat_bloch(lat, m.levels);
    std::vector<Hopping> hops;
    const auto n = static_cast<Eigen::Index>(lat.n_internal());
    for (const HoppingSpec& hs : m.hoppings) {
      if (static_cast<Eigen::Index>(hs.matrix.size()) != n) {
        throw ConfigError("custom hopping matrix must be " + std::to_string(n) + "x" + std::to_string(n));
      }
      MatrixC mat(n, n);
      for (Eigen::Index r = 0; r < n; ++r) {
        if (static_cast<Eigen::Index>(hs.matrix[static_cast<std::size_t>(r)].size()) != n) {
          throw ConfigError("custom hopping matrix must be " + std::to_string(n) + "x" + std::to_string(n));
        }
        for (Eigen::Index c2 = 0; c2 < n; ++c2) {
          const auto& z = hs.matrix[static_cast<std::size_t>(r)][static_cast<std::size_t>(c2)];
          mat(r, c2) = Complex(z[0], z[1]);
        }
      }
      hops.push_back({hs.cell, mat});
    }
    return custom_bloch("custom", lat, std::move(hops)).h;
  }();
  if (m.spin_factor > 0.0) h = h.with_spin_factor(m.spin_factor);
  return h;
}

LatticeModel make_ed_model(const RunConfig& cfg, int L1, int L2, double U) {
  if (cfg.model.name == "hubbard") {
    if (cfg.lattice.name != "honeycomb") throw ConfigError("model 'hubbard' needs lattice 'honeycomb'");
    return build_hubbard_ed(build_honeycomb(L1, L2, true), cfg.model.param("t", 1.0), U);
  }
  const BlochHamiltonian h = make_bloch(cfg);
  std::vector<KernelEntry> kernel;
  if (cfg.model.interaction == "bond") {
    if (h.dim() != 2 || cfg.lattice.name != "honeycomb") {
      throw ConfigError("interaction 'bond' needs a two-sublattice honeycomb model");
    }
    kernel = honeycomb_bond_kernel();
  } else if (cfg.model.interaction == "intracell") {
    kernel = intracell_kernel(h.dim());
  }
  LatticeModel m = build_gapped_ed(h, kernel, U, L1, L2);
  return m;
}

double single_particle_gap(const RunConfig& cfg) {
  const BlochHamiltonian h = make_bloch(cfg);
  const LatticeSpec cell = make_lattice(h.tag(), h.l1(), h.l2(), 1, 1, h.offsets());
  const double g = spectral_gap(h, cfg.numerics.mu, bz_mesh(cell, 200)).delta_mu;
  if (!(g > 1e-8)) throw ComputationError("model is gapless at mu; U_in_gap_units / omega_over_gap need a gap");
  return g;
}

RunResult run(const RunConfig& cfg) {
  validate(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  RunResult res;
  const std::string& c = cfg.computation;
  if (c == "conductivity") {
    res = run_conductivity(cfg);
  } else if (c == "chern") {
    res = run_chern(cfg);
  } else if (c == "kubo-vs-tknn") {
    res = run_kubo_vs_tknn(cfg);
  } else if (c == "ed-spectrum") {
    res = run_ed_spectrum(cfg);
  } else if (c == "ed-conductivity") {
    res = run_ed_conductivity(cfg);
  } else if (c == "ed-ustability") {
    res = run_ed_ustability(cfg);
  } else if (c == "wick-check") {
    res = run_wick(cfg);
  } else {
    res = run_ward(cfg);
  }
  res.config = cfg;
  res.data["computation"] = c;
  res.data["model"] = cfg.model.name;
  res.data["config"] = serialize_config(cfg);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.provenance = {{"version", kVersion}, {"timestamp", utc_timestamp()}, {"wall_time_s", wall}};
  return res;
}

std::string output_directory(const RunConfig& cfg) {
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return cfg.output.directory;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + target.string() + "'");
  }
}

std::vector<std::string> write_result(const RunResult& result, const std::string& directory) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec || !fs::is_directory(directory)) throw IoError("cannot create output directory '" + directory + "'");
  const std::string stem = (fs::path(directory) / result.config.computation).string();
  const auto& formats = result.config.output.formats;
  const bool json_out = std::find(formats.begin(), formats.end(), "json") != formats.end();
  const bool csv_out = std::find(formats.begin(), formats.end(), "csv") != formats.end();
  std::vector<std::string> written;
  if (json_out) {
    write_atomic(stem + ".json", result.data.dump(2) + "\n");
    write_atomic(stem + ".provenance.json", result.provenance.dump(2) + "\n");
    written.push_back(stem + ".json");
    written.push_back(stem + ".provenance.json");
  }
  if (csv_out) {
    for (const auto& [name, table] : result.tables) {
      const std::string path = stem + "_" + name + ".csv";
      write_atomic(path, table.to_csv());
      written.push_back(path);
    }
  }
  return written;
}

namespace {

std::vector<std::pair<std::string, double>> headline(const RunResult& r) {
  const json& d = r.data;
  const std::string& c = r.config.computation;
  std::vector<std::pair<std::string, double>> out;
  if (c == "conductivity") {
    out = {{"sigma11", d["sigma"][0][0]}, {"sigma22", d["sigma"][1][1]}, {"sigma12", d["sigma"][0][1]}};
  } else if (c == "chern") {
    out = {{"chern", d["chern"].get<double>()}};
  } else if (c == "kubo-vs-tknn") {
    out = {{"kubo_sigma12", d["kubo"]["sigma"][0][1]}, {"tknn_sigma12", d["tknn"]["sigma"][0][1]},
           {"discrepancy_e2h", d["discrepancy_e2h"][0][1]}};
  } else if (c == "ed-spectrum") {
    out = {{"ground_energy", d["runs"][0]["ground_energy"]}, {"many_body_gap", d["runs"][0]["many_body_gap"]}};
  } else if (c == "ed-conductivity") {
    out = {{"sigma11", d["runs"][0]["sigma"][0][0]}, {"sigma12", d["runs"][0]["sigma"][0][1]}};
  } else if (c == "ed-ustability") {
    for (const auto& run : d["runs"]) {
      for (const auto& p : run["points"]) {
        out.push_back({"deviation_L" + std::to_string(run["L"].get<int>()) + "_U" + format_double(p["U"].get<double>()),
                       p["deviation"].get<double>()});
      }
    }
  } else if (c == "wick-check") {
    double m = 0.0;
    for (const auto& run : d["runs"]) m = std::max(m, run["max_difference"].get<double>());
    out = {{"max_difference", m}};
  } else {
    double m = 0.0;
    for (const auto& run : d["runs"]) m = std::max(m, run["max_residual"].get<double>());
    out = {{"max_residual", m}};
  }
  return out;
}

}  // namespace

Table convergence_report(const RunConfig& cfg, const std::string& parameter, const std::vector<double>& values) {
  if (std::find(kConvergenceParameters.begin(), kConvergenceParameters.end(), parameter) ==
      kConvergenceParameters.end()) {
    throw ConfigError("unknown convergence parameter '" + parameter + "'");
  }
  if (values.empty()) throw ConfigError("convergence report needs at least one value");
  Table t;
  std::vector<double> previous;
  for (double v : values) {
    RunConfig c = cfg;
    if (parameter == "mesh_n") {
      c.numerics.mesh_n = static_cast<int>(std::lround(v));
    } else if (parameter == "beta") {
      c.numerics.beta = v;
    } else if (parameter == "L") {
      const int L = static_cast<int>(std::lround(v));
      c.lattice.L1 = c.lattice.L2 = L;
      c.numerics.L_values = {L};
    } else if (parameter == "omega_min") {
      c.numerics.omegas = {100.0 * v, 30.0 * v, 10.0 * v, 3.0 * v, v};
    } else {
      c.numerics.T_max = v;
    }
    const RunResult r = run(c);
    const auto h = headline(r);
    if (t.header.empty()) {
      t.header.push_back(parameter);
      for (const auto& [name, val] : h) t.header.push_back(name);
      for (const auto& [name, val] : h) t.header.push_back("delta_" + name);
    }
    if (h.size() + 1 != (t.header.size() + 1) / 2) throw ComputationError("convergence columns changed between runs");
    std::vector<double> row{v};
    for (const auto& [name, val] : h) row.push_back(val);
    for (std::size_t i = 0; i < h.size(); ++i) {
      row.push_back(previous.empty() ? std::nan("") : h[i].second - previous[i]);
    }
    previous.clear();
    for (const auto& [name, val] : h) previous.push_back(val);
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace kubo::runner
