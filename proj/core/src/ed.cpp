#include "kubo/ed.hpp"

#include "kubo/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kubo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_vectors(const ExactSpectrum& spec) {
  for (const Sector& s : spec.sectors) {
    if (s.vectors.cols() != s.energies.size()) {
      throw InvalidArgument("this computation needs eigenvectors; diagonalize with vectors = true");
    }
  }
}

void require_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("ED needs a finite positive beta");
}

double volume(const ExactSpectrum& spec) { return spec.model.area() * spec.model.lat.n_cells(); }

// Current matrices in each sector's eigenbasis.
struct EigenCurrents {
  std::vector<Eigen::MatrixXcd> j1;
  std::vector<Eigen::MatrixXcd> j2;
};

EigenCurrents eigen_currents(const ExactSpectrum& spec) {
  EigenCurrents out;
  for (const Sector& s : spec.sectors) {
    const Eigen::MatrixXcd& v = s.vectors;
    out.j1.push_back(v.adjoint() * bond_current_operator(spec.model, s.space, 1).dense() * v);
    out.j2.push_back(v.adjoint() * bond_current_operator(spec.model, s.space, 2).dense() * v);
  }
  return out;
}

}  // namespace

std::size_t ExactSpectrum::dim() const {
  std::size_t d = 0;
  for (const Sector& s : sectors) d += s.space.dim();
  return d;
}

std::vector<double> ExactSpectrum::levels(double mu) const {
  std::vector<double> out;
  for (std::size_t n = 0; n < sectors.size(); ++n) {
    for (Eigen::Index m = 0; m < sectors[n].energies.size(); ++m) {
      out.push_back(sectors[n].energies[m] - mu * static_cast<double>(n));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

ExactSpectrum diagonalize(const LatticeModel& model, const EDOptions& opt) {
  ExactSpectrum spec;
  spec.model = model;
  const int modes = model.modes();
  for (int n = 0; n <= modes; ++n) {
    FockSpace space = FockSpace::sector(modes, n);
    if (space.dim() > opt.max_sector_dim) {
      throw ComputationError("sector N=" + std::to_string(n) + " has dimension " + std::to_string(space.dim()) +
                             ", above the dense diagonalisation cap " + std::to_string(opt.max_sector_dim));
    }
    const Eigen::MatrixXcd h = hamiltonian(model, space).dense();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
        h, opt.vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw ComputationError("eigensolver failed in sector N=" + std::to_string(n));
    Sector s{std::move(space), es.eigenvalues(), {}};
    if (opt.vectors) s.vectors = es.eigenvectors();
    spec.sectors.push_back(std::move(s));
  }
  return spec;
}

double GibbsState::weight_sum() const {
  double s = 0.0;
  for (const auto& w : weights) s += w.sum();
  return s;
}

GibbsState gibbs_state(const ExactSpectrum& spec, double beta, double mu) {
  require_beta(beta);
  GibbsState g;
  g.beta = beta;
  g.mu = mu;
  double top = -std::numeric_limits<double>::infinity();
  std::vector<Eigen::VectorXd> x;
  for (std::size_t n = 0; n < spec.sectors.size(); ++n) {
    Eigen::VectorXd e = -beta * (spec.sectors[n].energies.array() - mu * static_cast<double>(n));
    top = std::max(top, e.maxCoeff());
    x.push_back(std::move(e));
  }
  double z = 0.0;
  for (const auto& e : x) z += (e.array() - top).exp().sum();
  g.log_z = top + std::log(z);
  for (const auto& e : x) g.weights.push_back((e.array() - g.log_z).exp());
  return g;
}

HalfFillingReport half_filling_check(const ExactSpectrum& spec, double beta, double mu) {
  require_vectors(spec);
  const GibbsState g = gibbs_state(spec, beta, mu);
  const int modes = spec.model.modes();
  std::vector<double> occ(static_cast<std::size_t>(modes), 0.0);
  double total = 0.0;
  for (std::size_t n = 0; n < spec.sectors.size(); ++n) {
    const Sector& s = spec.sectors[n];
    const Eigen::VectorXd pop = s.vectors.cwiseAbs2() * g.weights[n];
    for (std::size_t i = 0; i < s.space.dim(); ++i) {
      const std::uint32_t bits = s.space.state(i);
      for (int m = 0; m < modes; ++m) {
        if ((bits >> m) & 1u) occ[static_cast<std::size_t>(m)] += pop[static_cast<Eigen::Index>(i)];
      }
    }
    total += static_cast<double>(n) * g.weights[n].sum();
  }
  HalfFillingReport rep;
  rep.density = total / modes;
  for (double o : occ) rep.max_mode_deviation = std::max(rep.max_mode_deviation, std::abs(o - 0.5));
  return rep;
}

double many_body_gap(const ExactSpectrum& spec, double mu) {
  const std::vector<double> e = spec.levels(mu);
  if (e.size() < 2) return 0.0;
  return e[1] - e[0];
}

CorrelatorSeries ed_correlator(const ExactSpectrum& spec, double beta, double mu,
                               const std::vector<double>& omegas) {
  require_vectors(spec);
  const GibbsState g = gibbs_state(spec, beta, mu);
  const EigenCurrents cur = eigen_currents(spec);
  CorrelatorSeries out;
  out.omegas.push_back(0.0);
  for (double w : omegas) {
    if (!std::isfinite(w)) throw InvalidArgument("non-finite frequency");
    if (w != 0.0) out.omegas.push_back(w);
  }
  out.beta = beta;
  out.mesh_n = spec.model.lat.L1;
  out.model_tag = spec.model.tag;
  out.values.assign(out.omegas.size(), Matrix2c::Zero());
  const double norm = 1.0 / volume(spec);
  for (std::size_t n = 0; n < spec.sectors.size(); ++n) {
    const Eigen::VectorXd& e = spec.sectors[n].energies;
    const Eigen::VectorXd& p = g.weights[n];
    const Eigen::MatrixXcd& j1 = cur.j1[n];
    const Eigen::MatrixXcd& j2 = cur.j2[n];
    for (Eigen::Index a = 0; a < e.size(); ++a) {
      for (Eigen::Index b = 0; b < e.size(); ++b) {
        Matrix2c x;
        x(0, 0) = j1(a, b) * j1(b, a);
        x(0, 1) = j1(a, b) * j2(b, a);
        x(1, 0) = j2(a, b) * j1(b, a);
        x(1, 1) = j2(a, b) * j2(b, a);
        const double delta = e[a] - e[b];
        for (std::size_t iw = 0; iw < out.omegas.size(); ++iw) {
          const double om = out.omegas[iw];
          Complex kernel;
          if (om == 0.0) {
            const double xb = beta * delta;
            kernel = std::abs(xb) < 1.0 ? p[a] * beta * (xb == 0.0 ? 1.0 : std::expm1(xb) / xb)
                                        : (p[b] - p[a]) / delta;
          } else {
            kernel = (p[b] - p[a]) / Complex(delta, om);
          }
          out.values[iw] += (norm * kernel) * x;
        }
      }
    }
  }
  return out;
}

std::vector<double> matsubara_grid(double beta, int count) {
  require_beta(beta);
  std::vector<double> w;
  for (int n = 1; n <= count; ++n) w.push_back(kTwoPi * n / beta);
  return w;
}

CorrelatorSeries matsubara_correlator_ed(const ExactSpectrum& spec, double beta, double mu,
                                         const std::vector<double>& omegas) {
  require_beta(beta);
  for (double w : omegas) {
    const double n = w * beta / kTwoPi;
    if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, std::abs(n))) {
      throw InvalidArgument("frequency " + std::to_string(w) + " is not on the Matsubara grid 2 pi Z / beta");
    }
  }
  return ed_correlator(spec, beta, mu, omegas);
}

ConductivityTensor sigma_interacting(const ExactSpectrum& spec, double beta, double mu,
                                     const std::vector<double>& omegas) {
  const double gap = many_body_gap(spec, mu);
  if (!(gap > 1e-10)) throw ComputationError("finite-size spectrum is gapless; interacting Kubo limit undefined");
  return kubo_sigma(matsubara_correlator_ed(spec, beta, mu, omegas), FitModel::Linear);
}

Eigen::Matrix2d double_commutator_expectation(const ExactSpectrum& spec, const GibbsState& g) {
  require_vectors(spec);
  Eigen::Matrix2d d = Eigen::Matrix2d::Zero();
  for (std::size_t n = 0; n < spec.sectors.size(); ++n) {
    const Sector& s = spec.sectors[n];
    for (int i = 1; i <= 2; ++i) {
      for (int j = 1; j <= 2; ++j) {
        const Eigen::MatrixXcd dm = s.vectors.adjoint() * double_commutator_operator(spec.model, s.space, i, j).dense() *
                                    s.vectors;
        d(i - 1, j - 1) += (dm.diagonal().real().array() * g.weights[n].array()).sum();
      }
    }
  }
  return d;
}

WickReport wick_rotation_check(const ExactSpectrum& spec, double beta, double mu, double t_max, double omega) {
  if (!(omega > 0.0)) throw InvalidArgument("Wick rotation check needs omega > 0");
  if (!(t_max > 0.0)) throw InvalidArgument("Wick rotation check needs T_max > 0");
  require_vectors(spec);
  const GibbsState g = gibbs_state(spec, beta, mu);
  const EigenCurrents cur = eigen_currents(spec);
  const double vol = volume(spec);
  const Eigen::Matrix2d dexp = double_commutator_expectation(spec, g);

  Matrix2c r = Matrix2c::Zero();
  const Complex i(0.0, 1.0);
  for (std::size_t n = 0; n < spec.sectors.size(); ++n) {
    const Eigen::VectorXd& e = spec.sectors[n].energies;
    const Eigen::VectorXd& p = g.weights[n];
    for (Eigen::Index a = 0; a < e.size(); ++a) {
      for (Eigen::Index b = 0; b < e.size(); ++b) {
        const double dp = p[a] - p[b];
        if (dp == 0.0) continue;
        const Complex z(omega, e[a] - e[b]);
        const Complex integral = (1.0 - std::exp(-z * t_max)) / z;
        Matrix2c x;
        x(0, 0) = cur.j1[n](a, b) * cur.j1[n](b, a);
        x(0, 1) = cur.j1[n](a, b) * cur.j2[n](b, a);
        x(1, 0) = cur.j2[n](a, b) * cur.j1[n](b, a);
        x(1, 1) = cur.j2[n](a, b) * cur.j2[n](b, a);
        r += (i * dp * integral) * x;
      }
    }
  }
  const CorrelatorSeries k = ed_correlator(spec, beta, mu, {omega});
  WickReport rep;
  rep.truncation = std::exp(-omega * t_max);
  const Matrix2c kt = k.values[1].transpose();
  const Matrix2c lhs = -(kt + Matrix2c(dexp / vol)) / omega;
  const Matrix2c rhs = (r - Matrix2c(dexp)) / (omega * vol);
  rep.imaginary_time = lhs.real();
  rep.real_time = rhs.real();
  rep.difference = (lhs - rhs).real();
  rep.max_imag = std::max(lhs.imag().cwiseAbs().maxCoeff(), rhs.imag().cwiseAbs().maxCoeff());
  rep.kubo_quotient = (-(k.values[1] - k.values[0]) / omega).real();
  rep.stiffness = ((k.values[0] + Matrix2c(dexp / vol)) / omega).real();
  return rep;
}

}  // namespace kubo
