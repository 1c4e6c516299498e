#pragma once

#include "kubo/fock.hpp"
#include "kubo/lattice_model.hpp"
#include "kubo/linear_response.hpp"

#include <Eigen/Dense>

#include <vector>

namespace kubo {

struct EDOptions {
  std::size_t max_sector_dim = 4096;  // dense diagonalisation cap per particle-number sector
  bool vectors = true;
};

struct Sector {
  FockSpace space;
  Eigen::VectorXd energies;  // eigenvalues of H (μ = 0), ascending
  Eigen::MatrixXcd vectors;  // columns; empty when not requested
};

// Full spectrum of H_L by particle-number sector.
struct ExactSpectrum {
  LatticeModel model;
  std::vector<Sector> sectors;  // sector N at index N

  std::size_t dim() const;
  // All eigenvalues of H − μN, sorted.
  std::vector<double> levels(double mu = 0.0) const;
};

ExactSpectrum diagonalize(const LatticeModel& model, const EDOptions& opt = {});

// Boltzmann weights e^{−β(E − μN)}/Z per sector and eigenstate.
struct GibbsState {
  double beta = 0.0;
  double mu = 0.0;
  double log_z = 0.0;
  std::vector<Eigen::VectorXd> weights;

  double weight_sum() const;
};

GibbsState gibbs_state(const ExactSpectrum& spec, double beta, double mu);

struct HalfFillingReport {
  double density = 0.0;          // ⟨N⟩ / modes
  double max_mode_deviation = 0.0;  // max_x |⟨n_x⟩ − ½|
};

HalfFillingReport half_filling_check(const ExactSpectrum& spec, double beta, double mu = 0.0);

// Smallest excitation energy of H − μN above its ground state.
double many_body_gap(const ExactSpectrum& spec, double mu = 0.0);

// K_ij(ω) = (1/(A L²)) Σ_mn (J_i)_mn (J_j)_nm (p_n − p_m)/(iω + E_m − E_n) at any ω.
CorrelatorSeries ed_correlator(const ExactSpectrum& spec, double beta, double mu,
                               const std::vector<double>& omegas);
// Same on the Matsubara grid; every ω must be a multiple of 2π/β.
CorrelatorSeries matsubara_correlator_ed(const ExactSpectrum& spec, double beta, double mu,
                                         const std::vector<double>& omegas);
// ω_n = 2πn/β for n = 1..count.
std::vector<double> matsubara_grid(double beta, int count);

// Kubo limit of the ED correlator with the linear (analytic) fit.
ConductivityTensor sigma_interacting(const ExactSpectrum& spec, double beta, double mu,
                                     const std::vector<double>& omegas);

struct WickReport {
  Eigen::Matrix2d imaginary_time = Eigen::Matrix2d::Zero();  // −(K_ji(ω) + ⟨D_ij⟩/(A L²))/ω
  Eigen::Matrix2d real_time = Eigen::Matrix2d::Zero();       // (R_ij(ω) − ⟨D_ij⟩)/(ω A L²)
  Eigen::Matrix2d difference = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d kubo_quotient = Eigen::Matrix2d::Zero();   // −(K_ij(ω) − K_ij(0))/ω
  Eigen::Matrix2d stiffness = Eigen::Matrix2d::Zero();       // (K(0) + ⟨D⟩/(A L²))/ω
  double truncation = 0.0;                                   // e^{−ω T_max}
  double max_imag = 0.0;
};

WickReport wick_rotation_check(const ExactSpectrum& spec, double beta, double mu, double t_max, double omega);

// ⟨[[H, X_i], X_j]⟩ from the bond expansion, unnormalised.
Eigen::Matrix2d double_commutator_expectation(const ExactSpectrum& spec, const GibbsState& g);

}  // namespace kubo
