#pragma once

#include "kubo/bloch.hpp"
#include "kubo/lattice.hpp"

#include <Eigen/Dense>

#include <limits>
#include <string>
#include <vector>

namespace kubo {

using Matrix2c = Eigen::Matrix2cd;

enum class Units { Natural, E2OverH };

const char* units_name(Units u);
Units parse_units(const std::string& s);

inline constexpr double kInfiniteBeta = std::numeric_limits<double>::infinity();

// K_ij(ω) on a frequency list. omegas[0] is always 0.
struct CorrelatorSeries {
  std::vector<double> omegas;
  std::vector<Matrix2c> values;
  double beta = kInfiniteBeta;
  int mesh_n = 0;
  std::string model_tag;

  std::size_t size() const { return omegas.size(); }
  const Matrix2c& at_zero() const { return values.front(); }
};

enum class FitModel { LogAware, Linear };

const char* fit_model_name(FitModel m);

// The ω → 0⁺ extrapolation behind a ConductivityTensor. Quotients are in natural units.
struct FitRecord {
  FitModel model = FitModel::LogAware;
  std::vector<double> omegas;
  std::vector<Eigen::Matrix2d> quotients;  // q(ω) = −[K(ω) − K(0)]/ω
  int primary_points = 0;                  // leading points used by the primary fit
  double max_imag = 0.0;                   // largest |Im q| seen (should vanish)
};

// σ_ij with diagnostics. Values are stored in natural units (e = ħ = 1) and
// rendered in `units`, so conversions round-trip exactly.
class ConductivityTensor {
 public:
  Units units = Units::Natural;
  Eigen::Matrix2d sigma_natural = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d uncertainty_natural = Eigen::Matrix2d::Zero();
  // Coefficient c₁ of ω log ω in the fit, and its uncertainty (natural units).
  Eigen::Matrix2d log_coefficient = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d log_uncertainty = Eigen::Matrix2d::Zero();
  FitRecord fit;
  bool converged = true;

  static double scale(Units u);
  Eigen::Matrix2d sigma() const { return scale(units) * sigma_natural; }
  Eigen::Matrix2d uncertainty() const { return scale(units) * uncertainty_natural; }
  ConductivityTensor in(Units u) const;
};

// Lehmann bubble on a quadrature mesh:
//   K_ij(ω) = s ∫ dk/(2π)² Σ_ab (Ĵ_i)_ab (Ĵ_j)_ba [f(E_b) − f(E_a)] / (iω + E_a − E_b)
// with s the model's spin factor. On a torus mesh this equals the finite-volume
// (1/(A β L²))⟨T Ĵ_i(ω) Ĵ_j(−ω)⟩ of the free Fock-space model. ω = 0 is prepended
// when absent; other ω may have either sign but must be nonzero.
CorrelatorSeries kubo_correlator_free(const BlochHamiltonian& h, double mu, double beta,
                                      const BZMesh& mesh, const std::vector<double>& omegas);

// {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}.
std::vector<double> default_omegas();

// Kubo limit σ = −lim (1/ω)[K(ω) − K(0)] by least squares on the quotient.
ConductivityTensor kubo_sigma(const CorrelatorSeries& series, FitModel model = FitModel::LogAware);

struct ChernReport {
  int chern = 0;
  int mesh_n = 0;
  double max_flux = 0.0;
  double mean_abs_flux = 0.0;
  double raw_sum = 0.0;  // (1/2π) Σ F before rounding
  int bands_below_mu = 0;
  int retries = 0;
};

// Fukui-Hatsugai-Suzuki lattice Chern number of the bands below μ.
ChernReport fhs_chern(const BlochHamiltonian& h, double mu, int n);
// Per-band Chern numbers, each band taken alone. Bands must not touch.
std::vector<int> band_chern_numbers(const BlochHamiltonian& h, int n);

ConductivityTensor tknn_sigma12(const ChernReport& report);

struct KuboTknnComparison {
  ConductivityTensor kubo;
  ConductivityTensor tknn;
  ChernReport chern;
  Eigen::Matrix2d discrepancy_e2h = Eigen::Matrix2d::Zero();  // |kubo − tknn| per entry
};

KuboTknnComparison kubo_vs_tknn(const BlochHamiltonian& h, double mu, const BZMesh& mesh,
                                const std::vector<double>& omegas, int n);

}  // namespace kubo
