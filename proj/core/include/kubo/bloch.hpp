#pragma once

#include "kubo/lattice.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace kubo {

using Complex = std::complex<double>;
using MatrixC = Eigen::MatrixXcd;

// One term H⁰(R) of the hopping list: the N×N matrix multiplying
// ψ⁺_{x,σ} ψ⁻_{x−R,σ'}, with R = cell[0] ℓ1 + cell[1] ℓ2.
struct Hopping {
  std::array<int, 2> cell{0, 0};
  MatrixC matrix;
};

// Single-particle Bloch Hamiltonian Ĥ(k) = Σ_R e^{ik·R} H⁰(R).
//
// Two gauges are exposed. operator() is the periodic gauge, Ĥ(k+G) = Ĥ(k).
// offset_gauge() includes internal positions in the phases,
// H̃_{σσ'}(k) = e^{ik·(r_σ − r_σ')} Ĥ_{σσ'}(k); its k-gradient is the Fourier
// transform of the bond-current operator. Both have the same spectrum.
class BlochHamiltonian {
 public:
  using Evaluator = std::function<MatrixC(const Vec2&)>;

  BlochHamiltonian(std::string tag, const Vec2& l1, const Vec2& l2, std::vector<Vec2> offsets,
                   std::vector<Hopping> hoppings);
  // Pure-function model: no hopping list, so no analytic current vertex.
  static BlochHamiltonian from_function(std::string tag, const Vec2& l1, const Vec2& l2,
                                        std::vector<Vec2> offsets, Evaluator periodic);

  int dim() const { return static_cast<int>(offsets_.size()); }
  const std::string& tag() const { return tag_; }
  const Vec2& l1() const { return l1_; }
  const Vec2& l2() const { return l2_; }
  const std::vector<Vec2>& offsets() const { return offsets_; }
  bool has_hoppings() const { return has_hoppings_; }
  const std::vector<Hopping>& hoppings() const { return hoppings_; }
  // Largest |R| component over the hopping list, in cells.
  int hopping_range() const;

  // Multiplicity of identical, decoupled copies (2 for spin-degenerate models).
  double spin_factor() const { return spin_factor_; }
  BlochHamiltonian with_spin_factor(double s) const;
  // Replaces Ĥ(k) evaluation with a closed form that must agree with the hopping list.
  BlochHamiltonian with_closed_form(Evaluator periodic) const;

  MatrixC operator()(const Vec2& k) const;
  MatrixC offset_gauge(const Vec2& k) const;
  // Ĵ_i(k) = ∂_{k_i} H̃(k), direction 1 or 2.
  MatrixC current_vertex(const Vec2& k, int direction) const;
  // ∂_{k_i} ∂_{k_j} H̃(k).
  MatrixC second_derivative(const Vec2& k, int i, int j) const;

  // Vector of eigenvalues of Ĥ(k), ascending.
  Eigen::VectorXd spectrum(const Vec2& k) const;

 private:
  BlochHamiltonian() = default;

  std::string tag_;
  Vec2 l1_ = Vec2(1, 0);
  Vec2 l2_ = Vec2(0, 1);
  std::vector<Vec2> offsets_;
  std::vector<Hopping> hoppings_;
  std::vector<Vec2> displacement_;  // Cartesian R per hopping
  bool has_hoppings_ = false;
  double spin_factor_ = 1.0;
  Evaluator closed_form_;
};

std::function<MatrixC(const Vec2&)> current_vertex(const BlochHamiltonian& h, int direction);

// Ω(k) = 1 + e^{−ik·ℓ1} + e^{−ik·ℓ2}.
Complex graphene_omega(const Vec2& k);
// Dirac points k_F± = (2π/3, ±2π/(3√3)).
std::array<Vec2, 2> graphene_fermi_points();

// Nearest-neighbour honeycomb model, off-diagonals −tΩ*, −tΩ. Per spin.
BlochHamiltonian graphene_bloch(double t);
// Honeycomb with NN hopping t1, NNN hopping t2 e^{±iφ} and staggered mass ±m.
BlochHamiltonian haldane_bloch(double t1, double t2, double phi, double m);
// Two-orbital square-lattice Chern insulator sin kx σx + sin ky σy + (m + cos kx + cos ky) σz.
BlochHamiltonian qwz_bloch(double m);
// k-independent diagonal model on a lattice with the given geometry.
BlochHamiltonian flat_bloch(const LatticeSpec& lat, const std::vector<double>& levels);

struct CustomBlochResult {
  BlochHamiltonian h;
  double correction = 0.0;  // max entry change made to enforce H⁰(−R) = H⁰(R)†
};

// Builds Ĥ from a hopping list. Terms are symmetrised to satisfy the
// conjugate-pair condition; violations above 1e-10 are an error.
CustomBlochResult custom_bloch(std::string tag, const LatticeSpec& lat, std::vector<Hopping> hoppings);

struct GapReport {
  double delta_mu = 0.0;
  Vec2 argmin_k = Vec2::Zero();
  int mesh_n = 0;
  double scan_delta = 0.0;  // minimum over the mesh points alone, before refinement
};

double distance_to_spectrum(const BlochHamiltonian& h, double mu, const Vec2& k);

// δ_μ = min over the mesh of dist(μ, spec Ĥ(k)), refined once around the argmin.
GapReport spectral_gap(const BlochHamiltonian& h, double mu, const BZMesh& mesh);

struct FermiPoint {
  Vec2 k;             // Cartesian
  double residual;    // dist(μ, spec Ĥ(k))
  double resolution;  // fractional step of the last refinement level
};

// Local minima of dist(μ, spec) on the mesh's n×n grid, zoomed by `zoom_levels`
// dyadic steps, that fall below tol. Empty for gapped models.
std::vector<FermiPoint> fermi_points(const BlochHamiltonian& h, double mu, const BZMesh& mesh,
                                     double tol, int zoom_levels = 10);

// Zooms onto the local minimum of dist(μ, spec) starting from a fractional point.
FermiPoint minimize_distance(const BlochHamiltonian& h, double mu, const BZMesh& mesh, Vec2 frac,
                             double step, int levels);

}  // namespace kubo
