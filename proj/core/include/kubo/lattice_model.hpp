#pragma once

#include "kubo/bloch.hpp"
#include "kubo/fock.hpp"
#include "kubo/lattice.hpp"

#include <array>
#include <string>
#include <vector>

namespace kubo {

// amp ψ⁺_dest ψ⁻_src with bond = r_dest − r_src along the hopping that produced it.
struct BondTerm {
  int dest = 0;
  int src = 0;
  Complex amp;
  Vec2 bond = Vec2::Zero();
};

// One entry of the density-density kernel: v (n_{x,s} − ½)(n_{x−R,sp} − ½), summed over x.
struct KernelEntry {
  std::array<int, 2> cell{0, 0};
  int s = 0;
  int sp = 0;
  double v = 0.0;
};

// Second-quantized model on a finite torus (or open cluster). Modes are ordered
// by cell (lexicographic in n1, n2), then internal label.
struct LatticeModel {
  std::string tag;
  LatticeSpec lat;
  bool open = false;
  std::vector<BondTerm> hopping;
  std::vector<KernelEntry> kernel;
  double U = 0.0;
  double shift = 0.5;

  int modes() const { return lat.n_sites(); }
  int mode(int cell, int sigma) const { return cell * lat.n_internal() + sigma; }
  Vec2 mode_position(int m) const;
  double area() const { return cell_area(lat); }
};

// Real-space hopping terms of a Bloch model on the L1×L2 torus, or on the open
// cluster (terms that wrap are dropped).
std::vector<BondTerm> real_space_hopping(const BlochHamiltonian& h, const LatticeSpec& lat, bool open);

// Spinful honeycomb Hubbard model, U Σ (n↑ − ½)(n↓ − ½).
LatticeModel build_hubbard_ed(const LatticeSpec& lat, double t, double U);
// Quadratic part from a Bloch model plus U times a density-density kernel.
LatticeModel build_gapped_ed(const BlochHamiltonian& h, const std::vector<KernelEntry>& v, double U,
                             int L1, int L2, bool open = false);
LatticeModel build_gapped_ed(const BlochHamiltonian& h, const std::vector<KernelEntry>& v, double U, int L);

// Honeycomb nearest-neighbour kernel, (n_A − ½)(n_B − ½) per bond.
std::vector<KernelEntry> honeycomb_bond_kernel();
// Intra-cell kernel between distinct internal labels, (n_σ − ½)(n_σ' − ½) per pair.
std::vector<KernelEntry> intracell_kernel(int n_internal);

FockOperator hamiltonian(const LatticeModel& m, const FockSpace& space, double mu = 0.0);
FockOperator number_operator(const LatticeModel& m, const FockSpace& space);
FockOperator density_operator(const LatticeModel& m, const FockSpace& space, int mode);
// J_i = Σ i d_i amp ψ⁺_dest ψ⁻_src.
FockOperator bond_current_operator(const LatticeModel& m, const FockSpace& space, int direction);
// Σ d_i d_j amp ψ⁺_dest ψ⁻_src; equals [[H, X_i], X_j] on open clusters.
FockOperator double_commutator_operator(const LatticeModel& m, const FockSpace& space, int i, int j);
// X_i = Σ_x (r_x)_i n_x; meaningful on open clusters only.
FockOperator position_operator(const LatticeModel& m, const FockSpace& space, int direction);
// Σ_{dest=x} i amp ψ⁺_x ψ⁻_src − Σ_{src=x} i amp ψ⁺_dest ψ⁻_x. `flip` negates one term.
FockOperator divergence_operator(const LatticeModel& m, const FockSpace& space, int mode, int flip = -1);

struct ContinuityReport {
  double max_residual = 0.0;
  int worst_mode = 0;
  double max_commutator = 0.0;  // max ‖i[H, n_x]‖ for scale
};

// max_x ‖i[H, n_x] + div_x‖ over all modes. `corrupt` flips the sign of one bond in the divergence.
ContinuityReport continuity_check(const LatticeModel& m, const FockSpace& space, bool corrupt = false);

}  // namespace kubo
