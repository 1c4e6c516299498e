#pragma once

#include "kubo/bloch.hpp"
#include "kubo/lattice_model.hpp"
#include "kubo/linear_response.hpp"

#include <functional>
#include <random>
#include <vector>

namespace oracle {

using kubo::MatrixC;
using kubo::Vec2;

// Central difference of the offset-gauge Hamiltonian along Cartesian direction.
MatrixC finite_difference_vertex(const kubo::BlochHamiltonian& h, const Vec2& k, int direction, double step = 1e-5);

// (1/2πi) ∫ tr(P [∂₁P, ∂₂P]) over fractional coordinates, midpoint rule on n×n.
double berry_chern(const kubo::BlochHamiltonian& h, double mu, int n);

// Single-particle eigenvalues on the finite torus, from a dense real-space matrix.
std::vector<double> real_space_levels(const kubo::LatticeModel& m);
// All 2^M many-body levels of the quadratic model, sorted.
std::vector<double> free_many_body_levels(const kubo::LatticeModel& m, double mu = 0.0);

// Grand-canonical free-fermion K_ij(ω) from the real-space single-particle problem,
// including the β⟨J_i⟩⟨J_j⟩ term at ω = 0.
std::vector<kubo::Matrix2c> real_space_bubble(const kubo::LatticeModel& m, double beta, double mu,
                                              const std::vector<double>& omegas);

// Plain n×n midpoint integral of f over the Brillouin zone (Cartesian k).
double uniform_quadrature(const kubo::LatticeSpec& lat, int n, const std::function<double(const Vec2&)>& f);

// Random Hermitian finite-range hopping list with conjugate partners.
std::vector<kubo::Hopping> random_hoppings(std::mt19937_64& rng, int n_internal, int range, int terms);

}  // namespace oracle
