#include "kubo/ed.hpp"
#include "kubo/error.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace kubo;

namespace {

LatticeSpec random_cell(std::mt19937_64& rng, int n_internal) {
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  std::vector<Vec2> offsets;
  for (int s = 0; s < n_internal; ++s) offsets.emplace_back(u(rng), u(rng));
  return make_lattice("random", Vec2(1.0, u(rng)), Vec2(u(rng), 1.0), 1, 1, offsets);
}

}  // namespace

TEST_CASE("random Bloch models") {
  std::mt19937_64 rng(20261018);
  std::uniform_real_distribution<double> k(-7.0, 7.0);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 1 + trial % 3;
    const LatticeSpec lat = random_cell(rng, n);
    const CustomBlochResult c = custom_bloch("random", lat, oracle::random_hoppings(rng, n, 2, 3));
    const ReciprocalBasis g = reciprocal_basis(lat);
    for (int s = 0; s < 10; ++s) {
      const Vec2 q(k(rng), k(rng));
      const MatrixC h = c.h(q);
      CHECK((h - h.adjoint()).norm() <= 1e-13 * std::max(1.0, h.norm()));
      CHECK((c.h(q + g.g1 - g.g2) - h).norm() <= 1e-11 * std::max(1.0, h.norm()));
      for (int d = 1; d <= 2; ++d) {
        const MatrixC j = c.h.current_vertex(q, d);
        CHECK((j - j.adjoint()).norm() <= 1e-12 * std::max(1.0, j.norm()));
        CHECK((j - oracle::finite_difference_vertex(c.h, q, d)).cwiseAbs().maxCoeff() <= 1e-7 * std::max(1.0, j.norm()));
      }
    }
  }
}

TEST_CASE("random models: correlator and Chern invariants") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 6; ++trial) {
    const LatticeSpec lat = random_cell(rng, 2);
    const BlochHamiltonian h = custom_bloch("random", lat, oracle::random_hoppings(rng, 2, 1, 2)).h;
    const BZMesh mesh = bz_mesh(lat, 16);
    const CorrelatorSeries a = kubo_correlator_free(h, 0.0, 4.0, mesh, {0.3, 1.1});
    const CorrelatorSeries b = kubo_correlator_free(h, 0.0, 4.0, mesh, {-0.3, -1.1});
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double tol = 1e-12 * (1 + a.values[i].norm());
      CHECK((a.values[i] - b.values[i].transpose()).cwiseAbs().maxCoeff() <= tol);
      CHECK(a.values[i].imag().cwiseAbs().maxCoeff() <= tol);
    }
    try {
      const std::vector<int> bands = band_chern_numbers(h, 24);
      CHECK(bands[0] + bands[1] == 0);
    } catch (const ComputationError&) {
      // bands touch or the mesh is inadmissible for this draw
    }
  }
}

TEST_CASE("random models: continuity on the torus") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 4; ++trial) {
    const LatticeSpec lat = random_cell(rng, 2);
    const BlochHamiltonian h = custom_bloch("random", lat, oracle::random_hoppings(rng, 2, 1, 2)).h;
    const double v = u(rng);
    const LatticeModel m = build_gapped_ed(h, {{{1, 0}, 0, 1, v}, {{-1, 0}, 1, 0, v}, {{0, 0}, 0, 1, 0.3}, {{0, 0}, 1, 0, 0.3}},
                                           u(rng), 3, 2);
    const FockSpace space = FockSpace::sector(m.modes(), 6);
    CHECK(continuity_check(m, space).max_residual <= 1e-12);
    CHECK(hamiltonian(m, space).hermiticity_defect() <= 1e-12);
  }
}
