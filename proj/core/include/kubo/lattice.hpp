#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace kubo {

using Vec2 = Eigen::Vector2d;

// A site of the periodic lattice: cell coordinates (n1, n2) and internal label.
struct Site {
  int n1 = 0;
  int n2 = 0;
  int sigma = 0;
};

// Periodic Bravais lattice Λ_L = {n1 ℓ1 + n2 ℓ2 : 0 <= n_i < L_i} with one
// position offset per internal label (sublattice, spin, orbital).
struct LatticeSpec {
  std::string name;
  Vec2 l1 = Vec2(1.0, 0.0);
  Vec2 l2 = Vec2(0.0, 1.0);
  int L1 = 1;
  int L2 = 1;
  std::vector<Vec2> offsets{Vec2::Zero()};

  int n_internal() const { return static_cast<int>(offsets.size()); }
  int n_cells() const { return L1 * L2; }
  int n_sites() const { return n_cells() * n_internal(); }
  // Common size L when the torus is square; throws otherwise.
  int size() const;

  Vec2 cell_position(int n1, int n2) const { return n1 * l1 + n2 * l2; }
  Vec2 site_position(const Site& s) const;
  // Cells are enumerated lexicographically in (n1, n2).
  int cell_index(int n1, int n2) const;
  std::array<int, 2> cell_coords(int index) const;
};

// Validates the basis, extents and offsets; throws InvalidArgument.
LatticeSpec make_lattice(std::string name, const Vec2& l1, const Vec2& l2, int L1, int L2,
                         std::vector<Vec2> offsets);

// Honeycomb: ℓ1 = ½(3,−√3), ℓ2 = ½(3,√3), B offset δ1 = (1,0). Internal labels
// are {A,B} when spinless and {A↑,A↓,B↑,B↓} otherwise.
LatticeSpec build_honeycomb(int L, bool spinful = false);
LatticeSpec build_honeycomb(int L1, int L2, bool spinful);
// Unit square lattice with `orbitals` internal labels sitting on the lattice site.
LatticeSpec build_square(int L, int orbitals = 1);

// Bond vectors from an A site to its three B neighbours.
std::array<Vec2, 3> nearest_neighbor_vectors();

double cell_area(const LatticeSpec& lat);
double cell_area(const Vec2& l1, const Vec2& l2);

struct ReciprocalBasis {
  Vec2 g1;
  Vec2 g2;
};

// G_i·ℓ_j = 2π δ_ij. Applying it to (G1, G2) returns (ℓ1, ℓ2).
ReciprocalBasis reciprocal_basis(const Vec2& l1, const Vec2& l2);
ReciprocalBasis reciprocal_basis(const LatticeSpec& lat);

struct RefinementSpec {
  std::vector<Vec2> centers;  // Cartesian momenta
  int depth = 0;
  int halo = 16;  // half-width, in cells of the current level, of each refined block
};

// Quadrature for ∫_B dk. Momenta are kept in reciprocal (fractional)
// coordinates in [0,1)^2; weights sum to the Brillouin-zone area.
struct BZMesh {
  Vec2 g1;
  Vec2 g2;
  std::vector<Vec2> frac;
  std::vector<double> weights;
  std::vector<double> cell_size;  // fractional edge length of each point's cell
  int n = 0;
  bool torus = false;  // exact finite-torus momentum set
  int n_cells = 0;     // L1*L2 when torus
  std::optional<RefinementSpec> refinement;

  std::size_t size() const { return frac.size(); }
  Vec2 cartesian(std::size_t i) const { return frac[i].x() * g1 + frac[i].y() * g2; }
  Vec2 to_cartesian(const Vec2& f) const { return f.x() * g1 + f.y() * g2; }
  Vec2 to_fractional(const Vec2& k) const;
  double area() const;
  double weight_sum() const;
};

// Uniform n×n mesh shifted by half a cell, optionally with dyadic refinement
// around the given centers.
BZMesh bz_mesh(const LatticeSpec& lat, int n, const std::optional<RefinementSpec>& refine = {});
// Allowed momenta of the finite torus: k = (m1/L1) G1 + (m2/L2) G2.
BZMesh torus_momenta(const LatticeSpec& lat);

// Minimum Euclidean distance over the 9 nearest periodic images.
double torus_distance(const LatticeSpec& lat, const Site& x, const Site& y);

// Wraps fractional coordinates into [0,1).
Vec2 wrap_fractional(const Vec2& f);

}  // namespace kubo
