#include "kubo/lattice.hpp"

#include "kubo/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace kubo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wedge(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

void check_basis(const Vec2& l1, const Vec2& l2) {
  const double w = std::abs(wedge(l1, l2));
  const double scale = l1.norm() * l2.norm();
  if (!(w > 1e-12 * scale) || !std::isfinite(w)) {
    throw InvalidArgument("lattice basis vectors are linearly dependent");
  }
}

// Periodic difference in fractional coordinates, folded into [-1/2, 1/2).
Vec2 fold_difference(const Vec2& d) {
  return Vec2(d.x() - std::floor(d.x() + 0.5), d.y() - std::floor(d.y() + 0.5));
}

}  // namespace

int LatticeSpec::size() const {
  if (L1 != L2) throw InvalidArgument("lattice torus is not square");
  return L1;
}

Vec2 LatticeSpec::site_position(const Site& s) const {
  return cell_position(s.n1, s.n2) + offsets.at(static_cast<std::size_t>(s.sigma));
}

int LatticeSpec::cell_index(int n1, int n2) const {
  const int a = ((n1 % L1) + L1) % L1;
  const int b = ((n2 % L2) + L2) % L2;
  return a * L2 + b;
}

std::array<int, 2> LatticeSpec::cell_coords(int index) const { return {index / L2, index % L2}; }

LatticeSpec make_lattice(std::string name, const Vec2& l1, const Vec2& l2, int L1, int L2,
                         std::vector<Vec2> offsets) {
  if (L1 < 1 || L2 < 1) throw InvalidArgument("lattice size must be >= 1");
  if (offsets.empty()) throw InvalidArgument("lattice needs at least one internal label");
  check_basis(l1, l2);
  LatticeSpec lat;
  lat.name = std::move(name);
  lat.l1 = l1;
  lat.l2 = l2;
  lat.L1 = L1;
  lat.L2 = L2;
  lat.offsets = std::move(offsets);
  return lat;
}

LatticeSpec build_honeycomb(int L, bool spinful) { return build_honeycomb(L, L, spinful); }

LatticeSpec build_honeycomb(int L1, int L2, bool spinful) {
  const double s3 = std::sqrt(3.0);
  const Vec2 a(0.0, 0.0);
  const Vec2 b(1.0, 0.0);
  std::vector<Vec2> offsets = spinful ? std::vector<Vec2>{a, a, b, b} : std::vector<Vec2>{a, b};
  return make_lattice("honeycomb", Vec2(1.5, -0.5 * s3), Vec2(1.5, 0.5 * s3), L1, L2,
                      std::move(offsets));
}

LatticeSpec build_square(int L, int orbitals) {
  if (orbitals < 1) throw InvalidArgument("square lattice needs at least one orbital");
  return make_lattice("square", Vec2(1.0, 0.0), Vec2(0.0, 1.0), L, L,
                      std::vector<Vec2>(static_cast<std::size_t>(orbitals), Vec2::Zero()));
}

std::array<Vec2, 3> nearest_neighbor_vectors() {
  const double h = 0.5 * std::sqrt(3.0);
  return {Vec2(1.0, 0.0), Vec2(-0.5, h), Vec2(-0.5, -h)};
}

double cell_area(const Vec2& l1, const Vec2& l2) {
  check_basis(l1, l2);
  return std::abs(wedge(l1, l2));
}

double cell_area(const LatticeSpec& lat) { return cell_area(lat.l1, lat.l2); }

ReciprocalBasis reciprocal_basis(const Vec2& l1, const Vec2& l2) {
  check_basis(l1, l2);
  const double w = wedge(l1, l2);
  // G1 ⟂ ℓ2, G2 ⟂ ℓ1, closed form of 2π (ℓ^T)^{-1}.
  return {Vec2(l2.y(), -l2.x()) * (kTwoPi / w), Vec2(-l1.y(), l1.x()) * (kTwoPi / w)};
}

ReciprocalBasis reciprocal_basis(const LatticeSpec& lat) { return reciprocal_basis(lat.l1, lat.l2); }

Vec2 wrap_fractional(const Vec2& f) {
  Vec2 w(f.x() - std::floor(f.x()), f.y() - std::floor(f.y()));
  // floor can leave exactly 1.0 for tiny negative inputs
  if (w.x() >= 1.0) w.x() = 0.0;
  if (w.y() >= 1.0) w.y() = 0.0;
  return w;
}

Vec2 BZMesh::to_fractional(const Vec2& k) const {
  Eigen::Matrix2d g;
  g.col(0) = g1;
  g.col(1) = g2;
  return g.inverse() * k;
}

double BZMesh::area() const { return std::abs(wedge(g1, g2)); }

double BZMesh::weight_sum() const {
  // Neumaier summation; meshes carry up to ~10⁶ weights
  double s = 0.0;
  double c = 0.0;
  for (double w : weights) {
    const double t = s + w;
    c += std::abs(s) >= std::abs(w) ? (s - t) + w : (w - t) + s;
    s = t;
  }
  return s + c;
}

BZMesh bz_mesh(const LatticeSpec& lat, int n, const std::optional<RefinementSpec>& refine) {
  if (n < 1) throw InvalidArgument("mesh size n must be >= 1");
  const ReciprocalBasis g = reciprocal_basis(lat);
  BZMesh mesh;
  mesh.g1 = g.g1;
  mesh.g2 = g.g2;
  mesh.n = n;
  const double area = mesh.area();
  const double h = 1.0 / n;

  const auto nn = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  mesh.frac.reserve(nn);
  mesh.weights.reserve(nn);
  mesh.cell_size.reserve(nn);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      mesh.frac.emplace_back((i + 0.5) * h, (j + 0.5) * h);
      mesh.weights.push_back(area * h * h);
      mesh.cell_size.push_back(h);
    }
  }
  if (!refine || refine->depth == 0 || refine->centers.empty()) {
    if (refine) mesh.refinement = refine;
    return mesh;
  }
  if (refine->depth < 0) throw InvalidArgument("refinement depth must be >= 0");
  if (refine->halo < 1) throw InvalidArgument("refinement halo must be >= 1");
  const double finest = h * std::ldexp(1.0, -refine->depth);
  if (!(area * finest * finest >= 1e-300)) {
    throw InvalidArgument("refinement depth underflows quadrature weights");
  }

  std::vector<Vec2> centers;
  centers.reserve(refine->centers.size());
  for (const Vec2& c : refine->centers) centers.push_back(wrap_fractional(mesh.to_fractional(c)));

  double s = h;
  for (int level = 0; level < refine->depth; ++level, s *= 0.5) {
    const double reach = refine->halo * s;
    std::vector<char> split(mesh.size(), 0);
    bool any = false;
    for (std::size_t p = 0; p < mesh.size(); ++p) {
      if (mesh.cell_size[p] != s) continue;
      for (const Vec2& c : centers) {
        const Vec2 d = fold_difference(mesh.frac[p] - c);
        if (std::abs(d.x()) < reach && std::abs(d.y()) < reach) {
          split[p] = 1;
          any = true;
          break;
        }
      }
    }
    if (!any) break;
    BZMesh next = mesh;
    next.frac.clear();
    next.weights.clear();
    next.cell_size.clear();
    for (std::size_t p = 0; p < mesh.size(); ++p) {
      if (!split[p]) {
        next.frac.push_back(mesh.frac[p]);
        next.weights.push_back(mesh.weights[p]);
        next.cell_size.push_back(mesh.cell_size[p]);
        continue;
      }
      const double q = 0.25 * s;
      for (double a : {-q, q}) {
        for (double b : {-q, q}) {
          next.frac.push_back(wrap_fractional(mesh.frac[p] + Vec2(a, b)));
          next.weights.push_back(0.25 * mesh.weights[p]);
          next.cell_size.push_back(0.5 * s);
        }
      }
    }
    mesh = std::move(next);
  }
  mesh.refinement = refine;
  return mesh;
}

BZMesh torus_momenta(const LatticeSpec& lat) {
  const ReciprocalBasis g = reciprocal_basis(lat);
  BZMesh mesh;
  mesh.g1 = g.g1;
  mesh.g2 = g.g2;
  mesh.n = lat.L1 == lat.L2 ? lat.L1 : 0;
  mesh.torus = true;
  mesh.n_cells = lat.n_cells();
  const double w = mesh.area() / lat.n_cells();
  for (int m1 = 0; m1 < lat.L1; ++m1) {
    for (int m2 = 0; m2 < lat.L2; ++m2) {
      mesh.frac.emplace_back(static_cast<double>(m1) / lat.L1, static_cast<double>(m2) / lat.L2);
      mesh.weights.push_back(w);
      mesh.cell_size.push_back(1.0 / std::max(lat.L1, lat.L2));
    }
  }
  return mesh;
}

double torus_distance(const LatticeSpec& lat, const Site& x, const Site& y) {
  const Vec2 d = lat.site_position(y) - lat.site_position(x);
  double best = std::numeric_limits<double>::infinity();
  for (int a = -1; a <= 1; ++a) {
    for (int b = -1; b <= 1; ++b) {
      const Vec2 img = d + static_cast<double>(a * lat.L1) * lat.l1 + static_cast<double>(b * lat.L2) * lat.l2;
      best = std::min(best, img.norm());
    }
  }
  return best;
}

}  // namespace kubo
