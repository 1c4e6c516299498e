#include "kubo/lattice_model.hpp"

#include "kubo/error.hpp"

#include <cmath>
#include <map>
#include <tuple>

namespace kubo {

namespace {

constexpr Complex kI(0.0, 1.0);

void check_mode_count(const LatticeModel& m) {
  if (m.modes() > kMaxModes) {
    throw InvalidArgument("model has " + std::to_string(m.modes()) + " modes; the limit is " +
                          std::to_string(kMaxModes));
  }
}

void check_kernel(const std::vector<KernelEntry>& v, int n_internal) {
  std::map<std::tuple<int, int, int, int>, double> table;
  for (const KernelEntry& e : v) {
    if (e.s < 0 || e.s >= n_internal || e.sp < 0 || e.sp >= n_internal) {
      throw InvalidArgument("interaction kernel label out of range");
    }
    if (!std::isfinite(e.v)) throw InvalidArgument("interaction kernel must be real and finite");
    table[{e.cell[0], e.cell[1], e.s, e.sp}] += e.v;
  }
  for (const auto& [key, val] : table) {
    const auto [c0, c1, s, sp] = key;
    auto it = table.find({-c0, -c1, sp, s});
    const double partner = it == table.end() ? 0.0 : it->second;
    if (std::abs(partner - val) > 1e-12) {
      throw InvalidArgument("interaction kernel is not symmetric: v_{s,s'}(R) != v_{s',s}(-R)");
    }
  }
}

}  // namespace

Vec2 LatticeModel::mode_position(int m) const {
  const int n = lat.n_internal();
  const auto c = lat.cell_coords(m / n);
  return lat.site_position(Site{c[0], c[1], m % n});
}

std::vector<BondTerm> real_space_hopping(const BlochHamiltonian& h, const LatticeSpec& lat, bool open) {
  if (!h.has_hoppings()) throw InvalidArgument("real-space model needs a hopping list");
  if (h.dim() != lat.n_internal()) throw InvalidArgument("Bloch model and lattice disagree on internal labels");
  const int n = lat.n_internal();
  std::vector<BondTerm> out;
  for (int c = 0; c < lat.n_cells(); ++c) {
    const auto x = lat.cell_coords(c);
    for (const Hopping& hop : h.hoppings()) {
      const int y1 = x[0] - hop.cell[0];
      const int y2 = x[1] - hop.cell[1];
      if (open && (y1 < 0 || y1 >= lat.L1 || y2 < 0 || y2 >= lat.L2)) continue;
      const int yc = lat.cell_index(y1, y2);
      const Vec2 r = hop.cell[0] * lat.l1 + hop.cell[1] * lat.l2;
      for (int s = 0; s < n; ++s) {
        for (int sp = 0; sp < n; ++sp) {
          const Complex a = hop.matrix(s, sp);
          if (a == Complex(0.0)) continue;
          const Vec2 d = r + lat.offsets[static_cast<std::size_t>(s)] - lat.offsets[static_cast<std::size_t>(sp)];
          out.push_back({c * n + s, yc * n + sp, a, d});
        }
      }
    }
  }
  return out;
}

LatticeModel build_hubbard_ed(const LatticeSpec& lat, double t, double U) {
  if (lat.n_internal() != 4 || lat.name != "honeycomb") {
    throw InvalidArgument("Hubbard model needs the spinful honeycomb lattice");
  }
  const BlochHamiltonian g = graphene_bloch(t);
  std::vector<Hopping> spinful;
  const MatrixC id = MatrixC::Identity(2, 2);
  for (const Hopping& hop : g.hoppings()) {
    MatrixC m = MatrixC::Zero(4, 4);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) m.block(2 * a, 2 * b, 2, 2) = hop.matrix(a, b) * id;
    }
    spinful.push_back({hop.cell, m});
  }
  const BlochHamiltonian h("hubbard", lat.l1, lat.l2, lat.offsets, std::move(spinful));
  LatticeModel m;
  m.tag = "hubbard";
  m.lat = lat;
  m.hopping = real_space_hopping(h, lat, false);
  for (int sub = 0; sub < 2; ++sub) {
    m.kernel.push_back({{0, 0}, 2 * sub, 2 * sub + 1, 0.5});
    m.kernel.push_back({{0, 0}, 2 * sub + 1, 2 * sub, 0.5});
  }
  m.U = U;
  check_mode_count(m);
  return m;
}

LatticeModel build_gapped_ed(const BlochHamiltonian& h, const std::vector<KernelEntry>& v, double U,
                             int L1, int L2, bool open) {
  check_kernel(v, h.dim());
  LatticeModel m;
  m.tag = h.tag();
  m.lat = make_lattice(h.tag(), h.l1(), h.l2(), L1, L2, h.offsets());
  m.open = open;
  m.hopping = real_space_hopping(h, m.lat, open);
  m.kernel = v;
  m.U = U;
  check_mode_count(m);
  return m;
}

LatticeModel build_gapped_ed(const BlochHamiltonian& h, const std::vector<KernelEntry>& v, double U, int L) {
  return build_gapped_ed(h, v, U, L, L, false);
}

std::vector<KernelEntry> honeycomb_bond_kernel() {
  std::vector<KernelEntry> v;
  for (const std::array<int, 2> r : {std::array<int, 2>{0, 0}, {1, 0}, {0, 1}}) {
    v.push_back({r, 0, 1, 0.5});
    v.push_back({{-r[0], -r[1]}, 1, 0, 0.5});
  }
  return v;
}

std::vector<KernelEntry> intracell_kernel(int n_internal) {
  std::vector<KernelEntry> v;
  for (int s = 0; s < n_internal; ++s) {
    for (int sp = 0; sp < n_internal; ++sp) {
      if (s != sp) v.push_back({{0, 0}, s, sp, 0.5});
    }
  }
  return v;
}

namespace {

std::vector<DensityTerm> density_terms(const LatticeModel& m) {
  std::vector<DensityTerm> out;
  const int n = m.lat.n_internal();
  for (int c = 0; c < m.lat.n_cells(); ++c) {
    const auto x = m.lat.cell_coords(c);
    for (const KernelEntry& e : m.kernel) {
      if (e.v == 0.0) continue;
      const int y1 = x[0] - e.cell[0];
      const int y2 = x[1] - e.cell[1];
      if (m.open && (y1 < 0 || y1 >= m.lat.L1 || y2 < 0 || y2 >= m.lat.L2)) continue;
      out.push_back({c * n + e.s, m.lat.cell_index(y1, y2) * n + e.sp, e.v});
    }
  }
  return out;
}

std::vector<QuadraticTerm> weighted(const LatticeModel& m, auto weight) {
  std::vector<QuadraticTerm> out;
  out.reserve(m.hopping.size());
  for (const BondTerm& b : m.hopping) out.push_back({b.dest, b.src, weight(b) * b.amp});
  return out;
}

void check_space(const LatticeModel& m, const FockSpace& space) {
  if (space.modes() != m.modes()) throw InvalidArgument("Fock space does not match the model's mode count");
}

}  // namespace

FockOperator hamiltonian(const LatticeModel& m, const FockSpace& space, double mu) {
  check_space(m, space);
  FockOperator h = FockOperator::quadratic(space, weighted(m, [](const BondTerm&) { return Complex(1.0); }), true);
  if (m.U != 0.0) h = h + FockOperator::density(space, density_terms(m), m.shift) * m.U;
  if (mu != 0.0) h = h - number_operator(m, space) * mu;
  return FockOperator(space, h.matrix(), true);
}

FockOperator number_operator(const LatticeModel& m, const FockSpace& space) {
  check_space(m, space);
  return FockOperator::diagonal_number(space, std::vector<double>(static_cast<std::size_t>(m.modes()), 1.0));
}

FockOperator density_operator(const LatticeModel& m, const FockSpace& space, int mode) {
  check_space(m, space);
  std::vector<double> c(static_cast<std::size_t>(m.modes()), 0.0);
  c.at(static_cast<std::size_t>(mode)) = 1.0;
  return FockOperator::diagonal_number(space, c);
}

FockOperator bond_current_operator(const LatticeModel& m, const FockSpace& space, int direction) {
  check_space(m, space);
  if (direction != 1 && direction != 2) throw InvalidArgument("current direction must be 1 or 2");
  const int c = direction - 1;
  return FockOperator::quadratic(space, weighted(m, [c](const BondTerm& b) { return kI * b.bond[c]; }), true);
}

FockOperator double_commutator_operator(const LatticeModel& m, const FockSpace& space, int i, int j) {
  check_space(m, space);
  if (i < 1 || i > 2 || j < 1 || j > 2) throw InvalidArgument("direction must be 1 or 2");
  return FockOperator::quadratic(
      space, weighted(m, [i, j](const BondTerm& b) { return Complex(b.bond[i - 1] * b.bond[j - 1]); }), true);
}

FockOperator position_operator(const LatticeModel& m, const FockSpace& space, int direction) {
  check_space(m, space);
  if (direction != 1 && direction != 2) throw InvalidArgument("direction must be 1 or 2");
  std::vector<double> c(static_cast<std::size_t>(m.modes()));
  for (int x = 0; x < m.modes(); ++x) c[static_cast<std::size_t>(x)] = m.mode_position(x)[direction - 1];
  return FockOperator::diagonal_number(space, c);
}

FockOperator divergence_operator(const LatticeModel& m, const FockSpace& space, int mode, int flip) {
  check_space(m, space);
  std::vector<QuadraticTerm> terms;
  for (std::size_t t = 0; t < m.hopping.size(); ++t) {
    const BondTerm& b = m.hopping[t];
    Complex a = kI * b.amp;
    if (static_cast<int>(t) == flip) a = -a;
    if (b.dest == mode) terms.push_back({b.dest, b.src, a});
    if (b.src == mode) terms.push_back({b.dest, b.src, -a});
  }
  return FockOperator::quadratic(space, terms, false);
}

ContinuityReport continuity_check(const LatticeModel& m, const FockSpace& space, bool corrupt) {
  const FockOperator h = hamiltonian(m, space);
  ContinuityReport rep;
  int flip = -1;
  if (corrupt) {
    for (std::size_t t = 0; t < m.hopping.size(); ++t) {
      if (m.hopping[t].dest != m.hopping[t].src) {
        flip = static_cast<int>(t);
        break;
      }
    }
  }
  for (int x = 0; x < m.modes(); ++x) {
    const FockOperator comm = h.commutator(density_operator(m, space, x)) * kI;
    const FockOperator res = comm + divergence_operator(m, space, x, flip);
    rep.max_commutator = std::max(rep.max_commutator, comm.max_abs());
    const double r = res.max_abs();
    if (r > rep.max_residual) {
      rep.max_residual = r;
      rep.worst_mode = x;
    }
  }
  return rep;
}

}  // namespace kubo
