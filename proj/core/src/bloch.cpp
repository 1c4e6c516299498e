#include "kubo/bloch.hpp"

#include "kubo/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

namespace kubo {

namespace {

constexpr Complex kI(0.0, 1.0);

Vec2 bond_vector(const Vec2& R, const std::vector<Vec2>& offsets, int s, int sp) {
  return R + offsets[static_cast<std::size_t>(s)] - offsets[static_cast<std::size_t>(sp)];
}

}  // namespace

BlochHamiltonian::BlochHamiltonian(std::string tag, const Vec2& l1, const Vec2& l2,
                                   std::vector<Vec2> offsets, std::vector<Hopping> hoppings)
    : tag_(std::move(tag)), l1_(l1), l2_(l2), offsets_(std::move(offsets)),
      hoppings_(std::move(hoppings)), has_hoppings_(true) {
  if (offsets_.empty()) throw InvalidArgument("Bloch Hamiltonian needs at least one orbital");
  cell_area(l1_, l2_);
  const auto n = static_cast<Eigen::Index>(offsets_.size());
  displacement_.reserve(hoppings_.size());
  for (const Hopping& hop : hoppings_) {
    if (hop.matrix.rows() != n || hop.matrix.cols() != n) {
      throw InvalidArgument("hopping matrix dimension does not match the number of orbitals");
    }
    displacement_.push_back(hop.cell[0] * l1_ + hop.cell[1] * l2_);
  }
}

BlochHamiltonian BlochHamiltonian::from_function(std::string tag, const Vec2& l1, const Vec2& l2,
                                                 std::vector<Vec2> offsets, Evaluator periodic) {
  if (offsets.empty()) throw InvalidArgument("Bloch Hamiltonian needs at least one orbital");
  cell_area(l1, l2);
  BlochHamiltonian h;
  h.tag_ = std::move(tag);
  h.l1_ = l1;
  h.l2_ = l2;
  h.offsets_ = std::move(offsets);
  h.closed_form_ = std::move(periodic);
  return h;
}

int BlochHamiltonian::hopping_range() const {
  int r = 0;
  for (const Hopping& hop : hoppings_) r = std::max({r, std::abs(hop.cell[0]), std::abs(hop.cell[1])});
  return r;
}

BlochHamiltonian BlochHamiltonian::with_spin_factor(double s) const {
  if (!(s > 0.0)) throw InvalidArgument("spin factor must be positive");
  BlochHamiltonian h = *this;
  h.spin_factor_ = s;
  return h;
}

BlochHamiltonian BlochHamiltonian::with_closed_form(Evaluator periodic) const {
  BlochHamiltonian h = *this;
  h.closed_form_ = std::move(periodic);
  return h;
}

MatrixC BlochHamiltonian::operator()(const Vec2& k) const {
  if (closed_form_) return closed_form_(k);
  const auto n = static_cast<Eigen::Index>(dim());
  MatrixC h = MatrixC::Zero(n, n);
  for (std::size_t t = 0; t < hoppings_.size(); ++t) {
    h += std::exp(kI * k.dot(displacement_[t])) * hoppings_[t].matrix;
  }
  return h;
}

MatrixC BlochHamiltonian::offset_gauge(const Vec2& k) const {
  const auto n = static_cast<Eigen::Index>(dim());
  if (closed_form_ || !has_hoppings_) {
    MatrixC h = (*this)(k);
    for (Eigen::Index s = 0; s < n; ++s) {
      for (Eigen::Index sp = 0; sp < n; ++sp) {
        const Vec2 d = offsets_[static_cast<std::size_t>(s)] - offsets_[static_cast<std::size_t>(sp)];
        h(s, sp) *= std::exp(kI * k.dot(d));
      }
    }
    return h;
  }
  MatrixC h = MatrixC::Zero(n, n);
  for (std::size_t t = 0; t < hoppings_.size(); ++t) {
    const MatrixC& m = hoppings_[t].matrix;
    for (Eigen::Index s = 0; s < n; ++s) {
      for (Eigen::Index sp = 0; sp < n; ++sp) {
        if (m(s, sp) == Complex(0.0)) continue;
        const Vec2 d = bond_vector(displacement_[t], offsets_, static_cast<int>(s), static_cast<int>(sp));
        h(s, sp) += std::exp(kI * k.dot(d)) * m(s, sp);
      }
    }
  }
  return h;
}

MatrixC BlochHamiltonian::current_vertex(const Vec2& k, int direction) const {
  if (direction != 1 && direction != 2) throw InvalidArgument("current direction must be 1 or 2");
  if (!has_hoppings_) {
    throw InvalidArgument("current vertex needs a hopping list; model '" + tag_ + "' has none");
  }
  const auto n = static_cast<Eigen::Index>(dim());
  const int c = direction - 1;
  MatrixC j = MatrixC::Zero(n, n);
  for (std::size_t t = 0; t < hoppings_.size(); ++t) {
    const MatrixC& m = hoppings_[t].matrix;
    for (Eigen::Index s = 0; s < n; ++s) {
      for (Eigen::Index sp = 0; sp < n; ++sp) {
        if (m(s, sp) == Complex(0.0)) continue;
        const Vec2 d = bond_vector(displacement_[t], offsets_, static_cast<int>(s), static_cast<int>(sp));
        j(s, sp) += kI * d[c] * std::exp(kI * k.dot(d)) * m(s, sp);
      }
    }
  }
  return j;
}

MatrixC BlochHamiltonian::second_derivative(const Vec2& k, int i, int j) const {
  if (!has_hoppings_) throw InvalidArgument("second derivative needs a hopping list");
  if (i < 1 || i > 2 || j < 1 || j > 2) throw InvalidArgument("direction must be 1 or 2");
  const auto n = static_cast<Eigen::Index>(dim());
  MatrixC out = MatrixC::Zero(n, n);
  for (std::size_t t = 0; t < hoppings_.size(); ++t) {
    const MatrixC& m = hoppings_[t].matrix;
    for (Eigen::Index s = 0; s < n; ++s) {
      for (Eigen::Index sp = 0; sp < n; ++sp) {
        if (m(s, sp) == Complex(0.0)) continue;
        const Vec2 d = bond_vector(displacement_[t], offsets_, static_cast<int>(s), static_cast<int>(sp));
        out(s, sp) -= d[i - 1] * d[j - 1] * std::exp(kI * k.dot(d)) * m(s, sp);
      }
    }
  }
  return out;
}

Eigen::VectorXd BlochHamiltonian::spectrum(const Vec2& k) const {
  Eigen::SelfAdjointEigenSolver<MatrixC> es((*this)(k), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

std::function<MatrixC(const Vec2&)> current_vertex(const BlochHamiltonian& h, int direction) {
  if (direction != 1 && direction != 2) throw InvalidArgument("current direction must be 1 or 2");
  if (!h.has_hoppings()) throw InvalidArgument("current vertex needs a hopping list");
  return [h, direction](const Vec2& k) { return h.current_vertex(k, direction); };
}

Complex graphene_omega(const Vec2& k) {
  const double s3 = std::sqrt(3.0);
  const Vec2 l1(1.5, -0.5 * s3);
  const Vec2 l2(1.5, 0.5 * s3);
  return 1.0 + std::exp(-kI * k.dot(l1)) + std::exp(-kI * k.dot(l2));
}

std::array<Vec2, 2> graphene_fermi_points() {
  const double kx = 2.0 * std::numbers::pi / 3.0;
  const double ky = 2.0 * std::numbers::pi / (3.0 * std::sqrt(3.0));
  return {Vec2(kx, ky), Vec2(kx, -ky)};
}

namespace {

MatrixC entry(int n, int r, int c, Complex v) {
  MatrixC m = MatrixC::Zero(n, n);
  m(r, c) = v;
  return m;
}

std::vector<Hopping> honeycomb_nn(double t) {
  // A at x couples to B at x, x − ℓ1, x − ℓ2; partners carry the conjugate.
  std::vector<Hopping> hops;
  hops.push_back({{0, 0}, entry(2, 0, 1, -t) + entry(2, 1, 0, -t)});
  hops.push_back({{1, 0}, entry(2, 0, 1, -t)});
  hops.push_back({{-1, 0}, entry(2, 1, 0, -t)});
  hops.push_back({{0, 1}, entry(2, 0, 1, -t)});
  hops.push_back({{0, -1}, entry(2, 1, 0, -t)});
  return hops;
}

}  // namespace

BlochHamiltonian graphene_bloch(double t) {
  if (!(t > 0.0)) throw InvalidArgument("graphene hopping t must be positive");
  const LatticeSpec lat = build_honeycomb(1);
  BlochHamiltonian h("graphene", lat.l1, lat.l2, lat.offsets, honeycomb_nn(t));
  return h.with_closed_form([t](const Vec2& k) {
    const Complex om = graphene_omega(k);
    MatrixC m(2, 2);
    m << 0.0, -t * std::conj(om), -t * om, 0.0;
    return m;
  });
}

BlochHamiltonian haldane_bloch(double t1, double t2, double phi, double m) {
  if (!(t1 > 0.0)) throw InvalidArgument("Haldane hopping t1 must be positive");
  const LatticeSpec lat = build_honeycomb(1);
  std::vector<Hopping> hops = honeycomb_nn(t1);
  hops.push_back({{0, 0}, entry(2, 0, 0, m) + entry(2, 1, 1, -m)});
  // NNN displacements ℓ1, −ℓ2, ℓ2 − ℓ1 circulate the same way around a hexagon.
  const Complex fwd = t2 * std::exp(-kI * phi);
  for (const std::array<int, 2> b : {std::array<int, 2>{1, 0}, {0, -1}, {-1, 1}}) {
    hops.push_back({b, entry(2, 0, 0, fwd) + entry(2, 1, 1, std::conj(fwd))});
    hops.push_back({{-b[0], -b[1]}, entry(2, 0, 0, std::conj(fwd)) + entry(2, 1, 1, fwd)});
  }
  return BlochHamiltonian("haldane", lat.l1, lat.l2, lat.offsets, std::move(hops));
}

BlochHamiltonian qwz_bloch(double m) {
  const LatticeSpec lat = build_square(1, 2);
  MatrixC sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sy << 0, -kI, kI, 0;
  sz << 1, 0, 0, -1;
  std::vector<Hopping> hops;
  hops.push_back({{0, 0}, m * sz});
  hops.push_back({{1, 0}, 0.5 * sz - 0.5 * kI * sx});
  hops.push_back({{-1, 0}, 0.5 * sz + 0.5 * kI * sx});
  hops.push_back({{0, 1}, 0.5 * sz - 0.5 * kI * sy});
  hops.push_back({{0, -1}, 0.5 * sz + 0.5 * kI * sy});
  return BlochHamiltonian("qwz", lat.l1, lat.l2, lat.offsets, std::move(hops));
}

BlochHamiltonian flat_bloch(const LatticeSpec& lat, const std::vector<double>& levels) {
  if (static_cast<int>(levels.size()) != lat.n_internal()) {
    throw InvalidArgument("flat model needs one level per internal label");
  }
  const auto n = static_cast<Eigen::Index>(levels.size());
  MatrixC d = MatrixC::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) d(i, i) = levels[static_cast<std::size_t>(i)];
  return BlochHamiltonian("flat", lat.l1, lat.l2, lat.offsets, {{{0, 0}, d}});
}

CustomBlochResult custom_bloch(std::string tag, const LatticeSpec& lat, std::vector<Hopping> hoppings) {
  const auto n = static_cast<Eigen::Index>(lat.n_internal());
  std::map<std::array<int, 2>, MatrixC> merged;
  for (const Hopping& hop : hoppings) {
    if (hop.matrix.rows() != n || hop.matrix.cols() != n) {
      throw InvalidArgument("hopping matrix dimension does not match the lattice");
    }
    auto [it, inserted] = merged.try_emplace(hop.cell, hop.matrix);
    if (!inserted) it->second += hop.matrix;
  }
  double violation = 0.0;
  std::map<std::array<int, 2>, MatrixC> sym;
  for (const auto& [cell, m] : merged) {
    const std::array<int, 2> partner{-cell[0], -cell[1]};
    auto it = merged.find(partner);
    const MatrixC p = it == merged.end() ? MatrixC::Zero(n, n) : it->second;
    violation = std::max(violation, (p - m.adjoint()).cwiseAbs().maxCoeff());
    sym[cell] = 0.5 * (m + p.adjoint());
    if (it == merged.end()) sym[partner] = 0.5 * (p + m.adjoint());
  }
  if (violation > 1e-10) {
    throw InvalidArgument("hopping list violates H(-R) = H(R)^dagger by " + std::to_string(violation));
  }
  CustomBlochResult out{BlochHamiltonian(tag, lat.l1, lat.l2, lat.offsets, {}), 0.0};
  std::vector<Hopping> list;
  for (const auto& [cell, m] : sym) {
    auto it = merged.find(cell);
    const MatrixC orig = it == merged.end() ? MatrixC::Zero(n, n) : it->second;
    out.correction = std::max(out.correction, (m - orig).cwiseAbs().maxCoeff());
    list.push_back({cell, m});
  }
  out.h = BlochHamiltonian(std::move(tag), lat.l1, lat.l2, lat.offsets, std::move(list));
  return out;
}

double distance_to_spectrum(const BlochHamiltonian& h, double mu, const Vec2& k) {
  const Eigen::VectorXd e = h.spectrum(k);
  return (e.array() - mu).abs().minCoeff();
}

GapReport spectral_gap(const BlochHamiltonian& h, double mu, const BZMesh& mesh) {
  if (mesh.size() == 0) throw InvalidArgument("empty mesh");
  GapReport rep;
  rep.mesh_n = mesh.n;
  rep.scan_delta = std::numeric_limits<double>::infinity();
  std::size_t best = 0;
  for (std::size_t p = 0; p < mesh.size(); ++p) {
    const double d = distance_to_spectrum(h, mu, mesh.cartesian(p));
    if (d < rep.scan_delta) {
      rep.scan_delta = d;
      best = p;
    }
  }
  rep.delta_mu = rep.scan_delta;
  rep.argmin_k = mesh.cartesian(best);
  const double s = 0.5 * mesh.cell_size[best];
  for (int a = -1; a <= 1; ++a) {
    for (int b = -1; b <= 1; ++b) {
      if (a == 0 && b == 0) continue;
      const Vec2 f = wrap_fractional(mesh.frac[best] + Vec2(a * s, b * s));
      const double d = distance_to_spectrum(h, mu, mesh.to_cartesian(f));
      if (d < rep.delta_mu) {
        rep.delta_mu = d;
        rep.argmin_k = mesh.to_cartesian(f);
      }
    }
  }
  return rep;
}

FermiPoint minimize_distance(const BlochHamiltonian& h, double mu, const BZMesh& mesh, Vec2 frac,
                             double step, int levels) {
  double best = distance_to_spectrum(h, mu, mesh.to_cartesian(frac));
  for (int level = 0; level < levels; ++level) {
    step *= 0.5;
    for (int moves = 0; moves < 8; ++moves) {
      Vec2 cand = frac;
      for (int a = -1; a <= 1; ++a) {
        for (int b = -1; b <= 1; ++b) {
          if (a == 0 && b == 0) continue;
          const Vec2 f = wrap_fractional(frac + Vec2(a * step, b * step));
          const double d = distance_to_spectrum(h, mu, mesh.to_cartesian(f));
          if (d < best) {
            best = d;
            cand = f;
          }
        }
      }
      if (cand == frac) break;
      frac = cand;
    }
  }
  return {mesh.to_cartesian(frac), best, step};
}

std::vector<FermiPoint> fermi_points(const BlochHamiltonian& h, double mu, const BZMesh& mesh,
                                     double tol, int zoom_levels) {
  if (!(tol > 0.0)) throw InvalidArgument("fermi_points tolerance must be positive");
  if (mesh.n < 2) throw InvalidArgument("fermi_points needs a uniform mesh with n >= 2");
  const int n = mesh.n;
  const double step = 1.0 / n;
  auto at = [n](int i, int j) {
    return static_cast<std::size_t>(((i % n) + n) % n) * static_cast<std::size_t>(n) +
           static_cast<std::size_t>(((j % n) + n) % n);
  };
  std::vector<double> g(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      g[at(i, j)] = distance_to_spectrum(h, mu, mesh.to_cartesian(Vec2((i + 0.5) * step, (j + 0.5) * step)));
    }
  }
  std::vector<FermiPoint> found;
  std::vector<Vec2> found_frac;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = g[at(i, j)];
      bool is_min = true;
      for (int a = -1; a <= 1 && is_min; ++a) {
        for (int b = -1; b <= 1; ++b) {
          if ((a || b) && g[at(i + a, j + b)] < v) {
            is_min = false;
            break;
          }
        }
      }
      if (!is_min) continue;
      FermiPoint p = minimize_distance(h, mu, mesh, Vec2((i + 0.5) * step, (j + 0.5) * step), step, zoom_levels);
      if (p.residual >= tol) continue;
      const Vec2 f = wrap_fractional(mesh.to_fractional(p.k));
      bool duplicate = false;
      for (const Vec2& q : found_frac) {
        Vec2 d = f - q;
        d = Vec2(d.x() - std::round(d.x()), d.y() - std::round(d.y()));
        if (d.cwiseAbs().maxCoeff() < step) {
          duplicate = true;
          break;
        }
      }
      if (duplicate) continue;
      found.push_back(p);
      found_frac.push_back(f);
    }
  }
  return found;
}

}  // namespace kubo
