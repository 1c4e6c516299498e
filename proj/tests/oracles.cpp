#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace oracle {

using kubo::Complex;

MatrixC finite_difference_vertex(const kubo::BlochHamiltonian& h, const Vec2& k, int direction, double step) {
  Vec2 e = Vec2::Zero();
  e[direction - 1] = step;
  return (h.offset_gauge(k + e) - h.offset_gauge(k - e)) / (2.0 * step);
}

namespace {

MatrixC projector(const kubo::BlochHamiltonian& h, const Vec2& k, double mu) {
  Eigen::SelfAdjointEigenSolver<MatrixC> es(h(k));
  const auto n = h.dim();
  MatrixC p = MatrixC::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    if (es.eigenvalues()[a] < mu) p += es.eigenvectors().col(a) * es.eigenvectors().col(a).adjoint();
  }
  return p;
}

}  // namespace

double berry_chern(const kubo::BlochHamiltonian& h, double mu, int n) {
  const kubo::ReciprocalBasis g = kubo::reciprocal_basis(h.l1(), h.l2());
  const double d = 1e-4;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double f1 = (i + 0.5) / n;
      const double f2 = (j + 0.5) / n;
      auto k = [&](double a, double b) -> Vec2 { return a * g.g1 + b * g.g2; };
      const MatrixC p = projector(h, k(f1, f2), mu);
      const MatrixC d1 = (projector(h, k(f1 + d, f2), mu) - projector(h, k(f1 - d, f2), mu)) / (2 * d);
      const MatrixC d2 = (projector(h, k(f1, f2 + d), mu) - projector(h, k(f1, f2 - d), mu)) / (2 * d);
      const Complex tr = (p * (d1 * d2 - d2 * d1)).trace();
      total += (tr / Complex(0.0, 2.0 * std::numbers::pi)).real();
    }
  }
  const double wedge = h.l1().x() * h.l2().y() - h.l1().y() * h.l2().x();
  return (wedge > 0 ? 1.0 : -1.0) * total / (static_cast<double>(n) * n);
}

namespace {

MatrixC single_particle_matrix(const kubo::LatticeModel& m, std::function<Complex(const kubo::BondTerm&)> w) {
  MatrixC h = MatrixC::Zero(m.modes(), m.modes());
  for (const auto& b : m.hopping) h(b.dest, b.src) += w(b) * b.amp;
  return h;
}

}  // namespace

std::vector<double> real_space_levels(const kubo::LatticeModel& m) {
  const MatrixC h = single_particle_matrix(m, [](const kubo::BondTerm&) { return Complex(1.0); });
  Eigen::SelfAdjointEigenSolver<MatrixC> es(h);
  std::vector<double> e(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  return e;
}

std::vector<double> free_many_body_levels(const kubo::LatticeModel& m, double mu) {
  const std::vector<double> e = real_space_levels(m);
  const std::size_t n = e.size();
  std::vector<double> out;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
    double sum = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      if ((s >> a) & 1u) sum += e[a] - mu;
    }
    out.push_back(sum);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<kubo::Matrix2c> real_space_bubble(const kubo::LatticeModel& m, double beta, double mu,
                                              const std::vector<double>& omegas) {
  const MatrixC h = single_particle_matrix(m, [](const kubo::BondTerm&) { return Complex(1.0); });
  Eigen::SelfAdjointEigenSolver<MatrixC> es(h);
  const MatrixC& v = es.eigenvectors();
  const Eigen::VectorXd e = es.eigenvalues().array() - mu;
  std::array<MatrixC, 2> j;
  for (int d = 0; d < 2; ++d) {
    j[d] = v.adjoint() *
           single_particle_matrix(m, [d](const kubo::BondTerm& b) { return Complex(0.0, b.bond[d]); }) * v;
  }
  const auto n = e.size();
  std::vector<double> f(n);
  for (Eigen::Index a = 0; a < n; ++a) f[a] = 1.0 / (1.0 + std::exp(beta * e[a]));
  const double vol = m.area() * m.lat.n_cells();
  std::vector<kubo::Matrix2c> out;
  for (double w : omegas) {
    kubo::Matrix2c k = kubo::Matrix2c::Zero();
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) {
        Complex kernel;
        const double de = e[a] - e[b];
        if (w == 0.0) {
          kernel = std::abs(de) < 1e-9 ? beta * f[a] * (1.0 - f[a]) : (f[b] - f[a]) / de;
        } else {
          kernel = (f[b] - f[a]) / Complex(de, w);
        }
        for (int x = 0; x < 2; ++x) {
          for (int y = 0; y < 2; ++y) k(x, y) += kernel * j[x](a, b) * j[y](b, a);
        }
      }
    }
    if (w == 0.0) {
      Eigen::Vector2d cur = Eigen::Vector2d::Zero();
      for (Eigen::Index a = 0; a < n; ++a) {
        cur[0] += f[a] * j[0](a, a).real();
        cur[1] += f[a] * j[1](a, a).real();
      }
      k += kubo::Matrix2c(beta * cur * cur.transpose());
    }
    out.push_back(k / vol);
  }
  return out;
}

double uniform_quadrature(const kubo::LatticeSpec& lat, int n, const std::function<double(const Vec2&)>& f) {
  const kubo::ReciprocalBasis g = kubo::reciprocal_basis(lat);
  const double area = std::abs(g.g1.x() * g.g2.y() - g.g1.y() * g.g2.x());
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) s += f(((i + 0.5) / n) * g.g1 + ((j + 0.5) / n) * g.g2);
  }
  return s * area / (static_cast<double>(n) * n);
}

std::vector<kubo::Hopping> random_hoppings(std::mt19937_64& rng, int n_internal, int range, int terms) {
  std::uniform_int_distribution<int> cell(-range, range);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<kubo::Hopping> out;
  MatrixC onsite(n_internal, n_internal);
  for (int a = 0; a < n_internal; ++a) {
    for (int b = 0; b < n_internal; ++b) onsite(a, b) = Complex(z(rng), z(rng));
  }
  out.push_back({{0, 0}, 0.5 * (onsite + onsite.adjoint())});
  for (int t = 0; t < terms; ++t) {
    std::array<int, 2> r{cell(rng), cell(rng)};
    if (r[0] == 0 && r[1] == 0) r[0] = 1;
    MatrixC m(n_internal, n_internal);
    for (int a = 0; a < n_internal; ++a) {
      for (int b = 0; b < n_internal; ++b) m(a, b) = Complex(z(rng), z(rng));
    }
    out.push_back({r, m});
    out.push_back({{-r[0], -r[1]}, m.adjoint()});
  }
  return out;
}

}  // namespace oracle
