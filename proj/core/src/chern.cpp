#include "kubo/error.hpp"
#include "kubo/linear_response.hpp"

#include <cmath>
#include <numbers>

namespace kubo {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAdmissible = kPi - 0.01;

LatticeSpec cell_of(const BlochHamiltonian& h) {
  return make_lattice(h.tag(), h.l1(), h.l2(), 1, 1, h.offsets());
}

double orientation(const BlochHamiltonian& h) {
  return h.l1().x() * h.l2().y() - h.l1().y() * h.l2().x() > 0.0 ? 1.0 : -1.0;
}

struct FluxSum {
  bool admissible = true;
  double raw = 0.0;
  double max_flux = 0.0;
  double mean_abs = 0.0;
};

// Frames are chosen per node by `select`, which returns the columns spanning the bundle.
template <class Select>
FluxSum flux_sum(const BlochHamiltonian& h, int n, Select select) {
  const ReciprocalBasis g = reciprocal_basis(h.l1(), h.l2());
  std::vector<MatrixC> frame(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  auto at = [n](int i, int j) {
    return static_cast<std::size_t>(i % n) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j % n);
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec2 k = (static_cast<double>(i) / n) * g.g1 + (static_cast<double>(j) / n) * g.g2;
      Eigen::SelfAdjointEigenSolver<MatrixC> es(h(k));
      frame[at(i, j)] = select(es.eigenvalues(), es.eigenvectors());
    }
  }
  auto link = [&](std::size_t a, std::size_t b, bool& ok) {
    const Complex d = (frame[a].adjoint() * frame[b]).determinant();
    if (std::abs(d) < 1e-12) ok = false;
    return d / std::abs(d);
  };
  FluxSum out;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      bool ok = true;
      const Complex u1 = link(at(i, j), at(i + 1, j), ok);
      const Complex u2 = link(at(i + 1, j), at(i + 1, j + 1), ok);
      const Complex u3 = link(at(i, j + 1), at(i + 1, j + 1), ok);
      const Complex u4 = link(at(i, j), at(i, j + 1), ok);
      if (!ok) {
        out.admissible = false;
        return out;
      }
      const double f = std::arg(u1 * u2 * std::conj(u3) * std::conj(u4));
      out.max_flux = std::max(out.max_flux, std::abs(f));
      out.mean_abs += std::abs(f);
      total += f;
    }
  }
  out.mean_abs /= static_cast<double>(n) * n;
  out.admissible = out.max_flux <= kAdmissible;
  out.raw = total / (2.0 * kPi);
  return out;
}

void check_gap(const BlochHamiltonian& h, double mu, int n) {
  const LatticeSpec cell = cell_of(h);
  const BZMesh mesh = bz_mesh(cell, n);
  const GapReport gap = spectral_gap(h, mu, mesh);
  const FermiPoint zoom =
      minimize_distance(h, mu, mesh, mesh.to_fractional(gap.argmin_k), 1.0 / n, 30);
  if (!(gap.delta_mu > 0.0) || zoom.residual < 1e-8) {
    throw ComputationError("Chern number requires a gap at mu; model '" + h.tag() +
                           "' is gapless (dist " + std::to_string(zoom.residual) + ")");
  }
}

}  // namespace

ChernReport fhs_chern(const BlochHamiltonian& h, double mu, int n) {
  if (n < 6) throw InvalidArgument("Chern mesh needs n >= 6");
  check_gap(h, mu, n);
  ChernReport rep;
  int count = -1;
  auto select = [&](const Eigen::VectorXd& e, const MatrixC& v) {
    int nb = 0;
    while (nb < e.size() && e[nb] < mu) ++nb;
    if (count < 0) count = nb;
    if (nb != count) throw ComputationError("number of bands below mu varies across the Brillouin zone");
    return MatrixC(v.leftCols(nb));
  };
  int mesh = n;
  for (int attempt = 0; attempt <= 2; ++attempt, mesh *= 2) {
    count = -1;
    const FluxSum fs = flux_sum(h, mesh, select);
    rep.mesh_n = mesh;
    rep.retries = attempt;
    rep.bands_below_mu = count;
    if (!fs.admissible) continue;
    rep.max_flux = fs.max_flux;
    rep.mean_abs_flux = fs.mean_abs;
    rep.raw_sum = orientation(h) * fs.raw;
    const double rounded = std::round(rep.raw_sum);
    if (std::abs(rep.raw_sum - rounded) > 1e-6) {
      throw ComputationError("plaquette flux sum is not an integer: " + std::to_string(rep.raw_sum));
    }
    rep.chern = static_cast<int>(rounded);
    return rep;
  }
  throw ComputationError("Chern mesh inadmissible after 2 refinements (flux exceeds pi - 0.01)");
}

std::vector<int> band_chern_numbers(const BlochHamiltonian& h, int n) {
  if (n < 6) throw InvalidArgument("Chern mesh needs n >= 6");
  std::vector<int> out;
  for (int b = 0; b < h.dim(); ++b) {
    auto select = [&](const Eigen::VectorXd& e, const MatrixC& v) {
      const double lo = b > 0 ? e[b] - e[b - 1] : 1.0;
      const double hi = b + 1 < e.size() ? e[b + 1] - e[b] : 1.0;
      if (std::min(lo, hi) < 1e-8) throw ComputationError("bands touch; per-band Chern number undefined");
      return MatrixC(v.col(b));
    };
    int mesh = n;
    bool done = false;
    for (int attempt = 0; attempt <= 2 && !done; ++attempt, mesh *= 2) {
      const FluxSum fs = flux_sum(h, mesh, select);
      if (!fs.admissible) continue;
      const double raw = orientation(h) * fs.raw;
      if (std::abs(raw - std::round(raw)) > 1e-6) {
        throw ComputationError("plaquette flux sum is not an integer: " + std::to_string(raw));
      }
      out.push_back(static_cast<int>(std::round(raw)));
      done = true;
    }
    if (!done) throw ComputationError("Chern mesh inadmissible after 2 refinements");
  }
  return out;
}

}  // namespace kubo
