#include "kubo/linear_response.hpp"

#include "kubo/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

namespace kubo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kChunks = 64;

double fermi(double e, double beta) {
  if (std::isinf(beta)) return e < 0.0 ? 1.0 : (e > 0.0 ? 0.0 : 0.5);
  const double x = beta * e;
  if (x > 0.0) {
    const double z = std::exp(-x);
    return z / (1.0 + z);
  }
  return 1.0 / (1.0 + std::exp(x));
}

// (f(b) − f(a)) / (a − b) at finite β, including a = b.
double fermi_slope(double a, double b, double beta) {
  const double x = beta * (a - b);
  if (std::abs(x) < 1.0) {
    const double h = 0.5 * x;
    const double sinhc = h == 0.0 ? 1.0 : std::sinh(h) / h;
    return 0.25 * beta * sinhc / (std::cosh(0.5 * beta * a) * std::cosh(0.5 * beta * b));
  }
  return (fermi(b, beta) - fermi(a, beta)) / (a - b);
}

struct Partial {
  std::vector<Matrix2c> k;
  Eigen::Vector2d current = Eigen::Vector2d::Zero();
};

}  // namespace

const char* units_name(Units u) { return u == Units::Natural ? "natural" : "e2h"; }

Units parse_units(const std::string& s) {
  if (s == "natural") return Units::Natural;
  if (s == "e2h") return Units::E2OverH;
  throw InvalidArgument("unknown units '" + s + "' (expected natural or e2h)");
}

const char* fit_model_name(FitModel m) { return m == FitModel::LogAware ? "log-aware" : "linear"; }

double ConductivityTensor::scale(Units u) { return u == Units::Natural ? 1.0 : kTwoPi; }

ConductivityTensor ConductivityTensor::in(Units u) const {
  ConductivityTensor c = *this;
  c.units = u;
  return c;
}

std::vector<double> default_omegas() { return {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}; }

CorrelatorSeries kubo_correlator_free(const BlochHamiltonian& h, double mu, double beta,
                                      const BZMesh& mesh, const std::vector<double>& omegas) {
  if (mesh.size() == 0) throw InvalidArgument("empty Brillouin-zone mesh");
  if (!(beta > 0.0)) throw InvalidArgument("beta must be positive");
  CorrelatorSeries out;
  out.omegas.push_back(0.0);
  for (double w : omegas) {
    if (!std::isfinite(w)) throw InvalidArgument("non-finite frequency");
    if (w != 0.0) out.omegas.push_back(w);
  }
  out.beta = beta;
  out.mesh_n = mesh.n;
  out.model_tag = h.tag();
  const std::size_t nw = out.omegas.size();
  const bool finite_beta = std::isfinite(beta);
  const double s = h.spin_factor();
  const double norm = s / (kTwoPi * kTwoPi);

  std::vector<Partial> partial(kChunks);
  const std::size_t per_chunk = (mesh.size() + kChunks - 1) / kChunks;

  auto work = [&](std::size_t chunk) {
    Partial& acc = partial[chunk];
    acc.k.assign(nw, Matrix2c::Zero());
    const std::size_t begin = chunk * per_chunk;
    const std::size_t end = std::min(mesh.size(), begin + per_chunk);
    for (std::size_t p = begin; p < end; ++p) {
      const Vec2 k = mesh.cartesian(p);
      Eigen::SelfAdjointEigenSolver<MatrixC> es(h.offset_gauge(k));
      const Eigen::VectorXd e = es.eigenvalues().array() - mu;
      const MatrixC& v = es.eigenvectors();
      const MatrixC j1 = v.adjoint() * h.current_vertex(k, 1) * v;
      const MatrixC j2 = v.adjoint() * h.current_vertex(k, 2) * v;
      const double w = mesh.weights[p] * norm;
      const auto nb = e.size();
      std::vector<double> f(static_cast<std::size_t>(nb));
      for (Eigen::Index a = 0; a < nb; ++a) f[static_cast<std::size_t>(a)] = fermi(e[a], beta);
      for (Eigen::Index a = 0; a < nb; ++a) {
        const double fa = f[static_cast<std::size_t>(a)];
        acc.current[0] += w * fa * j1(a, a).real();
        acc.current[1] += w * fa * j2(a, a).real();
        for (Eigen::Index b = 0; b < nb; ++b) {
          const double fb = f[static_cast<std::size_t>(b)];
          if (!finite_beta && fa == fb) continue;
          Matrix2c x;
          x(0, 0) = j1(a, b) * j1(b, a);
          x(0, 1) = j1(a, b) * j2(b, a);
          x(1, 0) = j2(a, b) * j1(b, a);
          x(1, 1) = j2(a, b) * j2(b, a);
          const double de = e[a] - e[b];
          for (std::size_t iw = 0; iw < nw; ++iw) {
            const double om = out.omegas[iw];
            Complex kernel;
            if (om == 0.0) {
              if (finite_beta) {
                kernel = fermi_slope(e[a], e[b], beta);
              } else {
                kernel = (fb - fa) / de;
              }
            } else {
              if (a == b) continue;
              kernel = (fb - fa) / Complex(de, om);
            }
            acc.k[iw] += (w * kernel) * x;
          }
        }
      }
    }
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t nthreads = std::min<std::size_t>(hw, kChunks);
  if (nthreads <= 1) {
    for (std::size_t c = 0; c < kChunks; ++c) work(c);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t c = t; c < kChunks; c += nthreads) work(c);
      });
    }
    for (auto& th : pool) th.join();
  }

  out.values.assign(nw, Matrix2c::Zero());
  Eigen::Vector2d current = Eigen::Vector2d::Zero();
  for (const Partial& acc : partial) {
    for (std::size_t iw = 0; iw < nw; ++iw) out.values[iw] += acc.k[iw];
    current += acc.current;
  }
  if (finite_beta && mesh.torus) {
    // ⟨J_i⟩⟨J_j⟩ part of the full (not connected) correlator at ω = 0.
    const double volume = kTwoPi * kTwoPi / mesh.area() * mesh.n_cells;
    out.values[0] += Matrix2c((beta * volume) * current * current.transpose());
  }
  return out;
}

namespace {

struct LinearFit {
  Eigen::VectorXd coef;
  Eigen::VectorXd se;
};

Eigen::MatrixXd design(const std::vector<double>& w, std::size_t count, FitModel model) {
  const Eigen::Index ncol = model == FitModel::LogAware ? 3 : 2;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(count), ncol);
  for (std::size_t r = 0; r < count; ++r) {
    const auto i = static_cast<Eigen::Index>(r);
    x(i, 0) = 1.0;
    if (model == FitModel::LogAware) {
      x(i, 1) = w[r] * std::log(w[r]);
      x(i, 2) = w[r];
    } else {
      x(i, 1) = w[r];
    }
  }
  return x;
}

LinearFit least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  LinearFit fit;
  fit.coef = x.colPivHouseholderQr().solve(y);
  fit.se = Eigen::VectorXd::Zero(x.cols());
  const Eigen::Index dof = x.rows() - x.cols();
  if (dof > 0) {
    const double rss = (x * fit.coef - y).squaredNorm();
    const Eigen::MatrixXd cov = (x.transpose() * x).inverse() * (rss / static_cast<double>(dof));
    fit.se = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  }
  return fit;
}

}  // namespace

ConductivityTensor kubo_sigma(const CorrelatorSeries& series, FitModel model) {
  if (series.omegas.empty() || series.omegas.front() != 0.0) {
    throw InvalidArgument("correlator series must contain omega = 0 first");
  }
  std::vector<std::size_t> idx;
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (series.omegas[i] > 0.0) idx.push_back(i);
  }
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return series.omegas[a] < series.omegas[b]; });
  if (idx.size() < 3) throw InvalidArgument("Kubo limit needs at least 3 positive frequencies");
  const double wmin = series.omegas[idx.front()];
  const double wmax = series.omegas[idx.back()];
  if (wmax < 100.0 * wmin * (1.0 - 1e-9)) {
    throw InvalidArgument("Kubo limit needs frequencies spanning at least two decades");
  }

  ConductivityTensor out;
  out.fit.model = model;
  std::vector<double> w;
  for (std::size_t i : idx) {
    const double om = series.omegas[i];
    const Matrix2c q = -(series.values[i] - series.at_zero()) / om;
    w.push_back(om);
    out.fit.omegas.push_back(om);
    out.fit.quotients.push_back(q.real());
    out.fit.max_imag = std::max(out.fit.max_imag, q.imag().cwiseAbs().maxCoeff());
  }
  const std::size_t nparam = model == FitModel::LogAware ? 3 : 2;
  std::size_t primary = 0;
  while (primary < w.size() && w[primary] <= 10.0 * wmin * (1.0 + 1e-12)) ++primary;
  primary = std::max(primary, nparam);
  out.fit.primary_points = static_cast<int>(primary);

  const Eigen::MatrixXd xp = design(w, primary, model);
  const Eigen::MatrixXd xa = design(w, w.size(), model);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      Eigen::VectorXd y(static_cast<Eigen::Index>(w.size()));
      for (std::size_t r = 0; r < w.size(); ++r) y[static_cast<Eigen::Index>(r)] = out.fit.quotients[r](i, j);
      const LinearFit fp = least_squares(xp, y.head(static_cast<Eigen::Index>(primary)));
      const LinearFit fa = least_squares(xa, y);
      out.sigma_natural(i, j) = fp.coef[0];
      out.uncertainty_natural(i, j) = std::hypot(fp.se[0], fp.coef[0] - fa.coef[0]);
      if (model == FitModel::LogAware) {
        out.log_coefficient(i, j) = fp.coef[1];
        out.log_uncertainty(i, j) = std::hypot(fp.se[1], fp.coef[1] - fa.coef[1]);
      }
      const double first = y[0];
      const double last = y[y.size() - 1];
      const double trend = last > first ? 1.0 : (last < first ? -1.0 : 0.0);
      const double allowed = 10.0 * std::max(out.uncertainty_natural(i, j), 1e-12 * (1.0 + std::abs(fp.coef[0])));
      for (Eigen::Index r = 0; r + 1 < y.size(); ++r) {
        const double d = y[r + 1] - y[r];
        if (d * trend < 0.0 && std::abs(d) > allowed) out.converged = false;
      }
    }
  }
  return out;
}

ConductivityTensor tknn_sigma12(const ChernReport& report) {
  ConductivityTensor out;
  out.units = Units::E2OverH;
  out.sigma_natural(0, 1) = report.chern / kTwoPi;
  out.sigma_natural(1, 0) = -report.chern / kTwoPi;
  out.fit.model = FitModel::Linear;
  return out;
}

KuboTknnComparison kubo_vs_tknn(const BlochHamiltonian& h, double mu, const BZMesh& mesh,
                                const std::vector<double>& omegas, int n) {
  KuboTknnComparison out;
  out.chern = fhs_chern(h, mu, n);
  out.tknn = tknn_sigma12(out.chern);
  out.kubo = kubo_sigma(kubo_correlator_free(h, mu, kInfiniteBeta, mesh, omegas), FitModel::LogAware)
                 .in(Units::E2OverH);
  out.discrepancy_e2h = (out.kubo.sigma() - out.tknn.sigma()).cwiseAbs();
  return out;
}

}  // namespace kubo
