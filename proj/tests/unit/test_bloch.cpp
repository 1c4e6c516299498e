#include "kubo/bloch.hpp"
#include "kubo/error.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace kubo;

namespace {

const double kPi = std::numbers::pi;

std::vector<Vec2> random_momenta(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2 * kPi, 2 * kPi);
  std::vector<Vec2> out;
  for (int i = 0; i < count; ++i) out.emplace_back(u(rng), u(rng));
  return out;
}

std::vector<BlochHamiltonian> builtin_models() {
  return {graphene_bloch(1.0), haldane_bloch(1.0, 0.1, kPi / 2, 0.0), haldane_bloch(1.0, 0.2, 0.7, 0.3),
          qwz_bloch(1.0), qwz_bloch(-0.5), flat_bloch(build_honeycomb(1), {-1.0, 1.0})};
}

}  // namespace

TEST_CASE("graphene Omega") {
  CHECK(graphene_omega(Vec2::Zero()) == Complex(3.0, 0.0));
  for (const Vec2& k : graphene_fermi_points()) CHECK(std::abs(graphene_omega(k)) < 1e-15);
  const BlochHamiltonian g = graphene_bloch(1.7);
  for (const Vec2& k : random_momenta(20, 1)) {
    const Eigen::VectorXd e = g.spectrum(k);
    const double w = 1.7 * std::abs(graphene_omega(k));
    CHECK(e[0] == doctest::Approx(-w).epsilon(1e-12));
    CHECK(e[1] == doctest::Approx(w).epsilon(1e-12));
  }
  CHECK_THROWS_AS(graphene_bloch(0.0), InvalidArgument);
  CHECK_THROWS_AS(graphene_bloch(-1.0), InvalidArgument);
}

TEST_CASE("relativistic expansion near the Fermi points") {
  const auto kf = graphene_fermi_points();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.07, 0.07);
  double num = 0.0;
  double den = 0.0;
  double worst = 0.0;
  for (int trial = 0; trial < 2000; ++trial) {
    const Vec2 q(u(rng), u(rng));
    if (q.norm() > 0.1 || q.norm() < 1e-6) continue;
    for (int s = 0; s < 2; ++s) {
      const double sign = s == 0 ? 1.0 : -1.0;
      const Complex lin = 1.5 * Complex(sign * q.y(), q.x());
      const double err = std::abs(graphene_omega(q + kf[static_cast<std::size_t>(s)]) - lin);
      num += err * q.squaredNorm();
      den += q.squaredNorm() * q.squaredNorm();
      worst = std::max(worst, err / q.squaredNorm());
    }
  }
  // Ω/(3/2) against ik'₁ ± k'₂; raw Ω has second-order coefficient up to 9/8
  const double c_fit = num / den / 1.5;
  CHECK(c_fit <= 1.0);
  CHECK(worst / 1.5 <= 1.0);
  CHECK(worst > 1.125);
}

TEST_CASE("closed-form graphene matches its hopping list") {
  const BlochHamiltonian g = graphene_bloch(1.0);
  const CustomBlochResult c = custom_bloch("copy", build_honeycomb(1), g.hoppings());
  CHECK(c.correction == 0.0);
  for (const Vec2& k : random_momenta(50, 2)) CHECK((c.h(k) - g(k)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("custom hopping lists") {
  const LatticeSpec lat = build_honeycomb(1);
  MatrixC d(2, 2);
  d << 0.3, Complex(0.1, -0.2), Complex(0.1, 0.2), -0.7;
  const CustomBlochResult onsite = custom_bloch("d", lat, {{{0, 0}, d}});
  for (const Vec2& k : random_momenta(5, 3)) CHECK((onsite.h(k) - d).norm() < 1e-15);

  MatrixC hop = MatrixC::Zero(2, 2);
  hop(0, 1) = 0.5;
  CHECK_THROWS_AS(custom_bloch("orphan", lat, {{{1, 0}, hop}}), InvalidArgument);

  MatrixC near = hop.adjoint();
  near(1, 0) += 1e-12;
  const CustomBlochResult fixed = custom_bloch("near", lat, {{{1, 0}, hop}, {{-1, 0}, near}});
  CHECK(fixed.correction > 0.0);
  CHECK(fixed.correction < 1e-12);
  for (const Vec2& k : random_momenta(5, 4)) CHECK((fixed.h(k) - fixed.h(k).adjoint()).norm() < 1e-15);

  MatrixC wrong = MatrixC::Zero(3, 3);
  CHECK_THROWS_AS(custom_bloch("dim", lat, {{{0, 0}, wrong}}), InvalidArgument);
}

TEST_CASE("Hermiticity and periodicity of the built-in models") {
  for (const BlochHamiltonian& h : builtin_models()) {
    const ReciprocalBasis g = reciprocal_basis(h.l1(), h.l2());
    for (const Vec2& k : random_momenta(100, 5)) {
      const MatrixC m = h(k);
      CHECK((m - m.adjoint()).norm() <= 1e-13 * std::max(1.0, m.norm()));
      CHECK((h(k + g.g1) - m).norm() < 1e-12);
      CHECK((h(k + g.g2) - m).norm() < 1e-12);
      CHECK((Eigen::SelfAdjointEigenSolver<MatrixC>(h.offset_gauge(k)).eigenvalues() - h.spectrum(k)).norm() < 1e-12);
    }
  }
}

TEST_CASE("Haldane gap") {
  const BlochHamiltonian h = haldane_bloch(1.0, 0.0, 0.0, 0.5);
  const BZMesh mesh = bz_mesh(build_honeycomb(1), 200);
  double scan = 1e300;
  for (std::size_t p = 0; p < mesh.size(); ++p) {
    const double om = std::abs(graphene_omega(mesh.cartesian(p)));
    scan = std::min(scan, std::sqrt(om * om + 0.25));
  }
  const GapReport r = spectral_gap(h, 0.0, mesh);
  CHECK(r.delta_mu == doctest::Approx(0.5).epsilon(0.01));
  CHECK(r.delta_mu <= scan + 1e-15);
  CHECK(std::abs(r.scan_delta - scan) < 1e-12);

  const GapReport top = spectral_gap(haldane_bloch(1.0, 0.1, kPi / 2, 0.0), 0.0, mesh);
  CHECK(top.delta_mu == doctest::Approx(3 * std::sqrt(3.0) * 0.1).epsilon(0.01));

  const GapReport gapless = spectral_gap(haldane_bloch(1.0, 0.0, 0.0, 0.0), 0.0, mesh);
  CHECK(gapless.delta_mu < 0.03);
}

TEST_CASE("spectral gap") {
  const LatticeSpec lat = build_honeycomb(1);
  const BlochHamiltonian g = graphene_bloch(1.0);
  double previous = 1e300;
  for (int n : {20, 60, 180}) {
    const GapReport r = spectral_gap(g, 0.0, bz_mesh(lat, n));
    CHECK(r.scan_delta <= previous);
    CHECK(r.delta_mu <= r.scan_delta);
    CHECK(r.delta_mu <= 1.5 * 4.0 * kPi / (std::sqrt(3.0) * n));
    previous = r.scan_delta;
  }
  CHECK(spectral_gap(flat_bloch(lat, {-1.0, 1.0}), 0.0, bz_mesh(lat, 8)).delta_mu == 1.0);
}

TEST_CASE("Fermi points") {
  const LatticeSpec lat = build_honeycomb(1);
  const BlochHamiltonian g = graphene_bloch(1.0);
  const auto kf = graphene_fermi_points();
  const ReciprocalBasis rb = reciprocal_basis(lat);
  auto error_to = [&](const Vec2& k, const Vec2& target) {
    double best = 1e300;
    for (int a = -1; a <= 1; ++a) {
      for (int b = -1; b <= 1; ++b) best = std::min(best, (k - target + a * rb.g1 + b * rb.g2).norm());
    }
    return best;
  };
  auto localize = [&](int n, int zoom) {
    const auto pts = fermi_points(g, 0.0, bz_mesh(lat, n), 0.2, zoom);
    REQUIRE(pts.size() == 2);
    double e = 0.0;
    for (const Vec2& target : kf) {
      e = std::max(e, std::min(error_to(pts[0].k, target), error_to(pts[1].k, target)));
    }
    return e;
  };
  const double e60 = localize(60, 10);
  CHECK(e60 < 2 * kPi / 60);
  const double coarse = localize(60, 0);
  const double fine = localize(120, 0);
  CHECK(fine / coarse == doctest::Approx(0.5).epsilon(0.05));

  CHECK(fermi_points(haldane_bloch(1.0, 0.1, kPi / 2, 0.0), 0.0, bz_mesh(lat, 60), 1e-3).empty());
  CHECK_THROWS_AS(fermi_points(g, 0.0, bz_mesh(lat, 60), 0.0), InvalidArgument);
}

TEST_CASE("current vertex") {
  const BlochHamiltonian g = graphene_bloch(1.0);
  const Vec2 kf = graphene_fermi_points()[0];
  const auto delta = nearest_neighbor_vectors();
  for (int dir = 1; dir <= 2; ++dir) {
    const MatrixC j = g.current_vertex(kf, dir);
    CHECK((j - oracle::finite_difference_vertex(g, kf, dir)).cwiseAbs().maxCoeff() <= 1e-8);
    Complex bond_sum = 0.0;
    for (const Vec2& d : delta) bond_sum += d[dir - 1] * std::exp(Complex(0, -kf.dot(d)));
    CHECK(std::abs(j(0, 1)) == doctest::Approx(std::abs(bond_sum)).epsilon(1e-12));
  }

  for (const BlochHamiltonian& h : builtin_models()) {
    for (const Vec2& k : random_momenta(30, 6)) {
      for (int dir = 1; dir <= 2; ++dir) {
        const MatrixC j = h.current_vertex(k, dir);
        CHECK((j - j.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((j - oracle::finite_difference_vertex(h, k, dir)).cwiseAbs().maxCoeff() <= 1e-8);
      }
    }
  }

  const BlochHamiltonian flat = flat_bloch(build_honeycomb(1), {-1.0, 2.0});
  CHECK(flat.current_vertex(Vec2(0.3, 0.2), 1).norm() == 0.0);

  const BlochHamiltonian pure = BlochHamiltonian::from_function(
      "pure", Vec2(1, 0), Vec2(0, 1), {Vec2::Zero()}, [](const Vec2& k) { return MatrixC::Constant(1, 1, std::cos(k.x())); });
  CHECK_THROWS_AS(pure.current_vertex(Vec2::Zero(), 1), InvalidArgument);
  CHECK_THROWS_AS(current_vertex(pure, 1), InvalidArgument);
  CHECK_THROWS_AS(g.current_vertex(kf, 3), InvalidArgument);
}
