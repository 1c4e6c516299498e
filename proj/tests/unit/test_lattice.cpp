#include "kubo/bloch.hpp"
#include "kubo/error.hpp"
#include "kubo/lattice.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace kubo;

namespace {
const double s3 = std::sqrt(3.0);
}

TEST_CASE("honeycomb preset") {
  const LatticeSpec one = build_honeycomb(1);
  CHECK(one.n_cells() == 1);
  CHECK(one.l1.isApprox(Vec2(1.5, -0.5 * s3)));
  CHECK(one.l2.isApprox(Vec2(1.5, 0.5 * s3)));
  CHECK(one.offsets[1] == Vec2(1.0, 0.0));

  const LatticeSpec two = build_honeycomb(2);
  CHECK(two.n_cells() == 4);
  CHECK(two.n_sites() == 8);

  const LatticeSpec spin = build_honeycomb(2, true);
  CHECK(spin.n_internal() == 4);
  CHECK(spin.n_sites() == 16);
  CHECK(spin.offsets[2] == Vec2(1.0, 0.0));

  CHECK_THROWS_AS(build_honeycomb(0), InvalidArgument);
  CHECK_THROWS_AS(build_honeycomb(-3), InvalidArgument);
}

TEST_CASE("nearest-neighbour vectors") {
  const auto d = nearest_neighbor_vectors();
  CHECK(d[1] == Vec2(-0.5, 0.5 * s3));
  const Vec2 sum = d[0] + d[1] + d[2];
  CHECK(sum.x() == 0.0);
  CHECK(sum.y() == 0.0);
  for (const Vec2& v : d) CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("cell area") {
  CHECK(cell_area(build_honeycomb(1)) == doctest::Approx(1.5 * s3).epsilon(1e-15));
  CHECK(cell_area(build_square(3)) == 1.0);
  CHECK(cell_area(Vec2(3.0, -s3), Vec2(3.0, s3)) == doctest::Approx(4 * 1.5 * s3).epsilon(1e-15));
  CHECK_THROWS_AS(cell_area(Vec2(1, 2), Vec2(2, 4)), InvalidArgument);
  CHECK_THROWS_AS(make_lattice("bad", Vec2(1, 0), Vec2(1, 0), 1, 1, {Vec2::Zero()}), InvalidArgument);
}

TEST_CASE("reciprocal basis") {
  const auto sq = reciprocal_basis(build_square(1));
  CHECK(sq.g1.isApprox(Vec2(2 * std::numbers::pi, 0)));
  CHECK(sq.g2.isApprox(Vec2(0, 2 * std::numbers::pi)));

  const LatticeSpec hc = build_honeycomb(1);
  const auto g = reciprocal_basis(hc);
  CHECK(std::abs(g.g1.dot(hc.l1) - 2 * std::numbers::pi) < 1e-14);
  CHECK(std::abs(g.g2.dot(hc.l2) - 2 * std::numbers::pi) < 1e-14);
  CHECK(std::abs(g.g1.dot(hc.l2)) < 1e-14);
  CHECK(std::abs(g.g2.dot(hc.l1)) < 1e-14);

  const auto half = reciprocal_basis(2.0 * hc.l1, 2.0 * hc.l2);
  CHECK(half.g1.isApprox(0.5 * g.g1, 1e-14));

  const auto back = reciprocal_basis(g.g1, g.g2);
  CHECK((back.g1 - hc.l1).norm() < 1e-12);
  CHECK((back.g2 - hc.l2).norm() < 1e-12);
}

TEST_CASE("uniform mesh") {
  const LatticeSpec hc = build_honeycomb(1);
  const BZMesh m = bz_mesh(hc, 2);
  REQUIRE(m.size() == 4);
  for (double w : m.weights) CHECK(w == m.weights[0]);
  CHECK(std::abs(m.weight_sum() / m.area() - 1.0) < 1e-12);
  for (const Vec2& f : m.frac) {
    CHECK(f.x() >= 0.0);
    CHECK(f.x() < 1.0);
    CHECK(f.y() >= 0.0);
    CHECK(f.y() < 1.0);
  }
  CHECK_THROWS_AS(bz_mesh(hc, 0), InvalidArgument);
}

TEST_CASE("refined mesh") {
  const LatticeSpec hc = build_honeycomb(1);
  const auto kf = graphene_fermi_points();
  const int n = 300;
  const BZMesh plain = bz_mesh(hc, n);
  const BZMesh one = bz_mesh(hc, n, RefinementSpec{{kf[0]}, 3, 4});
  const BZMesh both = bz_mesh(hc, n, RefinementSpec{{kf[0], kf[1]}, 3, 4});
  const std::size_t extra = one.size() - plain.size();
  CHECK(extra > 0);
  CHECK(both.size() == plain.size() + 2 * extra);
  CHECK(std::abs(both.weight_sum() / both.area() - 1.0) < 1e-12);
  for (const Vec2& f : both.frac) {
    CHECK(f.x() >= 0.0);
    CHECK(f.x() < 1.0);
  }

  const LatticeSpec& l = hc;
  auto smooth = [&l](const Vec2& k) {
    return std::norm(graphene_omega(k)) + std::exp(std::cos(k.dot(l.l1))) * (1.0 + 0.5 * std::sin(k.dot(l.l2)));
  };
  double refined = 0.0;
  for (std::size_t p = 0; p < both.size(); ++p) refined += both.weights[p] * smooth(both.cartesian(p));
  const double reference = oracle::uniform_quadrature(hc, n, smooth);
  CHECK(std::abs(refined - reference) <= 1e-6 * std::abs(reference));

  CHECK_THROWS_AS(bz_mesh(hc, 4, RefinementSpec{{kf[0]}, 600, 4}), InvalidArgument);
}

TEST_CASE("torus momenta") {
  const LatticeSpec lat = build_honeycomb(2, 3, false);
  const BZMesh t = torus_momenta(lat);
  CHECK(t.torus);
  CHECK(t.size() == 6);
  CHECK(t.n_cells == 6);
  CHECK(std::abs(t.weight_sum() / t.area() - 1.0) < 1e-12);
  CHECK(t.frac[1].isApprox(Vec2(0.0, 1.0 / 3.0)));
}

TEST_CASE("torus distance") {
  const LatticeSpec sq = build_square(4);
  const Site a{0, 0, 0};
  CHECK(torus_distance(sq, a, a) == 0.0);
  CHECK(torus_distance(sq, a, Site{3, 0, 0}) == doctest::Approx(1.0));
  CHECK(torus_distance(sq, Site{1, 2, 0}, Site{3, 3, 0}) == torus_distance(sq, Site{3, 3, 0}, Site{1, 2, 0}));

  const LatticeSpec hc = build_honeycomb(3);
  CHECK(torus_distance(hc, Site{0, 0, 0}, Site{0, 0, 1}) == doctest::Approx(1.0));
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> c(0, 2), s(0, 1);
  for (int trial = 0; trial < 500; ++trial) {
    const Site x{c(rng), c(rng), s(rng)}, y{c(rng), c(rng), s(rng)}, z{c(rng), c(rng), s(rng)};
    CHECK(torus_distance(hc, x, z) <= torus_distance(hc, x, y) + torus_distance(hc, y, z) + 1e-12);
  }
}
