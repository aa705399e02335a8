#include <doctest.h>

#include <cmath>
#include <random>

#include "pump/chainspace.hpp"

using namespace pump;
namespace {
Eigen::VectorXcd random_state(std::mt19937_64& rng, long d) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(d);
  for (long i = 0; i < d; ++i) v(i) = std::complex<double>(g(rng), g(rng));
  return v / v.norm();
}
}  // namespace

TEST_CASE("product state indexing is row-major, leftmost slowest") {
  auto geom = ChainGeometry::uniform(0, 2, 2, ChainGeometry::Boundary::Open);
  ChainState s = product_state(geom, {1, 0});
  CHECK(std::abs(s.vector()(2) - 1.0) < 1e-15);  // index 2 = 1*2 + 0
  CHECK(s.norm() == 1.0);
  CHECK_THROWS(product_state(geom, {2, 0}));
}

TEST_CASE("apply acts locally and respects composition") {
  auto geom = ChainGeometry::uniform(0, 3, 2, ChainGeometry::Boundary::Open);
  Eigen::MatrixXcd x(2, 2);
  x << 0, 1, 1, 0;

  ChainState s = product_state(geom, {0, 0, 0});
  EmbeddedOperator x1(Support({1}), x);
  Eigen::VectorXcd flipped = apply(x1, s);
  ChainState expect = product_state(geom, {0, 1, 0});
  CHECK((flipped - expect.vector()).norm() < 1e-14);

  // identity support leaves the state unchanged
  EmbeddedOperator id(Support({0, 1}), Eigen::MatrixXcd::Identity(4, 4));
  CHECK((apply(id, s) - s.vector()).norm() < 1e-15);

  // composition: A (B psi) = (AB) psi on the merged support
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(4, 4), b(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      a(i, j) = std::complex<double>(g(rng), g(rng));
      b(i, j) = std::complex<double>(g(rng), g(rng));
    }
  ChainState r(geom, random_state(rng, 8));
  Eigen::VectorXcd lhs = apply_to_vector(Support({0, 1}), a, *geom,
                                         apply_to_vector(Support({0, 1}), b, *geom, r.vector()));
  Eigen::VectorXcd rhs = apply_to_vector(Support({0, 1}), a * b, *geom, r.vector());
  CHECK((lhs - rhs).norm() < 1e-10);
}

TEST_CASE("apply handles ring-wrapped supports") {
  auto ring = ChainGeometry::uniform(0, 4, 2, ChainGeometry::Boundary::Ring);
  // flip the pair (3, 0) via a swap-like operator: X (x) X on sites (3, 0)
  Eigen::MatrixXcd xx(4, 4);
  xx.setZero();
  xx(0, 3) = xx(3, 0) = xx(1, 2) = xx(2, 1) = 1.0;
  ChainState s = product_state(ring, {0, 0, 0, 1});  // site 3 is level 1
  Eigen::VectorXcd out = apply_to_vector(Support({3, 0}), xx, *ring, s.vector());
  // X on site 3 and X on site 0: levels become (1, 0, 0, 0)
  ChainState expect = product_state(ring, {1, 0, 0, 0});
  CHECK((out - expect.vector()).norm() < 1e-14);
}

TEST_CASE("reduced density: product state is rank one, Bell pair is mixed") {
  auto geom = ChainGeometry::uniform(0, 2, 2, ChainGeometry::Boundary::Open);
  ChainState prod = product_state(geom, {1, 0});
  Eigen::MatrixXcd rho = reduced_density(prod, 0, 0);
  CHECK(std::abs(rho(1, 1) - 1.0) < 1e-14);
  CHECK(std::abs(rho.trace().real() - 1.0) < 1e-12);

  Eigen::VectorXcd bell(4);
  bell << 1 / std::sqrt(2.0), 0, 0, 1 / std::sqrt(2.0);
  ChainState b(geom, bell);
  Eigen::MatrixXcd rho_b = reduced_density(b, 0, 0);
  CHECK((rho_b - 0.5 * Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-14);
}

TEST_CASE("nested reduced densities are consistent") {
  std::mt19937_64 rng(17);
  auto geom = ChainGeometry::uniform(0, 4, 2, ChainGeometry::Boundary::Open);
  ChainState s(geom, random_state(rng, 16));
  Eigen::MatrixXcd big = reduced_density(s, 0, 2);   // sites 0..2
  Eigen::MatrixXcd small = reduced_density(s, 0, 1); // sites 0..1
  // trace out the last site of the big window
  Eigen::MatrixXcd traced = Eigen::MatrixXcd::Zero(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int r = 0; r < 2; ++r) traced(i, j) += big(i * 2 + r, j * 2 + r);
  CHECK((traced - small).norm() < 1e-10);
}

TEST_CASE("cut entropy: product zero, Bell pair ln 2, rejects rings") {
  auto geom = ChainGeometry::uniform(0, 2, 2, ChainGeometry::Boundary::Open);
  CHECK(cut_entropy(product_state(geom, {0, 1}), 0) < 1e-10);

  Eigen::VectorXcd bell(4);
  bell << 1 / std::sqrt(2.0), 0, 0, 1 / std::sqrt(2.0);
  CHECK(std::abs(cut_entropy(ChainState(geom, bell), 0) - std::log(2.0)) < 1e-8);

  // |-h, h> pair not crossing the edge
  auto geom4 = ChainGeometry::uniform(0, 4, 3, ChainGeometry::Boundary::Open);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(81);
  // sites (2,3) in levels (1,2); edge (0,1) untouched
  v(1 * 3 + 2) = 1.0;  // rightmost two sites block index
  CHECK(cut_entropy(ChainState(geom4, v), 0) < 1e-10);

  auto ring = ChainGeometry::uniform(0, 2, 2, ChainGeometry::Boundary::Ring);
  CHECK_THROWS(cut_entropy(product_state(ring, {0, 0}), 0));
}

TEST_CASE("trace distance basics and the bipartite bound") {
  std::mt19937_64 rng(23);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(2, 2);
  rho(0, 0) = 1.0;
  Eigen::MatrixXcd sig = Eigen::MatrixXcd::Zero(2, 2);
  sig(1, 1) = 1.0;
  CHECK(trace_distance(rho, rho) < 1e-15);
  CHECK(std::abs(trace_distance(rho, sig) - 2.0) < 1e-14);

  // ||rho - P||_1 <= 6 sqrt(||rho_a - P_a||_1) + 6 sqrt(||rho_b - P_b||_1)
  auto geom = ChainGeometry::uniform(0, 4, 2, ChainGeometry::Boundary::Open);
  for (int c = 0; c < 20; ++c) {
    Eigen::VectorXcd base = random_state(rng, 16);
    // bias towards a product state so the right-hand side stays informative
    ChainState prod = product_state(geom, {0, 1, 0, 1});
    Eigen::VectorXcd mix = (prod.vector() * 3.0 + base).normalized();
    ChainState s(geom, mix);
    Eigen::MatrixXcd rho_full = mix * mix.adjoint();
    Eigen::MatrixXcd pa = reduced_density(prod, 0, 1), pb = reduced_density(prod, 2, 3);
    Eigen::MatrixXcd ra = reduced_density(s, 0, 1), rb = reduced_density(s, 2, 3);
    Eigen::MatrixXcd pfull = prod.vector() * prod.vector().adjoint();
    double lhs = trace_distance(rho_full, pfull);
    double rhs = 6 * std::sqrt(trace_distance(ra, pa)) + 6 * std::sqrt(trace_distance(rb, pb));
    CHECK(lhs <= rhs + 1e-12);
  }
}

TEST_CASE("state binary round trip") {
  std::mt19937_64 rng(29);
  auto geom = ChainGeometry::uniform(-1, 3, 2, ChainGeometry::Boundary::Open);
  ChainState s(geom, random_state(rng, 8));
  save_state_binary(s, "/tmp/pump_state_test");
  ChainState loaded = load_state_binary(geom, "/tmp/pump_state_test");
  CHECK((loaded.vector() - s.vector()).norm() < 1e-15);
}
