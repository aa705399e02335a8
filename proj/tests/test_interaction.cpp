#include <doctest.h>

#include <cmath>
#include <random>

#include "pump/interaction.hpp"

using namespace pump;
namespace {
Eigen::MatrixXcd random_hermitian(std::mt19937_64& rng, long d) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(d, d);
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < d; ++j) a(i, j) = std::complex<double>(g(rng), g(rng));
  return 0.5 * (a + a.adjoint());
}
}  // namespace

TEST_CASE("f_norm hand examples") {
  FFunction f = FFunction::standard();  // exp(-r)

  // single term on {0,1} with norm 1: weight 1/f(2) = e^2
  Interaction h1;
  Eigen::MatrixXcd pauli_x(2, 2);
  pauli_x << 0, 1, 1, 0;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
  m(0, 3) = m(3, 0) = 1.0;
  h1.add_term(Support({0, 1}), m);
  CHECK(std::abs(f_norm(h1, f) - std::exp(2.0)) < 1e-12);

  CHECK(f_norm(Interaction::zero(), f) == 0.0);

  // two disjoint single-site terms of norm 1 with f(1) = 1: sup, not sum
  FFunction f1 = FFunction::table({1.0}, 1.0, 1.0, 1.0);
  Interaction h2;
  h2.add_term(Support({0}), pauli_x);
  h2.add_term(Support({3}), pauli_x);
  CHECK(std::abs(f_norm(h2, f1) - 1.0) < 1e-12);
}

TEST_CASE("f_norm is a norm: triangle and homogeneity") {
  std::mt19937_64 rng(31);
  FFunction f = FFunction::standard();
  for (int c = 0; c < 20; ++c) {
    Interaction a, b;
    for (int i = 0; i < 3; ++i) {
      a.add_term(Support({i, i + 1}), random_hermitian(rng, 4));
      b.add_term(Support({i, i + 1}), random_hermitian(rng, 4));
    }
    double na = f_norm(a, f), nb = f_norm(b, f);
    CHECK(f_norm((a + b).compacted(), f) <= na + nb + 1e-12);
    double lam = 0.7;
    CHECK(std::abs(f_norm(a * lam, f) - lam * na) < 1e-12);
  }
}

TEST_CASE("tdi norms: sup and L1") {
  FFunction f = FFunction::standard();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
  m(0, 3) = m(3, 0) = 1.0;
  Interaction h;
  h.add_term(Support({0, 1}), m);

  TDI constant = TDI::constant(h);
  CHECK(std::abs(tdi_norm(constant, f) - f_norm(h, f)) < 1e-14);
  CHECK(std::abs(tdi_l1_norm(constant, f) - f_norm(h, f)) < 1e-14);

  // two half-time pieces with norms a and b: sup = max, L1 = (a+b)/2
  TDI two({TDI::Piece{0.0, 0.5, h * 2.0}, TDI::Piece{0.5, 1.0, h * 3.0}});
  CHECK(std::abs(tdi_norm(two, f) - 3.0 * f_norm(h, f)) < 1e-12);
  CHECK(std::abs(tdi_l1_norm(two, f) - 2.5 * f_norm(h, f)) < 1e-12);
}

TEST_CASE("anchored norm is +infinity when a term misses the anchor") {
  FFunction f = FFunction::standard();
  Eigen::MatrixXcd x(2, 2);
  x << 0, 1, 1, 0;
  Interaction h;
  h.add_term(Support({5}), x);
  CHECK(std::isinf(anchored_norm(h, Support({0, 1}), f)));
  Interaction h2;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
  m(0, 3) = m(3, 0) = 1.0;
  h2.add_term(Support({0, 1}), m);
  CHECK(std::isfinite(anchored_norm(h2, Support({0}), f)));
  CHECK(anchored_norm(Interaction::zero(), Support({0}), f) == 0.0);
  // anchored on everything = plain f-norm
  Interaction h3 = h2;
  h3.add_term(Support({3}), x);
  CHECK(std::abs(anchored_norm(h3, Support::interval(0, 5), f) - f_norm(h3, f)) < 1e-14);
}

TEST_CASE("truncate_left keeps exactly the left terms and reconstructs") {
  std::mt19937_64 rng(37);
  Interaction h;
  for (int i = -3; i <= 2; ++i) h.add_term(Support({i, i + 1}), random_hermitian(rng, 4));
  TDI tdi = TDI::constant(h);
  TDI left = tdi.truncate_left(0);
  for (const auto& t : left.pieces()[0].interaction.terms()) CHECK(t.support.max_label() <= 0);
  CHECK(left.pieces()[0].interaction.num_terms() == 3);  // pairs ending at <= 0

  SplitParts parts = split_decomposition(tdi, 0);
  CHECK(parts.crossing.pieces()[0].interaction.num_terms() == 1);
  int total = parts.left.pieces()[0].interaction.num_terms() +
              parts.right.pieces()[0].interaction.num_terms() +
              parts.crossing.pieces()[0].interaction.num_terms();
  CHECK(total == h.num_terms());

  // entirely left: unchanged; entirely right: empty
  Interaction lonly;
  lonly.add_term(Support({-2, -1}), random_hermitian(rng, 4));
  CHECK(TDI::constant(lonly).truncate_left(0).pieces()[0].interaction.num_terms() == 1);
  Interaction ronly;
  ronly.add_term(Support({1, 2}), random_hermitian(rng, 4));
  CHECK(TDI::constant(ronly).truncate_left(0).is_zero());
}

TEST_CASE("commutator interaction matches the dense commutator") {
  std::mt19937_64 rng(41);
  auto geom = ChainGeometry::uniform(0, 4, 2, ChainGeometry::Boundary::Open);
  Interaction a, b;
  for (int i = 0; i < 3; ++i) {
    a.add_term(Support({i, i + 1}), random_hermitian(rng, 4));
    b.add_term(Support({i, i + 1}), random_hermitian(rng, 4));
  }
  Interaction comm = commutator_interaction(a, b, *geom);
  Eigen::MatrixXcd lhs = comm.to_dense(*geom);
  Eigen::MatrixXcd ad = a.to_dense(*geom), bd = b.to_dense(*geom);
  CHECK((lhs - (ad * bd - bd * ad)).norm() < 1e-10);

  // disjoint supports commute
  Interaction c, d;
  c.add_term(Support({0}), random_hermitian(rng, 2));
  d.add_term(Support({3}), random_hermitian(rng, 2));
  CHECK(commutator_interaction(c, d, *geom).empty());

  // overlapping single-site terms give [A, B] on that site
  Interaction e, f2;
  Eigen::MatrixXcd ma = random_hermitian(rng, 2), mb = random_hermitian(rng, 2);
  e.add_term(Support({1}), ma);
  f2.add_term(Support({1}), mb);
  Interaction ef = commutator_interaction(e, f2, *geom);
  REQUIRE(ef.num_terms() == 1);
  CHECK((*ef.terms()[0].matrix - (ma * mb - mb * ma)).norm() < 1e-13);
}

TEST_CASE("weak sum groups terms by support") {
  std::mt19937_64 rng(43);
  Eigen::MatrixXcd m = random_hermitian(rng, 4);
  Interaction a, b;
  a.add_term(Support({0, 1}), m);
  b.add_term(Support({0, 1}), Eigen::MatrixXcd(-m));
  CHECK(weak_sum({a, b}).compacted(1e-14).empty());
  CHECK(weak_sum({a}).num_terms() == 1);
}

TEST_CASE("ramp sampling produces a valid piecewise schedule") {
  std::mt19937_64 rng(47);
  Eigen::MatrixXcd m = random_hermitian(rng, 4);
  Interaction h0, h1;
  h1.add_term(Support({0, 1}), m);
  TDI ramp = TDI::from_ramp({{0.0, h0}, {1.0, h1}}, 64);
  CHECK(ramp.num_pieces() == 64);
  // midpoint of the schedule carries about half the final interaction
  const Interaction& mid = ramp.at_time(0.5);
  CHECK(std::abs(mid.total_norm_bound() - 0.5 * h1.total_norm_bound()) <
        h1.total_norm_bound() / 32.0);
}
