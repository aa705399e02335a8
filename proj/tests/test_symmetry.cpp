#include <doctest.h>

#include <numbers>
#include <random>

#include "pump/symmetry.hpp"

using namespace pump;
namespace {
constexpr double kPi = std::numbers::pi;

Eigen::MatrixXcd random_matrix(std::mt19937_64& rng, long d) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(d, d);
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < d; ++j) a(i, j) = std::complex<double>(g(rng), g(rng));
  return a;
}
}  // namespace

TEST_CASE("dual_add is componentwise with cyclic reduction") {
  SymmetryGroup u1 = SymmetryGroup::u1();
  CHECK(dual_add(u1.charge({1}), u1.charge({1})) == u1.charge({2}));

  SymmetryGroup z3 = SymmetryGroup::cyclic(3);
  CHECK(dual_add(z3.charge({2}), z3.charge({2})) == z3.charge({1}));

  SymmetryGroup prod = SymmetryGroup::product({u1, z3});
  DualCharge h = prod.charge({-2, 1});
  CHECK(dual_add(h, prod.zero_charge()) == h);
  CHECK((h + (-h)).is_zero());
}

TEST_CASE("pairing is bilinear mod 2*pi") {
  SymmetryGroup prod =
      SymmetryGroup::product({SymmetryGroup::u1(), SymmetryGroup::cyclic(4)});
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> th(0.0, 2 * kPi);
  for (int c = 0; c < 50; ++c) {
    DualCharge h1 = prod.charge({static_cast<long>(rng() % 7) - 3, static_cast<long>(rng() % 4)});
    DualCharge h2 = prod.charge({static_cast<long>(rng() % 7) - 3, static_cast<long>(rng() % 4)});
    GroupElement g = prod.element({th(rng), static_cast<double>(rng() % 4)});
    double lhs = (h1 + h2).pairing(g);
    double rhs = h1.pairing(g) + h2.pairing(g);
    double diff = std::remainder(lhs - rhs, 2 * kPi);
    CHECK(std::abs(diff) < 1e-12);
  }
}

TEST_CASE("rep_unitary matches the example basis and is a representation") {
  SymmetryGroup u1 = SymmetryGroup::u1();
  OnsiteRep rep = OnsiteRep::uniform(
      u1, {u1.charge({-1}), u1.charge({0}), u1.charge({1})}, 2);

  GroupElement g = u1.element({kPi});
  Eigen::MatrixXcd u = rep.site_unitary(0, g);
  // U(g)|h'> = exp(-i h'(g)) |h'> on charges (-1, 0, 1) at theta = pi
  CHECK(std::abs(u(0, 0) - std::exp(std::complex<double>(0, kPi))) < 1e-12);
  CHECK(std::abs(u(1, 1) - 1.0) < 1e-12);
  CHECK(std::abs(u(2, 2) - std::exp(std::complex<double>(0, -kPi))) < 1e-12);

  CHECK((rep.site_unitary(0, u1.identity()) -
         Eigen::MatrixXcd::Identity(3, 3)).norm() < 1e-14);

  // representation property for U1 on random angles
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> th(0.0, 2 * kPi);
  for (int c = 0; c < 20; ++c) {
    GroupElement g1 = u1.element({th(rng)}), g2 = u1.element({th(rng)});
    Eigen::MatrixXcd lhs = rep.site_unitary(0, g1) * rep.site_unitary(0, g2);
    Eigen::MatrixXcd rhs = rep.site_unitary(0, g1.compose(g2));
    CHECK((lhs - rhs).norm() < 1e-12);
  }

  SymmetryGroup z2 = SymmetryGroup::cyclic(2);
  OnsiteRep rep2 = OnsiteRep::uniform(z2, {z2.charge({0}), z2.charge({1})}, 1);
  Eigen::MatrixXcd uz = rep2.site_unitary(0, z2.element({1}));
  CHECK(std::abs(uz(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(uz(1, 1) + 1.0) < 1e-14);
  // exact representation property for the cyclic factor
  Eigen::MatrixXcd sq = uz * uz;
  CHECK((sq - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-14);
}

TEST_CASE("is_invariant: charge-conserving pair operator passes, raiser fails") {
  SymmetryGroup u1 = SymmetryGroup::u1();
  OnsiteRep rep = OnsiteRep::uniform(
      u1, {u1.charge({0}), u1.charge({-1}), u1.charge({1})}, 2);

  // a(h) + a*(h) on the pair (levels (1,2) <-> (0,0)) conserves total charge
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(9, 9);
  a(1 * 3 + 2, 0) = 1.0;
  a(0, 1 * 3 + 2) = 1.0;
  CHECK(is_invariant_matrix(a, rep, {0, 1}).invariant);

  // |h><0| on one site raises the charge
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(3, 3);
  r(2, 0) = 1.0;
  auto chk = is_invariant_matrix(r, rep, {0});
  CHECK(!chk.invariant);
  CHECK(chk.max_defect > 0.5);

  CHECK(is_invariant_matrix(Eigen::MatrixXcd::Identity(9, 9), rep, {0, 1}).invariant);
}

TEST_CASE("charge operator diagonal") {
  SymmetryGroup u1 = SymmetryGroup::u1();
  OnsiteRep rep = OnsiteRep::uniform(
      u1, {u1.charge({-1}), u1.charge({0}), u1.charge({1})}, 2);
  Eigen::VectorXd q1 = rep.window_charge_diagonal({0}, 0);
  CHECK(q1(0) == -1.0);
  CHECK(q1(1) == 0.0);
  CHECK(q1(2) == 1.0);
  // two identical sites: eigenvalues -2..2 (Kronecker sum)
  Eigen::VectorXd q2 = rep.window_charge_diagonal({0, 1}, 0);
  CHECK(q2.minCoeff() == -2.0);
  CHECK(q2.maxCoeff() == 2.0);
}

TEST_CASE("symmetrize is the charge-block projection") {
  std::mt19937_64 rng(11);
  SymmetryGroup u1 = SymmetryGroup::u1();
  OnsiteRep rep = OnsiteRep::uniform(
      u1, {u1.charge({0}), u1.charge({-1}), u1.charge({1})}, 2);

  // |h><0| on one site averages to zero
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(3, 3);
  r(2, 0) = 1.0;
  CHECK(symmetrize_matrix(r, rep, {0}).norm() < 1e-15);

  // Z2 average of diag(1,0) + offdiag keeps the diagonal
  SymmetryGroup z2 = SymmetryGroup::cyclic(2);
  OnsiteRep rep2 = OnsiteRep::uniform(z2, {z2.charge({0}), z2.charge({1})}, 1);
  Eigen::MatrixXcd m(2, 2);
  m << 1.0, 1.0, 1.0, 0.0;
  Eigen::MatrixXcd avg = symmetrize_matrix(m, rep2, {0});
  CHECK(std::abs(avg(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(avg(0, 1)) < 1e-15);
  CHECK(std::abs(avg(1, 1)) < 1e-15);

  // projection property and invariance of the output on random matrices
  for (int c = 0; c < 10; ++c) {
    Eigen::MatrixXcd a = random_matrix(rng, 9);
    Eigen::MatrixXcd p1 = symmetrize_matrix(a, rep, {0, 1});
    Eigen::MatrixXcd p2 = symmetrize_matrix(p1, rep, {0, 1});
    CHECK((p1 - p2).norm() < 1e-12);
    Eigen::MatrixXcd herm = 0.5 * (p1 + p1.adjoint());
    CHECK(is_invariant_matrix(herm, rep, {0, 1}, 1e-10).invariant);
    // pinching never increases the operator norm
    CHECK(p1.operatorNorm() <= a.operatorNorm() + 1e-12);
  }
}
