#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pump/splitting.hpp"

using namespace pump;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr std::complex<double> kI(0.0, 1.0);

GeometryPtr open8() {
  return ChainGeometry::uniform(-4, 8, 3, ChainGeometry::Boundary::Open);
}

Eigen::MatrixXcd random_hermitian(std::mt19937_64& rng, long d, double scale) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(d, d);
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < d; ++j) a(i, j) = std::complex<double>(g(rng), g(rng));
  Eigen::MatrixXcd h = 0.5 * (a + a.adjoint());
  return h * (scale / h.operatorNorm());
}

// index-0 qubit loop: a dressing-style bump schedule of symmetric terms
LoopSpec small_qubit_loop(std::mt19937_64& rng, GeometryPtr geom, const OnsiteRep& rep,
                          double eps) {
  Interaction gen;
  for (int i = geom->first_site(); i < geom->last_site(); i += 3) {
    std::vector<int> pos{geom->position(i), geom->position(i + 1)};
    gen.add_term(Support({i, i + 1}),
                 symmetrize_matrix(random_hermitian(rng, 4, 1.0), rep, pos));
  }
  const int pieces = 32;
  std::vector<TDI::Piece> sched;
  auto theta = [&](double s) { return eps * std::sin(kPi * s) * std::sin(kPi * s); };
  for (int k = 0; k < pieces; ++k) {
    double a = static_cast<double>(k) / pieces, b = static_cast<double>(k + 1) / pieces;
    sched.push_back(TDI::Piece{a, b, gen * ((theta(b) - theta(a)) / (b - a))});
  }
  LoopSpec loop;
  loop.geom = geom;
  loop.rep = rep;
  loop.basepoint_levels.assign(geom->num_sites(), 0);
  loop.tdi = TDI(std::move(sched));
  loop.policy.kind = ClosurePolicy::Kind::BulkWindow;
  loop.policy.tol = 1e-8;
  return loop;
}
}  // namespace

TEST_CASE("split succeeds for an index-0 loop and factorizes the evolution") {
  SymmetryGroup u1 = SymmetryGroup::u1();
  LoopSpec pump1 = example_pump(u1, u1.charge({1}), open8());
  pump1.policy.tol = 1e-8;
  LoopSpec loop0 = concat(time_reverse(pump1), pump1);

  auto [split, report] = split_single_edge(loop0, 0, 8);
  REQUIRE(report.ok);
  CHECK(report.max_entropy_after <= 1e-6);
  CHECK(report.closure_bulk_distance <= 1e-6);
  CHECK(report.charge_left.is_zero());
  CHECK(report.charge_right.is_zero());
  // the original loop is genuinely entangled across the cut at interior times
  double max_before = 0.0;
  for (double e : report.entropy_before) max_before = std::max(max_before, e);
  CHECK(max_before > 0.1);
  // transport bound
  CHECK(report.left_generator_sup <= 8.0 * report.left_distance + 1e-9);
  CHECK(report.right_generator_sup <= 8.0 * report.right_distance + 1e-9);
}

TEST_CASE("split certificate fails for the charged pump with halves +1/-1") {
  SymmetryGroup u1 = SymmetryGroup::u1();
  LoopSpec pump1 = example_pump(u1, u1.charge({1}), open8());
  pump1.policy.tol = 1e-8;
  auto [split, report] = split_single_edge(pump1, 0, 4);
  CHECK(!report.ok);
  CHECK(report.charge_left == u1.charge({1}));
  CHECK(report.charge_right == u1.charge({-1}));
}

TEST_CASE("trivial pump splits everywhere") {
  SymmetryGroup u1 = SymmetryGroup::u1();
  LoopSpec pump0 = example_pump(u1, u1.charge({0}), open8());
  pump0.policy.tol = 1e-8;
  auto [split, report] = split_single_edge(pump0, 0, 8);
  REQUIRE(report.ok);
  CHECK(report.max_entropy_after <= 1e-6);
  CHECK(report.closure_bulk_distance <= 1e-6);
}

TEST_CASE("multi split: tails shrink with the block size") {
  std::mt19937_64 rng(211);
  SymmetryGroup u1 = SymmetryGroup::u1();
  auto geom = ChainGeometry::uniform(-4, 8, 2, ChainGeometry::Boundary::Open);
  OnsiteRep rep = OnsiteRep::uniform(u1, {u1.charge({0}), u1.charge({1})}, 8);
  LoopSpec loop = small_qubit_loop(rng, geom, rep, 0.4);
  FFunction f = FFunction::standard();

  MultiSplitReport r2 = multi_split(loop, 2, f, 16);
  MultiSplitReport r4 = multi_split(loop, 4, f, 16);
  CHECK(r2.block_edges.size() == 3);
  CHECK(r4.block_edges.size() == 1);
  // discarded tails decrease monotonically with R on this family
  CHECK(r4.f_tail_norm <= r2.f_tail_norm + 1e-12);
  CHECK(r4.z_tail_norm <= r2.z_tail_norm + 1e-9);
  CHECK(r4.w_norm <= r2.w_norm + 1e-9);
  // quasi-loop defects stay small for a short loop
  for (double d : r4.f_quasiloop_defects) CHECK(d < 0.2);

  // index obstruction: a charged loop is rejected
  auto geom3 = open8();
  LoopSpec pump1 = example_pump(u1, u1.charge({1}), geom3);
  pump1.policy.tol = 1e-8;
  CHECK_THROWS(multi_split(pump1, 4, f, 8));
}

TEST_CASE("close_quasiloop: exact loop needs no correction, perturbed one closes") {
  SymmetryGroup u1 = SymmetryGroup::u1();
  auto geom = ChainGeometry::uniform(-2, 4, 2, ChainGeometry::Boundary::Open);
  // trivial charges so that block rotations are unconstrained
  OnsiteRep rep = OnsiteRep::uniform(u1, {u1.charge({0}), u1.charge({0})}, 4);
  LoopSpec loop;
  loop.geom = geom;
  loop.rep = rep;
  loop.basepoint_levels = {0, 0, 0, 0};
  loop.tdi = TDI::zero();
  loop.policy.kind = ClosurePolicy::Kind::BulkWindow;

  std::vector<std::pair<int, int>> blocks{{-2, -1}, {0, 1}};
  ChainState base = loop.basepoint_state();
  QuasiLoopClosure exact = close_quasiloop(base, loop, blocks);
  for (double n : exact.generator_norms) CHECK(n < 1e-9);
  CHECK(exact.closure_fidelity >= 1.0 - 1e-10);

  // rotate each block away from the basepoint by a small angle
  Eigen::MatrixXcd rot = Eigen::MatrixXcd::Identity(4, 4);
  double ang = 0.3;
  rot(0, 0) = std::cos(ang);
  rot(1, 1) = std::cos(ang);
  rot(0, 1) = std::sin(ang);
  rot(1, 0) = -std::sin(ang);
  Eigen::VectorXcd w = apply_to_vector(Support({-2, -1}), rot, *geom, base.vector());
  w = apply_to_vector(Support({0, 1}), rot, *geom, w);
  ChainState endpoint(geom, w);
  QuasiLoopClosure closed = close_quasiloop(endpoint, loop, blocks);
  CHECK(closed.closure_fidelity >= 1.0 - 1e-8);
  for (size_t n = 0; n < closed.generator_norms.size(); ++n) {
    CHECK(closed.block_distances[n] > 0.1);
    CHECK(closed.generator_norms[n] <= 8.0 * closed.block_distances[n] + 1e-9);
  }
}

TEST_CASE("contract_product_loop applies the zero-dim bounds per block") {
  std::mt19937_64 rng(227);
  SymmetryGroup u1 = SymmetryGroup::u1();
  ZeroDimRep rep(u1, {u1.charge({1}), u1.charge({1}), u1.charge({0}), u1.charge({2})});
  int K = 512;
  std::vector<ZeroDimLoop> loops;
  std::vector<ZeroDimRep> reps;
  for (int b = 0; b < 2; ++b) {
    Eigen::VectorXcd omega = Eigen::VectorXcd::Zero(4), x = Eigen::VectorXcd::Zero(4);
    omega(0) = 1.0;
    x(1) = 1.0;  // same charge: the loop stays invariant
    ZeroDimLoop loop;
    loop.grid.resize(K + 1);
    loop.states.resize(K + 1);
    for (int k = 0; k <= K; ++k) {
      double s = static_cast<double>(k) / K;
      loop.grid[k] = s;
      loop.states[k] = std::cos(kPi * s) * omega + std::sin(kPi * s) * x;
    }
    loop.generator_norm = kPi;
    loops.push_back(loop);
    reps.push_back(rep);
  }
  BlockContractionReport rep_out = contract_product_loop(loops, reps);
  for (size_t n = 0; n < rep_out.block_e_norms.size(); ++n) {
    CHECK(rep_out.block_sup_e_lambda[n] <= 80.0 * rep_out.block_e_norms[n] * 1.1);
    CHECK(rep_out.block_sup_f_s[n] <= 208.0 * 1.1);
  }
  CHECK(rep_out.max_boundary_defect < 1e-9);
  (void)rng;
}

TEST_CASE("associated loop: trivial preparation keeps the loop and the index") {
  SymmetryGroup u1 = SymmetryGroup::u1();
  auto geom = ChainGeometry::uniform(-4, 6, 3, ChainGeometry::Boundary::Open);
  LoopSpec pump1 = example_pump(u1, u1.charge({1}), geom);
  pump1.policy.tol = 1e-8;
  LoopSpec nu = associated_loop(pump1, TDI::zero());
  nu.policy.kind = ClosurePolicy::Kind::BulkWindow;
  nu.policy.tol = 1e-8;
  IndexReport direct = pump_index(pump1);
  IndexReport assoc = pump_index(nu);
  CHECK(assoc.charge == direct.charge);

  // basepoint consistency is enforced
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(9, 9);
  g(1 * 3 + 2, 0) = 1.0;
  g(0, 1 * 3 + 2) = 1.0;
  Interaction kgen;
  kgen.add_term(Support({-1, 0}), g);
  TDI prep = TDI::constant(kgen);
  CHECK_THROWS(associated_loop(pump1, prep));
}
