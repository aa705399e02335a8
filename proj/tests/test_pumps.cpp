#include <doctest.h>

#include <cmath>

#include "pump/pumps.hpp"

using namespace pump;

namespace {
GeometryPtr ring8() {
  return ChainGeometry::uniform(-4, 8, 3, ChainGeometry::Boundary::Ring);
}
GeometryPtr open8() {
  return ChainGeometry::uniform(-4, 8, 3, ChainGeometry::Boundary::Open);
}
}  // namespace

TEST_CASE("example pump closes on a ring; midpoint is the pair-rotated state") {
  SymmetryGroup u1 = SymmetryGroup::u1();
  LoopSpec loop = example_pump(u1, u1.charge({1}), ring8());

  ClosureReport rep = verify_loop(loop);
  CHECK(rep.pass);
  CHECK(rep.fidelity >= 1.0 - 1e-9);

  // at s = 1/2 every even pair carries |-h, h>, i.e. levels (1, 2)
  ChainState mid = loop.state_at(0.5);
  std::vector<int> levels{1, 2, 1, 2, 1, 2, 1, 2};
  ChainState expect = product_state(loop.geom, levels);
  CHECK(mid.fidelity(expect) >= 1.0 - 1e-9);
}

TEST_CASE("basepoint invariance for the pump constructors") {
  SymmetryGroup z3 = SymmetryGroup::cyclic(3);
  LoopSpec loop = example_pump(z3, z3.charge({2}), ring8());
  CHECK(basepoint_invariance_defect(loop) < 1e-12);
  for (const auto& p : loop.tdi.pieces())
    for (const auto& t : p.interaction.terms()) {
      std::vector<int> pos;
      for (int s : t.support.sites) pos.push_back(loop.geom->position(s));
      CHECK(is_invariant_matrix(*t.matrix, loop.rep, pos, 1e-11).invariant);
    }
}

TEST_CASE("open-chain pump fails ring closure but passes bulk closure") {
  SymmetryGroup u1 = SymmetryGroup::u1();
  LoopSpec loop = example_pump(u1, u1.charge({1}), open8());
  CHECK(loop.policy.kind == ClosurePolicy::Kind::BulkWindow);
  ClosureReport bulk = verify_loop(loop);
  CHECK(bulk.pass);
  CHECK(bulk.bulk_distance < 1e-9);
  // the same loop under the ring policy fails: charge parks at the ends
  LoopSpec strict = loop;
  strict.policy.kind = ClosurePolicy::Kind::RingExact;
  ClosureReport exact = verify_loop(strict);
  CHECK(!exact.pass);
  CHECK(exact.fidelity < 0.1);
}

TEST_CASE("constant loop closes exactly; concat with constant keeps states") {
  SymmetryGroup u1 = SymmetryGroup::u1();
  LoopSpec pump = example_pump(u1, u1.charge({1}), ring8());
  LoopSpec constant = constant_loop(pump.geom, pump.rep, pump.basepoint_levels);
  CHECK(verify_loop(constant).fidelity == 1.0);

  LoopSpec both = concat(pump, constant);  // runs constant first
  ClosureReport rep = verify_loop(both);
  CHECK(rep.pass);
  ChainState direct = pump.state_at(0.6);
  ChainState via = both.state_at(0.5 + 0.3);  // second half traverses the pump
  CHECK(via.fidelity(direct) >= 1.0 - 1e-9);
}

TEST_CASE("time reversal traverses the loop backwards") {
  SymmetryGroup u1 = SymmetryGroup::u1();
  LoopSpec pump = example_pump(u1, u1.charge({1}), ring8());
  LoopSpec rev = time_reverse(pump);
  ChainState a = rev.state_at(0.25);
  ChainState b = pump.state_at(0.75);
  CHECK(a.fidelity(b) >= 1.0 - 1e-9);
  CHECK(verify_loop(rev).pass);
}

TEST_CASE("stack interleaves two chains") {
  SymmetryGroup u1 = SymmetryGroup::u1();
  auto ring4 = ChainGeometry::uniform(-2, 4, 3, ChainGeometry::Boundary::Ring);
  LoopSpec p1 = example_pump(u1, u1.charge({1}), ring4);
  LoopSpec p2 = example_pump(u1, u1.charge({1}), ring4);
  LoopSpec stacked = stack(p1, p2);
  CHECK(stacked.geom->local_dim_pos(0) == 9);
  CHECK(verify_loop(stacked).pass);
  // merged charges include +-2 combinations
  bool has_two = false;
  for (const auto& c : stacked.rep.charges(0)) has_two |= (c == u1.charge({2}));
  CHECK(has_two);
}

TEST_CASE("reparametrized loop visits the same states") {
  SymmetryGroup u1 = SymmetryGroup::u1();
  LoopSpec pump = example_pump(u1, u1.charge({1}), ring8());
  LoopSpec rep = reparametrize(pump, {{0.0, 0.0}, {0.25, 0.0}, {1.0, 1.0}});
  CHECK(verify_loop(rep).pass);
  // j(0.25) = 0: still at the basepoint
  ChainState early = rep.state_at(0.25);
  CHECK(early.fidelity(pump.basepoint_state()) >= 1.0 - 1e-9);
  // j(s) = (s - 0.25)/0.75 afterwards
  ChainState mid = rep.state_at(0.25 + 0.75 * 0.5);
  CHECK(mid.fidelity(pump.state_at(0.5)) >= 1.0 - 1e-9);
}

TEST_CASE("dressing preserves closure exactly and deforms interior states") {
  SymmetryGroup u1 = SymmetryGroup::u1();
  LoopSpec pump = example_pump(u1, u1.charge({1}), open8());
  pump.policy.tol = 1e-8;

  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(9, 9);
  g(1 * 3 + 2, 0) = 1.0;
  g(0, 1 * 3 + 2) = 1.0;
  Interaction gen;
  gen.add_term(Support({0, 1}), g);

  LoopSpec dressed = dress(pump, gen, 0.3);
  ClosureReport rep = verify_loop(dressed);
  CHECK(rep.pass);

  // interior states differ from the undressed loop
  ChainState d = dressed.state_at(0.3);
  ChainState u = pump.state_at(0.3);
  CHECK(d.fidelity(u) < 1.0 - 1e-6);

  // zero-strength dressing is a no-op
  LoopSpec trivial = dress(pump, gen, 0.0);
  CHECK(trivial.state_at(0.3).fidelity(u) >= 1.0 - 1e-12);
}

TEST_CASE("materialized dressed schedule generates the dressed loop") {
  SymmetryGroup u1 = SymmetryGroup::u1();
  auto open4 = ChainGeometry::uniform(-2, 4, 3, ChainGeometry::Boundary::Open);
  LoopSpec pump = example_pump(u1, u1.charge({1}), open4);
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(9, 9);
  g(1 * 3 + 2, 0) = 1.0;
  g(0, 1 * 3 + 2) = 1.0;
  g(4, 4) = 0.7;
  Interaction gen;
  gen.add_term(Support({0, 1}), g);
  LoopSpec dressed = dress(pump, gen, 0.25);

  TDI mat = dressed.effective_tdi(256);
  for (double s : {0.3, 0.7, 1.0}) {
    ChainState exact = dressed.state_at(s);
    ChainState from_mat = evolve_state(dressed.basepoint_state(), mat, 0.0, s);
    CHECK(exact.fidelity(from_mat) >= 1.0 - 1e-6);
  }
}

TEST_CASE("open shadow of a ring loop drops exactly the wrap terms") {
  SymmetryGroup u1 = SymmetryGroup::u1();
  LoopSpec ring = example_pump(u1, u1.charge({1}), ring8());
  LoopSpec shadow = open_shadow(ring);
  CHECK(!shadow.geom->is_ring());
  int ring_terms = 0, shadow_terms = 0;
  for (const auto& p : ring.tdi.pieces()) ring_terms += p.interaction.num_terms();
  for (const auto& p : shadow.tdi.pieces()) shadow_terms += p.interaction.num_terms();
  CHECK(ring_terms - shadow_terms == 1);  // the odd wrap pair
  CHECK(verify_loop(shadow).pass);
}
