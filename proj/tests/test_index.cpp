#include <doctest.h>

#include <cmath>

#include "pump/index.hpp"

using namespace pump;

namespace {
GeometryPtr ring8() {
  return ChainGeometry::uniform(-4, 8, 3, ChainGeometry::Boundary::Ring);
}
GeometryPtr open8() {
  return ChainGeometry::uniform(-4, 8, 3, ChainGeometry::Boundary::Open);
}
}  // namespace

TEST_CASE("pumped state of the unit pump: charge parks next to the cut") {
  SymmetryGroup u1 = SymmetryGroup::u1();
  LoopSpec loop = example_pump(u1, u1.charge({1}), open8());
  ChainState pumped = pumped_state(loop);
  // |-h> at the left boundary, |+h> at site -1, |0> elsewhere
  std::vector<int> levels{1, 0, 0, 2, 0, 0, 0, 0};
  ChainState expect = product_state(loop.geom, levels);
  CHECK(pumped.fidelity(expect) >= 1.0 - 1e-9);

  // constant loop pumps nothing
  LoopSpec constant = constant_loop(loop.geom, loop.rep, loop.basepoint_levels);
  CHECK(pumped_state(constant).fidelity(constant.basepoint_state()) >= 1.0 - 1e-12);

  // rings are rejected; the shadow handles them
  LoopSpec ring = example_pump(u1, u1.charge({1}), ring8());
  CHECK_THROWS(pumped_state(ring));
}

TEST_CASE("windowed relative charge: phase and u1 methods agree") {
  SymmetryGroup u1 = SymmetryGroup::u1();
  LoopSpec loop = example_pump(u1, u1.charge({1}), open8());
  ChainState pumped = pumped_state(loop);
  ChainState base = loop.basepoint_state();
  WindowedCharge wc =
      windowed_relative_charge(pumped, base, loop.rep, 2, ChargeMethod::Both);
  CHECK(wc.charge == u1.charge({1}));
  CHECK(wc.phase_residual < 1e-8);
  CHECK(wc.charge_residual < 1e-8);
  CHECK(wc.min_unimodularity > 0.999);

  // identical states have zero charge
  WindowedCharge zero =
      windowed_relative_charge(base, base, loop.rep, 2, ChargeMethod::Both);
  CHECK(zero.charge.is_zero());
}

TEST_CASE("pump index on rings via the open shadow; all small charges") {
  SymmetryGroup u1 = SymmetryGroup::u1();
  for (long h : {-2L, -1L, 0L, 1L, 2L}) {
    LoopSpec loop = example_pump(u1, u1.charge({h}), ring8());
    IndexReport rep = pump_index(loop);
    CHECK(rep.charge == u1.charge({h}));
    CHECK(rep.phase_residual < 1e-6);
    CHECK(rep.closure_pass);
    CHECK(rep.total_charge_drift < 1e-8);
  }
  SymmetryGroup z3 = SymmetryGroup::cyclic(3);
  LoopSpec loop = example_pump(z3, z3.charge({2}), ring8());
  IndexReport rep = pump_index(loop);
  CHECK(rep.charge == z3.charge({2}));
}

TEST_CASE("cut-position invariance") {
  SymmetryGroup u1 = SymmetryGroup::u1();
  LoopSpec loop = example_pump(u1, u1.charge({1}), ring8());
  IndexSettings at0;
  IndexSettings at2;
  at2.cut = -2;  // move the cut by one even pair
  IndexReport r0 = pump_index(loop, at0);
  IndexReport r2 = pump_index(loop, at2);
  CHECK(r0.charge == r2.charge);
}

TEST_CASE("product group: both factors extracted componentwise") {
  SymmetryGroup prod =
      SymmetryGroup::product({SymmetryGroup::u1(), SymmetryGroup::cyclic(3)});
  DualCharge h = prod.charge({1, 2});
  LoopSpec loop = example_pump(prod, h, ring8());
  IndexReport rep = pump_index(loop);
  CHECK(rep.charge == h);
  CHECK(rep.method == "phase+u1-charge");
}

TEST_CASE("stability sweep keeps the index and flags the largest strength") {
  SymmetryGroup u1 = SymmetryGroup::u1();
  LoopSpec loop = example_pump(u1, u1.charge({1}), open8());
  loop.policy.tol = 1e-8;
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(9, 9);
  g(1 * 3 + 2, 0) = 1.0;
  g(0, 1 * 3 + 2) = 1.0;
  Interaction gen;
  gen.add_term(Support({0, 1}), g);
  SweepResult sweep =
      stability_sweep(loop, DeformationFamily::Dress, {0.1, 0.3}, gen);
  CHECK(sweep.largest_unchanged == 0.3);
  for (const auto& row : sweep.rows) {
    CHECK(row.report.charge == u1.charge({1}));
    CHECK(std::max(row.report.phase_residual, row.report.charge_residual) < 0.05);
  }
}

TEST_CASE("window defaults keep the compensating boundary charge out") {
  auto geom = open8();
  CHECK(default_window_halfwidth(*geom, 0) == 2);
  auto geom6 = ChainGeometry::uniform(-2, 6, 3, ChainGeometry::Boundary::Open);
  CHECK(default_window_halfwidth(*geom6, 0) == 1);
}
