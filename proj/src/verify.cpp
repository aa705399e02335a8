#include "pump/verify.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "pump/groundstate.hpp"
#include "pump/index.hpp"
#include "pump/splitting.hpp"

namespace pump {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
constexpr std::complex<double> kI(0.0, 1.0);
constexpr double kPi = std::numbers::pi;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

class RowBuilder {
 public:
  explicit RowBuilder(std::vector<VerifyRow>& rows) : rows_(rows) {}

  void check(const std::string& test, const std::string& expected, const std::string& measured,
             double tol, bool pass) {
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - tic_).count();
    rows_.push_back(VerifyRow{test, expected, measured, tol, pass, dt});
    tic_ = std::chrono::steady_clock::now();
  }
  void check_le(const std::string& test, double measured, double bound) {
    check(test, "<= " + fmt(bound), fmt(measured), bound, measured <= bound);
  }
  void check_ge(const std::string& test, double measured, double bound) {
    check(test, ">= " + fmt(bound), fmt(measured), bound, measured >= bound);
  }
  void check_charge(const std::string& test, const DualCharge& measured,
                    const DualCharge& expected) {
    check(test, expected.to_string(), measured.to_string(), 0.0, measured == expected);
  }

 private:
  std::vector<VerifyRow>& rows_;
  std::chrono::steady_clock::time_point tic_ = std::chrono::steady_clock::now();
};

MatrixXcd random_hermitian(std::mt19937_64& rng, long d, double scale) {
  std::normal_distribution<double> g;
  MatrixXcd a(d, d);
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < d; ++j) a(i, j) = std::complex<double>(g(rng), g(rng));
  MatrixXcd h = 0.5 * (a + a.adjoint());
  double n = h.operatorNorm();
  if (n > 0) h *= scale / n;
  return h;
}

VectorXcd random_unit(std::mt19937_64& rng, long d) {
  std::normal_distribution<double> g;
  VectorXcd v(d);
  for (long i = 0; i < d; ++i) v(i) = std::complex<double>(g(rng), g(rng));
  return v / v.norm();
}

// Even-aligned first site: the pump pairing then parks the truncated
// evolution's compensating charge exactly at the boundary sites.
int even_first_site(int num_sites) { return -((num_sites / 2 + 1) / 2 * 2); }

GeometryPtr pump_ring(int num_sites) {
  return ChainGeometry::uniform(even_first_site(num_sites), num_sites, 3,
                                ChainGeometry::Boundary::Ring);
}
GeometryPtr pump_open(int num_sites) {
  return ChainGeometry::uniform(even_first_site(num_sites), num_sites, 3,
                                ChainGeometry::Boundary::Open);
}

// ---------------------------------------------------------------- criterion 1
void suite_realization(RowBuilder& rb) {
  auto geom = pump_ring(8);
  SymmetryGroup u1 = SymmetryGroup::u1();
  for (long h = -2; h <= 2; ++h) {
    LoopSpec loop = example_pump(u1, u1.charge({h}), geom);
    IndexReport rep = pump_index(loop);
    rb.check_charge("realization/u1 h=" + std::to_string(h), rep.charge, u1.charge({h}));
    rb.check_le("realization/u1 h=" + std::to_string(h) + " residual",
                std::max(rep.phase_residual, rep.charge_residual), 1e-6);
  }
  SymmetryGroup z3 = SymmetryGroup::cyclic(3);
  for (long h = 0; h <= 2; ++h) {
    LoopSpec loop = example_pump(z3, z3.charge({h}), geom);
    IndexReport rep = pump_index(loop);
    rb.check_charge("realization/z3 h=" + std::to_string(h), rep.charge, z3.charge({h}));
    rb.check_le("realization/z3 h=" + std::to_string(h) + " residual", rep.phase_residual, 1e-6);
  }
}

// ---------------------------------------------------------------- criterion 2
void suite_constant(RowBuilder& rb) {
  SymmetryGroup u1 = SymmetryGroup::u1();
  auto geom = pump_ring(8);
  LoopSpec base = example_pump(u1, u1.charge({1}), geom);
  LoopSpec constant = constant_loop(geom, base.rep, base.basepoint_levels);
  IndexReport rep = pump_index(constant);
  rb.check_charge("constant/index", rep.charge, u1.zero_charge());
  rb.check_le("constant/residual", std::max(rep.phase_residual, rep.charge_residual), 1e-10);

  SymmetryGroup z3 = SymmetryGroup::cyclic(3);
  LoopSpec base3 = example_pump(z3, z3.charge({2}), geom);
  LoopSpec constant3 = constant_loop(geom, base3.rep, base3.basepoint_levels);
  IndexReport rep3 = pump_index(constant3);
  rb.check_charge("constant/z3 index", rep3.charge, z3.zero_charge());
  rb.check_le("constant/z3 residual", rep3.phase_residual, 1e-10);
}

// ---------------------------------------------------------------- criterion 3
void suite_additivity(RowBuilder& rb) {
  SymmetryGroup u1 = SymmetryGroup::u1();
  DualCharge unit = u1.charge({1});
  // Repeated pumps accumulate their charge within three sites of the cut,
  // and the truncated run of the second pump needs untouched pairs to act
  // on, so the concatenation check needs a 10-site chain with window 3.
  auto ring10 = pump_ring(10);
  for (int m1 = -1; m1 <= 1; ++m1) {
    for (int m2 = -1; m2 <= 1; ++m2) {
      LoopSpec p1 = example_pump_multiple(u1, unit, m1, ring10);
      LoopSpec p2 = example_pump_multiple(u1, unit, m2, ring10);
      IndexReport rep = pump_index(concat(p2, p1));
      rb.check_charge("additivity/concat " + std::to_string(m1) + "+" + std::to_string(m2),
                      rep.charge, u1.charge({m1 + m2}));
    }
  }
  auto ring4 = pump_ring(4);
  for (int m1 = -1; m1 <= 1; ++m1) {
    for (int m2 = -1; m2 <= 1; ++m2) {
      LoopSpec p1 = example_pump_multiple(u1, unit, m1, ring4);
      LoopSpec p2 = example_pump_multiple(u1, unit, m2, ring4);
      IndexReport rep = pump_index(stack(p1, p2));
      rb.check_charge("additivity/stack " + std::to_string(m1) + "+" + std::to_string(m2),
                      rep.charge, u1.charge({m1 + m2}));
    }
  }
}

// ---------------------------------------------------------------- criterion 4
void suite_time_reversal(RowBuilder& rb) {
  SymmetryGroup u1 = SymmetryGroup::u1();
  auto geom = pump_ring(8);
  for (long h : {1L, 2L}) {
    LoopSpec loop = time_reverse(example_pump(u1, u1.charge({h}), geom));
    IndexReport rep = pump_index(loop);
    rb.check_charge("time-reversal/h=" + std::to_string(h), rep.charge, u1.charge({-h}));
  }
}

// ---------------------------------------------------------------- criterion 5
void suite_stability(RowBuilder& rb) {
  SymmetryGroup u1 = SymmetryGroup::u1();
  auto geom = pump_open(8);
  LoopSpec loop = example_pump(u1, u1.charge({1}), geom);
  loop.policy.kind = ClosurePolicy::Kind::BulkWindow;
  loop.policy.tol = 1e-8;

  // symmetric dressing generator anchored at the cut: pair hop plus a
  // diagonal bias on (0,1)
  MatrixXcd g = MatrixXcd::Zero(9, 9);
  g(1 * 3 + 2, 0) = 1.0;
  g(0, 1 * 3 + 2) = 1.0;
  g(0, 0) = 0.5;
  g(2 * 3 + 1, 2 * 3 + 1) = -0.5;
  Interaction gen;
  gen.add_term(Support({0, 1}), g);

  std::vector<double> strengths{0.05, 0.1, 0.2, 0.4};
  SweepResult dres = stability_sweep(loop, DeformationFamily::Dress, strengths, gen);
  for (const auto& row : dres.rows) {
    rb.check_charge("stability/dress eps=" + fmt(row.strength), row.report.charge,
                    u1.charge({1}));
    rb.check_le("stability/dress eps=" + fmt(row.strength) + " residual",
                std::max(row.report.phase_residual, row.report.charge_residual), 0.05);
  }
  SweepResult reps = stability_sweep(loop, DeformationFamily::Reparametrize, strengths, gen);
  for (const auto& row : reps.rows) {
    rb.check_charge("stability/reparam eps=" + fmt(row.strength), row.report.charge,
                    u1.charge({1}));
    rb.check_le("stability/reparam eps=" + fmt(row.strength) + " residual",
                std::max(row.report.phase_residual, row.report.charge_residual), 0.05);
  }
}

// ---------------------------------------------------------------- criterion 6
void suite_zerodim(RowBuilder& rb, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim_dist(3, 8);
  double worst_transport_ratio = 0.0;  // sup||E|| / (8 ||nu - omega||)
  double worst_fidelity = 1.0;
  double worst_deriv_ratio = 0.0;
  int transport_cases = 25;
  for (int c = 0; c < transport_cases; ++c) {
    long d = dim_dist(rng);
    VectorXcd omega = random_unit(rng, d), psi = random_unit(rng, d);
    ZeroDimPath path = kato_transport(omega, psi, 1024);
    double a = std::abs(psi.dot(omega));
    double dist = std::sqrt(std::max(0.0, 1.0 - a * a));
    if (dist > 1e-8)
      worst_transport_ratio =
          std::max(worst_transport_ratio, path.sup_generator_norm / (8.0 * dist));
    worst_fidelity = std::min(worst_fidelity, path.endpoint_fidelity);
    // appendix derivative bounds |dy|, |d sqrt(1-y^2)| <= 2 sqrt(1-a)
    double bound = 2.0 * std::sqrt(std::max(1e-300, 1.0 - a));
    for (size_t k = 0; k < path.grid.size(); ++k) {
      double s = path.grid[k];
      double dy = 2.0 * (1.0 - a) * s;
      double w = a + (1.0 - a) * (1.0 - s * s);
      double dperp = 2.0 * w * std::sqrt(1.0 - a) / std::sqrt(1.0 + w);
      worst_deriv_ratio = std::max({worst_deriv_ratio, dy / bound, dperp / bound});
    }
  }
  rb.check_le("zerodim/transport sup||E|| vs 8||nu-omega||", worst_transport_ratio, 1.0);
  rb.check_ge("zerodim/transport endpoint fidelity", worst_fidelity, 1.0 - 1e-8);
  rb.check_le("zerodim/appendix derivative bounds", worst_deriv_ratio, 1.0 + 1e-12);

  // loop contraction: rotation-family loops with known generator norms
  double worst_e_ratio = 0.0, worst_f = 0.0, min_n = 1.0, worst_bdry = 0.0;
  int loop_cases = 25;
  for (int c = 0; c < loop_cases; ++c) {
    long d = dim_dist(rng);
    VectorXcd omega = random_unit(rng, d);
    VectorXcd x = random_unit(rng, d);
    x -= omega.dot(x) * omega;
    x /= x.norm();
    int winding = 1 + (c % 2);
    int K = 2048;
    std::vector<double> grid(K + 1);
    std::vector<MatrixXcd> gens(K + 1);
    std::vector<VectorXcd> states(K + 1);
    double e_norm = 0.0;
    for (int k = 0; k <= K; ++k) {
      double s = static_cast<double>(k) / K;
      grid[k] = s;
      // smooth profile theta(s) = pi * winding * (s - sin(2 pi s)/(2 pi) * r)
      double r = 0.5 * ((c * 37) % 10) / 10.0;
      double th = kPi * winding * (s - r * std::sin(2 * kPi * s) / (2 * kPi));
      double dth = kPi * winding * (1.0 - r * std::cos(2 * kPi * s));
      VectorXcd psi = std::cos(th) * omega + std::sin(th) * x;
      VectorXcd dpsi = dth * (-std::sin(th) * omega + std::cos(th) * x);
      states[k] = psi;
      gens[k] = kI * (dpsi * psi.adjoint() - psi * dpsi.adjoint());
      e_norm = std::max(e_norm, std::abs(dth));
    }
    ZeroDimLoop loop;
    loop.grid = grid;
    loop.states = states;
    loop.generator_norm = e_norm;
    LoopContraction con = contract_loop(loop);
    worst_e_ratio = std::max(worst_e_ratio, con.sup_e_lambda / (80.0 * e_norm));
    worst_f = std::max(worst_f, con.sup_f_s);
    min_n = std::min(min_n, con.min_normalizer);
    worst_bdry = std::max(worst_bdry, con.boundary_defect);
  }
  // the pure phase-winding loop
  {
    long d = 3;
    VectorXcd omega = random_unit(rng, d);
    int K = 2048;
    std::vector<double> grid(K + 1);
    std::vector<VectorXcd> states(K + 1);
    for (int k = 0; k <= K; ++k) {
      grid[k] = static_cast<double>(k) / K;
      states[k] = std::exp(2.0 * kPi * kI * grid[k]) * omega;
    }
    ZeroDimLoop loop;
    loop.grid = grid;
    loop.states = states;
    loop.generator_norm = 2.0 * kPi;
    LoopContraction con = contract_loop(loop);
    min_n = std::min(min_n, con.min_normalizer);
    worst_e_ratio = std::max(worst_e_ratio, con.sup_e_lambda / (80.0 * loop.generator_norm));
    worst_f = std::max(worst_f, con.sup_f_s);
  }
  rb.check_le("zerodim/contraction sup|||E_lambda||| vs 80|||E|||", worst_e_ratio, 1.1);
  rb.check_le("zerodim/contraction sup|||F_s|||", worst_f, 208.0 * 1.1);
  rb.check_ge("zerodim/contraction normalizer N", min_n, 0.25);
  rb.check_le("zerodim/contraction boundary defect", worst_bdry, 1e-9);
}

// ---------------------------------------------------------------- criterion 7
void suite_splitting(RowBuilder& rb) {
  SymmetryGroup u1 = SymmetryGroup::u1();
  DualCharge one = u1.charge({1});
  auto geom = pump_open(8);
  LoopSpec pump1 = example_pump(u1, one, geom);
  pump1.policy.tol = 1e-8;
  LoopSpec loop0 = concat(time_reverse(pump1), pump1);  // index 0

  auto [split, report] = split_single_edge(loop0, 0, 16);
  rb.check("splitting/zero-charge certificate", "ok", report.ok ? "ok" : "failed", 0,
           report.ok);
  rb.check_le("splitting/cut entropy after split", report.max_entropy_after, 1e-6);
  rb.check_le("splitting/closure (bulk)", report.closure_bulk_distance, 1e-6);
  double bound = 8.0 * std::max(report.left_distance, report.right_distance) + 1e-12;
  rb.check_le("splitting/transport norm vs 8 distance",
              std::max(report.left_generator_sup, report.right_generator_sup), bound);

  auto [split1, report1] = split_single_edge(pump1, 0, 4);
  rb.check("splitting/pump(1) certificate fails", "failed", report1.ok ? "ok" : "failed", 0,
           !report1.ok);
  rb.check_charge("splitting/pump(1) left half charge", report1.charge_left, one);
  rb.check_charge("splitting/pump(1) right half charge", report1.charge_right, -one);
}

// ---------------------------------------------------------------- criterion 8
void suite_gap(RowBuilder& rb, unsigned seed) {
  std::mt19937_64 rng(seed);
  SymmetryGroup u1 = SymmetryGroup::u1();
  FFunction f = FFunction::standard();
  for (int L : {4, 6, 8}) {
    auto geom = pump_open(L);
    OnsiteRep rep = example_pump_rep(u1, u1.charge({1}), L);
    std::vector<int> levels(L, 0);
    Interaction fint = onsite_gap_hamiltonian(*geom, levels);
    GapReport g0 = finite_gap(fint, *geom);
    rb.check("gap/F L=" + std::to_string(L), "1", fmt(g0.gap), 1e-10,
             std::abs(g0.gap - 1.0) <= 1e-10);
    double min_gap = 1e300;
    for (int c = 0; c < 20; ++c) {
      Interaction w;
      for (int i = geom->first_site(); i < geom->last_site(); ++i) {
        MatrixXcd m = random_hermitian(rng, 9, 1.0);
        std::vector<int> pos{geom->position(i), geom->position(i + 1)};
        w.add_term(Support({i, i + 1}), symmetrize_matrix(m, rep, pos));
      }
      double n = f_norm(w, f);
      w = w * (0.05 / n);
      GapReport g = finite_gap(fint + w, *geom);
      min_gap = std::min(min_gap, g.gap);
    }
    rb.check_ge("gap/F+W min gap L=" + std::to_string(L), min_gap, 0.5);
  }
}

// ---------------------------------------------------------------- criterion 9
void suite_spectral_flow(RowBuilder& rb, unsigned seed) {
  std::mt19937_64 rng(seed);
  // 6 three-level sites, dimension 729 <= 1024. Charges (0,1,2) keep the
  // on-site projector complement distinct from the charge operator, so
  // symmetric dressings genuinely move the Z family.
  auto geom = ChainGeometry::uniform(-3, 6, 3, ChainGeometry::Boundary::Open);
  SymmetryGroup u1 = SymmetryGroup::u1();
  OnsiteRep rep = OnsiteRep::uniform(
      u1, {u1.zero_charge(), u1.charge({1}), u1.charge({2})}, 6);
  std::vector<int> levels(6, 0);
  Interaction fint = onsite_gap_hamiltonian(*geom, levels);

  // small dressed trivial loop: H(s) = theta'(s) G with symmetric local G
  Interaction gen;
  for (int site : {-2, 1}) {
    MatrixXcd m = random_hermitian(rng, 9, 1.0);
    std::vector<int> pos{geom->position(site), geom->position(site + 1)};
    gen.add_term(Support({site, site + 1}), symmetrize_matrix(m, rep, pos));
  }
  const double eps = 0.05;
  const int pieces = 64;
  std::vector<TDI::Piece> sched;
  for (int k = 0; k < pieces; ++k) {
    double a = static_cast<double>(k) / pieces, b = static_cast<double>(k + 1) / pieces;
    auto theta = [&](double s) { return eps * std::sin(kPi * s) * std::sin(kPi * s); };
    double slope = (theta(b) - theta(a)) / (b - a);
    sched.push_back(TDI::Piece{a, b, gen * slope});
  }
  TDI loop_tdi(std::move(sched));

  // the family must genuinely move for the flow to be a nontrivial check
  Eigen::MatrixXcd f0 = fint.to_dense(*geom);
  double family_motion = 0.0;
  for (double s : {0.2, 0.4})
    family_motion =
        std::max(family_motion, (z_family(*geom, loop_tdi, fint, 0.0, s) - f0).operatorNorm());
  rb.check_ge("spectral-flow/family motion", family_motion, 1e-3);

  for (double lambda : {0.0, 0.5}) {
    auto family = [&](double s) { return z_family(*geom, loop_tdi, fint, lambda, s); };
    std::vector<double> grid(129);
    for (int k = 0; k < 129; ++k) grid[k] = static_cast<double>(k) / 128;
    SpectralFlowResult flow = spectral_flow_kato(family, grid, 0.1);
    rb.check_ge("spectral-flow/loop fidelity lambda=" + fmt(lambda), flow.loop_fidelity,
                1.0 - 1e-6);
    rb.check_ge("spectral-flow/min gap lambda=" + fmt(lambda), flow.min_gap, 0.5);
  }
}

// --------------------------------------------------------------- criterion 10
void suite_generators(RowBuilder& rb, unsigned seed) {
  std::mt19937_64 rng(seed);
  auto geom = ChainGeometry::uniform(0, 4, 2, ChainGeometry::Boundary::Open);
  auto random_tdi = [&](double scale) {
    std::vector<TDI::Piece> pieces;
    std::vector<double> cuts{0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
    for (int p = 0; p < 3; ++p) {
      Interaction h;
      for (int i = 0; i < 3; ++i)
        h.add_term(Support({i, i + 1}), random_hermitian(rng, 4, scale));
      pieces.push_back(TDI::Piece{cuts[p], cuts[p + 1], std::move(h)});
    }
    return TDI(std::move(pieces));
  };
  std::vector<double> samples{1.0 / 3.0, 2.0 / 3.0, 1.0};
  double worst_inv = 0.0, worst_rev = 0.0, worst_comp = 0.0, worst_diff = 0.0,
         worst_concat = 0.0;
  for (int c = 0; c < 20; ++c) {
    TDI h1 = random_tdi(0.5), h2 = random_tdi(0.5);
    TDI inv = inverse_tdi(*geom, h1);
    TDI rev = reverse_tdi(h1);
    TDI comp = compose_tdi(*geom, h1, h2, 1024);
    TDI diff = transported_difference_tdi(*geom, h1, h2, 1024);
    TDI conc = concatenate_tdi(h1, h2);
    MatrixXcd u1_full = propagator_dense(*geom, h1, 0.0, 1.0);
    for (double s : samples) {
      MatrixXcd u1 = propagator_dense(*geom, h1, 0.0, s);
      MatrixXcd u2 = propagator_dense(*geom, h2, 0.0, s);
      worst_inv = std::max(worst_inv,
                           (propagator_dense(*geom, inv, 0.0, s) - u1.adjoint()).operatorNorm());
      // time reversal: U_rev(s) = U(1-s) U(1)^dag
      MatrixXcd u_1ms = propagator_dense(*geom, h1, 0.0, 1.0 - s);
      worst_rev = std::max(worst_rev, (propagator_dense(*geom, rev, 0.0, s) -
                                       u_1ms * u1_full.adjoint())
                                          .operatorNorm());
      worst_comp = std::max(
          worst_comp, (propagator_dense(*geom, comp, 0.0, s) - u1 * u2).operatorNorm());
      worst_diff = std::max(worst_diff, (propagator_dense(*geom, diff, 0.0, s) -
                                         u1.adjoint() * u2)
                                            .operatorNorm());
    }
    // concatenation runs h1 first: the endpoint propagator is U_2(1) U_1(1)
    MatrixXcd u2_full = propagator_dense(*geom, h2, 0.0, 1.0);
    worst_concat = std::max(worst_concat, (propagator_dense(*geom, conc, 0.0, 1.0) -
                                           u2_full * u1_full)
                                              .operatorNorm());
  }
  rb.check_le("generators/inverse", worst_inv, 1e-8);
  rb.check_le("generators/time-reversal", worst_rev, 1e-8);
  rb.check_le("generators/composition", worst_comp, 1e-8);
  rb.check_le("generators/transported difference", worst_diff, 1e-8);
  rb.check_le("generators/concatenation endpoint", worst_concat, 1e-8);
}

// --------------------------------------------------------------- criterion 11
void suite_associated(RowBuilder& rb, unsigned seed) {
  std::mt19937_64 rng(seed);
  SymmetryGroup u1 = SymmetryGroup::u1();
  SymmetryGroup z3 = SymmetryGroup::cyclic(3);
  struct Case {
    SymmetryGroup group;
    long h;
  };
  std::vector<Case> cases{{u1, 1}, {u1, -1}, {u1, 2}, {u1, 0}, {z3, 2}};
  int idx = 0;
  for (const auto& c : cases) {
    ++idx;
    auto geom = pump_open(6);
    DualCharge h = c.group.charge({c.h});
    LoopSpec base = example_pump(c.group, h, geom);
    base.policy.tol = 1e-8;

    // symmetric preparation: a local rotation near the cut returning nothing
    // (K generates a genuinely entangling unitary at s=1)
    OnsiteRep rep = base.rep;
    MatrixXcd m = random_hermitian(rng, 9, 0.6 + 0.1 * idx);
    std::vector<int> pos{geom->position(-1), geom->position(0)};
    Interaction kgen;
    kgen.add_term(Support({-1, 0}), symmetrize_matrix(m, rep, pos));
    TDI prep = TDI::constant(kgen);

    // the conjugated loop with basepoint phi o alpha_K(1): terms conjugated
    // by the fixed local unitary U_K(1)
    MatrixXcd ukent;
    {
      Support hull = Support::interval(-1, 0);
      MatrixXcd kd = MatrixXcd::Zero(9, 9);
      for (const auto& t : kgen.terms()) kd += *t.matrix;
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es(kd);
      VectorXcd ph(9);
      for (int q = 0; q < 9; ++q) ph(q) = std::exp(-kI * es.eigenvalues()(q));
      ukent = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
    }
    LoopSpec psi = base;
    psi.preparation = prep;
    {
      std::vector<TDI::Piece> pieces;
      for (const auto& p : base.tdi.pieces()) {
        Interaction h_conj;
        for (const auto& t : p.interaction.terms()) {
          if (!t.support.overlaps(Support::interval(-1, 0))) {
            h_conj.add_term(t);
            continue;
          }
          Support hull = Support::hull(t.support, Support::interval(-1, 0));
          MatrixXcd uh = extend_to_support(Support::interval(-1, 0), ukent, hull, *geom);
          MatrixXcd tf = extend_to_support(t.support, *t.matrix, hull, *geom);
          h_conj.add_term(hull, MatrixXcd(uh * tf * uh.adjoint()));
        }
        pieces.push_back(TDI::Piece{p.t0, p.t1, std::move(h_conj)});
      }
      psi.tdi = TDI(std::move(pieces));
    }
    psi.policy.kind = ClosurePolicy::Kind::BulkWindow;
    psi.policy.tol = 1e-8;

    IndexReport direct = pump_index(psi);
    LoopSpec nu = associated_loop(psi, prep);
    nu.policy.kind = ClosurePolicy::Kind::BulkWindow;
    nu.policy.tol = 1e-8;
    IndexReport assoc = pump_index(nu);
    rb.check_charge("associated/case " + std::to_string(idx) + " index preserved", assoc.charge,
                    direct.charge);
    rb.check_charge("associated/case " + std::to_string(idx) + " equals h", assoc.charge, h);
  }
}

}  // namespace

std::vector<std::string> suite_names() {
  return {"realization", "constant",      "additivity", "time-reversal",
          "stability",   "zerodim",       "splitting",  "gap",
          "spectral-flow", "generators",  "associated", "core"};
}

VerifyResult run_suite(const std::string& name, unsigned seed) {
  VerifyResult result;
  result.suite = name;
  RowBuilder rb(result.rows);
  auto tic = std::chrono::steady_clock::now();
  auto run_one = [&](const std::string& n) {
    if (n == "realization") suite_realization(rb);
    else if (n == "constant") suite_constant(rb);
    else if (n == "additivity") suite_additivity(rb);
    else if (n == "time-reversal") suite_time_reversal(rb);
    else if (n == "stability") suite_stability(rb);
    else if (n == "zerodim") suite_zerodim(rb, seed);
    else if (n == "splitting") suite_splitting(rb);
    else if (n == "gap") suite_gap(rb, seed);
    else if (n == "spectral-flow") suite_spectral_flow(rb, seed);
    else if (n == "generators") suite_generators(rb, seed);
    else if (n == "associated") suite_associated(rb, seed);
    else throw std::invalid_argument("unknown suite: " + n);
  };
  if (name == "core") {
    for (const auto& n : suite_names())
      if (n != "core") run_one(n);
  } else {
    run_one(name);
  }
  for (const auto& row : result.rows) result.all_pass &= row.pass;
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - tic).count();
  return result;
}

std::string verify_csv(const VerifyResult& result) {
  std::ostringstream os;
  os << "test,expected,measured,tolerance,pass,seconds\n";
  for (const auto& r : result.rows) {
    os << '"' << r.test << "\"," << '"' << r.expected << "\"," << '"' << r.measured << "\","
       << r.tolerance << ',' << (r.pass ? "1" : "0") << ',' << r.seconds << "\n";
  }
  return os.str();
}

}  // namespace pump
