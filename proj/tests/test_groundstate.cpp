#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>
#include <random>

#include "pump/groundstate.hpp"
#include "pump/pumps.hpp"

using namespace pump;

namespace {
constexpr double kPi = std::numbers::pi;

Eigen::MatrixXcd random_hermitian(std::mt19937_64& rng, long d, double scale) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(d, d);
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < d; ++j) a(i, j) = std::complex<double>(g(rng), g(rng));
  Eigen::MatrixXcd h = 0.5 * (a + a.adjoint());
  return h * (scale / h.operatorNorm());
}
}  // namespace

TEST_CASE("onsite gap hamiltonian: basepoint is the unique gapped ground state") {
  auto geom = ChainGeometry::uniform(0, 4, 3, ChainGeometry::Boundary::Open);
  std::vector<int> levels{0, 0, 0, 0};
  Interaction f = onsite_gap_hamiltonian(*geom, levels);

  // single site: diag(0, 1, 1) in the basepoint basis
  auto t = f.terms()[0];
  CHECK(std::abs((*t.matrix)(0, 0)) < 1e-15);
  CHECK(std::abs((*t.matrix)(1, 1) - 1.0) < 1e-15);

  GapReport rep = finite_gap(f, *geom);
  CHECK(std::abs(rep.e0) < 1e-12);
  CHECK(std::abs(rep.gap - 1.0) < 1e-12);
  CHECK(!rep.degenerate);

  ChainState base = product_state(geom, levels);
  CHECK(f.apply(*geom, base.vector()).norm() < 1e-13);
}

TEST_CASE("finite_gap via lanczos matches dense at moderate size") {
  std::mt19937_64 rng(401);
  auto geom = ChainGeometry::uniform(0, 6, 2, ChainGeometry::Boundary::Open);
  Interaction h = onsite_gap_hamiltonian(*geom, {0, 0, 0, 0, 0, 0});
  for (int i = 0; i < 5; ++i) h.add_term(Support({i, i + 1}), random_hermitian(rng, 4, 0.05));
  Eigen::MatrixXcd dense = h.to_dense(*geom);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense, Eigen::EigenvaluesOnly);

  auto matvec = [&](const Eigen::VectorXcd& x) { return h.apply(*geom, x); };
  GroundPair gp = lowest_eigenpair(matvec, geom->total_dim());
  CHECK(std::abs(gp.e0 - es.eigenvalues()(0)) < 1e-9);
  CHECK(std::abs(gp.e1 - es.eigenvalues()(1)) < 1e-8);
  CHECK(gp.residual < 1e-8);
}

TEST_CASE("degenerate spectrum reports a zero gap") {
  auto geom = ChainGeometry::uniform(0, 4, 2, ChainGeometry::Boundary::Open);
  Interaction f = onsite_gap_hamiltonian(*geom, {0, 0, 0, 0});
  GapReport rep = finite_gap(f + f * -1.0, *geom);
  CHECK(rep.degenerate);
  CHECK(std::abs(rep.gap) < 1e-12);
}

TEST_CASE("ground-state criterion and local variational principle") {
  std::mt19937_64 rng(409);
  auto geom = ChainGeometry::uniform(0, 5, 2, ChainGeometry::Boundary::Open);
  Interaction h = onsite_gap_hamiltonian(*geom, {0, 0, 0, 0, 0});
  for (int i = 0; i < 4; ++i) h.add_term(Support({i, i + 1}), random_hermitian(rng, 4, 0.04));
  Eigen::MatrixXcd dense = h.to_dense(*geom);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense);
  Eigen::VectorXcd gs = es.eigenvectors().col(0);

  // psi(A^* [H, A]) >= 0 for random local A
  for (int c = 0; c < 100; ++c) {
    int site = static_cast<int>(rng() % 4);
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(4, 4);
    std::normal_distribution<double> g;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) a(i, j) = std::complex<double>(g(rng), g(rng));
    Eigen::MatrixXcd af = embed_dense(Support({site, site + 1}), a, *geom);
    double val = std::real(gs.dot(af.adjoint() * (dense * af - af * dense) * gs));
    CHECK(val >= -1e-8);
  }

  // no product perturbation on a patch lowers the local energy
  double e_gs = std::real(gs.dot(dense * gs));
  for (int c = 0; c < 20; ++c) {
    Eigen::MatrixXcd rot = random_hermitian(rng, 2, 0.2);
    Eigen::MatrixXcd u = (std::complex<double>(0, -1) * rot).exp();
    Eigen::VectorXcd trial = apply_to_vector(Support({2}), u, *geom, gs);
    double e_trial = std::real(trial.dot(dense * trial));
    CHECK(e_trial >= e_gs - 1e-8);
  }
}

TEST_CASE("z family endpoints and smallness") {
  std::mt19937_64 rng(419);
  // charges (0,1,2): the on-site projector complement is not a function of
  // the charge, so symmetric dressings move the family
  auto geom = ChainGeometry::uniform(-2, 4, 3, ChainGeometry::Boundary::Open);
  SymmetryGroup u1 = SymmetryGroup::u1();
  OnsiteRep rep =
      OnsiteRep::uniform(u1, {u1.charge({0}), u1.charge({1}), u1.charge({2})}, 4);
  Interaction f = onsite_gap_hamiltonian(*geom, {0, 0, 0, 0});

  Interaction gen;
  std::vector<int> pos{0, 1};
  gen.add_term(Support({-2, -1}), symmetrize_matrix(random_hermitian(rng, 9, 1.0), rep, pos));
  const double eps = 0.05;
  const int pieces = 32;
  std::vector<TDI::Piece> sched;
  auto theta = [&](double s) { return eps * std::sin(kPi * s) * std::sin(kPi * s); };
  for (int k = 0; k < pieces; ++k) {
    double a = static_cast<double>(k) / pieces, b = static_cast<double>(k + 1) / pieces;
    sched.push_back(TDI::Piece{a, b, gen * ((theta(b) - theta(a)) / (b - a))});
  }
  TDI loop_tdi(std::move(sched));

  Eigen::MatrixXcd fd = f.to_dense(*geom);
  CHECK((z_family(*geom, loop_tdi, f, 1.0, 0.3) - fd).norm() < 1e-12);  // lambda = 1
  CHECK((z_family(*geom, loop_tdi, f, 0.0, 0.0) - fd).norm() < 1e-12);  // s = 0
  CHECK((z_family(*geom, loop_tdi, f, 0.0, 1.0) - fd).norm() < 1e-10);  // loop of interactions
  double sup = 0.0;
  for (double s : {0.1, 0.3, 0.5, 0.7, 0.9})
    sup = std::max(sup, (z_family(*geom, loop_tdi, f, 0.0, s) - fd).operatorNorm());
  CHECK(sup > 1e-4);      // the family genuinely moves
  CHECK(sup < 10 * eps);  // and stays O(eps) close to F
}

TEST_CASE("spectral flow: constant path is static; gap collapse is refused") {
  auto geom = ChainGeometry::uniform(0, 4, 2, ChainGeometry::Boundary::Open);
  Interaction f = onsite_gap_hamiltonian(*geom, {0, 0, 0, 0});
  Eigen::MatrixXcd fd = f.to_dense(*geom);
  std::vector<double> grid(17);
  for (int k = 0; k < 17; ++k) grid[k] = k / 16.0;

  SpectralFlowResult flow =
      spectral_flow_kato([&](double) { return fd; }, grid, 0.1);
  CHECK(flow.endpoint_fidelity >= 1.0 - 1e-10);
  CHECK(std::abs(flow.min_gap - 1.0) < 1e-8);

  // W scaled to -F collapses the gap: the flow refuses
  CHECK_THROWS(spectral_flow_kato(
      [&](double z) { return Eigen::MatrixXcd((1.0 - z) * fd); }, grid, 0.1));
}

TEST_CASE("spectral flow around a z-family loop returns the ground state") {
  std::mt19937_64 rng(431);
  auto geom = ChainGeometry::uniform(-2, 4, 3, ChainGeometry::Boundary::Open);
  SymmetryGroup u1 = SymmetryGroup::u1();
  OnsiteRep rep =
      OnsiteRep::uniform(u1, {u1.charge({0}), u1.charge({1}), u1.charge({2})}, 4);
  std::vector<int> levels(4, 0);
  Interaction f = onsite_gap_hamiltonian(*geom, levels);
  Interaction gen;
  std::vector<int> pos{0, 1};
  gen.add_term(Support({-1, 0}), symmetrize_matrix(random_hermitian(rng, 9, 1.0), rep, pos));
  const double eps = 0.05;
  const int pieces = 32;
  auto theta = [&](double s) { return eps * std::sin(kPi * s) * std::sin(kPi * s); };
  std::vector<TDI::Piece> sched;
  for (int k = 0; k < pieces; ++k) {
    double a = static_cast<double>(k) / pieces, b = static_cast<double>(k + 1) / pieces;
    sched.push_back(TDI::Piece{a, b, gen * ((theta(b) - theta(a)) / (b - a))});
  }
  TDI loop_tdi(std::move(sched));

  std::vector<double> grid(65);
  for (int k = 0; k < 65; ++k) grid[k] = k / 64.0;
  SpectralFlowResult flow = spectral_flow_kato(
      [&](double s) { return z_family(*geom, loop_tdi, f, 0.0, s); }, grid, 0.1);
  CHECK(flow.min_gap >= 0.5);
  CHECK(flow.loop_fidelity >= 1.0 - 1e-6);
}
