#include "pump/zerodim.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pump {

namespace {
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
constexpr std::complex<double> kI(0.0, 1.0);
constexpr double kTwoPi = 2.0 * std::numbers::pi;

MatrixXcd exp_hermitian(const MatrixXcd& h, double tau) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
  VectorXcd ph(h.rows());
  for (long k = 0; k < h.rows(); ++k) ph(k) = std::exp(-kI * tau * es.eigenvalues()(k));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}
}  // namespace

ZeroDimRep::ZeroDimRep(SymmetryGroup group, std::vector<DualCharge> level_charges)
    : group_(std::move(group)), levels_(std::move(level_charges)) {
  if (levels_.empty()) throw std::invalid_argument("ZeroDimRep: empty level list");
  for (const auto& h : levels_)
    if (!(h.group() == group_)) throw std::invalid_argument("ZeroDimRep: group mismatch");
}

ZeroDimRep ZeroDimRep::tensor(const std::vector<ZeroDimRep>& factors) {
  if (factors.empty()) throw std::invalid_argument("ZeroDimRep::tensor: no factors");
  const SymmetryGroup& g = factors.front().group();
  std::vector<DualCharge> levels{g.zero_charge()};
  for (const auto& f : factors) {
    if (!(f.group() == g)) throw std::invalid_argument("ZeroDimRep::tensor: group mismatch");
    std::vector<DualCharge> next;
    next.reserve(levels.size() * f.levels_.size());
    for (const auto& a : levels)
      for (const auto& b : f.levels_) next.push_back(a + b);
    levels = std::move(next);
  }
  return ZeroDimRep(g, std::move(levels));
}

VectorXcd ZeroDimRep::unitary_diagonal(const GroupElement& g) const {
  VectorXcd d(dim());
  for (long l = 0; l < dim(); ++l) d(l) = std::exp(-kI * levels_[l].pairing(g));
  return d;
}

VectorXd ZeroDimRep::charge_diagonal(int factor) const {
  VectorXd d(dim());
  for (long l = 0; l < dim(); ++l) d(l) = static_cast<double>(levels_[l].component(factor));
  return d;
}

double ZeroDimRep::eigenvector_defect(const VectorXcd& psi) const {
  double defect = 0.0;
  for (const auto& g : group_.cyclic_generators()) {
    VectorXcd up = unitary_diagonal(g).asDiagonal() * psi;
    std::complex<double> z = psi.dot(up);
    defect = std::max(defect, (up - z * psi).norm());
  }
  for (int f = 0; f < group_.num_factors(); ++f) {
    if (group_.factor(f).kind != GroupFactor::Kind::U1) continue;
    VectorXd q = charge_diagonal(f);
    VectorXcd qp = q.asDiagonal() * psi;
    std::complex<double> mean = psi.dot(qp);
    defect = std::max(defect, (qp - mean * psi).norm());
  }
  return defect;
}

double ZeroDimRep::invariance_defect(const MatrixXcd& a) const {
  double defect = 0.0;
  for (const auto& g : group_.cyclic_generators()) {
    MatrixXcd u = MatrixXcd(unitary_diagonal(g).asDiagonal());
    defect = std::max(defect, (u * a - a * u).operatorNorm());
  }
  for (int f = 0; f < group_.num_factors(); ++f) {
    if (group_.factor(f).kind != GroupFactor::Kind::U1) continue;
    MatrixXcd q = charge_diagonal(f).cast<std::complex<double>>().asDiagonal();
    defect = std::max(defect, (q * a - a * q).operatorNorm());
  }
  return defect;
}

RelativeChargeResult relative_charge(const VectorXcd& psi1, const VectorXcd& psi2,
                                     const ZeroDimRep& rep, double defect_tol,
                                     double rounding_tol) {
  if (psi1.size() != rep.dim() || psi2.size() != rep.dim())
    throw std::invalid_argument("relative_charge: dimension mismatch");
  RelativeChargeResult out;
  out.eigenvector_defect =
      std::max(rep.eigenvector_defect(psi1), rep.eigenvector_defect(psi2));
  if (out.eigenvector_defect > defect_tol)
    throw std::invalid_argument("relative_charge: input is not invariant (eigenvector defect " +
                                std::to_string(out.eigenvector_defect) + ")");
  const SymmetryGroup& group = rep.group();
  std::vector<long> comps(group.num_factors(), 0);
  double max_res = 0.0;
  for (int f = 0; f < group.num_factors(); ++f) {
    const auto& fac = group.factor(f);
    if (fac.kind == GroupFactor::Kind::Cyclic) {
      if (fac.order == 1) continue;
      std::vector<double> v(group.num_factors(), 0.0);
      v[f] = 1.0;
      GroupElement g = group.element(v);
      VectorXcd ud = rep.unitary_diagonal(g);
      std::complex<double> z1 = psi1.dot(ud.asDiagonal() * psi1);
      std::complex<double> z2 = psi2.dot(ud.asDiagonal() * psi2);
      // exp(-i h(g)) = z2/z1 with h(g) = 2 pi k / n
      double x = -std::arg(z2 / z1) * fac.order / kTwoPi;
      long k = std::lround(x);
      double res = std::abs(x - k);
      max_res = std::max(max_res, res);
      comps[f] = k;
    } else {
      // winding of theta -> z2(theta)/z1(theta), unwrapped over a grid
      const int T = 64;
      double acc = 0.0;
      std::complex<double> prev = 1.0;
      for (int t = 1; t <= T; ++t) {
        std::vector<double> v(group.num_factors(), 0.0);
        v[f] = kTwoPi * t / T;
        GroupElement g = group.element(v);
        VectorXcd ud = rep.unitary_diagonal(g);
        std::complex<double> z1 = psi1.dot(ud.asDiagonal() * psi1);
        std::complex<double> z2 = psi2.dot(ud.asDiagonal() * psi2);
        std::complex<double> w = z2 / z1;
        acc += std::arg(w * std::conj(prev));
        prev = w;
      }
      // exp(-i m theta) winds by -2 pi m over a full turn
      double x = -acc / kTwoPi;
      long m = std::lround(x);
      double res = std::abs(x - m);
      max_res = std::max(max_res, res);
      comps[f] = m;
    }
  }
  if (max_res > rounding_tol)
    throw std::runtime_error("relative_charge: ambiguous rounding (residual " +
                             std::to_string(max_res) + ")");
  out.charge = group.charge(comps);
  out.max_residual = max_res;
  return out;
}

Eigen::MatrixXcd kato_generator(const MatrixXcd& p, const MatrixXcd& pdot) {
  return kI * (pdot * p - p * pdot);
}

Eigen::VectorXcd ZeroDimPath::state(size_t k) const {
  if (trivial()) return omega;
  return w.at(k) * omega + c.at(k) * perp;
}

Eigen::MatrixXcd ZeroDimPath::generator(size_t k) const {
  long d = omega.size();
  if (trivial()) return MatrixXcd::Zero(d, d);
  VectorXcd phi = state(k);
  VectorXcd dphi = dw.at(k) * omega + dc.at(k) * perp;
  return kI * (dphi * phi.adjoint() - phi * dphi.adjoint());
}

double ZeroDimPath::plane_angle(double s) const {
  if (trivial()) return 0.0;
  size_t n = grid.size() - 1;
  double x = std::clamp(s, 0.0, 1.0) * n;
  size_t k = std::min(n - 1, static_cast<size_t>(x));
  double frac = x - k;
  auto angle_at = [&](size_t q) { return std::atan2(c[q], w[q]); };
  return (1.0 - frac) * angle_at(k) + frac * angle_at(k + 1);
}

Eigen::VectorXcd ZeroDimPath::apply(const Eigen::VectorXcd& v, double s, bool adjoint) const {
  if (trivial()) return v;
  double theta = plane_angle(s) * (adjoint ? -1.0 : 1.0);
  std::complex<double> alpha = omega.dot(v), beta = perp.dot(v);
  double cs = std::cos(theta), sn = std::sin(theta);
  std::complex<double> alpha2 = cs * alpha - sn * beta;
  std::complex<double> beta2 = sn * alpha + cs * beta;
  return v + (alpha2 - alpha) * omega + (beta2 - beta) * perp;
}

ZeroDimPath kato_transport(const VectorXcd& omega, const VectorXcd& psi, int grid_size) {
  if (omega.size() != psi.size()) throw std::invalid_argument("kato_transport: dimension mismatch");
  ZeroDimPath path;
  path.grid.resize(grid_size + 1);
  for (int k = 0; k <= grid_size; ++k) path.grid[k] = static_cast<double>(k) / grid_size;
  path.omega = omega;

  std::complex<double> overlap = psi.dot(omega);
  double a = std::min(1.0, std::abs(overlap));
  // rotate psi so that <psi~, omega> = a >= 0
  std::complex<double> phase = (a > 1e-15) ? overlap / std::abs(overlap) : 1.0;
  VectorXcd psit = phase * psi;

  if (1.0 - a < 1e-14) {
    path.sup_generator_norm = 0.0;
    path.endpoint_fidelity = std::abs(psi.dot(omega));
    return path;
  }
  path.perp = (psit - a * omega) / std::sqrt(1.0 - a * a);

  // w(s) = a + (1-a)(1-s^2) runs from 1 at s=0 down to a at s=1:
  // Phi(s) = w omega + s sqrt((1-a)(1+w)) perp is the appendix interpolation
  // traversed from omega towards psi. The s-cancellations in the derivative
  // are done analytically so nothing degenerates at s=0.
  path.w.resize(grid_size + 1);
  path.c.resize(grid_size + 1);
  path.dw.resize(grid_size + 1);
  path.dc.resize(grid_size + 1);
  for (int k = 0; k <= grid_size; ++k) {
    double s = path.grid[k];
    double w = a + (1.0 - a) * (1.0 - s * s);
    path.w[k] = w;
    path.c[k] = s * std::sqrt((1.0 - a) * (1.0 + w));
    path.dw[k] = -2.0 * (1.0 - a) * s;
    path.dc[k] = 2.0 * w * std::sqrt(1.0 - a) / std::sqrt(1.0 + w);
    path.sup_generator_norm = std::max(
        path.sup_generator_norm, std::hypot(path.dw[k], path.dc[k]));
  }
  path.endpoint_fidelity = std::abs(psit.dot(path.apply(omega, 1.0)));
  return path;
}

ZeroDimPath kato_transport_symmetric(const VectorXcd& omega, const VectorXcd& psi,
                                     const ZeroDimRep& rep, int grid_size) {
  RelativeChargeResult rc = relative_charge(omega, psi, rep);
  if (!rc.charge.is_zero())
    throw std::invalid_argument("kato_transport_symmetric: nonzero relative charge " +
                                rc.charge.to_string());
  ZeroDimPath path = kato_transport(omega, psi, grid_size);
  // the generator lives in span{omega, perp}; it is invariant when both
  // frame vectors are eigenvectors of the representation with equal phases
  double defect = rep.eigenvector_defect(path.omega);
  if (!path.trivial()) {
    defect = std::max(defect, rep.eigenvector_defect(path.perp));
    if (path.omega.size() <= 512) {
      for (size_t k : {size_t(0), path.grid.size() / 2, path.grid.size() - 1})
        defect = std::max(defect, rep.invariance_defect(path.generator(k)));
    }
  }
  if (defect > 1e-9)
    throw std::runtime_error("kato_transport_symmetric: generator invariance defect " +
                             std::to_string(defect));
  return path;
}

ZeroDimLoop loop_from_generator(const VectorXcd& omega,
                                const std::vector<MatrixXcd>& generator_samples,
                                const std::vector<double>& grid) {
  if (generator_samples.size() != grid.size())
    throw std::invalid_argument("loop_from_generator: grid/sample size mismatch");
  ZeroDimLoop loop;
  loop.grid = grid;
  loop.states.resize(grid.size());
  loop.states[0] = omega;
  for (size_t k = 0; k + 1 < grid.size(); ++k) {
    MatrixXcd emid = 0.5 * (generator_samples[k] + generator_samples[k + 1]);
    loop.states[k + 1] = exp_hermitian(emid, grid[k + 1] - grid[k]) * loop.states[k];
  }
  for (const auto& e : generator_samples)
    loop.generator_norm = std::max(loop.generator_norm, e.operatorNorm());
  return loop;
}

namespace {

// Phase fix: a Lipschitz U(1)-valued function theta with theta(0) = 0 such
// that k(s) = Re( exp(-i theta) <Psi~(s), Omega> ) stays >= -1/2. A greedy
// tracking controller with speed cap 4 |||E||| rotates only when the overlap
// drifts towards the bad half-plane.
std::vector<double> phase_fix(const std::vector<std::complex<double>>& z,
                              const std::vector<double>& grid, double e_norm) {
  double cap = std::max(4.0 * e_norm, 1e-9);
  std::vector<double> theta(z.size(), 0.0);
  for (size_t k = 1; k < z.size(); ++k) {
    double th = theta[k - 1];
    double ds = grid[k] - grid[k - 1];
    // Rotation is only ever needed while |z| > 1/2 (below that, k >= -1/2
    // holds automatically); track the phase of z at a capped rate and
    // freeze while the overlap passes near zero. The phase of z drifts at
    // most at rate |||E||| / |z| <= 2.5 |||E||| in the tracked region, so
    // the cap 4 |||E||| keeps up.
    if (std::abs(z[k]) > 0.4) {
      double delta = std::remainder(std::arg(z[k]) - th, kTwoPi);
      th += std::clamp(delta, -cap * ds, cap * ds);
    }
    theta[k] = th;
  }
  // hard requirement behind the construction
  for (size_t k = 0; k < z.size(); ++k) {
    double kk = (std::exp(-kI * theta[k]) * z[k]).real();
    if (kk < -0.5 + 1e-9)
      throw std::runtime_error("contract_loop: phase fix failed to keep k(s) >= -1/2 "
                               "(grid too coarse for this generator norm)");
  }
  return theta;
}

}  // namespace

LoopContraction contract_loop(const ZeroDimLoop& loop, const ZeroDimRep* rep,
                              int lambda_grid_size) {
  const auto& grid = loop.grid;
  int K = static_cast<int>(grid.size()) - 1;
  if (K < 8 || K % 2 != 0)
    throw std::invalid_argument("contract_loop: need an even grid of at least 8 intervals");
  long d = loop.states.front().size();
  const VectorXcd& omega = loop.states.front();
  if (std::abs(std::abs(loop.states.back().dot(omega)) - 1.0) > 1e-6)
    throw std::invalid_argument("contract_loop: input path is not a loop of states");

  // one phase fix on the full grid; the refinement check below only probes
  // the stability of the finite-difference derivatives
  std::vector<std::complex<double>> z_full(K + 1);
  for (int k = 0; k <= K; ++k) z_full[k] = loop.states[k].dot(omega);
  std::vector<double> theta_full = phase_fix(z_full, grid, loop.generator_norm);

  auto build = [&](int stride, LoopContraction& out) {
    int n = K / stride;
    std::vector<double> sgrid(n + 1);
    std::vector<double> theta(n + 1);
    for (int k = 0; k <= n; ++k) {
      sgrid[k] = grid[k * stride];
      theta[k] = theta_full[k * stride];
    }
    double lip = 0.0;
    for (int k = 0; k < n; ++k) {
      double chord = std::abs(std::exp(kI * theta[k + 1]) - std::exp(kI * theta[k]));
      lip = std::max(lip, chord / (sgrid[k + 1] - sgrid[k]));
    }
    out.phase_lipschitz = lip;

    int L = lambda_grid_size;
    out.s_grid = sgrid;
    out.lambda_grid.resize(L);
    for (int l = 0; l < L; ++l) out.lambda_grid[l] = static_cast<double>(l) / (L - 1);
    out.states.assign(L, std::vector<VectorXcd>(n + 1));
    out.min_normalizer = 1.0;
    for (int l = 0; l < L; ++l) {
      double lam = out.lambda_grid[l];
      for (int k = 0; k <= n; ++k) {
        VectorXcd psi = std::exp(kI * theta[k]) * loop.states[k * stride];
        double kk = std::real(psi.dot(omega));
        double nn = lam * lam + (1 - lam) * (1 - lam) + 2 * lam * (1 - lam) * kk;
        out.min_normalizer = std::min(out.min_normalizer, nn);
        out.states[l][k] = (lam * omega + (1 - lam) * psi) / std::sqrt(nn);
      }
    }
    // generator sups from projector finite differences
    auto projector = [&](int l, int k) {
      const VectorXcd& v = out.states[l][k];
      return MatrixXcd(v * v.adjoint());
    };
    out.sup_e_lambda = 0.0;
    out.sup_f_s = 0.0;
    out.max_invariance_defect = 0.0;
    for (int l = 0; l < L; ++l) {
      for (int k = 0; k <= n; ++k) {
        int ka = std::max(0, k - 1), kb = std::min(n, k + 1);
        MatrixXcd pdot = (projector(l, kb) - projector(l, ka)) / (sgrid[kb] - sgrid[ka]);
        MatrixXcd e = kato_generator(projector(l, k), pdot);
        out.sup_e_lambda = std::max(out.sup_e_lambda, e.operatorNorm());
        if (rep) out.max_invariance_defect =
                     std::max(out.max_invariance_defect, rep->invariance_defect(e));
        int la = std::max(0, l - 1), lb = std::min(L - 1, l + 1);
        MatrixXcd pdl = (projector(lb, k) - projector(la, k)) /
                        (out.lambda_grid[lb] - out.lambda_grid[la]);
        MatrixXcd f = kato_generator(projector(l, k), pdl);
        out.sup_f_s = std::max(out.sup_f_s, f.operatorNorm());
        if (rep) out.max_invariance_defect =
                     std::max(out.max_invariance_defect, rep->invariance_defect(f));
      }
    }
    // boundary conditions: Psi_lambda(0) = Omega, Psi_lambda(1) prop Omega,
    // Psi_1(s) = Omega
    double bdry = 0.0;
    for (int l = 0; l < L; ++l) {
      bdry = std::max(bdry, (out.states[l][0] - omega).norm());
      bdry = std::max(bdry, 1.0 - std::abs(out.states[l][n].dot(omega)));
    }
    for (int k = 0; k <= n; ++k)
      bdry = std::max(bdry, 1.0 - std::abs(out.states[L - 1][k].dot(omega)));
    out.boundary_defect = bdry;
  };

  LoopContraction fine, coarse;
  build(1, fine);
  build(2, coarse);
  // refinement stability of the finite-difference sups, with an absolute
  // floor so that zero-generator loops are not tripped by roundoff
  double ref = std::max({fine.sup_e_lambda, coarse.sup_e_lambda, 1e-6});
  if (std::abs(fine.sup_e_lambda - coarse.sup_e_lambda) > 0.05 * ref)
    throw std::runtime_error("contract_loop: grid too coarse (generator sup changed by >5%)");
  (void)d;
  return fine;
}

}  // namespace pump
