#include "pump/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace pump {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
constexpr std::complex<double> kI(0.0, 1.0);

// Lanczos approximation of exp(-i tau H) v for Hermitian H given as a matvec.
// Full reorthogonalization; the Krylov dimension is grown until the standard
// a-posteriori estimate drops below tol.
VectorXcd krylov_exp_action(const std::function<VectorXcd(const VectorXcd&)>& matvec,
                            const VectorXcd& v, double tau, double tol, int max_dim) {
  double beta0 = v.norm();
  if (beta0 == 0.0 || tau == 0.0) return v;
  long n = v.size();
  int m_cap = static_cast<int>(std::min<long>(max_dim, n));
  std::vector<VectorXcd> basis;
  basis.reserve(m_cap + 1);
  basis.push_back(v / beta0);
  std::vector<double> alpha, beta;  // tridiagonal coefficients
  VectorXcd result;
  double err_prev = std::numeric_limits<double>::infinity();
  for (int j = 0; j < m_cap; ++j) {
    VectorXcd w = matvec(basis[j]);
    double a = std::real(basis[j].dot(w));
    alpha.push_back(a);
    w -= a * basis[j];
    if (j > 0) w -= beta[j - 1] * basis[j - 1];
    // full reorthogonalization for numerical robustness
    for (const auto& q : basis) w -= q.dot(w) * q;
    double b = w.norm();
    int m = j + 1;
    bool happy = b < 1e-14 * std::max(1.0, std::abs(a));
    bool check = happy || m >= 6 || m == m_cap;
    if (check) {
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
      for (int k = 0; k < m; ++k) {
        t(k, k) = alpha[k];
        if (k + 1 < m) t(k, k + 1) = t(k + 1, k) = beta[k];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
      VectorXcd phases(m);
      for (int k = 0; k < m; ++k)
        phases(k) = std::exp(-kI * tau * es.eigenvalues()(k));
      VectorXcd small = es.eigenvectors().cast<std::complex<double>>() *
                        (phases.asDiagonal() *
                         es.eigenvectors().row(0).transpose().cast<std::complex<double>>());
      // error heuristic: weight of the last Krylov vector plus residual coupling
      double err = std::abs(small(m - 1)) * std::abs(b * tau);
      if (happy || err < tol || m == m_cap) {
        if (!happy && err > tol && m == m_cap && err > err_prev)
          throw std::runtime_error("krylov_exp_action: no convergence at max Krylov dimension");
        result = VectorXcd::Zero(n);
        for (int k = 0; k < m; ++k) result += small(k) * basis[k];
        result *= beta0;
        return result;
      }
      err_prev = err;
    }
    if (b < 1e-14 * std::max(1.0, std::abs(a))) break;
    beta.push_back(b);
    basis.push_back(w / b);
  }
  // happy breakdown with tiny residual: recompute on the final basis
  int m = static_cast<int>(alpha.size());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (int k = 0; k < m; ++k) {
    t(k, k) = alpha[k];
    if (k + 1 < m) t(k, k + 1) = t(k + 1, k) = beta[k];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  VectorXcd phases(m);
  for (int k = 0; k < m; ++k) phases(k) = std::exp(-kI * tau * es.eigenvalues()(k));
  VectorXcd small = es.eigenvectors().cast<std::complex<double>>() *
                    (phases.asDiagonal() *
                     es.eigenvectors().row(0).transpose().cast<std::complex<double>>());
  VectorXcd result2 = VectorXcd::Zero(n);
  for (int k = 0; k < m; ++k) result2 += small(k) * basis[k];
  return beta0 * result2;
}

VectorXcd rk4_step(const std::function<VectorXcd(const VectorXcd&)>& matvec, const VectorXcd& v,
                   double tau) {
  VectorXcd k1 = -kI * matvec(v);
  VectorXcd k2 = -kI * matvec(v + 0.5 * tau * k1);
  VectorXcd k3 = -kI * matvec(v + 0.5 * tau * k2);
  VectorXcd k4 = -kI * matvec(v + tau * k3);
  return v + (tau / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// One constant-interaction piece applied to a vector. sign=+1 evolves
// forward (exp(-iH tau)), sign=-1 applies the adjoint.
VectorXcd evolve_piece(const Interaction& h, const ChainGeometry& geom, VectorXcd v, double tau,
                       double sign, const EvolveOptions& opts) {
  if (h.empty() || tau == 0.0) return v;
  Integrator integ = opts.integrator;
  if (integ == Integrator::Auto)
    integ = geom.total_dim() <= opts.dense_threshold ? Integrator::DensePiecewise
                                                     : Integrator::Krylov;
  if (integ == Integrator::DensePiecewise && geom.total_dim() > (1 << 13))
    integ = Integrator::Krylov;

  if (integ == Integrator::DensePiecewise) {
    MatrixXcd hm = h.to_dense(geom);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hm);
    VectorXcd phases(hm.rows());
    for (long k = 0; k < hm.rows(); ++k)
      phases(k) = std::exp(-kI * sign * tau * es.eigenvalues()(k));
    return es.eigenvectors() * (phases.asDiagonal() * (es.eigenvectors().adjoint() * v));
  }

  auto matvec = [&](const VectorXcd& x) { return VectorXcd(sign * h.apply(geom, x)); };
  double norm_bound = h.total_norm_bound();
  if (integ == Integrator::Krylov) {
    // substep so that ||H|| * dt stays moderate; Krylov handles the rest.
    // On non-convergence the whole piece is retried with twice the steps.
    int steps = std::max<int>(1, static_cast<int>(std::ceil(tau / opts.max_step)));
    steps = std::max<int>(steps, static_cast<int>(std::ceil(norm_bound * tau / 10.0)));
    VectorXcd start = v;
    for (int attempt = 0; attempt < 8; ++attempt, steps *= 2) {
      try {
        v = start;
        double dt = tau / steps;
        for (int k = 0; k < steps; ++k) {
          v = krylov_exp_action(matvec, v, dt, opts.unitarity_tol * 0.1, opts.krylov_max_dim);
          double defect = std::abs(v.norm() - 1.0);
          if (defect > opts.unitarity_tol)
            throw std::runtime_error("krylov substep: unitarity defect above tolerance");
        }
        return v;
      } catch (const std::runtime_error&) {
        if (attempt == 7) throw;
      }
    }
    return v;
  }
  // RK4 fallback; step control from the norm bound
  int steps = std::max<int>(32, static_cast<int>(std::ceil(norm_bound * tau * 64)));
  steps = std::max<int>(steps, static_cast<int>(std::ceil(tau / opts.max_step)));
  double dt = tau / steps;
  for (int k = 0; k < steps; ++k) v = rk4_step(matvec, v, dt);
  double defect = std::abs(v.norm() - 1.0);
  if (defect > std::max(opts.unitarity_tol, 1e-8))
    throw std::runtime_error("evolve_state(rk4): unitarity defect above tolerance");
  return v;
}

struct PieceWindow {
  const TDI::Piece* piece;
  double a, b;  // intersection with the requested window
};

std::vector<PieceWindow> clip_pieces(const TDI& h, double u, double s) {
  if (u > s) throw std::invalid_argument("evolution: need u <= s");
  std::vector<PieceWindow> out;
  for (const auto& p : h.pieces()) {
    double a = std::max(u, p.t0), b = std::min(s, p.t1);
    if (b > a + 1e-15) out.push_back({&p, a, b});
  }
  return out;
}

}  // namespace

ChainState evolve_state(const ChainState& psi, const TDI& h, double u, double s,
                        const EvolveOptions& opts) {
  VectorXcd v = psi.vector();
  for (const auto& w : clip_pieces(h, u, s))
    v = evolve_piece(w.piece->interaction, psi.geometry(), std::move(v), w.b - w.a, +1.0, opts);
  v /= v.norm();
  return ChainState(psi.geometry_ptr(), std::move(v));
}

ChainState evolve_state_adjoint(const ChainState& psi, const TDI& h, double u, double s,
                                const EvolveOptions& opts) {
  VectorXcd v = psi.vector();
  auto windows = clip_pieces(h, u, s);
  for (auto it = windows.rbegin(); it != windows.rend(); ++it)
    v = evolve_piece(it->piece->interaction, psi.geometry(), std::move(v), it->b - it->a, -1.0,
                     opts);
  v /= v.norm();
  return ChainState(psi.geometry_ptr(), std::move(v));
}

Eigen::MatrixXcd propagator_dense(const ChainGeometry& geom, const TDI& h, double u, double s,
                                  long max_dim) {
  if (geom.total_dim() > max_dim)
    throw std::invalid_argument("propagator_dense: dimension exceeds cap");
  long d = geom.total_dim();
  MatrixXcd utot = MatrixXcd::Identity(d, d);
  for (const auto& w : clip_pieces(h, u, s)) {
    if (w.piece->interaction.empty()) continue;
    MatrixXcd hm = w.piece->interaction.to_dense(geom, max_dim);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hm);
    VectorXcd phases(d);
    for (long k = 0; k < d; ++k) phases(k) = std::exp(-kI * (w.b - w.a) * es.eigenvalues()(k));
    utot = es.eigenvectors() * (phases.asDiagonal() * (es.eigenvectors().adjoint() * utot));
  }
  return utot;
}

Eigen::MatrixXcd evolve_operator_dense(const ChainGeometry& geom, const TDI& h,
                                       const EmbeddedOperator& a, double s, long max_dim) {
  MatrixXcd u = propagator_dense(geom, h, 0.0, s, max_dim);
  MatrixXcd afull = embed_dense(a.support(), a.matrix(), geom, max_dim);
  return u.adjoint() * afull * u;
}

Cocycle::Cocycle(GeometryPtr geom, TDI h, double u, double s, EvolveOptions opts)
    : geom_(std::move(geom)), h_(std::move(h)), u_(u), s_(s), opts_(opts) {
  if (u_ > s_) throw std::invalid_argument("Cocycle: need u <= s");
}

ChainState Cocycle::apply(const ChainState& psi) const {
  return evolve_state(psi, h_, u_, s_, opts_);
}

ChainState Cocycle::apply_adjoint(const ChainState& psi) const {
  return evolve_state_adjoint(psi, h_, u_, s_, opts_);
}

Eigen::MatrixXcd Cocycle::dense(long max_dim) const {
  return propagator_dense(*geom_, h_, u_, s_, max_dim);
}

TDI reverse_tdi(const TDI& h) { return h.reversed(); }

TDI inverse_tdi(const ChainGeometry& geom, const TDI& h, long max_dim) {
  long d = geom.total_dim();
  if (d > max_dim) throw std::invalid_argument("inverse_tdi: dimension exceeds cap");
  Support full = Support::interval(geom.first_site(), geom.last_site());
  MatrixXcd u = MatrixXcd::Identity(d, d);
  std::vector<TDI::Piece> pieces;
  for (const auto& p : h.pieces()) {
    Interaction inv;
    if (!p.interaction.empty()) {
      // alpha_H(s)[H_k] is constant within a constant piece: exp(-iH_k t)
      // commutes with H_k, so conjugating by U at the piece start is exact.
      for (const auto& t : p.interaction.terms()) {
        MatrixXcd tf = embed_dense(t.support, *t.matrix, geom, max_dim);
        inv.add_term(full, MatrixXcd(-(u.adjoint() * tf * u)));
      }
      MatrixXcd hm = p.interaction.to_dense(geom, max_dim);
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hm);
      VectorXcd phases(d);
      for (long k = 0; k < d; ++k)
        phases(k) = std::exp(-kI * (p.t1 - p.t0) * es.eigenvalues()(k));
      u = es.eigenvectors() * (phases.asDiagonal() * (es.eigenvectors().adjoint() * u));
    }
    pieces.push_back(TDI::Piece{p.t0, p.t1, inv.compacted()});
  }
  return TDI(std::move(pieces));
}

namespace {
// Shared driver for midpoint-sampled materializations that conjugate terms
// of one schedule by the running propagator of another.
TDI midpoint_materialize(const ChainGeometry& geom, const TDI& h_drive, const TDI& h_other,
                         int substeps, long max_dim,
                         const std::function<Interaction(const Interaction& drive,
                                                         const Interaction& other,
                                                         const MatrixXcd& u_mid)>& make_piece) {
  long d = geom.total_dim();
  if (d > max_dim) throw std::invalid_argument("tdi materialization: dimension exceeds cap");
  auto grid = TDI::merged_grid(h_drive, h_other);
  std::vector<TDI::Piece> pieces;
  MatrixXcd u = MatrixXcd::Identity(d, d);
  for (size_t g = 0; g + 1 < grid.size(); ++g) {
    double ta = grid[g], tb = grid[g + 1];
    double tm_probe = 0.5 * (ta + tb);
    const Interaction& drive = h_drive.at_time(tm_probe);
    const Interaction& other = h_other.at_time(tm_probe);
    int n = std::max(1, static_cast<int>(std::ceil((tb - ta) * substeps)));
    // eigendecomposition once per refined piece; midpoint propagator per substep
    MatrixXcd evecs;
    VectorXd evals;
    if (!drive.empty()) {
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es(drive.to_dense(geom, max_dim));
      evecs = es.eigenvectors();
      evals = es.eigenvalues();
    }
    for (int k = 0; k < n; ++k) {
      double a = ta + (tb - ta) * k / n;
      double b = ta + (tb - ta) * (k + 1) / n;
      MatrixXcd u_mid = u;
      if (!drive.empty()) {
        VectorXcd ph(d);
        for (long q = 0; q < d; ++q)
          ph(q) = std::exp(-kI * (0.5 * (a + b) - ta) * evals(q));
        u_mid = evecs * (ph.asDiagonal() * (evecs.adjoint() * u));
      }
      pieces.push_back(TDI::Piece{a, b, make_piece(drive, other, u_mid)});
    }
    if (!drive.empty()) {
      VectorXcd ph(d);
      for (long q = 0; q < d; ++q) ph(q) = std::exp(-kI * (tb - ta) * evals(q));
      u = evecs * (ph.asDiagonal() * (evecs.adjoint() * u));
    }
  }
  return TDI(std::move(pieces));
}
}  // namespace

TDI compose_tdi(const ChainGeometry& geom, const TDI& h1, const TDI& h2, int substeps,
                long max_dim) {
  Support full = Support::interval(geom.first_site(), geom.last_site());
  return midpoint_materialize(
      geom, h1, h2, substeps, max_dim,
      [&](const Interaction& drive, const Interaction& other, const MatrixXcd& u_mid) {
        Interaction out = drive;
        for (const auto& t : other.terms()) {
          MatrixXcd tf = embed_dense(t.support, *t.matrix, geom, max_dim);
          // alpha_{H1}^{-1}(s)[X] = U X U^dag
          out.add_term(full, MatrixXcd(u_mid * tf * u_mid.adjoint()));
        }
        return out;
      });
}

TDI transported_difference_tdi(const ChainGeometry& geom, const TDI& h1, const TDI& h2,
                               int substeps, long max_dim) {
  Support full = Support::interval(geom.first_site(), geom.last_site());
  return midpoint_materialize(
      geom, h1, h2, substeps, max_dim,
      [&](const Interaction& drive, const Interaction& other, const MatrixXcd& u_mid) {
        Interaction diff = other + drive * -1.0;
        Interaction out;
        for (const auto& t : diff.terms()) {
          MatrixXcd tf = embed_dense(t.support, *t.matrix, geom, max_dim);
          // alpha_{H1}(s)[X] = U^dag X U
          out.add_term(full, MatrixXcd(u_mid.adjoint() * tf * u_mid));
        }
        return out.compacted();
      });
}

TDI concatenate_tdi(const TDI& h1, const TDI& h2) {
  std::vector<TDI::Piece> pieces;
  for (const auto& p : h1.pieces())
    pieces.push_back(TDI::Piece{0.5 * p.t0, 0.5 * p.t1, p.interaction * 2.0});
  for (const auto& p : h2.pieces())
    pieces.push_back(TDI::Piece{0.5 + 0.5 * p.t0, 0.5 + 0.5 * p.t1, p.interaction * 2.0});
  return TDI(std::move(pieces));
}

TDI reparametrize_tdi(const TDI& h, const std::vector<std::pair<double, double>>& knots) {
  if (knots.size() < 2) throw std::invalid_argument("reparametrize: need at least two knots");
  if (std::abs(knots.front().first) > 1e-12 || std::abs(knots.front().second) > 1e-12 ||
      std::abs(knots.back().first - 1.0) > 1e-12 || std::abs(knots.back().second - 1.0) > 1e-12)
    throw std::invalid_argument("reparametrize: j must map [0,1] onto [0,1] with j(0)=0, j(1)=1");
  std::vector<TDI::Piece> pieces;
  for (size_t k = 0; k + 1 < knots.size(); ++k) {
    auto [s0, j0] = knots[k];
    auto [s1, j1] = knots[k + 1];
    if (s1 <= s0 + 1e-15) throw std::invalid_argument("reparametrize: knot times must increase");
    double slope = (j1 - j0) / (s1 - s0);
    if (std::abs(slope) < 1e-15) {
      pieces.push_back(TDI::Piece{s0, s1, Interaction::zero()});
      continue;
    }
    // pull back the schedule breakpoints through the linear segment
    std::vector<double> cuts{s0};
    for (const auto& p : h.pieces()) {
      for (double t : {p.t0, p.t1}) {
        double lo = std::min(j0, j1), hi = std::max(j0, j1);
        if (t <= lo + 1e-15 || t >= hi - 1e-15) continue;
        double su = s0 + (t - j0) / slope;
        if (su > s0 + 1e-14 && su < s1 - 1e-14) cuts.push_back(su);
      }
    }
    cuts.push_back(s1);
    std::sort(cuts.begin(), cuts.end());
    for (size_t q = 0; q + 1 < cuts.size(); ++q) {
      if (cuts[q + 1] - cuts[q] < 1e-14) continue;
      double sm = 0.5 * (cuts[q] + cuts[q + 1]);
      double jm = j0 + slope * (sm - s0);
      pieces.push_back(TDI::Piece{cuts[q], cuts[q + 1], h.at_time(jm) * slope});
    }
  }
  return TDI(std::move(pieces));
}

namespace {
// Partial trace of a matrix over the marked positions of its index group,
// normalized by the traced dimension.
MatrixXcd partial_trace_normalized(const MatrixXcd& a, const std::vector<int>& dims,
                                   const std::vector<char>& trace_out) {
  long keep_dim = 1, out_dim = 1;
  for (size_t i = 0; i < dims.size(); ++i)
    (trace_out[i] ? out_dim : keep_dim) *= dims[i];
  std::vector<long> keep_stride(dims.size(), 0), out_stride(dims.size(), 0);
  long ks = keep_dim, os = out_dim;
  std::vector<long> full_stride(dims.size(), 1);
  for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i)
    full_stride[i] = full_stride[i + 1] * dims[i + 1];
  for (size_t i = 0; i < dims.size(); ++i) {
    if (trace_out[i]) {
      os /= dims[i];
      out_stride[i] = os;
    } else {
      ks /= dims[i];
      keep_stride[i] = ks;
    }
  }
  // flat offsets
  std::vector<long> keep_off(keep_dim, 0), out_off(out_dim, 0);
  for (size_t i = 0; i < dims.size(); ++i) {
    if (trace_out[i]) {
      for (long r = 0; r < out_dim; ++r)
        out_off[r] += ((r / out_stride[i]) % dims[i]) * full_stride[i];
    } else {
      for (long m = 0; m < keep_dim; ++m)
        keep_off[m] += ((m / keep_stride[i]) % dims[i]) * full_stride[i];
    }
  }
  MatrixXcd out = MatrixXcd::Zero(keep_dim, keep_dim);
  for (long r = 0; r < out_dim; ++r)
    for (long i = 0; i < keep_dim; ++i)
      for (long j = 0; j < keep_dim; ++j)
        out(i, j) += a(out_off[r] + keep_off[i], out_off[r] + keep_off[j]);
  return out / static_cast<double>(out_dim);
}
}  // namespace

EmbeddedOperator conditional_expectation(const EmbeddedOperator& a, const Support& x,
                                         const ChainGeometry& geom) {
  x.validate(geom);
  // intersection of the supports
  std::vector<int> dims;
  std::vector<char> trace_out;
  bool any_kept = false;
  for (int s : a.support().sites) {
    dims.push_back(geom.local_dim_at(s));
    bool keep = x.contains(s);
    trace_out.push_back(keep ? 0 : 1);
    any_kept |= keep;
  }
  if (!any_kept) {
    long xdim = 1;
    for (int s : x.sites) xdim *= geom.local_dim_at(s);
    double tr = std::real(a.matrix().trace()) / a.matrix().rows();
    return EmbeddedOperator(x, MatrixXcd(tr * MatrixXcd::Identity(xdim, xdim)));
  }
  MatrixXcd kept = partial_trace_normalized(a.matrix(), dims, trace_out);
  // extend with identity onto all of X
  std::vector<int> kept_sites;
  for (int s : a.support().sites)
    if (x.contains(s)) kept_sites.push_back(s);
  MatrixXcd out = extend_to_support(Support(kept_sites), kept, x, geom);
  return EmbeddedOperator(x, std::move(out));
}

LocalityProfile locality_profile(const EmbeddedOperator& a, int center_site,
                                 const ChainGeometry& geom) {
  LocalityProfile prof;
  int lo = a.support().min_label(), hi = a.support().max_label();
  if (center_site < lo || center_site > hi)
    throw std::invalid_argument("locality_profile: center must lie in the support hull");
  int kmax = std::max(center_site - lo, hi - center_site);
  auto clipped_ball = [&](int k) {
    return Support::interval(std::max(lo, center_site - k), std::min(hi, center_site + k));
  };
  Support hull = Support::interval(lo, hi);
  MatrixXcd a_hull = extend_to_support(a.support(), a.matrix(), hull, geom);
  MatrixXcd prev;  // tau onto the previous ball, extended to the hull
  MatrixXcd acc = MatrixXcd::Zero(a_hull.rows(), a_hull.cols());
  for (int k = 0; k <= kmax; ++k) {
    Support ball = clipped_ball(k);
    EmbeddedOperator ek = conditional_expectation(EmbeddedOperator(hull, a_hull), ball, geom);
    MatrixXcd ek_hull = extend_to_support(ball, ek.matrix(), hull, geom);
    MatrixXcd diff_hull = (k == 0) ? ek_hull : MatrixXcd(ek_hull - prev);
    prof.weights.push_back(diff_hull.operatorNorm());
    // the difference of nested conditional expectations is supported on the
    // larger ball; restrict it back down for the component list
    EmbeddedOperator comp =
        conditional_expectation(EmbeddedOperator(hull, diff_hull), ball, geom);
    prof.components.push_back(std::move(comp));
    acc += diff_hull;
    prev = ek_hull;
  }
  prof.reconstruction_error = (acc - a_hull).operatorNorm();
  return prof;
}

Interaction localize_operator(const Eigen::MatrixXcd& m, const ChainGeometry& geom,
                              double drop_below) {
  long d = geom.total_dim();
  if (m.rows() != d) throw std::invalid_argument("localize_operator: dimension mismatch");
  int first = geom.first_site(), last = geom.last_site();
  Support full = Support::interval(first, last);
  EmbeddedOperator whole(full, m);
  // M_{[a,b]} = (E_{[a,b]} - E_{[a+1,b]} - E_{[a,b-1]} + E_{[a+1,b-1]})[M]:
  // nested conditional expectations commute, so the inner ones act on the
  // already-restricted matrix and never touch the full chain again.
  Interaction out;
  for (int a = first; a <= last; ++a) {
    for (int b = a; b <= last; ++b) {
      Support ab = Support::interval(a, b);
      EmbeddedOperator e_ab = conditional_expectation(whole, ab, geom);
      MatrixXcd term = e_ab.matrix();
      long dim_ab = term.rows();
      if (a == b) {
        // the empty-interval expectation is the trace part
        term -= (std::real(m.trace()) / static_cast<double>(d)) *
                MatrixXcd::Identity(dim_ab, dim_ab);
      } else {
        Support right = Support::interval(a + 1, b);
        Support left = Support::interval(a, b - 1);
        EmbeddedOperator e_r = conditional_expectation(e_ab, right, geom);
        EmbeddedOperator e_l = conditional_expectation(e_ab, left, geom);
        term -= extend_to_support(right, e_r.matrix(), ab, geom);
        term -= extend_to_support(left, e_l.matrix(), ab, geom);
        if (a + 1 <= b - 1) {
          Support mid = Support::interval(a + 1, b - 1);
          EmbeddedOperator e_m = conditional_expectation(e_ab, mid, geom);
          term += extend_to_support(mid, e_m.matrix(), ab, geom);
        } else {
          term += (std::real(m.trace()) / static_cast<double>(d)) *
                  MatrixXcd::Identity(dim_ab, dim_ab);
        }
      }
      if (term.operatorNorm() <= drop_below) continue;
      out.add_term(ab, std::move(term));
    }
  }
  return out;
}

double duhamel_difference(const ChainGeometry& geom, const TDI& h1, const TDI& h2,
                          const EmbeddedOperator& a, double s, long max_dim) {
  MatrixXcd e1 = evolve_operator_dense(geom, h1, a, s, max_dim);
  MatrixXcd e2 = evolve_operator_dense(geom, h2, a, s, max_dim);
  return (e1 - e2).operatorNorm();
}

double interaction_expectation(const Interaction& h, const ChainState& psi) {
  return std::real(psi.vector().dot(h.apply(psi.geometry(), psi.vector())));
}

}  // namespace pump
