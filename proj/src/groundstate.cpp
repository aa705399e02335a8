#include "pump/groundstate.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace pump {

namespace {
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
constexpr std::complex<double> kI(0.0, 1.0);
}  // namespace

Interaction onsite_gap_hamiltonian(const ChainGeometry& geom, const std::vector<int>& levels) {
  if (static_cast<int>(levels.size()) != geom.num_sites())
    throw std::invalid_argument("onsite_gap_hamiltonian: one level per site");
  Interaction f;
  for (int p = 0; p < geom.num_sites(); ++p) {
    int d = geom.local_dim_pos(p);
    MatrixXcd m = MatrixXcd::Identity(d, d);
    m(levels[p], levels[p]) = 0.0;
    f.add_term(Support({geom.first_site() + p}), std::move(m));
  }
  return f;
}

GroundPair lowest_eigenpair(const std::function<VectorXcd(const VectorXcd&)>& matvec, long dim,
                            double tol, int max_iter, unsigned seed) {
  // Lanczos with full reorthogonalization on a random start vector.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  VectorXcd v(dim);
  for (long i = 0; i < dim; ++i) v(i) = std::complex<double>(gauss(rng), gauss(rng));
  v /= v.norm();

  std::vector<VectorXcd> basis{v};
  std::vector<double> alpha, beta;
  GroundPair out;
  int m_cap = static_cast<int>(std::min<long>(max_iter, dim));
  double prev_e0 = std::numeric_limits<double>::infinity();
  double prev_e1 = std::numeric_limits<double>::infinity();
  for (int j = 0; j < m_cap; ++j) {
    VectorXcd w = matvec(basis[j]);
    double a = std::real(basis[j].dot(w));
    alpha.push_back(a);
    w -= a * basis[j];
    if (j > 0) w -= beta[j - 1] * basis[j - 1];
    for (const auto& q : basis) w -= q.dot(w) * q;
    double b = w.norm();
    bool exhausted = b < 1e-13 || j + 1 == m_cap;
    if ((j >= 4 && j % 4 == 0) || exhausted) {
      int m = j + 1;
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
      for (int k = 0; k < m; ++k) {
        t(k, k) = alpha[k];
        if (k + 1 < m) t(k, k + 1) = t(k + 1, k) = beta[k];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
      double e0 = es.eigenvalues()(0);
      double e1 = (m > 1) ? es.eigenvalues()(1) : e0;
      // residuals of the two lowest Ritz pairs
      double res0 = (m < static_cast<int>(dim)) ? std::abs(b * es.eigenvectors()(m - 1, 0)) : 0.0;
      double res1 = (m > 1 && m < static_cast<int>(dim))
                        ? std::abs(b * es.eigenvectors()(m - 1, 1))
                        : 0.0;
      bool settled = std::abs(e0 - prev_e0) < tol * std::max(1.0, std::abs(e0)) &&
                     std::abs(e1 - prev_e1) < tol * std::max(1.0, std::abs(e1)) &&
                     res0 < std::max(tol, 1e-9) && res1 < std::max(tol, 1e-9);
      if (exhausted || settled) {
        out.e0 = e0;
        out.e1 = e1;  // exhausted Krylov with m == 1 means a degenerate start
        VectorXcd ground = VectorXcd::Zero(dim);
        for (int k = 0; k < m; ++k) ground += es.eigenvectors()(k, 0) * basis[k];
        ground /= ground.norm();
        out.ground = ground;
        out.residual = (matvec(ground) - e0 * ground).norm();
        return out;
      }
      prev_e0 = e0;
      prev_e1 = e1;
    }
    if (b < 1e-13) break;
    beta.push_back(b);
    basis.push_back(w / b);
  }
  throw std::runtime_error("lowest_eigenpair: Lanczos failed to converge");
}

GapReport finite_gap(const Interaction& h, const ChainGeometry& geom, double tol) {
  GapReport rep;
  rep.num_sites = geom.num_sites();
  if (geom.total_dim() <= 2048) {
    MatrixXcd m = h.to_dense(geom, 2048);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    rep.e0 = es.eigenvalues()(0);
    rep.e1 = es.eigenvalues()(1);
    rep.residual = 0.0;
  } else {
    auto matvec = [&](const VectorXcd& x) { return h.apply(geom, x); };
    GroundPair gp = lowest_eigenpair(matvec, geom.total_dim(), tol);
    rep.e0 = gp.e0;
    rep.e1 = gp.e1;
    rep.residual = gp.residual;
    if (rep.residual > 1e-8)
      throw std::runtime_error("finite_gap: eigensolver residual above 1e-8");
  }
  rep.gap = rep.e1 - rep.e0;
  rep.degenerate = rep.gap < 1e-8;
  return rep;
}

Eigen::MatrixXcd z_family(const ChainGeometry& geom, const TDI& loop_tdi,
                          const Interaction& onsite_f, double lambda, double s, long max_dim) {
  if (geom.total_dim() > max_dim)
    throw std::invalid_argument("z_family: dimension exceeds dense cap");
  MatrixXcd f = onsite_f.to_dense(geom, max_dim);
  auto z_at = [&](double sv) -> MatrixXcd {
    if (sv <= 0.5) {
      // alpha_H^{-1}(2s)[F] = U(2s) F U(2s)^dag
      MatrixXcd u = propagator_dense(geom, loop_tdi, 0.0, 2.0 * sv, max_dim);
      return u * f * u.adjoint();
    }
    MatrixXcd zhalf;
    {
      MatrixXcd u = propagator_dense(geom, loop_tdi, 0.0, 1.0, max_dim);
      zhalf = u * f * u.adjoint();
    }
    return (2.0 * sv - 1.0) * f + (2.0 - 2.0 * sv) * zhalf;
  };
  MatrixXcd z = z_at(s);
  return f + (1.0 - lambda) * (z - f);
}

SpectralFlowResult spectral_flow_kato(const std::function<MatrixXcd(double)>& family,
                                      const std::vector<double>& grid, double gap_min,
                                      double eig_tol) {
  if (grid.size() < 3) throw std::invalid_argument("spectral_flow_kato: grid too small");
  SpectralFlowResult out;
  out.grid = grid;
  out.states.resize(grid.size());
  out.gaps.resize(grid.size());
  out.min_gap = std::numeric_limits<double>::infinity();

  long dim = 0;
  for (size_t k = 0; k < grid.size(); ++k) {
    MatrixXcd m = family(grid[k]);
    dim = m.rows();
    auto matvec = [&](const VectorXcd& x) { return VectorXcd(m * x); };
    GroundPair gp = lowest_eigenpair(matvec, dim, eig_tol, 600, 985761u + 31u * k);
    out.gaps[k] = gp.e1 - gp.e0;
    out.min_gap = std::min(out.min_gap, out.gaps[k]);
    if (out.gaps[k] < gap_min)
      throw std::runtime_error("spectral_flow_kato: gap collapsed below gap_min at z=" +
                               std::to_string(grid[k]));
    VectorXcd v = gp.ground;
    if (k > 0) {
      std::complex<double> ov = out.states[k - 1].dot(v);
      if (std::abs(ov) > 1e-12) v *= std::conj(ov) / std::abs(ov);  // phase alignment
    }
    out.states[k] = v;
  }

  // reintegrate the Kato generator K = i[dP, P] through the grid
  auto projector = [&](size_t k) {
    return MatrixXcd(out.states[k] * out.states[k].adjoint());
  };
  VectorXcd cur = out.states.front();
  for (size_t k = 0; k + 1 < grid.size(); ++k) {
    size_t ka = (k == 0) ? 0 : k - 1;
    size_t kb = std::min(grid.size() - 1, k + 1);
    MatrixXcd pdot_k = (projector(kb) - projector(ka)) / (grid[kb] - grid[ka]);
    size_t ka2 = k, kb2 = std::min(grid.size() - 1, k + 2);
    MatrixXcd pdot_k1 = (projector(kb2) - projector(ka2)) / (grid[kb2] - grid[ka2]);
    MatrixXcd e = 0.5 * (kI * (pdot_k * projector(k) - projector(k) * pdot_k) +
                         kI * (pdot_k1 * projector(k + 1) - projector(k + 1) * pdot_k1));
    double tau = grid[k + 1] - grid[k];
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(e);
    VectorXcd ph(dim);
    for (long q = 0; q < dim; ++q) ph(q) = std::exp(-kI * tau * es.eigenvalues()(q));
    cur = es.eigenvectors() * (ph.asDiagonal() * (es.eigenvectors().adjoint() * cur));
  }
  out.endpoint_fidelity = std::abs(out.states.back().dot(cur));
  out.loop_fidelity = std::abs(out.states.front().dot(cur));
  return out;
}

}  // namespace pump
