#include "pump/splitting.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <stdexcept>

namespace pump {

namespace {
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
constexpr std::complex<double> kI(0.0, 1.0);

MatrixXcd exp_hermitian(const MatrixXcd& h, double tau) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
  VectorXcd ph(h.rows());
  for (long k = 0; k < h.rows(); ++k) ph(k) = std::exp(-kI * tau * es.eigenvalues()(k));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

GeometryPtr segment_geometry(const ChainGeometry& geom, int a, int b) {
  std::vector<int> dims;
  for (int s = a; s <= b; ++s) dims.push_back(geom.local_dim_at(s));
  return std::make_shared<ChainGeometry>(a, dims, ChainGeometry::Boundary::Open);
}

// Evolve a segment product state under the segment-supported part of a TDI.
ChainState evolve_segment(const LoopSpec& psi, const TDI& part, int a, int b, double s,
                          const EvolveOptions& opts) {
  GeometryPtr seg = segment_geometry(*psi.geom, a, b);
  std::vector<int> levels;
  for (int q = a; q <= b; ++q) levels.push_back(psi.basepoint_levels[psi.geom->position(q)]);
  ChainState phi = product_state(seg, levels);
  return evolve_state(phi, part, 0.0, s, opts);
}

// Dense U_K(s) of a transport path (identity plus the in-plane rotation).
MatrixXcd transport_matrix(const ZeroDimPath& path, double s) {
  long d = path.omega.size();
  MatrixXcd u = MatrixXcd::Identity(d, d);
  if (path.trivial()) return u;
  double theta = path.plane_angle(s);
  const VectorXcd& om = path.omega;
  const VectorXcd& pp = path.perp;
  u += (std::cos(theta) - 1.0) * (om * om.adjoint() + pp * pp.adjoint());
  u += std::sin(theta) * (pp * om.adjoint() - om * pp.adjoint());
  return u;
}

ChainState kron_state(GeometryPtr geom, const VectorXcd& left, const VectorXcd& right) {
  VectorXcd full(left.size() * right.size());
  for (long l = 0; l < left.size(); ++l)
    for (long r = 0; r < right.size(); ++r) full(l * right.size() + r) = left(l) * right(r);
  full /= full.norm();
  return ChainState(std::move(geom), std::move(full));
}
}  // namespace

std::pair<SplitLoop, SplitReport> split_single_edge(const LoopSpec& psi, int edge,
                                                    int num_samples,
                                                    const EvolveOptions& opts) {
  if (psi.geom->is_ring())
    throw std::invalid_argument("split_single_edge: open chain required");
  if (psi.preparation)
    throw std::invalid_argument("split_single_edge: product basepoint required");
  const ChainGeometry& geom = *psi.geom;
  if (edge < geom.first_site() || edge >= geom.last_site())
    throw std::invalid_argument("split_single_edge: edge must be interior");

  SplitReport report;
  TDI full = psi.has_dressing() ? psi.effective_tdi() : psi.tdi;
  SplitParts parts = split_decomposition(full, edge);

  // endpoint states of the decoupled halves
  ChainState psi_minus = evolve_segment(psi, parts.left, geom.first_site(), edge, 1.0, opts);
  ChainState psi_plus = evolve_segment(psi, parts.right, edge + 1, geom.last_site(), 1.0, opts);

  GeometryPtr seg_l = psi_minus.geometry_ptr();
  GeometryPtr seg_r = psi_plus.geometry_ptr();
  ZeroDimRep rep_l = window_rep(psi.rep, geom, geom.first_site(), edge);
  ZeroDimRep rep_r = window_rep(psi.rep, geom, edge + 1, geom.last_site());

  std::vector<int> lev_l, lev_r;
  for (int q = geom.first_site(); q <= edge; ++q)
    lev_l.push_back(psi.basepoint_levels[geom.position(q)]);
  for (int q = edge + 1; q <= geom.last_site(); ++q)
    lev_r.push_back(psi.basepoint_levels[geom.position(q)]);
  ChainState phi_l_state = product_state(seg_l, lev_l);
  ChainState phi_r_state = product_state(seg_r, lev_r);
  VectorXcd phi_l = phi_l_state.vector();
  VectorXcd phi_r = phi_r_state.vector();

  // Relative charge of each half near the cut. The global segment charge is
  // conserved by the symmetric schedule (the compensating charge parks at
  // the far boundary), so the certificate reads the window next to the
  // edge, like the index extraction.
  {
    std::vector<std::vector<DualCharge>> cl, cr;
    for (int q = geom.first_site(); q <= edge; ++q) cl.push_back(psi.rep.charges(geom.position(q)));
    for (int q = edge + 1; q <= geom.last_site(); ++q)
      cr.push_back(psi.rep.charges(geom.position(q)));
    OnsiteRep seg_rep_l(psi.rep.group(), std::move(cl));
    OnsiteRep seg_rep_r(psi.rep.group(), std::move(cr));
    // windows next to the edge, excluding only the far boundary site where
    // the compensating charge parks
    int w_l = std::max(1, edge - geom.first_site());
    int w_r = std::max(1, geom.last_site() - (edge + 1));
    int lo_l = std::max(geom.first_site(), edge - w_l + 1);
    int hi_r = std::min(geom.last_site(), edge + w_r);
    std::vector<int> pos_l, pos_r;
    for (int q = lo_l; q <= edge; ++q) pos_l.push_back(seg_l->position(q));
    for (int q = edge + 1; q <= hi_r; ++q) pos_r.push_back(seg_r->position(q));
    DensityChargeResult dl =
        charge_from_densities(reduced_density(psi_minus, lo_l, edge),
                              reduced_density(phi_l_state, lo_l, edge), seg_rep_l, pos_l);
    DensityChargeResult dr =
        charge_from_densities(reduced_density(psi_plus, edge + 1, hi_r),
                              reduced_density(phi_r_state, edge + 1, hi_r), seg_rep_r, pos_r);
    report.charge_left = dl.charge;
    report.charge_right = dr.charge;
    report.charge_residual = std::max(dl.residual, dr.residual);
  }
  if (!report.charge_left.is_zero() || !report.charge_right.is_zero()) {
    report.ok = false;  // Lemma-level obstruction: the halves carry charge
    return {SplitLoop{}, report};
  }

  // symmetric parallel transport from phi to the endpoint on each half
  ZeroDimPath k_l = kato_transport_symmetric(phi_l, psi_minus.vector(), rep_l);
  ZeroDimPath k_r = kato_transport_symmetric(phi_r, psi_plus.vector(), rep_r);
  report.left_generator_sup = k_l.sup_generator_norm;
  report.right_generator_sup = k_r.sup_generator_norm;
  report.left_distance = std::sqrt(std::max(0.0, 1.0 - std::norm(phi_l.dot(psi_minus.vector()))));
  report.right_distance = std::sqrt(std::max(0.0, 1.0 - std::norm(phi_r.dot(psi_plus.vector()))));

  // sampled split loop phi o alpha_{H-B} o alpha_K^{-1}
  SplitLoop loop;
  ChainState base = psi.basepoint_state(opts);
  for (int k = 0; k < num_samples; ++k) {
    double s = static_cast<double>(k + 1) / num_samples;
    loop.grid.push_back(s);
    ChainState vl = evolve_segment(psi, parts.left, geom.first_site(), edge, s, opts);
    ChainState vr = evolve_segment(psi, parts.right, edge + 1, geom.last_site(), s, opts);
    VectorXcd wl = k_l.apply(vl.vector(), s, /*adjoint=*/true);
    VectorXcd wr = k_r.apply(vr.vector(), s, /*adjoint=*/true);
    ChainState assembled = kron_state(psi.geom, wl, wr);
    report.sample_times.push_back(s);
    report.entropy_after.push_back(cut_entropy(assembled, edge));
    ChainState original = psi.state_at(s, opts);
    report.entropy_before.push_back(cut_entropy(original, edge));
    loop.states.push_back(std::move(assembled));
  }
  report.max_entropy_after = 0.0;
  for (double e : report.entropy_after)
    report.max_entropy_after = std::max(report.max_entropy_after, e);
  report.closure_fidelity = base.fidelity(loop.states.back());
  int w = psi.policy.window_halfwidth;
  int lo = std::max(geom.first_site() + 1, -w), hi = std::min(geom.last_site() - 1, w);
  report.closure_bulk_distance = trace_distance(reduced_density(base, lo, hi),
                                                reduced_density(loop.states.back(), lo, hi));
  report.ok = true;
  return {std::move(loop), std::move(report)};
}

namespace {
// Piecewise-constant TDI reproducing a sampled unitary path exactly at the
// grid points: K_k = i log(U_{k+1} U_k^dag) / tau via the eigendecomposition
// of the (normal) step matrix.
TDI tdi_from_unitary_path(const ChainGeometry& geom, const std::vector<MatrixXcd>& u,
                          const std::vector<double>& grid) {
  std::vector<TDI::Piece> pieces;
  for (size_t k = 0; k + 1 < grid.size(); ++k) {
    MatrixXcd step = u[k + 1] * u[k].adjoint();
    Eigen::ComplexEigenSolver<MatrixXcd> es(step);
    double tau = grid[k + 1] - grid[k];
    MatrixXcd logm = MatrixXcd::Zero(step.rows(), step.cols());
    // unitary step: eigenvalues on the unit circle, eigenvectors orthogonal
    // up to roundoff
    MatrixXcd v = es.eigenvectors();
    VectorXcd lam(step.rows());
    for (long q = 0; q < step.rows(); ++q)
      lam(q) = kI * std::log(es.eigenvalues()(q)) / tau;
    logm = v * lam.asDiagonal() * v.inverse();
    MatrixXcd herm = 0.5 * (logm + logm.adjoint());
    Interaction h = localize_operator(herm, geom, 1e-12);
    pieces.push_back(TDI::Piece{grid[k], grid[k + 1], std::move(h)});
  }
  return TDI(std::move(pieces));
}
}  // namespace

MultiSplitReport multi_split(const LoopSpec& psi, int block_size, const FFunction& f,
                             int time_samples, const EvolveOptions& opts) {
  const ChainGeometry& geom = *psi.geom;
  if (geom.is_ring()) throw std::invalid_argument("multi_split: open chain required");
  if (geom.num_sites() % block_size != 0)
    throw std::invalid_argument("multi_split: chain length must be a multiple of the block size");
  if (geom.total_dim() > (1 << 10))
    throw std::invalid_argument("multi_split: dense machinery capped at dimension 1024");

  IndexSettings is;
  IndexReport idx = pump_index(psi, is, opts);
  if (!idx.charge.is_zero())
    throw std::invalid_argument("multi_split: loop index must be zero, got " +
                                idx.charge.to_string());

  MultiSplitReport rep;
  rep.block_size = block_size;
  int nblocks = geom.num_sites() / block_size;
  for (int m = 1; m < nblocks; ++m)
    rep.block_edges.push_back(geom.first_site() + m * block_size - 1);

  TDI h = psi.has_dressing() ? psi.effective_tdi() : psi.tdi;

  // time grid for the materializations
  std::vector<double> grid(time_samples + 1);
  for (int k = 0; k <= time_samples; ++k) grid[k] = static_cast<double>(k) / time_samples;

  // single-edge corrections E^(j)(s) = alpha_K(s)[-K(s)-B_j(s)]
  //                                  + (alpha_K(s)[H(s)] - H(s))
  // materialized densely and localized into interval terms
  std::vector<std::vector<Interaction>> corrections;  // [edge][time sample]
  for (int edge : rep.block_edges) {
    SplitParts parts = split_decomposition(h, edge);
    ChainState psi_minus = evolve_segment(psi, parts.left, geom.first_site(), edge, 1.0, opts);
    ChainState psi_plus = evolve_segment(psi, parts.right, edge + 1, geom.last_site(), 1.0, opts);
    ZeroDimRep rep_l = window_rep(psi.rep, geom, geom.first_site(), edge);
    ZeroDimRep rep_r = window_rep(psi.rep, geom, edge + 1, geom.last_site());
    std::vector<int> lev_l, lev_r;
    for (int q = geom.first_site(); q <= edge; ++q)
      lev_l.push_back(psi.basepoint_levels[geom.position(q)]);
    for (int q = edge + 1; q <= geom.last_site(); ++q)
      lev_r.push_back(psi.basepoint_levels[geom.position(q)]);
    VectorXcd phi_l = product_state(psi_minus.geometry_ptr(), lev_l).vector();
    VectorXcd phi_r = product_state(psi_plus.geometry_ptr(), lev_r).vector();
    ZeroDimPath k_l = kato_transport_symmetric(phi_l, psi_minus.vector(), rep_l);
    ZeroDimPath k_r = kato_transport_symmetric(phi_r, psi_plus.vector(), rep_r);

    Support seg_left = Support::interval(geom.first_site(), edge);
    Support seg_right = Support::interval(edge + 1, geom.last_site());

    std::vector<Interaction> e_j(grid.size());
    for (size_t k = 0; k < grid.size(); ++k) {
      double s = grid[k];
      size_t zk = std::min(k_l.grid.size() - 1,
                           static_cast<size_t>(std::llround(s * (k_l.grid.size() - 1))));
      Interaction k_int;
      k_int.add_term(seg_left, k_l.generator(zk));
      k_int.add_term(seg_right, k_r.generator(zk));
      MatrixXcd k_mat = k_int.to_dense(geom, 1 << 10);
      MatrixXcd b_mat = parts.crossing.at_time(s).to_dense(geom, 1 << 10);
      MatrixXcd h_mat = h.at_time(s).to_dense(geom, 1 << 10);
      // U_K(s) from the two transports (factorized)
      MatrixXcd uk =
          Eigen::kroneckerProduct(transport_matrix(k_l, s), transport_matrix(k_r, s));
      MatrixXcd inner = -(k_mat + b_mat) + h_mat;
      MatrixXcd e_mat = uk.adjoint() * inner * uk - h_mat;
      e_j[k] = localize_operator(e_mat, geom, 1e-12);
    }
    corrections.push_back(std::move(e_j));
  }

  // F~ = H + sum_j E^(j) as a sampled schedule; F = block truncation.
  // offset = 0 gives the blocks I_n, offset = size/2 the half-shifted J_n
  // (the outer J blocks are clipped at the chain ends).
  auto in_one_block = [&](const Support& s, int size, int offset) {
    auto bid = [&](int x) { return (x - geom.first_site() + size - offset) / size; };
    return bid(s.min_label()) == bid(s.max_label());
  };

  double f_tail = 0.0, z_tail = 0.0;
  std::vector<MatrixXcd> u_f(grid.size());   // propagator of the split F
  std::vector<MatrixXcd> u_h(grid.size());
  MatrixXcd uf = MatrixXcd::Identity(geom.total_dim(), geom.total_dim());
  MatrixXcd uh = MatrixXcd::Identity(geom.total_dim(), geom.total_dim());
  u_f[0] = uf;
  u_h[0] = uh;
  for (size_t k = 0; k + 1 < grid.size(); ++k) {
    double smid = 0.5 * (grid[k] + grid[k + 1]);
    double tau = grid[k + 1] - grid[k];
    Interaction ftilde = h.at_time(smid);
    for (auto& corr : corrections) ftilde = ftilde + corr[k];  // left sample
    ftilde = ftilde.compacted();
    Interaction fsplit;
    for (const auto& t : ftilde.terms())
      if (in_one_block(t.support, block_size, 0)) fsplit.add_term(t);
    Interaction tail = ftilde + fsplit * -1.0;
    f_tail = std::max(f_tail, f_norm(tail.compacted(1e-14), f));
    uf = exp_hermitian(fsplit.to_dense(geom, 1 << 10), tau) * uf;
    uh = exp_hermitian(h.at_time(smid).to_dense(geom, 1 << 10), tau) * uh;
    u_f[k + 1] = uf;
    u_h[k + 1] = uh;
  }

  // Z~ generates alpha_F^{-1} o alpha_H: U_Z~ = U_H U_F^dag
  std::vector<MatrixXcd> u_zt(grid.size());
  for (size_t k = 0; k < grid.size(); ++k) u_zt[k] = u_h[k] * u_f[k].adjoint();
  TDI ztilde = tdi_from_unitary_path(geom, u_zt, grid);
  // Z: truncation to the half-shifted blocks J_n
  TDI z = ztilde.filter_terms([&](const Term& t) {
    return in_one_block(t.support, block_size, block_size / 2);
  });
  {
    // tail norm and W = generator of alpha_Z~ o alpha_Z^{-1}
    for (const auto& p : ztilde.pieces()) {
      Interaction zt = p.interaction;
      Interaction zs;
      for (const auto& t : zt.terms())
        if (in_one_block(t.support, block_size, block_size / 2)) zs.add_term(t);
      Interaction diff = zt + zs * -1.0;
      z_tail = std::max(z_tail, f_norm(diff.compacted(1e-14), f));
    }
    MatrixXcd uz = MatrixXcd::Identity(geom.total_dim(), geom.total_dim());
    std::vector<MatrixXcd> u_w(grid.size());
    u_w[0] = uz;
    for (size_t k = 0; k + 1 < grid.size(); ++k) {
      double smid = 0.5 * (grid[k] + grid[k + 1]);
      double tau = grid[k + 1] - grid[k];
      uz = exp_hermitian(z.at_time(smid).to_dense(geom, 1 << 10), tau) * uz;
      u_w[k + 1] = uz.adjoint() * u_zt[k + 1];
    }
    TDI w = tdi_from_unitary_path(geom, u_w, grid);
    rep.w_norm = tdi_norm(w, f);
  }
  rep.f_tail_norm = f_tail;
  rep.z_tail_norm = z_tail;

  // quasi-loop defects per block
  ChainState base = psi.basepoint_state(opts);
  VectorXcd base_v = base.vector();
  ChainState f_end(psi.geom, VectorXcd(u_f.back() * base_v));
  for (int n = 0; n < nblocks; ++n) {
    int a = geom.first_site() + n * block_size;
    int b = a + block_size - 1;
    rep.f_quasiloop_defects.push_back(
        trace_distance(reduced_density(f_end, a, b), reduced_density(base, a, b)));
  }
  // Z quasi-loop: phi o alpha_Z^{-1}(1)
  MatrixXcd uz_full = MatrixXcd::Identity(geom.total_dim(), geom.total_dim());
  for (size_t k = 0; k + 1 < grid.size(); ++k) {
    double smid = 0.5 * (grid[k] + grid[k + 1]);
    uz_full =
        exp_hermitian(z.at_time(smid).to_dense(geom, 1 << 10), grid[k + 1] - grid[k]) * uz_full;
  }
  ChainState z_end(psi.geom, VectorXcd((uz_full.adjoint() * base_v).normalized()));
  for (int m = 0; m <= nblocks - 1; ++m) {
    int a = std::max(geom.first_site(), geom.first_site() + m * block_size + block_size / 2);
    int b = std::min(geom.last_site(), a + block_size - 1);
    if (a > b) continue;
    rep.z_quasiloop_defects.push_back(
        trace_distance(reduced_density(z_end, a, b), reduced_density(base, a, b)));
  }
  return rep;
}

QuasiLoopClosure close_quasiloop(const ChainState& endpoint, const LoopSpec& psi,
                                 const std::vector<std::pair<int, int>>& blocks,
                                 const EvolveOptions& opts) {
  const ChainGeometry& geom = *psi.geom;
  QuasiLoopClosure out;
  std::vector<TDI::Piece> pieces;
  const int grid_n = 64;
  std::vector<Interaction> per_time(grid_n);
  for (const auto& [a, b] : blocks) {
    GeometryPtr seg = segment_geometry(geom, a, b);
    // block endpoint state: reduced density must be (near) pure
    MatrixXcd rho = reduced_density(endpoint, a, b);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho);
    Eigen::Index top;
    es.eigenvalues().maxCoeff(&top);
    if (es.eigenvalues()(top) < 1.0 - 1e-6)
      throw std::invalid_argument("close_quasiloop: block endpoint is not factorized/pure");
    VectorXcd block_state = es.eigenvectors().col(top);
    std::vector<int> levels;
    for (int q = a; q <= b; ++q) levels.push_back(psi.basepoint_levels[geom.position(q)]);
    VectorXcd phi = product_state(seg, levels).vector();
    ZeroDimRep block_rep = window_rep(psi.rep, geom, a, b);
    double dist = std::sqrt(std::max(0.0, 1.0 - std::norm(phi.dot(block_state))));
    out.block_distances.push_back(dist);
    ZeroDimPath path = kato_transport_symmetric(block_state, phi, block_rep, 256);
    // note direction: transport carries the endpoint back to phi
    out.generator_norms.push_back(path.sup_generator_norm);
    Support bs = Support::interval(a, b);
    for (int k = 0; k < grid_n; ++k) {
      double sm = (k + 0.5) / grid_n;
      size_t zk = std::min(path.grid.size() - 1,
                           static_cast<size_t>(std::llround(sm * (path.grid.size() - 1))));
      per_time[k].add_term(bs, path.generator(zk));
    }
  }
  std::vector<TDI::Piece> sched;
  for (int k = 0; k < grid_n; ++k)
    sched.push_back(TDI::Piece{static_cast<double>(k) / grid_n,
                               static_cast<double>(k + 1) / grid_n, per_time[k]});
  out.correction = TDI(std::move(sched));
  ChainState closed = evolve_state(endpoint, out.correction, 0.0, 1.0, opts);
  out.closure_fidelity = closed.fidelity(psi.basepoint_state(opts));
  return out;
}

BlockContractionReport contract_product_loop(const std::vector<ZeroDimLoop>& block_loops,
                                             const std::vector<ZeroDimRep>& block_reps) {
  if (block_loops.size() != block_reps.size())
    throw std::invalid_argument("contract_product_loop: loops/reps size mismatch");
  BlockContractionReport rep;
  for (size_t n = 0; n < block_loops.size(); ++n) {
    LoopContraction c = contract_loop(block_loops[n], &block_reps[n]);
    rep.block_e_norms.push_back(block_loops[n].generator_norm);
    rep.block_sup_e_lambda.push_back(c.sup_e_lambda);
    rep.block_sup_f_s.push_back(c.sup_f_s);
    rep.max_boundary_defect = std::max(rep.max_boundary_defect, c.boundary_defect);
  }
  return rep;
}

LoopSpec associated_loop(const LoopSpec& psi, const TDI& preparation,
                         const EvolveOptions& opts) {
  // consistency: the loop's basepoint must be phi o alpha_K(1)
  ChainState phi = product_state(psi.geom, psi.basepoint_levels);
  ChainState prepared = evolve_state(phi, preparation, 0.0, 1.0, opts);
  ChainState declared = psi.basepoint_state(opts);
  if (prepared.fidelity(declared) < 1.0 - 1e-9)
    throw std::invalid_argument("associated_loop: basepoint is not phi o alpha_K(1)");

  TDI h = psi.has_dressing() ? psi.effective_tdi() : psi.tdi;
  LoopSpec nu;
  nu.geom = psi.geom;
  nu.rep = psi.rep;
  nu.basepoint_levels = psi.basepoint_levels;
  nu.tdi = concatenate_tdi(concatenate_tdi(preparation, h), reverse_tdi(preparation));
  nu.policy = psi.policy;
  return nu;
}

}  // namespace pump
