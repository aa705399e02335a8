#include "pump/pumps.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace pump {

namespace {
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
constexpr std::complex<double> kI(0.0, 1.0);
constexpr double kPi = std::numbers::pi;

MatrixXcd exp_hermitian(const MatrixXcd& h, double tau) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
  VectorXcd ph(h.rows());
  for (long k = 0; k < h.rows(); ++k) ph(k) = std::exp(-kI * tau * es.eigenvalues()(k));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

// Hull support of all terms of an interaction.
Support interaction_hull(const Interaction& h) {
  if (h.empty()) throw std::invalid_argument("interaction_hull: empty interaction");
  int lo = h.terms().front().support.min_label();
  int hi = h.terms().front().support.max_label();
  for (const auto& t : h.terms()) {
    lo = std::min(lo, t.support.min_label());
    hi = std::max(hi, t.support.max_label());
  }
  return Support::interval(lo, hi);
}
}  // namespace

double DressLayer::theta(double s) const {
  double sn = std::sin(kPi * s);
  return strength * sn * sn;
}

ChainState LoopSpec::basepoint_state(const EvolveOptions& opts) const {
  ChainState phi = product_state(geom, basepoint_levels);
  if (preparation) phi = evolve_state(phi, *preparation, 0.0, 1.0, opts);
  return phi;
}

ChainState LoopSpec::state_at(double s, const EvolveOptions& opts) const {
  ChainState cur = basepoint_state(opts);
  cur = evolve_state(cur, tdi, 0.0, s, opts);
  // dressing layers applied exactly: V(s)^dag = exp(-i theta(s) iota(G))
  for (const auto& layer : dressing) {
    Support hull = interaction_hull(layer.generator);
    long hd = 1;
    for (int site : hull.sites) hd *= geom->local_dim_at(site);
    MatrixXcd g = MatrixXcd::Zero(hd, hd);
    for (const auto& t : layer.generator.terms())
      g += extend_to_support(t.support, *t.matrix, hull, *geom);
    MatrixXcd u = exp_hermitian(g, layer.theta(s));
    Eigen::VectorXcd v = apply_to_vector(hull, u, *geom, cur.vector());
    v /= v.norm();
    cur = ChainState(geom, std::move(v));
  }
  return cur;
}

TDI LoopSpec::effective_tdi(int substeps_per_unit) const {
  if (dressing.empty()) return tdi;
  if (dressing.size() > 1)
    throw std::invalid_argument("effective_tdi: materialization supports one dressing layer");
  const DressLayer& layer = dressing.front();
  Support ghull = interaction_hull(layer.generator);

  // split the base terms into those commuting with the dressing (disjoint
  // supports) and those that get conjugated
  auto overlaps_g = [&](const Term& t) { return t.support.overlaps(ghull); };

  // precompute the dense generator on its hull, eigendecomposed once
  long hd = 1;
  for (int site : ghull.sites) hd *= geom->local_dim_at(site);
  MatrixXcd g = MatrixXcd::Zero(hd, hd);
  for (const auto& t : layer.generator.terms())
    g += extend_to_support(t.support, *t.matrix, ghull, *geom);

  Eigen::SelfAdjointEigenSolver<MatrixXcd> esg(g);

  std::vector<TDI::Piece> pieces;
  std::set<double> cuts;
  for (const auto& p : tdi.pieces()) {
    cuts.insert(p.t0);
    cuts.insert(p.t1);
  }
  int n = std::max(8, substeps_per_unit);
  for (int k = 0; k <= n; ++k) cuts.insert(static_cast<double>(k) / n);
  std::vector<double> grid(cuts.begin(), cuts.end());

  for (size_t q = 0; q + 1 < grid.size(); ++q) {
    double a = grid[q], b = grid[q + 1];
    if (b - a < 1e-13) continue;
    double mid = 0.5 * (a + b);
    double slope = (layer.theta(b) - layer.theta(a)) / (b - a);
    double th = layer.theta(mid);
    const Interaction& base = tdi.at_time(mid);

    Interaction out = layer.generator * slope;
    VectorXcd ph(hd);
    for (long i = 0; i < hd; ++i) ph(i) = std::exp(-kI * th * esg.eigenvalues()(i));
    MatrixXcd uloc = esg.eigenvectors() * ph.asDiagonal() * esg.eigenvectors().adjoint();

    for (const auto& t : base.terms()) {
      if (!overlaps_g(t)) {
        out.add_term(t);  // shared matrix, cheap
        continue;
      }
      Support hull = Support::hull(t.support, ghull);
      MatrixXcd uh = extend_to_support(ghull, uloc, hull, *geom);
      MatrixXcd th_full = extend_to_support(t.support, *t.matrix, hull, *geom);
      MatrixXcd conj = uh * th_full * uh.adjoint();
      // re-localize into ball pieces around the original support so that a
      // cut truncation acts termwise on local pieces
      int lo = t.support.min_label(), hi = t.support.max_label();
      int kmax = std::max(lo - hull.min_label(), hull.max_label() - hi);
      MatrixXcd prev;
      for (int r = 0; r <= kmax; ++r) {
        Support ball = Support::interval(std::max(hull.min_label(), lo - r),
                                         std::min(hull.max_label(), hi + r));
        EmbeddedOperator ce =
            conditional_expectation(EmbeddedOperator(hull, conj), ball, *geom);
        MatrixXcd ce_hull = extend_to_support(ball, ce.matrix(), hull, *geom);
        MatrixXcd diff_hull = (r == 0) ? ce_hull : MatrixXcd(ce_hull - prev);
        EmbeddedOperator piece =
            conditional_expectation(EmbeddedOperator(hull, diff_hull), ball, *geom);
        if (piece.matrix().operatorNorm() > 1e-14)
          out.add_term(ball, piece.matrix());
        prev = ce_hull;
      }
    }
    pieces.push_back(TDI::Piece{a, b, std::move(out)});
  }
  return TDI(std::move(pieces));
}

OnsiteRep example_pump_rep(const SymmetryGroup& group, const DualCharge& h, int num_sites) {
  std::vector<DualCharge> charges{group.zero_charge(), -h, h};
  return OnsiteRep::uniform(group, charges, num_sites);
}

LoopSpec example_pump_multiple(const SymmetryGroup& group, const DualCharge& h0, int multiple,
                               GeometryPtr geom) {
  if (!(h0.group() == group))
    throw std::invalid_argument("example_pump: charge group mismatch");
  if (multiple < -1 || multiple > 1)
    throw std::invalid_argument("example_pump_multiple: multiple must be -1, 0 or +1");
  if (geom->num_sites() % 2 != 0)
    throw std::invalid_argument("example_pump: even number of sites required");
  for (int d : geom->local_dims())
    if (d != 3) throw std::invalid_argument("example_pump: three-level sites required");

  // pair term pi*(a + a*) with a*(h') = |-h',h'><0,0|; in the level basis
  // {|0>, |-h0>, |+h0>} the pair (-h', h') sits at levels (1,2) for
  // h' = +h0 and (2,1) for h' = -h0; h' = 0 degenerates to |0,0><0,0|.
  auto pair_term = [&](int hprime_sign) {
    MatrixXcd m = MatrixXcd::Zero(9, 9);
    int target = hprime_sign > 0 ? (1 * 3 + 2) : (hprime_sign < 0 ? (2 * 3 + 1) : 0);
    m(target, 0) += 1.0;
    if (target != 0) m(0, target) += 1.0;
    return m;
  };

  Interaction even_terms, odd_terms;
  for (int i = geom->first_site(); i <= geom->last_site(); ++i) {
    int j = geom->next_site(i);
    if (j == INT32_MIN) continue;  // open end
    bool even = (i % 2 == 0);
    Support pair({i, j});
    if (even)
      even_terms.add_term(pair, MatrixXcd(kPi * pair_term(multiple)));
    else
      odd_terms.add_term(pair, MatrixXcd(kPi * pair_term(-multiple)));
  }

  LoopSpec loop;
  loop.geom = geom;
  loop.rep = example_pump_rep(group, h0, geom->num_sites());
  loop.basepoint_levels.assign(geom->num_sites(), 0);
  loop.tdi = TDI({TDI::Piece{0.0, 0.5, even_terms}, TDI::Piece{0.5, 1.0, odd_terms}});
  loop.policy.kind =
      geom->is_ring() ? ClosurePolicy::Kind::RingExact : ClosurePolicy::Kind::BulkWindow;
  loop.policy.tol = 1e-9;
  return loop;
}

LoopSpec example_pump(const SymmetryGroup& group, const DualCharge& h, GeometryPtr geom) {
  return example_pump_multiple(group, h, 1, std::move(geom));
}

LoopSpec constant_loop(GeometryPtr geom, const OnsiteRep& rep,
                       const std::vector<int>& basepoint_levels) {
  LoopSpec loop;
  loop.geom = std::move(geom);
  loop.rep = rep;
  loop.basepoint_levels = basepoint_levels;
  loop.tdi = TDI::zero();
  loop.policy.kind = loop.geom->is_ring() ? ClosurePolicy::Kind::RingExact
                                          : ClosurePolicy::Kind::BulkWindow;
  return loop;
}

namespace {
void require_same_frame(const LoopSpec& a, const LoopSpec& b, const char* what) {
  if (!(*a.geom == *b.geom)) throw std::invalid_argument(std::string(what) + ": geometry mismatch");
  if (!(a.rep.group() == b.rep.group()))
    throw std::invalid_argument(std::string(what) + ": group mismatch");
  if (a.basepoint_levels != b.basepoint_levels)
    throw std::invalid_argument(std::string(what) + ": basepoint mismatch");
  ChainState ba = a.basepoint_state(), bb = b.basepoint_state();
  if (ba.fidelity(bb) < 1.0 - 1e-9)
    throw std::invalid_argument(std::string(what) + ": basepoint states differ");
}
}  // namespace

LoopSpec concat(const LoopSpec& psi2, const LoopSpec& psi1) {
  require_same_frame(psi1, psi2, "concat");
  LoopSpec out = psi1;
  out.dressing.clear();
  out.tdi = concatenate_tdi(psi1.has_dressing() ? psi1.effective_tdi() : psi1.tdi,
                            psi2.has_dressing() ? psi2.effective_tdi() : psi2.tdi);
  return out;
}

LoopSpec time_reverse(const LoopSpec& psi) {
  LoopSpec out = psi;
  out.dressing.clear();
  out.tdi = reverse_tdi(psi.has_dressing() ? psi.effective_tdi() : psi.tdi);
  return out;
}

namespace {
// Extend a term of one layer of a stacked chain to the merged local basis.
MatrixXcd stack_term(const Term& t, const ChainGeometry& merged, const ChainGeometry& self,
                     const ChainGeometry& other, bool first_layer) {
  long md = 1;
  for (int s : t.support.sites) md *= merged.local_dim_at(s);
  std::vector<long> m_strides(t.support.sites.size());
  long acc = md;
  for (size_t i = 0; i < t.support.sites.size(); ++i) {
    acc /= merged.local_dim_at(t.support.sites[i]);
    m_strides[i] = acc;
  }
  long sd = t.matrix->rows();
  std::vector<long> s_strides(t.support.sites.size());
  long sacc = sd;
  for (size_t i = 0; i < t.support.sites.size(); ++i) {
    sacc /= self.local_dim_at(t.support.sites[i]);
    s_strides[i] = sacc;
  }
  std::vector<long> to_self(md, 0), to_other(md, 0);
  for (long idx = 0; idx < md; ++idx) {
    long self_idx = 0, other_idx = 0;
    for (size_t i = 0; i < t.support.sites.size(); ++i) {
      int site = t.support.sites[i];
      int d1 = first_layer ? self.local_dim_at(site) : other.local_dim_at(site);
      int d2 = first_layer ? other.local_dim_at(site) : self.local_dim_at(site);
      long digit = (idx / m_strides[i]) % merged.local_dim_at(site);
      long a = digit / d2, b = digit % d2;  // merged level = a*d2 + b, a = layer-1 level
      long mine = first_layer ? a : b;
      long theirs = first_layer ? b : a;
      self_idx += mine * s_strides[i];
      other_idx = other_idx * (first_layer ? d2 : d1) + theirs;
    }
    to_self[idx] = self_idx;
    to_other[idx] = other_idx;
  }
  MatrixXcd out = MatrixXcd::Zero(md, md);
  for (long i = 0; i < md; ++i)
    for (long j = 0; j < md; ++j)
      if (to_other[i] == to_other[j]) out(i, j) = (*t.matrix)(to_self[i], to_self[j]);
  return out;
}

TDI stack_tdi(const TDI& t1, const TDI& t2, const ChainGeometry& merged, const ChainGeometry& g1,
              const ChainGeometry& g2) {
  auto grid = TDI::merged_grid(t1, t2);
  std::vector<TDI::Piece> pieces;
  for (size_t q = 0; q + 1 < grid.size(); ++q) {
    double mid = 0.5 * (grid[q] + grid[q + 1]);
    Interaction h;
    for (const auto& t : t1.at_time(mid).terms())
      h.add_term(t.support, stack_term(t, merged, g1, g2, true));
    for (const auto& t : t2.at_time(mid).terms())
      h.add_term(t.support, stack_term(t, merged, g2, g1, false));
    pieces.push_back(TDI::Piece{grid[q], grid[q + 1], std::move(h)});
  }
  return TDI(std::move(pieces));
}
}  // namespace

LoopSpec stack(const LoopSpec& psi1, const LoopSpec& psi2) {
  if (!(psi1.rep.group() == psi2.rep.group()))
    throw std::invalid_argument("stack: group mismatch");
  const ChainGeometry& g1 = *psi1.geom;
  const ChainGeometry& g2 = *psi2.geom;
  if (g1.num_sites() != g2.num_sites() || g1.first_site() != g2.first_site() ||
      g1.is_ring() != g2.is_ring())
    throw std::invalid_argument("stack: interleaved layout needs matching site labels");

  std::vector<int> dims(g1.num_sites());
  for (int p = 0; p < g1.num_sites(); ++p) dims[p] = g1.local_dim_pos(p) * g2.local_dim_pos(p);
  auto merged = std::make_shared<ChainGeometry>(g1.first_site(), dims, g1.boundary());

  std::vector<std::vector<DualCharge>> charges(g1.num_sites());
  std::vector<int> base(g1.num_sites());
  for (int p = 0; p < g1.num_sites(); ++p) {
    for (const auto& c1 : psi1.rep.charges(p))
      for (const auto& c2 : psi2.rep.charges(p)) charges[p].push_back(c1 + c2);
    base[p] = psi1.basepoint_levels[p] * g2.local_dim_pos(p) + psi2.basepoint_levels[p];
  }

  LoopSpec out;
  out.geom = merged;
  out.rep = OnsiteRep(psi1.rep.group(), std::move(charges));
  out.basepoint_levels = std::move(base);
  out.tdi = stack_tdi(psi1.has_dressing() ? psi1.effective_tdi() : psi1.tdi,
                      psi2.has_dressing() ? psi2.effective_tdi() : psi2.tdi, *merged, g1, g2);
  out.policy = psi1.policy;
  return out;
}

LoopSpec reparametrize(const LoopSpec& psi, const std::vector<std::pair<double, double>>& knots) {
  LoopSpec out = psi;
  out.dressing.clear();
  out.tdi = reparametrize_tdi(psi.has_dressing() ? psi.effective_tdi() : psi.tdi, knots);
  return out;
}

LoopSpec dress(const LoopSpec& psi, const Interaction& generator, double strength) {
  DressLayer layer;
  layer.generator = generator.symmetrized(psi.rep, *psi.geom).compacted();
  layer.generator.validate(*psi.geom);
  for (const auto& t : layer.generator.terms()) {
    std::vector<int> pos;
    for (int s : t.support.sites) pos.push_back(psi.geom->position(s));
    auto chk = is_invariant_matrix(*t.matrix, psi.rep, pos, 1e-10);
    if (!chk.invariant)
      throw std::invalid_argument("dress: generator not symmetric after symmetrization");
  }
  layer.strength = strength;
  LoopSpec out = psi;
  out.dressing.push_back(std::move(layer));
  return out;
}

ClosureReport verify_loop(const LoopSpec& psi, const EvolveOptions& opts) {
  ClosureReport rep;
  rep.policy = psi.policy.kind;
  ChainState start = psi.basepoint_state(opts);
  ChainState end = psi.state_at(1.0, opts);
  rep.fidelity = start.fidelity(end);
  if (psi.policy.kind == ClosurePolicy::Kind::RingExact) {
    rep.pass = rep.fidelity >= 1.0 - psi.policy.tol;
    return rep;
  }
  // central window, excluding the boundary sites where truncation artifacts
  // park charge
  int w = psi.policy.window_halfwidth;
  int lo = std::max(psi.geom->first_site() + 1, -w);
  int hi = std::min(psi.geom->last_site() - 1, w);
  if (lo > hi) {
    lo = psi.geom->first_site() + 1;
    hi = lo;
  }
  Eigen::MatrixXcd r0 = reduced_density(start, lo, hi);
  Eigen::MatrixXcd r1 = reduced_density(end, lo, hi);
  rep.bulk_distance = trace_distance(r0, r1);
  rep.pass = rep.bulk_distance <= psi.policy.tol;
  return rep;
}

LoopSpec open_shadow(const LoopSpec& psi) {
  if (!psi.geom->is_ring()) return psi;
  auto open_geom = std::make_shared<ChainGeometry>(psi.geom->first_site(), psi.geom->local_dims(),
                                                   ChainGeometry::Boundary::Open);
  LoopSpec out = psi;
  out.geom = open_geom;
  out.tdi = psi.tdi.drop_wrapping_terms(*psi.geom);
  if (out.preparation) out.preparation = out.preparation->drop_wrapping_terms(*psi.geom);
  for (const auto& layer : out.dressing)
    for (const auto& t : layer.generator.terms())
      if (t.support.wraps(*psi.geom))
        throw std::invalid_argument("open_shadow: dressing generator wraps the ring");
  out.policy.kind = ClosurePolicy::Kind::BulkWindow;
  out.policy.tol = std::max(out.policy.tol, 1e-9);
  return out;
}

double basepoint_invariance_defect(const LoopSpec& psi) {
  ChainState phi = psi.basepoint_state();
  ZeroDimRep full = window_rep(psi.rep, *psi.geom, psi.geom->first_site(), psi.geom->last_site());
  return full.eigenvector_defect(phi.vector());
}

ZeroDimRep window_rep(const OnsiteRep& rep, const ChainGeometry& geom, int first, int last) {
  std::vector<ZeroDimRep> factors;
  for (int s = first; s <= last; ++s)
    factors.emplace_back(rep.group(), rep.charges(geom.position(s)));
  return ZeroDimRep::tensor(factors);
}

}  // namespace pump
