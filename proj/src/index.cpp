#include "pump/index.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pump {

namespace {
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Left segment geometry [first, cut] of an open chain.
GeometryPtr left_segment(const ChainGeometry& geom, int cut) {
  std::vector<int> dims;
  for (int s = geom.first_site(); s <= cut; ++s) dims.push_back(geom.local_dim_at(s));
  return std::make_shared<ChainGeometry>(geom.first_site(), dims,
                                         ChainGeometry::Boundary::Open);
}
}  // namespace

int default_window_halfwidth(const ChainGeometry& geom, int cut) {
  int left_margin = cut - geom.first_site();
  int right_margin = geom.last_site() - cut;
  int w = std::max(1, std::min(left_margin / 2, right_margin));
  return w;
}

ChainState pumped_state(const LoopSpec& psi, const IndexSettings& settings,
                        const EvolveOptions& opts) {
  if (psi.geom->is_ring())
    throw std::invalid_argument("pumped_state: truncation undefined on a ring; use open_shadow");
  if (psi.preparation && psi.has_dressing())
    throw std::invalid_argument("pumped_state: preparation plus dressing not supported");
  int cut = settings.cut;
  if (cut < psi.geom->first_site() + 1 || cut >= psi.geom->last_site())
    throw std::invalid_argument("pumped_state: cut edge must be interior");

  TDI full = psi.has_dressing() ? psi.effective_tdi(settings.dress_substeps) : psi.tdi;
  TDI truncated = full.truncate_left(cut);
  if (psi.preparation) {
    // preparation may cross the cut; evolve on the full chain then
    ChainState phi = psi.basepoint_state(opts);
    return evolve_state(phi, truncated, 0.0, 1.0, opts);
  }

  // the truncated schedule only touches {<= cut}: evolve the left segment
  GeometryPtr seg = left_segment(*psi.geom, cut);
  std::vector<int> seg_levels(psi.basepoint_levels.begin(),
                              psi.basepoint_levels.begin() + seg->num_sites());
  ChainState left = product_state(seg, seg_levels);
  left = evolve_state(left, truncated, 0.0, 1.0, opts);

  // assemble left (x) untouched right product part
  long right_dim = psi.geom->total_dim() / seg->total_dim();
  VectorXcd full_vec = VectorXcd::Zero(psi.geom->total_dim());
  long right_idx = 0;
  for (int p = seg->num_sites(); p < psi.geom->num_sites(); ++p)
    right_idx = right_idx * psi.geom->local_dim_pos(p) + psi.basepoint_levels[p];
  for (long l = 0; l < seg->total_dim(); ++l)
    full_vec(l * right_dim + right_idx) = left.vector()(l);
  return ChainState(psi.geom, std::move(full_vec));
}

DensityChargeResult charge_from_densities(const MatrixXcd& rho1, const MatrixXcd& rho2,
                                          const OnsiteRep& rep,
                                          const std::vector<int>& positions) {
  const SymmetryGroup& group = rep.group();
  DensityChargeResult out;
  auto z_of = [&](const MatrixXcd& rho, const GroupElement& g) {
    return (rho * rep.window_unitary(positions, g)).trace();
  };
  std::vector<long> comps(group.num_factors(), 0);
  for (int f = 0; f < group.num_factors(); ++f) {
    const auto& fac = group.factor(f);
    if (fac.kind == GroupFactor::Kind::Cyclic) {
      if (fac.order == 1) continue;
      std::vector<double> v(group.num_factors(), 0.0);
      v[f] = 1.0;
      GroupElement g = group.element(v);
      std::complex<double> z1 = z_of(rho1, g), z2 = z_of(rho2, g);
      out.min_unimodularity = std::min({out.min_unimodularity, std::abs(z1), std::abs(z2)});
      double x = -std::arg(z1 / z2) * fac.order / kTwoPi;
      long k = std::lround(x);
      out.residual = std::max(out.residual, std::abs(x - k));
      comps[f] = k;
    } else {
      const int T = 64;
      double acc = 0.0;
      std::complex<double> prev = 1.0;
      for (int t = 1; t <= T; ++t) {
        std::vector<double> v(group.num_factors(), 0.0);
        v[f] = kTwoPi * t / T;
        GroupElement g = group.element(v);
        std::complex<double> z1 = z_of(rho1, g), z2 = z_of(rho2, g);
        out.min_unimodularity = std::min({out.min_unimodularity, std::abs(z1), std::abs(z2)});
        std::complex<double> ratio = z1 / z2;
        acc += std::arg(ratio * std::conj(prev));
        prev = ratio;
      }
      double x = -acc / kTwoPi;
      long m = std::lround(x);
      out.residual = std::max(out.residual, std::abs(x - m));
      comps[f] = m;
    }
  }
  out.charge = group.charge(comps);
  return out;
}

WindowedCharge windowed_relative_charge(const ChainState& pumped, const ChainState& base,
                                        const OnsiteRep& rep, int w, ChargeMethod method,
                                        const IndexSettings& settings) {
  const ChainGeometry& geom = pumped.geometry();
  const SymmetryGroup& group = rep.group();
  int cut = settings.cut;
  int lo = std::max(geom.first_site(), cut - w);
  int hi = std::min(geom.last_site(), cut + w);
  MatrixXcd rho_p = reduced_density(pumped, lo, hi);
  MatrixXcd rho_b = reduced_density(base, lo, hi);

  WindowedCharge out;
  out.purity_defect = std::max(0.0, 1.0 - std::real((rho_p * rho_p).trace()));

  std::vector<int> positions;
  for (int s = lo; s <= hi; ++s) positions.push_back(geom.position(s));

  std::optional<DualCharge> phase_charge, u1_charge;

  bool want_phase = method == ChargeMethod::Phase || method == ChargeMethod::Both;
  bool want_u1 = (method == ChargeMethod::U1Charge || method == ChargeMethod::Both) &&
                 group.has_u1();
  if (method == ChargeMethod::U1Charge && !group.has_u1())
    throw std::invalid_argument("windowed_relative_charge: u1-charge method needs a U1 factor");

  if (want_phase) {
    DensityChargeResult dc = charge_from_densities(rho_p, rho_b, rep, positions);
    out.min_unimodularity = dc.min_unimodularity;
    if (out.min_unimodularity < settings.unimodular_min)
      throw std::runtime_error(
          "windowed_relative_charge: |Tr(rho U)| below threshold (window too small or state "
          "not locally pure): " +
          std::to_string(out.min_unimodularity));
    if (dc.residual > settings.rounding_tol)
      throw std::runtime_error("windowed_relative_charge: rounding residual too large: " +
                               std::to_string(dc.residual));
    phase_charge = dc.charge;
    out.phase_residual = dc.residual;
  }

  if (want_u1) {
    // difference of charge in [cut-w, cut] (left of the cut, in the window)
    std::vector<long> comps(group.num_factors(), 0);
    double res = 0.0;
    std::vector<int> left_positions;
    for (int s = lo; s <= cut; ++s) left_positions.push_back(geom.position(s));
    MatrixXcd rho_pl = reduced_density(pumped, lo, cut);
    MatrixXcd rho_bl = reduced_density(base, lo, cut);
    for (int f = 0; f < group.num_factors(); ++f) {
      if (group.factor(f).kind != GroupFactor::Kind::U1) continue;
      Eigen::VectorXd q = rep.window_charge_diagonal(left_positions, f);
      double qp = 0.0, qb = 0.0;
      for (long i = 0; i < rho_pl.rows(); ++i) {
        qp += std::real(rho_pl(i, i)) * q(i);
        qb += std::real(rho_bl(i, i)) * q(i);
      }
      double diff = qp - qb;
      long m = std::lround(diff);
      res = std::max(res, std::abs(diff - m));
      comps[f] = m;
    }
    if (res > settings.rounding_tol)
      throw std::runtime_error("windowed_relative_charge: u1-charge rounding residual too large");
    // cyclic components are not visible to this method; fill from phase if present
    if (phase_charge)
      for (int f = 0; f < group.num_factors(); ++f)
        if (group.factor(f).kind == GroupFactor::Kind::Cyclic)
          comps[f] = phase_charge->component(f);
    u1_charge = group.charge(comps);
    out.charge_residual = res;
  }

  if (phase_charge && u1_charge) {
    if (!(*phase_charge == *u1_charge))
      throw std::runtime_error("windowed_relative_charge: phase and u1-charge methods disagree: " +
                               phase_charge->to_string() + " vs " + u1_charge->to_string());
    out.charge = *phase_charge;
    out.method = "phase+u1-charge";
  } else if (phase_charge) {
    out.charge = *phase_charge;
    out.method = "phase";
  } else {
    out.charge = *u1_charge;
    out.method = "u1-charge";
  }
  return out;
}

IndexReport pump_index(const LoopSpec& psi, const IndexSettings& settings,
                       const EvolveOptions& opts) {
  auto tic = std::chrono::steady_clock::now();
  IndexReport rep;

  ClosureReport closure = verify_loop(psi, opts);
  rep.closure_fidelity = closure.fidelity;
  rep.closure_bulk_distance = closure.bulk_distance;
  rep.closure_pass = closure.pass;
  if (!closure.pass)
    throw std::runtime_error("pump_index: loop fails its closure policy");

  LoopSpec open = open_shadow(psi);
  ChainState base = open.basepoint_state(opts);
  ChainState pumped = pumped_state(open, settings, opts);

  int w = settings.window ? *settings.window
                          : default_window_halfwidth(*open.geom, settings.cut);
  ChargeMethod method = settings.method;
  if (method == ChargeMethod::Both && !psi.rep.group().has_u1()) method = ChargeMethod::Phase;
  WindowedCharge wc =
      windowed_relative_charge(pumped, base, open.rep, w, method, settings);

  rep.charge = wc.charge;
  rep.phase_residual = wc.phase_residual;
  rep.charge_residual = wc.charge_residual;
  rep.min_unimodularity = wc.min_unimodularity;
  rep.window_purity_defect = wc.purity_defect;
  rep.method = wc.method;
  rep.window_halfwidth = w;

  // left-boundary compensation: the total chain charge is conserved by the
  // truncated symmetric schedule, while the window sees the pumped charge
  const SymmetryGroup& group = psi.rep.group();
  double drift = 0.0;
  for (int f = 0; f < group.num_factors(); ++f) {
    if (group.factor(f).kind != GroupFactor::Kind::U1) continue;
    std::vector<int> all;
    for (int p = 0; p < open.geom->num_sites(); ++p) all.push_back(p);
    Eigen::VectorXd q = open.rep.window_charge_diagonal(all, f);
    auto expect = [&](const ChainState& st) {
      double acc = 0.0;
      for (long i = 0; i < st.vector().size(); ++i)
        acc += q(i) * std::norm(st.vector()(i));
      return acc;
    };
    drift = std::max(drift, std::abs(expect(pumped) - expect(base)));
  }
  rep.total_charge_drift = drift;

  rep.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - tic).count();
  return rep;
}

SweepResult stability_sweep(const LoopSpec& psi, DeformationFamily family,
                            const std::vector<double>& strengths,
                            const Interaction& dress_generator, const IndexSettings& settings,
                            const EvolveOptions& opts) {
  SweepResult out;
  IndexReport baseline = pump_index(psi, settings, opts);
  for (double eps : strengths) {
    LoopSpec deformed = psi;
    if (family == DeformationFamily::Dress) {
      deformed = dress(psi, dress_generator, eps);
    } else {
      // stop-and-go reparametrization with slope bounded by 1/(1-eps)
      double pause = std::min(0.45, eps * 0.5);
      deformed = reparametrize(
          psi, {{0.0, 0.0}, {pause, 0.0}, {1.0, 1.0}});
    }
    SweepRow row;
    row.strength = eps;
    row.report = pump_index(deformed, settings, opts);
    if (row.report.charge == baseline.charge) out.largest_unchanged = eps;
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace pump
