#pragma once

#include <optional>
#include <vector>

#include "pump/evolution.hpp"
#include "pump/interaction.hpp"
#include "pump/symmetry.hpp"
#include "pump/zerodim.hpp"

namespace pump {

// Loop closure policy: exact overlap on rings, agreement of reduced density
// matrices on a central window on open chains.
struct ClosurePolicy {
  enum class Kind { RingExact, BulkWindow };
  Kind kind = Kind::RingExact;
  int window_halfwidth = 2;  // bulk window [-w, w] around the cut
  double tol = 1e-9;
};

// A symmetric dressing layer: the loop is deformed by conjugation with
// V(s) = exp(-i theta(s) iota(G)) where G is a symmetric anchored Hermitian
// interaction and theta(0) = theta(1) = 0, so V(0) = V(1) = 1.
struct DressLayer {
  Interaction generator;            // G
  double strength = 0.0;            // peak of theta
  int profile_samples = 256;        // piecewise sampling of theta
  double theta(double s) const;     // strength * sin^2(pi s)
};

// Basepoint product state + TDI + geometry + closure metadata. An optional
// preparation TDI turns the product state into a non-product basepoint
// (used by the associated-loop machinery); optional dressing layers deform
// the loop without moving the basepoint.
struct LoopSpec {
  GeometryPtr geom;
  OnsiteRep rep;
  std::vector<int> basepoint_levels;
  TDI tdi = TDI::zero();
  ClosurePolicy policy;
  std::vector<DressLayer> dressing;
  std::optional<TDI> preparation;  // basepoint = product evolved by this

  ChainState basepoint_state(const EvolveOptions& opts = {}) const;
  // Loop state at time s (dressing applied exactly at the evolution level).
  ChainState state_at(double s, const EvolveOptions& opts = {}) const;
  // The loop's TDI with all dressing layers materialized into local terms
  // (conjugated terms are re-localized into ball-supported pieces so that
  // truncation at a cut acts on genuinely local terms).
  TDI effective_tdi(int substeps_per_unit = 256) const;
  bool has_dressing() const { return !dressing.empty(); }
};

// The two-parameter family h labelling the example pump: site basis
// {|0>, |-h>, |+h>} with charges (0, -h, +h); E(h) terms pi(a + a*) on even
// pairs during [0,1/2], O(-h) on odd pairs during [1/2,1].
LoopSpec example_pump(const SymmetryGroup& group, const DualCharge& h, GeometryPtr geom);
// Rep used by the example pump (needed to build compatible companions).
OnsiteRep example_pump_rep(const SymmetryGroup& group, const DualCharge& h, int num_sites);

// Pump of charge m*h0 with m in {-1, 0, +1}, realized in the fixed
// representation of example_pump(h0): all three share sites, charges and
// basepoint, so they can be concatenated with each other.
LoopSpec example_pump_multiple(const SymmetryGroup& group, const DualCharge& h0, int multiple,
                               GeometryPtr geom);

LoopSpec constant_loop(GeometryPtr geom, const OnsiteRep& rep,
                       const std::vector<int>& basepoint_levels);

// (psi2 [] psi1)(s): runs psi1 on [0,1/2], then psi2. Same basepoint needed.
LoopSpec concat(const LoopSpec& psi2, const LoopSpec& psi1);

// psi^theta: generated by -H(1-s), same basepoint, index negates.
LoopSpec time_reverse(const LoopSpec& psi);

// Interleaved tensor product: site i of both chains merge into one site of
// dimension d*d'; the TDI is the sum of the two embeddings.
LoopSpec stack(const LoopSpec& psi1, const LoopSpec& psi2);

// Time reparametrization by a piecewise-linear j with j(0)=0, j(1)=1.
LoopSpec reparametrize(const LoopSpec& psi, const std::vector<std::pair<double, double>>& knots);

// Symmetric dressing: conjugate the loop by V(s) as above. The generator is
// symmetrized and checked; V(1)=1 holds by construction of theta.
LoopSpec dress(const LoopSpec& psi, const Interaction& generator, double strength);

struct ClosureReport {
  ClosurePolicy::Kind policy;
  double fidelity = 0.0;        // ring policy: |<Psi(0), Psi(1)>|
  double bulk_distance = 0.0;   // bulk policy: trace distance on the window
  bool pass = false;
};
ClosureReport verify_loop(const LoopSpec& psi, const EvolveOptions& opts = {});

// Open-chain shadow of a ring loop: same sites, open boundary, wrap-crossing
// terms dropped. Open loops are returned unchanged.
LoopSpec open_shadow(const LoopSpec& psi);

// Check that the basepoint's rank-one projector is invariant.
double basepoint_invariance_defect(const LoopSpec& psi);

// Zero-dimensional representation of a window of the chain (tensor of the
// per-site level charges).
ZeroDimRep window_rep(const OnsiteRep& rep, const ChainGeometry& geom, int first, int last);

}  // namespace pump
