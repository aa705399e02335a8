#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pump/pumps.hpp"

namespace pump {

enum class ChargeMethod { Phase, U1Charge, Both };

struct IndexSettings {
  int cut = 0;                       // truncation edge (cut, cut+1)
  std::optional<int> window;         // halfwidth w; default floor(|left margin|/2)
  ChargeMethod method = ChargeMethod::Both;
  double unimodular_min = 0.9;       // |Tr(rho U)| threshold for the phase method
  double rounding_tol = 0.1;         // charge quanta
  int dress_substeps = 256;          // materialization of dressed schedules
};

struct IndexReport {
  DualCharge charge;
  double phase_residual = 0.0;       // distance to nearest admissible phase, in quanta
  double charge_residual = 0.0;      // u1-charge method residual
  double min_unimodularity = 1.0;    // min |Tr(rho U(g))| seen by the phase method
  double window_purity_defect = 0.0; // 1 - Tr(rho_W'^2)
  double closure_fidelity = 0.0;
  double closure_bulk_distance = 0.0;
  bool closure_pass = false;
  bool methods_agree = true;
  std::string method = "phase";
  int window_halfwidth = 0;
  double total_charge_drift = 0.0;   // |<Q>_pumped - <Q>_base| over the whole chain
  double runtime_s = 0.0;
};

// Endpoint of the basepoint evolved under the left-truncated TDI. Open
// chains only; the truncated evolution acts on the left segment and is
// tensored with the untouched right part.
ChainState pumped_state(const LoopSpec& psi, const IndexSettings& settings = {},
                        const EvolveOptions& opts = {});

struct WindowedCharge {
  DualCharge charge;
  double phase_residual = 0.0;
  double charge_residual = 0.0;
  double min_unimodularity = 1.0;
  double purity_defect = 0.0;
  std::string method;
};

// Relative charge of Psi' w.r.t. Omega read from the window
// [cut-w, cut+w]: phase method compares Tr(rho'_W U_W(g)) with
// Tr(rho_W U_W(g)); u1-charge method rounds the difference of the
// <Q_[cut-w, cut]> expectations.
WindowedCharge windowed_relative_charge(const ChainState& pumped, const ChainState& base,
                                        const OnsiteRep& rep, int window_halfwidth,
                                        ChargeMethod method, const IndexSettings& settings = {});

// Phase-method extraction from a pair of reduced density matrices living on
// the listed site positions (used by the index and by the splitting
// certificates).
struct DensityChargeResult {
  DualCharge charge;
  double residual = 0.0;
  double min_unimodularity = 1.0;
};
DensityChargeResult charge_from_densities(const Eigen::MatrixXcd& rho1,
                                          const Eigen::MatrixXcd& rho2, const OnsiteRep& rep,
                                          const std::vector<int>& positions);

// Full pipeline: closure check, pumped state, windowed extraction; both
// methods cross-checked when the group has a U1 factor.
IndexReport pump_index(const LoopSpec& psi, const IndexSettings& settings = {},
                       const EvolveOptions& opts = {});

struct SweepRow {
  double strength = 0.0;
  IndexReport report;
};

enum class DeformationFamily { Dress, Reparametrize };

// Index across a loop-preserving deformation family; flags the largest
// strength with unchanged index.
struct SweepResult {
  std::vector<SweepRow> rows;
  double largest_unchanged = 0.0;
};
SweepResult stability_sweep(const LoopSpec& psi, DeformationFamily family,
                            const std::vector<double>& strengths,
                            const Interaction& dress_generator,
                            const IndexSettings& settings = {}, const EvolveOptions& opts = {});

int default_window_halfwidth(const ChainGeometry& geom, int cut);

}  // namespace pump
