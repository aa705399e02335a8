#pragma once

#include <vector>

#include "pump/index.hpp"
#include "pump/pumps.hpp"
#include "pump/zerodim.hpp"

namespace pump {

struct SplitReport {
  bool ok = false;
  DualCharge charge_left, charge_right;    // relative charges of the halves
  double charge_residual = 0.0;
  double left_distance = 0.0;              // sqrt(1 - a^2) per segment
  double right_distance = 0.0;
  double left_generator_sup = 0.0;         // sup ||E_-||, bound 8 * distance
  double right_generator_sup = 0.0;
  std::vector<double> sample_times;
  std::vector<double> entropy_before;      // cut entropy of the original loop
  std::vector<double> entropy_after;       // cut entropy of the split loop
  double max_entropy_after = 0.0;
  double closure_fidelity = 0.0;           // split loop endpoint vs basepoint
  double closure_bulk_distance = 0.0;
};

// Sampled state path of the split loop phi o alpha_{H-B_j} o alpha_K^{-1}.
struct SplitLoop {
  std::vector<double> grid;
  std::vector<ChainState> states;
};

// Split the loop at the edge (j, j+1): evolve the halves, certify zero
// relative charge (fails with the half charges otherwise), close each half
// by symmetric Kato transport, and return the factorized loop.
std::pair<SplitLoop, SplitReport> split_single_edge(const LoopSpec& psi, int edge,
                                                    int num_samples = 16,
                                                    const EvolveOptions& opts = {});

struct MultiSplitReport {
  int block_size = 0;
  std::vector<int> block_edges;
  double f_tail_norm = 0.0;   // |||F - F~|||_f
  double z_tail_norm = 0.0;   // |||Z - Z~|||_f
  double w_norm = 0.0;        // |||W|||_f with W generating alpha_Z~ o alpha_Z^-1
  std::vector<double> f_quasiloop_defects;  // per block I_n, trace distance
  std::vector<double> z_quasiloop_defects;  // per block J_n
};

// Approximate splitting over blocks of size R: builds the single-edge
// corrections on every interior block edge, assembles F~ = H + sum E^(j),
// truncates to the split F and Z, and measures the discarded tails.
// Dense small-chain machinery (the corrections are materialized termwise
// through the interval decomposition).
MultiSplitReport multi_split(const LoopSpec& psi, int block_size, const FFunction& f,
                             int time_samples = 32, const EvolveOptions& opts = {});

struct QuasiLoopClosure {
  TDI correction;                       // blockwise transport generator
  std::vector<double> block_distances;  // sqrt(1-a^2) per block
  std::vector<double> generator_norms;  // ||E_n||, bound 8 * distance
  double closure_fidelity = 0.0;
};

// Close a blockwise-factorized quasi-loop: per-block symmetric parallel
// transport from the endpoint back to the basepoint.
QuasiLoopClosure close_quasiloop(const ChainState& endpoint, const LoopSpec& psi,
                                 const std::vector<std::pair<int, int>>& blocks,
                                 const EvolveOptions& opts = {});

struct BlockContractionReport {
  std::vector<double> block_e_norms;        // |||E||| per block
  std::vector<double> block_sup_e_lambda;   // measured, bound 80 |||E|||
  std::vector<double> block_sup_f_s;        // measured, bound 208
  double max_boundary_defect = 0.0;
};

// Contract a loop factorized over blocks by contracting each block's
// zero-dimensional loop.
BlockContractionReport contract_product_loop(const std::vector<ZeroDimLoop>& block_loops,
                                             const std::vector<ZeroDimRep>& block_reps);

// The associated loop nu = phi o ((alpha_K [] alpha_H) [] alpha_K^theta)
// with product basepoint phi, for a loop whose basepoint is phi o alpha_K(1).
LoopSpec associated_loop(const LoopSpec& psi, const TDI& preparation,
                         const EvolveOptions& opts = {});

}  // namespace pump
