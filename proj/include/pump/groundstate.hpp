#pragma once

#include <Eigen/Dense>
#include <functional>

#include "pump/evolution.hpp"
#include "pump/interaction.hpp"

namespace pump {

struct GapReport {
  int num_sites = 0;
  double e0 = 0.0, e1 = 0.0;
  double gap = 0.0;
  bool degenerate = false;
  double residual = 0.0;  // eigensolver residual norm
};

// On-site projector complements F_i = 1 - |l_i><l_i|: annihilates exactly
// the product basepoint, all other spectrum at >= 1.
Interaction onsite_gap_hamiltonian(const ChainGeometry& geom, const std::vector<int>& levels);

// Lowest two eigenvalues of an interaction, by dense solve at small
// dimension and Lanczos with full reorthogonalization above.
GapReport finite_gap(const Interaction& h, const ChainGeometry& geom, double tol = 1e-10);

// Lowest eigenpair (for spectral flow).
struct GroundPair {
  double e0 = 0.0, e1 = 0.0;
  Eigen::VectorXcd ground;
  double residual = 0.0;
};
GroundPair lowest_eigenpair(const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& matvec,
                            long dim, double tol = 1e-10, int max_iter = 400,
                            unsigned seed = 12345);

// Dense Z_lambda(s) family of a loop TDI: Z(s) = alpha_H^{-1}(2s)[F] for
// s <= 1/2, the linear return to F afterwards, and
// Z_lambda = F + (1-lambda)(Z(s) - F).
Eigen::MatrixXcd z_family(const ChainGeometry& geom, const TDI& loop_tdi,
                          const Interaction& onsite_f, double lambda, double s,
                          long max_dim = 1 << 12);

struct SpectralFlowResult {
  std::vector<double> grid;
  std::vector<Eigen::VectorXcd> states;  // ground-state path, phase-aligned
  std::vector<double> gaps;
  double min_gap = 0.0;
  double endpoint_fidelity = 0.0;  // reintegrated flow vs final ground state
  double loop_fidelity = 0.0;      // reintegrated flow vs initial state
};

// Ground-state path of a Hermitian family M(z) on a grid via the exact
// finite-volume Kato generator K = i[dP, P]; fails if the gap drops below
// gap_min anywhere on the path.
SpectralFlowResult spectral_flow_kato(
    const std::function<Eigen::MatrixXcd(double)>& family, const std::vector<double>& grid,
    double gap_min = 0.1, double eig_tol = 1e-10);

}  // namespace pump
