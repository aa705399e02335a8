#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "pump/symmetry.hpp"

namespace pump {

// Zero-dimensional systems: a single finite Hilbert space with a diagonal
// unitary representation U(g) = diag(exp(-i h_l(g))) labelled by one
// DualCharge per basis level.
class ZeroDimRep {
 public:
  ZeroDimRep() = default;
  ZeroDimRep(SymmetryGroup group, std::vector<DualCharge> level_charges);

  // Tensor product of per-site charge lists (left factor slowest).
  static ZeroDimRep tensor(const std::vector<ZeroDimRep>& factors);

  const SymmetryGroup& group() const { return group_; }
  long dim() const { return static_cast<long>(levels_.size()); }
  const std::vector<DualCharge>& level_charges() const { return levels_; }

  Eigen::VectorXcd unitary_diagonal(const GroupElement& g) const;
  Eigen::VectorXd charge_diagonal(int factor) const;

  // Eigenvector defect of a vector under the representation: distance of
  // U(g) Psi from the ray of Psi, maximized over generators / charge ops.
  double eigenvector_defect(const Eigen::VectorXcd& psi) const;
  // Commutator defect of a matrix with the representation.
  double invariance_defect(const Eigen::MatrixXcd& a) const;

 private:
  SymmetryGroup group_;
  std::vector<DualCharge> levels_;
};

struct RelativeChargeResult {
  DualCharge charge;
  double max_residual = 0.0;      // per-factor rounding residual, in charge quanta
  double eigenvector_defect = 0.0;
};

// Relative charge of psi2 w.r.t. psi1, with the convention
// exp(-i h_rel(g)) = z2(g)/z1(g) where U(g) Psi_j = z_j(g) Psi_j: the level
// |h'> carries charge +h' relative to |0>. Cyclic components are read off at
// the generator; U1 components by phase-unwrapping over a theta grid.
RelativeChargeResult relative_charge(const Eigen::VectorXcd& psi1, const Eigen::VectorXcd& psi2,
                                     const ZeroDimRep& rep, double defect_tol = 1e-6,
                                     double rounding_tol = 0.1);

// Kato transport path. The whole construction lives in the 2-plane spanned
// by the orthonormal frame (omega, perp): Phi(s) = w(s) omega + c(s) perp
// with real coefficients, and the generator E(s) = i(|dPhi><Phi| - h.c.) is
// an in-plane rotation generator. In-plane rotations commute, so the
// time-ordered transport U_K(s) is exactly the plane rotation by
// theta(s) = atan2(c, w); apply() uses that closed form.
struct ZeroDimPath {
  std::vector<double> grid;
  Eigen::VectorXcd omega, perp;  // perp has size 0 for the trivial path
  std::vector<double> w, c;      // path coefficients, w^2 + c^2 = 1
  std::vector<double> dw, dc;    // derivative coefficients
  double sup_generator_norm = 0.0;
  double endpoint_fidelity = 1.0;  // |<target, U_K(1) omega>|

  bool trivial() const { return perp.size() == 0; }
  Eigen::VectorXcd state(size_t k) const;
  Eigen::MatrixXcd generator(size_t k) const;  // dense E(s_k), materialized
  double plane_angle(double s) const;          // accumulated rotation angle
  // U_K(s) v (or its adjoint): exact in-plane rotation.
  Eigen::VectorXcd apply(const Eigen::VectorXcd& v, double s, bool adjoint = false) const;
};

// Kato parallel transport carrying omega to psi along the explicit
// interpolation y(s) = a + (1-a)(1-(1-s)^2); the generator is the adiabatic
// generator of the projector path. sup||E|| <= 8 sqrt(1 - a^2).
ZeroDimPath kato_transport(const Eigen::VectorXcd& omega, const Eigen::VectorXcd& psi,
                           int grid_size = 1024);

// Same, with both states invariant and zero relative charge; the generator
// is then invariant automatically (asserted).
ZeroDimPath kato_transport_symmetric(const Eigen::VectorXcd& omega, const Eigen::VectorXcd& psi,
                                     const ZeroDimRep& rep, int grid_size = 1024);

// Loop of pure states with generator samples.
struct ZeroDimLoop {
  std::vector<double> grid;
  std::vector<Eigen::VectorXcd> states;  // Psi(s_k), Psi(last) prop Psi(0)
  double generator_norm = 0.0;           // |||E|||
};

// Construct a loop by integrating a generator (midpoint rule on the grid).
ZeroDimLoop loop_from_generator(const Eigen::VectorXcd& omega,
                                const std::vector<Eigen::MatrixXcd>& generator_samples,
                                const std::vector<double>& grid);

struct LoopContraction {
  std::vector<double> s_grid, lambda_grid;
  // states[l][k] = Psi_lambda(s); boundary rows/columns pinned to Omega
  std::vector<std::vector<Eigen::VectorXcd>> states;
  double sup_e_lambda = 0.0;  // sup over lambda of |||E_lambda|||
  double sup_f_s = 0.0;       // sup over s of |||F_s|||
  double min_normalizer = 1.0;
  double phase_lipschitz = 0.0;
  double max_invariance_defect = 0.0;  // generator commutator defect, G-invariant input
  double boundary_defect = 0.0;
};

// Two-parameter contraction of a zero-dimensional loop onto its basepoint
// following the phase-fix + affine-combination construction. Checks the
// measured generator sups against 80 |||E||| and 208 with grid slack.
LoopContraction contract_loop(const ZeroDimLoop& loop, const ZeroDimRep* rep = nullptr,
                              int lambda_grid_size = 65);

// i [dP, P] for a rank-one projector path sample; the generator transporting
// states with the convention dPsi/ds = -i E Psi.
Eigen::MatrixXcd kato_generator(const Eigen::MatrixXcd& p, const Eigen::MatrixXcd& pdot);

}  // namespace pump
