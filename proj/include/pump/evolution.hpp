#pragma once

#include <Eigen/Dense>

#include "pump/chainspace.hpp"
#include "pump/interaction.hpp"

namespace pump {

// Convention: states solve dPsi/ds = -i H(s) Psi, so that
// <Psi(s), A Psi(s)> = <Psi(0), alpha_H(s)[A] Psi(0)> with
// alpha_H(s)[A] = U(s)^dag A U(s) and dU/ds = -i H(s) U.

enum class Integrator { Auto, DensePiecewise, Krylov, RK4 };

struct EvolveOptions {
  Integrator integrator = Integrator::Auto;
  double max_step = 0.5;         // largest substep inside one schedule piece
  double unitarity_tol = 1e-10;  // |norm - 1| guard after each piece
  long dense_threshold = 512;    // dense eigensolver below this dimension
  int krylov_max_dim = 48;
};

// Psi(s) from Psi(u) under the TDI schedule (u <= s).
ChainState evolve_state(const ChainState& psi, const TDI& h, double u, double s,
                        const EvolveOptions& opts = {});
// Adjoint propagation: applies U(s,u)^dag (the inverse evolution of states).
ChainState evolve_state_adjoint(const ChainState& psi, const TDI& h, double u, double s,
                                const EvolveOptions& opts = {});

// Dense time-ordered propagator U(s,u) with U(u,u) = 1 (small dimensions).
Eigen::MatrixXcd propagator_dense(const ChainGeometry& geom, const TDI& h, double u, double s,
                                  long max_dim = 1 << 13);

// Heisenberg evolution of an embedded operator: alpha_H(s)[A] = U^dag A U,
// returned as a dense full-chain matrix (support grows to the whole chain).
Eigen::MatrixXcd evolve_operator_dense(const ChainGeometry& geom, const TDI& h,
                                       const EmbeddedOperator& a, double s,
                                       long max_dim = 1 << 13);

// Evolution from time u to time s as a reusable object (the cocycle).
class Cocycle {
 public:
  Cocycle(GeometryPtr geom, TDI h, double u, double s, EvolveOptions opts = {});
  ChainState apply(const ChainState& psi) const;       // U(s,u) Psi
  ChainState apply_adjoint(const ChainState& psi) const;
  Eigen::MatrixXcd dense(long max_dim = 1 << 13) const;
  double u() const { return u_; }
  double s() const { return s_; }

 private:
  GeometryPtr geom_;
  TDI h_;
  double u_, s_;
  EvolveOptions opts_;
};

// Exact piecewise-constant generator of the inverse evolution: on each piece,
// -U(t_k)^dag H_k U(t_k). Terms become full-chain supported; dense only.
TDI inverse_tdi(const ChainGeometry& geom, const TDI& h, long max_dim = 1 << 13);

// -H(1-s); exact.
TDI reverse_tdi(const TDI& h);

// H1(s) + alpha_{H1}^{-1}(s)[H2(s)], materialized with midpoint sampling on
// `substeps` subintervals; generates alpha_{H2} o alpha_{H1}. Dense only.
TDI compose_tdi(const ChainGeometry& geom, const TDI& h1, const TDI& h2, int substeps = 1024,
                long max_dim = 1 << 13);

// alpha_{H1}(s)[H2(s) - H1(s)], midpoint-sampled; generates
// alpha_{H2} o alpha_{H1}^{-1}. Dense only.
TDI transported_difference_tdi(const ChainGeometry& geom, const TDI& h1, const TDI& h2,
                               int substeps = 1024, long max_dim = 1 << 13);

// Time-rescaled concatenation: 2 H1(2s) then 2 H2(2s-1); runs H1 first, so
// at s=1 it generates alpha_{H2}(1) o alpha_{H1}(1). Exact.
TDI concatenate_tdi(const TDI& h1, const TDI& h2);

// Reparametrized schedule j'(s) H(j(s)) for piecewise-linear j with
// j(0)=0, j(1)=1 given by (s, j(s)) knots. Exact for piecewise-constant H.
TDI reparametrize_tdi(const TDI& h, const std::vector<std::pair<double, double>>& knots);

// tau_{X^c}[A]: normalized partial trace over the complement of X, tensored
// back with identity; returned on the support X.
EmbeddedOperator conditional_expectation(const EmbeddedOperator& a, const Support& x,
                                         const ChainGeometry& geom);

// Weights ||A_{j,k}|| of the ball decomposition around site j:
// A_{j,0} = tau_{B_0^c}[A], A_{j,k} = tau_{B_k^c}[A] - tau_{B_{k-1}^c}[A].
struct LocalityProfile {
  std::vector<double> weights;               // per radius k = 0,1,...
  std::vector<EmbeddedOperator> components;  // the A_{j,k}
  double reconstruction_error = 0.0;         // ||sum_k A_{j,k} - A||
};
LocalityProfile locality_profile(const EmbeddedOperator& a, int center_site,
                                 const ChainGeometry& geom);

// Interval (Moebius) decomposition of a dense chain operator into terms
// supported on intervals; exact up to the identity component tr(M)/D.
Interaction localize_operator(const Eigen::MatrixXcd& m, const ChainGeometry& geom,
                              double drop_below = 1e-13);

// || alpha_{H1}(s)[A] - alpha_{H2}(s)[A] || computed densely.
double duhamel_difference(const ChainGeometry& geom, const TDI& h1, const TDI& h2,
                          const EmbeddedOperator& a, double s, long max_dim = 1 << 13);

// Expectation of an interaction in a state (sum over embedded terms).
double interaction_expectation(const Interaction& h, const ChainState& psi);

}  // namespace pump
