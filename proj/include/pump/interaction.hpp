#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <vector>

#include "pump/chainspace.hpp"
#include "pump/symmetry.hpp"

namespace pump {

// Decay functions from the class F. The working family is the stretched
// exponential f(r) = C exp(-c r^beta); a tabulated head with a stretched
// tail is supported for empirically fitted profiles.
class FFunction {
 public:
  FFunction() = default;
  static FFunction stretched_exp(double C, double c, double beta);
  static FFunction table(std::vector<double> head, double C, double c, double beta);
  // f(r) = exp(-r)
  static FFunction standard() { return stretched_exp(1.0, 1.0, 1.0); }

  double operator()(double r) const;
  double C() const { return C_; }
  double c() const { return c_; }
  double beta() const { return beta_; }

 private:
  std::vector<double> head_;  // values at r = 1, 2, ...; may be empty
  double C_ = 1.0, c_ = 1.0, beta_ = 1.0;
};

// One Hermitian term on a support. Matrices are shared so that interactions
// can be copied across schedule pieces cheaply.
struct Term {
  Support support;
  std::shared_ptr<const Eigen::MatrixXcd> matrix;

  Term() = default;
  Term(Support s, Eigen::MatrixXcd m);
  Term(Support s, std::shared_ptr<const Eigen::MatrixXcd> m)
      : support(std::move(s)), matrix(std::move(m)) {}
  double norm() const { return matrix->operatorNorm(); }
};

// Finite collection of Hermitian terms labelled by supports.
class Interaction {
 public:
  Interaction() = default;
  explicit Interaction(std::vector<Term> terms) : terms_(std::move(terms)) {}

  static Interaction zero() { return Interaction(); }

  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  int num_terms() const { return static_cast<int>(terms_.size()); }

  void add_term(Term t) { terms_.push_back(std::move(t)); }
  void add_term(Support s, Eigen::MatrixXcd m) { terms_.emplace_back(std::move(s), std::move(m)); }

  Interaction operator+(const Interaction& other) const;
  Interaction operator*(double scale) const;
  Interaction operator-() const { return (*this) * -1.0; }

  // Merge terms with identical supports.
  Interaction compacted(double drop_below = 0.0) const;

  // Checks Hermiticity of every term and support validity on the geometry.
  void validate(const ChainGeometry& geom, double herm_tol = 1e-12) const;

  // sum_S H_S embedded, as action on a vector.
  Eigen::VectorXcd apply(const ChainGeometry& geom, const Eigen::VectorXcd& in) const;
  // Dense iota(H) (guarded by the cap).
  Eigen::MatrixXcd to_dense(const ChainGeometry& geom, long max_dim = 1 << 13) const;

  // Crude upper bound sum_S ||H_S|| used for integrator step control.
  double total_norm_bound() const;

  Interaction symmetrized(const OnsiteRep& rep, const ChainGeometry& geom) const;

 private:
  std::vector<Term> terms_;
};

// Tensor a supported matrix with identities so it lives on a larger run.
Eigen::MatrixXcd extend_to_support(const Support& from, const Eigen::MatrixXcd& m,
                                   const Support& to, const ChainGeometry& geom);

// ||H||_f = sup_j sum_{S contains j} ||H_S|| / f(1 + diam S)
double f_norm(const Interaction& h, const FFunction& f);
// ||H||_{X,f}: as above when every term support meets X, +infinity otherwise.
double anchored_norm(const Interaction& h, const Support& x, const FFunction& f);

Interaction weak_sum(const std::vector<Interaction>& parts);

// Commutator interaction: terms [H_{S1}, H'_{S2}] on the interval hull of
// overlapping S1, S2.
Interaction commutator_interaction(const Interaction& h1, const Interaction& h2,
                                   const ChainGeometry& geom);

// Piecewise-constant schedule on [0,1]; the canonical computable form.
class TDI {
 public:
  struct Piece {
    double t0 = 0.0, t1 = 1.0;
    Interaction interaction;
  };

  TDI() = default;
  explicit TDI(std::vector<Piece> pieces);

  // Constant schedule H(s) = h.
  static TDI constant(Interaction h);
  static TDI zero() { return constant(Interaction::zero()); }
  // Linear interpolation between interaction knots at given times, sampled
  // into piecewise-constant form with `pieces_per_unit` midpoint samples.
  static TDI from_ramp(const std::vector<std::pair<double, Interaction>>& knots,
                       int pieces_per_unit = 256);

  const std::vector<Piece>& pieces() const { return pieces_; }
  int num_pieces() const { return static_cast<int>(pieces_.size()); }
  const Interaction& at_time(double s) const;

  bool is_zero() const;
  void validate(const ChainGeometry& geom) const;

  TDI operator+(const TDI& other) const;  // common refinement, summed pieces
  TDI operator*(double scale) const;

  // Keep exactly the terms with support in {<= cut}; drops crossing terms
  // and terms strictly right of the cut.
  TDI truncate_left(int cut = 0) const;
  // Keep terms matching a predicate; schedule unchanged.
  TDI filter_terms(const std::function<bool(const Term&)>& keep) const;
  // Time reversal generator -H(1-s).
  TDI reversed() const;
  // Terms with support meeting the given set scaled/selected.
  TDI drop_wrapping_terms(const ChainGeometry& ring) const;

  // Common-refinement helper: breakpoints of both schedules merged.
  static std::vector<double> merged_grid(const TDI& a, const TDI& b);

 private:
  std::vector<Piece> pieces_;
};

struct SplitParts {
  TDI left;      // supports within {<= j}
  TDI right;     // supports within {> j}
  TDI crossing;  // B_j
};
// H = H_{<=j} + H_{>j} + B_j, termwise.
SplitParts split_decomposition(const TDI& h, int edge);

double tdi_norm(const TDI& h, const FFunction& f);     // sup_s ||H(s)||_f
double tdi_l1_norm(const TDI& h, const FFunction& f);  // integral of ||H(s)||_f
double tdi_anchored_norm(const TDI& h, const Support& x, const FFunction& f);
double tdi_anchored_l1_norm(const TDI& h, const Support& x, const FFunction& f);

TDI symmetrize(const TDI& h, const OnsiteRep& rep, const ChainGeometry& geom);

}  // namespace pump
