#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

namespace pump {

// Compact abelian symmetry groups: U(1), Z_n, and finite products thereof.
// Every group is stored as a list of factors; a bare U(1) or Z_n is a
// one-factor product. Group elements are stored as one angle per factor,
// with Z_n elements constrained to multiples of 2*pi/n.

struct GroupFactor {
  enum class Kind { U1, Cyclic };
  Kind kind = Kind::U1;
  int order = 0;  // n for Cyclic, unused for U1

  bool operator==(const GroupFactor&) const = default;
};

class GroupElement;
class DualCharge;

class SymmetryGroup {
 public:
  SymmetryGroup() = default;
  explicit SymmetryGroup(std::vector<GroupFactor> factors);

  static SymmetryGroup u1();
  static SymmetryGroup cyclic(int n);
  static SymmetryGroup product(const std::vector<SymmetryGroup>& parts);

  int num_factors() const { return static_cast<int>(factors_.size()); }
  const GroupFactor& factor(int i) const { return factors_.at(i); }
  const std::vector<GroupFactor>& factors() const { return factors_; }

  bool has_u1() const;
  int first_u1_factor() const;  // -1 if none

  GroupElement identity() const;
  // U1 factor: value is the angle theta; Cyclic factor: value is the integer k.
  GroupElement element(const std::vector<double>& values) const;
  // Generators used for invariance checks: k=1 for each cyclic factor.
  // U1 factors are handled through charge operators, not sampled elements.
  std::vector<GroupElement> cyclic_generators() const;

  DualCharge zero_charge() const;
  DualCharge charge(const std::vector<long>& components) const;

  bool operator==(const SymmetryGroup& other) const { return factors_ == other.factors_; }
  std::string to_string() const;

 private:
  std::vector<GroupFactor> factors_;
};

// One angle per factor, normalized to [0, 2*pi). Cyclic factors carry
// theta = 2*pi*k/n.
class GroupElement {
 public:
  GroupElement() = default;
  GroupElement(const SymmetryGroup& group, std::vector<double> angles);

  const SymmetryGroup& group() const { return group_; }
  double angle(int factor) const { return angles_.at(factor); }
  // Cyclic index recovered from the angle.
  int cyclic_index(int factor) const;

  GroupElement compose(const GroupElement& other) const;  // group multiplication
  bool is_identity(double tol = 1e-12) const;

 private:
  SymmetryGroup group_;
  std::vector<double> angles_;
};

// Element of H^1(G) = Hom(G, S^1): an integer winding per U1 factor and a
// residue mod n per cyclic factor. Pairing value h(g) is taken mod 2*pi.
class DualCharge {
 public:
  DualCharge() = default;
  DualCharge(const SymmetryGroup& group, std::vector<long> components);

  const SymmetryGroup& group() const { return group_; }
  long component(int factor) const { return m_.at(factor); }
  const std::vector<long>& components() const { return m_; }

  bool is_zero() const;
  double pairing(const GroupElement& g) const;  // h(g) in [0, 2*pi)

  DualCharge operator+(const DualCharge& other) const;
  DualCharge operator-() const;
  DualCharge operator-(const DualCharge& other) const { return *this + (-other); }
  bool operator==(const DualCharge& other) const;

  std::string to_string() const;

 private:
  SymmetryGroup group_;
  std::vector<long> m_;  // cyclic components stored reduced mod n
};

DualCharge dual_add(const DualCharge& h1, const DualCharge& h2);

// On-site unitary representation with charge-labelled basis levels:
// U(g)|l> = exp(-i h_l(g)) |l> at every site.
class OnsiteRep {
 public:
  OnsiteRep() = default;
  OnsiteRep(SymmetryGroup group, std::vector<std::vector<DualCharge>> site_charges);

  // Same charge list at every site.
  static OnsiteRep uniform(const SymmetryGroup& group, const std::vector<DualCharge>& charges,
                           int num_sites);

  const SymmetryGroup& group() const { return group_; }
  int num_sites() const { return static_cast<int>(site_charges_.size()); }
  int local_dim(int site_pos) const { return static_cast<int>(site_charges_.at(site_pos).size()); }
  const std::vector<DualCharge>& charges(int site_pos) const { return site_charges_.at(site_pos); }

  // Diagonal unitary exp(-i h_l(g)) on one site.
  Eigen::MatrixXcd site_unitary(int site_pos, const GroupElement& g) const;
  // Diagonal unitary on a run of sites (tensor order = listed order).
  Eigen::MatrixXcd window_unitary(const std::vector<int>& site_positions,
                                  const GroupElement& g) const;
  // Diagonal of the charge operator for one factor on a run of sites.
  Eigen::VectorXd window_charge_diagonal(const std::vector<int>& site_positions,
                                         int factor) const;

  // Representation restricted to a single factor evaluated on matrices below.
 private:
  SymmetryGroup group_;
  std::vector<std::vector<DualCharge>> site_charges_;  // [site position][level]
};

// Commutator defect of a dense matrix A living on the listed site positions:
// max over cyclic generators of ||[U_W(g), A]|| together with ||[Q_W, A]||
// for every U1 factor. Used by is_invariant and symmetrize tests.
double invariance_defect(const Eigen::MatrixXcd& a, const OnsiteRep& rep,
                         const std::vector<int>& site_positions);

struct InvarianceCheck {
  bool invariant = false;
  double max_defect = 0.0;
};

InvarianceCheck is_invariant_matrix(const Eigen::MatrixXcd& a, const OnsiteRep& rep,
                                    const std::vector<int>& site_positions, double tol = 1e-9);

// Group average of a dense matrix on the listed sites. Exact charge-block
// projection: entries between basis states whose total charge differs (per
// U1 factor exactly, per cyclic factor mod n) are set to zero.
Eigen::MatrixXcd symmetrize_matrix(const Eigen::MatrixXcd& a, const OnsiteRep& rep,
                                   const std::vector<int>& site_positions);

}  // namespace pump
