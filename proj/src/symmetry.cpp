#include "pump/symmetry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace pump {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0) t += kTwoPi;
  // fmod can return exactly 2*pi after the correction when theta is a tiny
  // negative number
  if (t >= kTwoPi) t -= kTwoPi;
  return t;
}

long mod_positive(long k, long n) {
  long r = k % n;
  if (r < 0) r += n;
  return r;
}
}  // namespace

SymmetryGroup::SymmetryGroup(std::vector<GroupFactor> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw std::invalid_argument("SymmetryGroup: needs at least one factor");
  for (const auto& f : factors_) {
    if (f.kind == GroupFactor::Kind::Cyclic && f.order < 1)
      throw std::invalid_argument("SymmetryGroup: cyclic order must be >= 1");
  }
}

SymmetryGroup SymmetryGroup::u1() { return SymmetryGroup({GroupFactor{GroupFactor::Kind::U1, 0}}); }

SymmetryGroup SymmetryGroup::cyclic(int n) {
  return SymmetryGroup({GroupFactor{GroupFactor::Kind::Cyclic, n}});
}

SymmetryGroup SymmetryGroup::product(const std::vector<SymmetryGroup>& parts) {
  std::vector<GroupFactor> factors;
  for (const auto& p : parts)
    factors.insert(factors.end(), p.factors_.begin(), p.factors_.end());
  return SymmetryGroup(std::move(factors));
}

bool SymmetryGroup::has_u1() const { return first_u1_factor() >= 0; }

int SymmetryGroup::first_u1_factor() const {
  for (int i = 0; i < num_factors(); ++i)
    if (factors_[i].kind == GroupFactor::Kind::U1) return i;
  return -1;
}

GroupElement SymmetryGroup::identity() const {
  return GroupElement(*this, std::vector<double>(factors_.size(), 0.0));
}

GroupElement SymmetryGroup::element(const std::vector<double>& values) const {
  if (static_cast<int>(values.size()) != num_factors())
    throw std::invalid_argument("SymmetryGroup::element: wrong number of components");
  std::vector<double> angles(values.size());
  for (int i = 0; i < num_factors(); ++i) {
    if (factors_[i].kind == GroupFactor::Kind::U1) {
      angles[i] = wrap_angle(values[i]);
    } else {
      long k = mod_positive(std::lround(values[i]), factors_[i].order);
      angles[i] = kTwoPi * static_cast<double>(k) / factors_[i].order;
    }
  }
  return GroupElement(*this, std::move(angles));
}

std::vector<GroupElement> SymmetryGroup::cyclic_generators() const {
  std::vector<GroupElement> gens;
  for (int i = 0; i < num_factors(); ++i) {
    if (factors_[i].kind != GroupFactor::Kind::Cyclic || factors_[i].order == 1) continue;
    std::vector<double> v(num_factors(), 0.0);
    v[i] = 1.0;
    gens.push_back(element(v));
  }
  return gens;
}

DualCharge SymmetryGroup::zero_charge() const {
  return DualCharge(*this, std::vector<long>(factors_.size(), 0));
}

DualCharge SymmetryGroup::charge(const std::vector<long>& components) const {
  return DualCharge(*this, components);
}

std::string SymmetryGroup::to_string() const {
  std::ostringstream os;
  for (int i = 0; i < num_factors(); ++i) {
    if (i) os << " x ";
    if (factors_[i].kind == GroupFactor::Kind::U1)
      os << "U(1)";
    else
      os << "Z" << factors_[i].order;
  }
  return os.str();
}

GroupElement::GroupElement(const SymmetryGroup& group, std::vector<double> angles)
    : group_(group), angles_(std::move(angles)) {
  if (static_cast<int>(angles_.size()) != group_.num_factors())
    throw std::invalid_argument("GroupElement: component count mismatch");
  for (auto& a : angles_) a = wrap_angle(a);
}

int GroupElement::cyclic_index(int factor) const {
  const auto& f = group_.factor(factor);
  if (f.kind != GroupFactor::Kind::Cyclic)
    throw std::invalid_argument("GroupElement::cyclic_index: not a cyclic factor");
  return static_cast<int>(mod_positive(std::lround(angles_[factor] * f.order / kTwoPi), f.order));
}

GroupElement GroupElement::compose(const GroupElement& other) const {
  if (!(group_ == other.group_)) throw std::invalid_argument("GroupElement::compose: group mismatch");
  std::vector<double> angles(angles_.size());
  for (size_t i = 0; i < angles_.size(); ++i) angles[i] = wrap_angle(angles_[i] + other.angles_[i]);
  return GroupElement(group_, std::move(angles));
}

bool GroupElement::is_identity(double tol) const {
  for (double a : angles_) {
    double d = std::min(a, kTwoPi - a);
    if (d > tol) return false;
  }
  return true;
}

DualCharge::DualCharge(const SymmetryGroup& group, std::vector<long> components)
    : group_(group), m_(std::move(components)) {
  if (static_cast<int>(m_.size()) != group_.num_factors())
    throw std::invalid_argument("DualCharge: component count mismatch");
  for (int i = 0; i < group_.num_factors(); ++i) {
    const auto& f = group_.factor(i);
    if (f.kind == GroupFactor::Kind::Cyclic) m_[i] = mod_positive(m_[i], f.order);
  }
}

bool DualCharge::is_zero() const {
  for (long m : m_)
    if (m != 0) return false;
  return true;
}

double DualCharge::pairing(const GroupElement& g) const {
  if (!(group_ == g.group())) throw std::invalid_argument("DualCharge::pairing: group mismatch");
  double total = 0.0;
  for (int i = 0; i < group_.num_factors(); ++i)
    total += static_cast<double>(m_[i]) * g.angle(i);
  return wrap_angle(total);
}

DualCharge DualCharge::operator+(const DualCharge& other) const {
  if (!(group_ == other.group_)) throw std::invalid_argument("dual_add: group mismatch");
  std::vector<long> m(m_.size());
  for (size_t i = 0; i < m_.size(); ++i) m[i] = m_[i] + other.m_[i];
  return DualCharge(group_, std::move(m));
}

DualCharge DualCharge::operator-() const {
  std::vector<long> m(m_.size());
  for (size_t i = 0; i < m_.size(); ++i) m[i] = -m_[i];
  return DualCharge(group_, std::move(m));
}

bool DualCharge::operator==(const DualCharge& other) const {
  return group_ == other.group_ && m_ == other.m_;
}

std::string DualCharge::to_string() const {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < m_.size(); ++i) {
    if (i) os << ",";
    os << m_[i];
  }
  os << ")";
  return os.str();
}

DualCharge dual_add(const DualCharge& h1, const DualCharge& h2) { return h1 + h2; }

OnsiteRep::OnsiteRep(SymmetryGroup group, std::vector<std::vector<DualCharge>> site_charges)
    : group_(std::move(group)), site_charges_(std::move(site_charges)) {
  for (const auto& levels : site_charges_) {
    if (levels.empty()) throw std::invalid_argument("OnsiteRep: empty level list");
    for (const auto& h : levels)
      if (!(h.group() == group_)) throw std::invalid_argument("OnsiteRep: charge group mismatch");
  }
}

OnsiteRep OnsiteRep::uniform(const SymmetryGroup& group, const std::vector<DualCharge>& charges,
                             int num_sites) {
  return OnsiteRep(group, std::vector<std::vector<DualCharge>>(num_sites, charges));
}

Eigen::MatrixXcd OnsiteRep::site_unitary(int site_pos, const GroupElement& g) const {
  const auto& levels = site_charges_.at(site_pos);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(levels.size(), levels.size());
  for (size_t l = 0; l < levels.size(); ++l)
    u(l, l) = std::exp(std::complex<double>(0.0, -levels[l].pairing(g)));
  return u;
}

Eigen::MatrixXcd OnsiteRep::window_unitary(const std::vector<int>& site_positions,
                                           const GroupElement& g) const {
  long dim = 1;
  for (int p : site_positions) dim *= local_dim(p);
  Eigen::VectorXcd diag = Eigen::VectorXcd::Ones(dim);
  long stride = dim;
  for (int p : site_positions) {
    int d = local_dim(p);
    stride /= d;
    for (long idx = 0; idx < dim; ++idx) {
      int level = static_cast<int>((idx / stride) % d);
      diag(idx) *= std::exp(std::complex<double>(0.0, -site_charges_[p][level].pairing(g)));
    }
  }
  return diag.asDiagonal();
}

Eigen::VectorXd OnsiteRep::window_charge_diagonal(const std::vector<int>& site_positions,
                                                  int factor) const {
  long dim = 1;
  for (int p : site_positions) dim *= local_dim(p);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(dim);
  long stride = dim;
  for (int p : site_positions) {
    int d = local_dim(p);
    stride /= d;
    for (long idx = 0; idx < dim; ++idx) {
      int level = static_cast<int>((idx / stride) % d);
      diag(idx) += static_cast<double>(site_charges_[p][level].component(factor));
    }
  }
  return diag;
}

double invariance_defect(const Eigen::MatrixXcd& a, const OnsiteRep& rep,
                         const std::vector<int>& site_positions) {
  double defect = 0.0;
  for (const auto& g : rep.group().cyclic_generators()) {
    Eigen::MatrixXcd u = rep.window_unitary(site_positions, g);
    defect = std::max(defect, (u * a - a * u).operatorNorm());
  }
  for (int f = 0; f < rep.group().num_factors(); ++f) {
    if (rep.group().factor(f).kind != GroupFactor::Kind::U1) continue;
    Eigen::VectorXd q = rep.window_charge_diagonal(site_positions, f);
    Eigen::MatrixXcd qa = q.asDiagonal() * a - a * q.cast<std::complex<double>>().asDiagonal();
    defect = std::max(defect, qa.operatorNorm());
  }
  return defect;
}

InvarianceCheck is_invariant_matrix(const Eigen::MatrixXcd& a, const OnsiteRep& rep,
                                    const std::vector<int>& site_positions, double tol) {
  double d = invariance_defect(a, rep, site_positions);
  return {d <= tol, d};
}

Eigen::MatrixXcd symmetrize_matrix(const Eigen::MatrixXcd& a, const OnsiteRep& rep,
                                   const std::vector<int>& site_positions) {
  const auto& group = rep.group();
  long dim = a.rows();
  // Per-factor total charge of each basis state of the window.
  std::vector<Eigen::VectorXd> charge(group.num_factors());
  for (int f = 0; f < group.num_factors(); ++f)
    charge[f] = rep.window_charge_diagonal(site_positions, f);

  Eigen::MatrixXcd out = a;
  for (long i = 0; i < dim; ++i) {
    for (long j = 0; j < dim; ++j) {
      for (int f = 0; f < group.num_factors(); ++f) {
        long diff = std::lround(charge[f](i) - charge[f](j));
        const auto& fac = group.factor(f);
        if (fac.kind == GroupFactor::Kind::Cyclic) diff %= fac.order;
        if (diff != 0) {
          out(i, j) = 0.0;
          break;
        }
      }
    }
  }
  return out;
}

}  // namespace pump
