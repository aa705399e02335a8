#include "pump/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace pump {

FFunction FFunction::stretched_exp(double C, double c, double beta) {
  if (C <= 0 || c <= 0 || beta <= 0 || beta > 1)
    throw std::invalid_argument("FFunction: need C>0, c>0, beta in (0,1]");
  FFunction f;
  f.C_ = C;
  f.c_ = c;
  f.beta_ = beta;
  return f;
}

FFunction FFunction::table(std::vector<double> head, double C, double c, double beta) {
  FFunction f = stretched_exp(C, c, beta);
  for (size_t i = 0; i < head.size(); ++i) {
    if (head[i] <= 0) throw std::invalid_argument("FFunction: table values must be positive");
    if (i > 0 && head[i] > head[i - 1])
      throw std::invalid_argument("FFunction: table must be non-increasing");
  }
  f.head_ = std::move(head);
  return f;
}

double FFunction::operator()(double r) const {
  if (r < 1.0) r = 1.0;
  size_t idx = static_cast<size_t>(std::llround(r)) - 1;
  if (idx < head_.size()) return head_[idx];
  return C_ * std::exp(-c_ * std::pow(r, beta_));
}

Term::Term(Support s, Eigen::MatrixXcd m)
    : support(std::move(s)), matrix(std::make_shared<const Eigen::MatrixXcd>(std::move(m))) {}

Interaction Interaction::operator+(const Interaction& other) const {
  Interaction out = *this;
  for (const auto& t : other.terms_) out.terms_.push_back(t);
  return out;
}

Interaction Interaction::operator*(double scale) const {
  Interaction out;
  for (const auto& t : terms_) out.add_term(t.support, Eigen::MatrixXcd(*t.matrix * scale));
  return out;
}

Interaction Interaction::compacted(double drop_below) const {
  std::map<std::vector<int>, Eigen::MatrixXcd> merged;
  for (const auto& t : terms_) {
    auto it = merged.find(t.support.sites);
    if (it == merged.end())
      merged.emplace(t.support.sites, *t.matrix);
    else
      it->second += *t.matrix;
  }
  Interaction out;
  for (auto& [sites, m] : merged) {
    if (m.operatorNorm() <= drop_below) continue;
    out.add_term(Support(sites), std::move(m));
  }
  return out;
}

void Interaction::validate(const ChainGeometry& geom, double herm_tol) const {
  for (const auto& t : terms_) {
    t.support.validate(geom);
    long dim = 1;
    for (int s : t.support.sites) dim *= geom.local_dim_at(s);
    if (t.matrix->rows() != dim || t.matrix->cols() != dim)
      throw std::invalid_argument("Interaction: term dimension does not match support");
    double scale = std::max(1.0, t.matrix->norm());
    if ((*t.matrix - t.matrix->adjoint()).norm() > herm_tol * scale)
      throw std::invalid_argument("Interaction: term is not Hermitian");
  }
}

Eigen::VectorXcd Interaction::apply(const ChainGeometry& geom, const Eigen::VectorXcd& in) const {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(in.size());
  for (const auto& t : terms_) out += apply_to_vector(t.support, *t.matrix, geom, in);
  return out;
}

Eigen::MatrixXcd Interaction::to_dense(const ChainGeometry& geom, long max_dim) const {
  if (geom.total_dim() > max_dim)
    throw std::invalid_argument("Interaction::to_dense: dimension exceeds cap");
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(geom.total_dim(), geom.total_dim());
  for (const auto& t : terms_) full += embed_dense(t.support, *t.matrix, geom, max_dim);
  return full;
}

double Interaction::total_norm_bound() const {
  double s = 0.0;
  for (const auto& t : terms_) s += t.norm();
  return s;
}

Interaction Interaction::symmetrized(const OnsiteRep& rep, const ChainGeometry& geom) const {
  Interaction out;
  for (const auto& t : terms_) {
    std::vector<int> pos;
    for (int s : t.support.sites) pos.push_back(geom.position(s));
    out.add_term(t.support, symmetrize_matrix(*t.matrix, rep, pos));
  }
  return out;
}

double f_norm(const Interaction& h, const FFunction& f) {
  std::map<int, double> per_site;
  for (const auto& t : h.terms()) {
    double w = t.norm() / f(1.0 + t.support.diam());
    for (int s : t.support.sites) per_site[s] += w;
  }
  double sup = 0.0;
  for (const auto& [s, w] : per_site) sup = std::max(sup, w);
  return sup;
}

double anchored_norm(const Interaction& h, const Support& x, const FFunction& f) {
  for (const auto& t : h.terms())
    if (!t.support.overlaps(x)) return std::numeric_limits<double>::infinity();
  return f_norm(h, f);
}

Interaction weak_sum(const std::vector<Interaction>& parts) {
  Interaction out;
  for (const auto& p : parts)
    for (const auto& t : p.terms()) out.add_term(t);
  return out.compacted();
}

Eigen::MatrixXcd extend_to_support(const Support& from, const Eigen::MatrixXcd& m,
                                   const Support& to, const ChainGeometry& geom) {
  long run_dim = 1;
  for (int s : to.sites) run_dim *= geom.local_dim_at(s);
  // strides of each run site within the run-local index
  std::vector<long> run_strides(to.sites.size());
  long acc = run_dim;
  for (size_t i = 0; i < to.sites.size(); ++i) {
    acc /= geom.local_dim_at(to.sites[i]);
    run_strides[i] = acc;
  }
  // strides of the source index
  long sub_dim = m.rows();
  std::vector<long> sub_strides(from.sites.size());
  long sacc = sub_dim;
  for (size_t i = 0; i < from.sites.size(); ++i) {
    sacc /= geom.local_dim_at(from.sites[i]);
    sub_strides[i] = sacc;
  }
  for (int s : from.sites)
    if (!to.contains(s))
      throw std::invalid_argument("extend_to_support: target does not contain source");
  // map run-local index -> (source index, complement index)
  std::vector<long> to_sub(run_dim, 0), to_rest(run_dim, 0);
  for (long idx = 0; idx < run_dim; ++idx) {
    long sub = 0, rest = 0;
    for (size_t i = 0; i < to.sites.size(); ++i) {
      int site = to.sites[i];
      int d = geom.local_dim_at(site);
      long digit = (idx / run_strides[i]) % d;
      auto it = std::find(from.sites.begin(), from.sites.end(), site);
      if (it != from.sites.end())
        sub += digit * sub_strides[it - from.sites.begin()];
      else
        rest = rest * d + digit;
    }
    to_sub[idx] = sub;
    to_rest[idx] = rest;
  }
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(run_dim, run_dim);
  for (long i = 0; i < run_dim; ++i)
    for (long j = 0; j < run_dim; ++j)
      if (to_rest[i] == to_rest[j]) out(i, j) = m(to_sub[i], to_sub[j]);
  return out;
}

Interaction commutator_interaction(const Interaction& h1, const Interaction& h2,
                                   const ChainGeometry& geom) {
  Interaction out;
  for (const auto& t1 : h1.terms()) {
    for (const auto& t2 : h2.terms()) {
      if (!t1.support.overlaps(t2.support)) continue;
      Support hull = Support::hull(t1.support, t2.support);
      Eigen::MatrixXcd a = extend_to_support(t1.support, *t1.matrix, hull, geom);
      Eigen::MatrixXcd b = extend_to_support(t2.support, *t2.matrix, hull, geom);
      Eigen::MatrixXcd comm = a * b - b * a;
      if (comm.norm() < 1e-15) continue;
      out.add_term(hull, std::move(comm));
    }
  }
  return out.compacted();
}

TDI::TDI(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw std::invalid_argument("TDI: empty schedule");
  const double tol = 1e-12;
  if (std::abs(pieces_.front().t0) > tol || std::abs(pieces_.back().t1 - 1.0) > tol)
    throw std::invalid_argument("TDI: schedule must cover [0,1]");
  for (size_t i = 0; i < pieces_.size(); ++i) {
    if (pieces_[i].t1 <= pieces_[i].t0 + 0.0)
      throw std::invalid_argument("TDI: empty or reversed piece");
    if (i + 1 < pieces_.size() && std::abs(pieces_[i].t1 - pieces_[i + 1].t0) > tol)
      throw std::invalid_argument("TDI: pieces must partition [0,1]");
  }
}

TDI TDI::constant(Interaction h) { return TDI({Piece{0.0, 1.0, std::move(h)}}); }

TDI TDI::from_ramp(const std::vector<std::pair<double, Interaction>>& knots, int pieces_per_unit) {
  if (knots.size() < 2 || std::abs(knots.front().first) > 1e-12 ||
      std::abs(knots.back().first - 1.0) > 1e-12)
    throw std::invalid_argument("TDI::from_ramp: knots must span [0,1]");
  std::vector<Piece> pieces;
  int n = pieces_per_unit;
  for (int k = 0; k < n; ++k) {
    double t0 = static_cast<double>(k) / n, t1 = static_cast<double>(k + 1) / n;
    double tm = 0.5 * (t0 + t1);
    size_t j = 1;
    while (j + 1 < knots.size() && knots[j].first < tm) ++j;
    double ta = knots[j - 1].first, tb = knots[j].first;
    double w = (tm - ta) / (tb - ta);
    Interaction h = knots[j - 1].second * (1.0 - w) + knots[j].second * w;
    pieces.push_back(Piece{t0, t1, h.compacted()});
  }
  return TDI(std::move(pieces));
}

const Interaction& TDI::at_time(double s) const {
  for (const auto& p : pieces_)
    if (s <= p.t1 + 1e-15) return p.interaction;
  return pieces_.back().interaction;
}

bool TDI::is_zero() const {
  for (const auto& p : pieces_)
    if (p.interaction.total_norm_bound() > 0.0) return false;
  return true;
}

void TDI::validate(const ChainGeometry& geom) const {
  for (const auto& p : pieces_) p.interaction.validate(geom);
}

std::vector<double> TDI::merged_grid(const TDI& a, const TDI& b) {
  std::set<double> grid;
  for (const auto& p : a.pieces_) {
    grid.insert(p.t0);
    grid.insert(p.t1);
  }
  for (const auto& p : b.pieces_) {
    grid.insert(p.t0);
    grid.insert(p.t1);
  }
  std::vector<double> out(grid.begin(), grid.end());
  // collapse nearly-equal breakpoints
  std::vector<double> dedup;
  for (double t : out)
    if (dedup.empty() || t - dedup.back() > 1e-12) dedup.push_back(t);
  return dedup;
}

TDI TDI::operator+(const TDI& other) const {
  auto grid = merged_grid(*this, other);
  std::vector<Piece> pieces;
  for (size_t i = 0; i + 1 < grid.size(); ++i) {
    double tm = 0.5 * (grid[i] + grid[i + 1]);
    pieces.push_back(Piece{grid[i], grid[i + 1], (at_time(tm) + other.at_time(tm)).compacted()});
  }
  return TDI(std::move(pieces));
}

TDI TDI::operator*(double scale) const {
  std::vector<Piece> pieces;
  for (const auto& p : pieces_) pieces.push_back(Piece{p.t0, p.t1, p.interaction * scale});
  return TDI(std::move(pieces));
}

TDI TDI::filter_terms(const std::function<bool(const Term&)>& keep) const {
  std::vector<Piece> pieces;
  for (const auto& p : pieces_) {
    Interaction h;
    for (const auto& t : p.interaction.terms())
      if (keep(t)) h.add_term(t);
    pieces.push_back(Piece{p.t0, p.t1, std::move(h)});
  }
  return TDI(std::move(pieces));
}

TDI TDI::truncate_left(int cut) const {
  return filter_terms([cut](const Term& t) { return t.support.within_left(cut); });
}

TDI TDI::reversed() const {
  std::vector<Piece> pieces;
  for (auto it = pieces_.rbegin(); it != pieces_.rend(); ++it)
    pieces.push_back(Piece{1.0 - it->t1, 1.0 - it->t0, it->interaction * -1.0});
  return TDI(std::move(pieces));
}

TDI TDI::drop_wrapping_terms(const ChainGeometry& ring) const {
  return filter_terms([&ring](const Term& t) { return !t.support.wraps(ring); });
}

SplitParts split_decomposition(const TDI& h, int edge) {
  SplitParts out{
      h.filter_terms([edge](const Term& t) { return t.support.within_left(edge); }),
      h.filter_terms([edge](const Term& t) { return t.support.within_right(edge); }),
      h.filter_terms(
          [edge](const Term& t) { return !t.support.within_left(edge) && !t.support.within_right(edge); }),
  };
  return out;
}

double tdi_norm(const TDI& h, const FFunction& f) {
  double sup = 0.0;
  for (const auto& p : h.pieces()) sup = std::max(sup, f_norm(p.interaction, f));
  return sup;
}

double tdi_l1_norm(const TDI& h, const FFunction& f) {
  double total = 0.0;
  for (const auto& p : h.pieces()) total += (p.t1 - p.t0) * f_norm(p.interaction, f);
  return total;
}

double tdi_anchored_norm(const TDI& h, const Support& x, const FFunction& f) {
  double sup = 0.0;
  for (const auto& p : h.pieces()) sup = std::max(sup, anchored_norm(p.interaction, x, f));
  return sup;
}

double tdi_anchored_l1_norm(const TDI& h, const Support& x, const FFunction& f) {
  double total = 0.0;
  for (const auto& p : h.pieces()) {
    if (p.interaction.empty()) continue;
    total += (p.t1 - p.t0) * anchored_norm(p.interaction, x, f);
  }
  return total;
}

TDI symmetrize(const TDI& h, const OnsiteRep& rep, const ChainGeometry& geom) {
  std::vector<TDI::Piece> pieces;
  for (const auto& p : h.pieces())
    pieces.push_back(TDI::Piece{p.t0, p.t1, p.interaction.symmetrized(rep, geom)});
  return TDI(std::move(pieces));
}

}  // namespace pump
