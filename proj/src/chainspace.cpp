#include "pump/chainspace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace pump {

ChainGeometry::ChainGeometry(int first_site, std::vector<int> local_dims, Boundary boundary)
    : first_(first_site), dims_(std::move(local_dims)), boundary_(boundary) {
  if (dims_.size() < 2) throw std::invalid_argument("ChainGeometry: need at least 2 sites");
  for (int d : dims_)
    if (d < 2) throw std::invalid_argument("ChainGeometry: local dimension must be >= 2");
  strides_.assign(dims_.size(), 1);
  for (int p = num_sites() - 2; p >= 0; --p) strides_[p] = strides_[p + 1] * dims_[p + 1];
  total_dim_ = strides_[0] * dims_[0];
}

std::shared_ptr<const ChainGeometry> ChainGeometry::uniform(int first_site, int num_sites,
                                                            int local_dim, Boundary boundary) {
  return std::make_shared<ChainGeometry>(first_site, std::vector<int>(num_sites, local_dim),
                                         boundary);
}

int ChainGeometry::position(int label) const {
  if (!has_site(label)) throw std::out_of_range("ChainGeometry: site label out of range");
  return label - first_;
}

int ChainGeometry::next_site(int label) const {
  if (label < last_site()) return label + 1;
  if (is_ring()) return first_;
  return INT32_MIN;
}

Support Support::interval(int a, int b) {
  if (b < a) throw std::invalid_argument("Support::interval: empty interval");
  Support s;
  for (int j = a; j <= b; ++j) s.sites.push_back(j);
  return s;
}

bool Support::contains(int label) const {
  return std::find(sites.begin(), sites.end(), label) != sites.end();
}

int Support::min_label() const { return *std::min_element(sites.begin(), sites.end()); }
int Support::max_label() const { return *std::max_element(sites.begin(), sites.end()); }

bool Support::wraps(const ChainGeometry& geom) const {
  if (!geom.is_ring()) return false;
  return contains(geom.last_site()) && contains(geom.first_site()) &&
         size() < geom.num_sites();
}

bool Support::overlaps(const Support& other) const {
  for (int s : sites)
    if (other.contains(s)) return true;
  return false;
}

Support Support::hull(const Support& s1, const Support& s2) {
  return Support::interval(std::min(s1.min_label(), s2.min_label()),
                           std::max(s1.max_label(), s2.max_label()));
}

std::string Support::to_string() const {
  std::ostringstream os;
  os << "{";
  for (size_t i = 0; i < sites.size(); ++i) {
    if (i) os << ",";
    os << sites[i];
  }
  os << "}";
  return os.str();
}

void Support::validate(const ChainGeometry& geom) const {
  if (sites.empty()) throw std::invalid_argument("Support: empty");
  for (size_t i = 0; i < sites.size(); ++i) {
    if (!geom.has_site(sites[i])) throw std::invalid_argument("Support: site not in chain");
    if (i + 1 < sites.size() && geom.next_site(sites[i]) != sites[i + 1])
      throw std::invalid_argument("Support: sites must be consecutive on the chain");
  }
}

ChainState::ChainState(GeometryPtr geom, Eigen::VectorXcd amplitudes)
    : geom_(std::move(geom)), amp_(std::move(amplitudes)) {
  if (!geom_) throw std::invalid_argument("ChainState: null geometry");
  if (amp_.size() != geom_->total_dim())
    throw std::invalid_argument("ChainState: dimension mismatch");
  if (std::abs(amp_.norm() - 1.0) > 1e-10)
    throw std::invalid_argument("ChainState: vector not normalized");
}

double ChainState::fidelity(const ChainState& other) const {
  return std::abs(amp_.dot(other.amp_));
}

EmbeddedOperator::EmbeddedOperator(Support support, Eigen::MatrixXcd matrix)
    : support_(std::move(support)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols())
    throw std::invalid_argument("EmbeddedOperator: matrix must be square");
}

bool EmbeddedOperator::is_hermitian(double tol) const {
  return (matrix_ - matrix_.adjoint()).norm() <= tol * std::max(1.0, matrix_.norm());
}

ChainState product_state(GeometryPtr geom, const std::vector<int>& levels) {
  if (static_cast<int>(levels.size()) != geom->num_sites())
    throw std::invalid_argument("product_state: one level per site required");
  long idx = 0;
  for (int p = 0; p < geom->num_sites(); ++p) {
    if (levels[p] < 0 || levels[p] >= geom->local_dim_pos(p))
      throw std::out_of_range("product_state: level out of range");
    idx += geom->stride(p) * levels[p];
  }
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(geom->total_dim());
  v(idx) = 1.0;
  return ChainState(geom, std::move(v));
}

SupportIndexing support_indexing(const Support& support, const ChainGeometry& geom) {
  support.validate(geom);
  SupportIndexing ix;
  std::vector<long> sub_strides;
  std::vector<char> in_support(geom.num_sites(), 0);
  for (int s : support.sites) {
    in_support[geom.position(s)] = 1;
    ix.sub_dim *= geom.local_dim_at(s);
  }
  // offsets of support basis states, tensor order = listed order
  ix.sub_offsets.assign(ix.sub_dim, 0);
  long block = ix.sub_dim;
  for (int s : support.sites) {
    int d = geom.local_dim_at(s);
    long stride = geom.stride(geom.position(s));
    block /= d;
    for (long m = 0; m < ix.sub_dim; ++m) ix.sub_offsets[m] += ((m / block) % d) * stride;
  }
  // offsets of complement basis states
  long rest_dim = geom.total_dim() / ix.sub_dim;
  ix.rest_offsets.assign(rest_dim, 0);
  std::vector<int> rest_pos;
  for (int p = 0; p < geom.num_sites(); ++p)
    if (!in_support[p]) rest_pos.push_back(p);
  long rblock = rest_dim;
  for (int p : rest_pos) {
    int d = geom.local_dim_pos(p);
    long stride = geom.stride(p);
    rblock /= d;
    for (long r = 0; r < rest_dim; ++r) ix.rest_offsets[r] += ((r / rblock) % d) * stride;
  }
  return ix;
}

Eigen::VectorXcd apply_to_vector(const Support& support, const Eigen::MatrixXcd& a,
                                 const ChainGeometry& geom, const Eigen::VectorXcd& in) {
  if (in.size() != geom.total_dim())
    throw std::invalid_argument("apply_to_vector: geometry mismatch");
  SupportIndexing ix = support_indexing(support, geom);
  if (a.rows() != ix.sub_dim)
    throw std::invalid_argument("apply_to_vector: matrix dimension does not match support");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(in.size());
  Eigen::VectorXcd buf(ix.sub_dim), res(ix.sub_dim);
  for (long off : ix.rest_offsets) {
    for (long m = 0; m < ix.sub_dim; ++m) buf(m) = in(off + ix.sub_offsets[m]);
    res.noalias() = a * buf;
    for (long m = 0; m < ix.sub_dim; ++m) out(off + ix.sub_offsets[m]) = res(m);
  }
  return out;
}

Eigen::VectorXcd apply(const EmbeddedOperator& op, const ChainState& psi) {
  return apply_to_vector(op.support(), op.matrix(), psi.geometry(), psi.vector());
}

Eigen::MatrixXcd reduced_density(const ChainState& psi, int window_first, int window_last) {
  const ChainGeometry& geom = psi.geometry();
  Support win = Support::interval(window_first, window_last);
  win.validate(geom);
  SupportIndexing ix = support_indexing(win, geom);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(ix.sub_dim, ix.sub_dim);
  Eigen::VectorXcd buf(ix.sub_dim);
  const Eigen::VectorXcd& v = psi.vector();
  for (long off : ix.rest_offsets) {
    for (long m = 0; m < ix.sub_dim; ++m) buf(m) = v(off + ix.sub_offsets[m]);
    rho.noalias() += buf * buf.adjoint();
  }
  return rho;
}

double cut_entropy(const ChainState& psi, int edge_left_site) {
  const ChainGeometry& geom = psi.geometry();
  if (geom.is_ring())
    throw std::invalid_argument("cut_entropy: a single cut does not bipartition a ring");
  if (edge_left_site < geom.first_site() || edge_left_site >= geom.last_site())
    throw std::invalid_argument("cut_entropy: edge must be interior");
  Eigen::MatrixXcd rho = reduced_density(psi, geom.first_site(), edge_left_site);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (double p : es.eigenvalues())
    if (p > 1e-14) s -= p * std::log(p);
  return std::max(0.0, s);
}

double trace_distance(const Eigen::MatrixXcd& rho1, const Eigen::MatrixXcd& rho2) {
  if (rho1.rows() != rho2.rows() || rho1.cols() != rho2.cols())
    throw std::invalid_argument("trace_distance: dimension mismatch");
  Eigen::MatrixXcd diff = rho1 - rho2;
  // difference of density matrices is Hermitian; trace norm = sum |eigenvalues|
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(diff, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

Eigen::MatrixXcd embed_dense(const Support& support, const Eigen::MatrixXcd& a,
                             const ChainGeometry& geom, long max_dim) {
  if (geom.total_dim() > max_dim)
    throw std::invalid_argument("embed_dense: chain dimension exceeds dense cap");
  SupportIndexing ix = support_indexing(support, geom);
  if (a.rows() != ix.sub_dim) throw std::invalid_argument("embed_dense: dimension mismatch");
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(geom.total_dim(), geom.total_dim());
  for (long off : ix.rest_offsets)
    for (long mp = 0; mp < ix.sub_dim; ++mp)
      for (long m = 0; m < ix.sub_dim; ++m)
        full(off + ix.sub_offsets[mp], off + ix.sub_offsets[m]) += a(mp, m);
  return full;
}

void save_state_binary(const ChainState& psi, const std::string& path_base) {
  nlohmann::json header;
  header["format"] = "complex128-le";
  header["length"] = psi.vector().size();
  header["first_site"] = psi.geometry().first_site();
  header["local_dims"] = psi.geometry().local_dims();
  header["boundary"] = psi.geometry().is_ring() ? "ring" : "open";
  std::ofstream hdr(path_base + ".json");
  hdr << header.dump(2) << "\n";
  std::ofstream bin(path_base + ".bin", std::ios::binary);
  bin.write(reinterpret_cast<const char*>(psi.vector().data()),
            static_cast<std::streamsize>(sizeof(std::complex<double>) * psi.vector().size()));
}

ChainState load_state_binary(GeometryPtr geom, const std::string& path_base) {
  std::ifstream bin(path_base + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("load_state_binary: cannot open " + path_base + ".bin");
  Eigen::VectorXcd v(geom->total_dim());
  bin.read(reinterpret_cast<char*>(v.data()),
           static_cast<std::streamsize>(sizeof(std::complex<double>) * v.size()));
  if (!bin) throw std::runtime_error("load_state_binary: short read");
  return ChainState(std::move(geom), std::move(v));
}

}  // namespace pump
