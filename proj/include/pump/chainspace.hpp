#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

namespace pump {

// Finite chain of sites with given local dimensions. Sites carry consecutive
// integer labels first..last (e.g. -4..3). Basis ordering is row-major with
// the leftmost site as the slowest index.
class ChainGeometry {
 public:
  enum class Boundary { Open, Ring };

  ChainGeometry() = default;
  ChainGeometry(int first_site, std::vector<int> local_dims, Boundary boundary);

  static std::shared_ptr<const ChainGeometry> uniform(int first_site, int num_sites, int local_dim,
                                                      Boundary boundary);

  int num_sites() const { return static_cast<int>(dims_.size()); }
  int first_site() const { return first_; }
  int last_site() const { return first_ + num_sites() - 1; }
  Boundary boundary() const { return boundary_; }
  bool is_ring() const { return boundary_ == Boundary::Ring; }

  bool has_site(int label) const { return label >= first_ && label <= last_site(); }
  int position(int label) const;             // 0-based position of a site label
  int local_dim_at(int label) const { return dims_.at(position(label)); }
  int local_dim_pos(int pos) const { return dims_.at(pos); }
  const std::vector<int>& local_dims() const { return dims_; }

  long total_dim() const { return total_dim_; }
  long stride(int pos) const { return strides_.at(pos); }  // row-major strides

  // Successor site on the chain; wraps on a ring, -INT_MAX sentinel when off
  // the end of an open chain.
  int next_site(int label) const;

  bool operator==(const ChainGeometry& other) const {
    return first_ == other.first_ && dims_ == other.dims_ && boundary_ == other.boundary_;
  }

 private:
  int first_ = 0;
  std::vector<int> dims_;
  Boundary boundary_ = Boundary::Open;
  long total_dim_ = 1;
  std::vector<long> strides_;
};

using GeometryPtr = std::shared_ptr<const ChainGeometry>;

// A run of consecutive sites (ring runs may wrap). The listed order is the
// tensor order of any matrix living on the support.
struct Support {
  std::vector<int> sites;

  Support() = default;
  Support(std::initializer_list<int> s) : sites(s) {}
  explicit Support(std::vector<int> s) : sites(std::move(s)) {}
  static Support interval(int a, int b);  // a..b inclusive

  int size() const { return static_cast<int>(sites.size()); }
  int diam() const { return size() - 1; }
  bool contains(int label) const;
  int min_label() const;
  int max_label() const;
  // All sites <= j (used by left truncation at the cut edge (j, j+1)).
  bool within_left(int j) const { return max_label() <= j; }
  bool within_right(int j) const { return min_label() > j; }
  // Steps through the edge (j, j+1): contains both endpoints.
  bool crosses_edge(int j) const { return contains(j) && contains(j + 1); }
  // Contains a consecutive pair (last, first) of a ring.
  bool wraps(const ChainGeometry& geom) const;
  bool overlaps(const Support& other) const;
  // Interval hull of two overlapping supports.
  static Support hull(const Support& s1, const Support& s2);

  bool operator==(const Support& other) const { return sites == other.sites; }
  std::string to_string() const;

  void validate(const ChainGeometry& geom) const;
};

// Unit vector on the full chain.
class ChainState {
 public:
  ChainState() = default;
  ChainState(GeometryPtr geom, Eigen::VectorXcd amplitudes);

  const ChainGeometry& geometry() const { return *geom_; }
  const GeometryPtr& geometry_ptr() const { return geom_; }
  const Eigen::VectorXcd& vector() const { return amp_; }
  Eigen::VectorXcd& vector() { return amp_; }

  double norm() const { return amp_.norm(); }
  void normalize() { amp_ /= amp_.norm(); }

  // |<this, other>|
  double fidelity(const ChainState& other) const;

 private:
  GeometryPtr geom_;
  Eigen::VectorXcd amp_;
};

// Operator on a support, applied lazily to full-chain vectors.
class EmbeddedOperator {
 public:
  EmbeddedOperator() = default;
  EmbeddedOperator(Support support, Eigen::MatrixXcd matrix);

  const Support& support() const { return support_; }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  bool is_hermitian(double tol = 1e-12) const;

 private:
  Support support_;
  Eigen::MatrixXcd matrix_;
};

// Computational basis product state; levels listed left to right.
ChainState product_state(GeometryPtr geom, const std::vector<int>& levels);

// (A (x) 1) Psi without materializing the full-chain matrix.
Eigen::VectorXcd apply(const EmbeddedOperator& op, const ChainState& psi);
Eigen::VectorXcd apply_to_vector(const Support& support, const Eigen::MatrixXcd& a,
                                 const ChainGeometry& geom, const Eigen::VectorXcd& in);

// Reduced density matrix on a contiguous non-wrapping window [a, b].
Eigen::MatrixXcd reduced_density(const ChainState& psi, int window_first, int window_last);

// Von Neumann entropy (nats) of the reduced state on {<= j}; open chains only.
double cut_entropy(const ChainState& psi, int edge_left_site);

// Trace-norm distance ||rho1 - rho2||_1, in [0, 2] for density matrices.
double trace_distance(const Eigen::MatrixXcd& rho1, const Eigen::MatrixXcd& rho2);

// Dense embedding of a supported operator into the full chain (guarded by a
// dimension cap; used by oracles and the dense evolution path).
Eigen::MatrixXcd embed_dense(const Support& support, const Eigen::MatrixXcd& a,
                             const ChainGeometry& geom, long max_dim = 1 << 14);

// Offsets of all basis states of the complement of `support`, plus the
// in-support index offsets; apply/embedding share this enumeration.
struct SupportIndexing {
  long sub_dim = 1;                 // product of support dims
  std::vector<long> sub_offsets;    // flat offset of each support basis state
  std::vector<long> rest_offsets;   // flat offset of each complement basis state
};
SupportIndexing support_indexing(const Support& support, const ChainGeometry& geom);

// save/load golden states: raw little-endian complex doubles + JSON header.
void save_state_binary(const ChainState& psi, const std::string& path_base);
ChainState load_state_binary(GeometryPtr geom, const std::string& path_base);

}  // namespace pump
