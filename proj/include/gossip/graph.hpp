#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "gossip/errors.hpp"

namespace gossip {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Weighted directed graph G = (I, A) on nodes {0..n-1}. A_ij > 0 means an
/// edge from i to j; the interpretation of the weight is up to the model.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  explicit WeightedGraph(Matrix weights, bool loops_allowed = false);

  Eigen::Index n() const { return weights_.rows(); }
  const Matrix& weights() const { return weights_; }
  bool loops_allowed() const { return loops_allowed_; }

 private:
  Matrix weights_;
  bool loops_allowed_ = false;
};

/// L(A): -A_ij off the diagonal, off-diagonal row sums on the diagonal.
/// The diagonal of A is ignored, so L(A) * 1 == 0 for any A.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
laplacian(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.rows() != a.cols()) {
    throw StructuralError("laplacian: weight matrix must be square");
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> l = -a;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    l(i, i) = Scalar(0);
    Scalar s(0);
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (j != i) s += a(i, j);
    }
    l(i, i) = s;
  }
  return l;
}

inline Matrix laplacian(const WeightedGraph& g) { return laplacian(g.weights()); }

/// V(y) = (1/N) sum_i (y_i - mean(y))^2.
template <typename Derived>
typename Derived::Scalar disagreement(const Eigen::MatrixBase<Derived>& y) {
  if (y.size() == 0) throw StructuralError("disagreement: empty vector");
  const auto mean = y.mean();
  return (y.array() - mean).square().sum() / static_cast<typename Derived::Scalar>(y.size());
}

enum class GraphFamily { kCycle, kComplete, kStar, kErdosRenyi };

GraphFamily parse_graph_family(std::string_view name);
std::string_view to_string(GraphFamily family);

/// Symmetric 0/weight adjacency of a standard family. Node 0 is the hub of a
/// star. Erdos-Renyi draws each unordered pair independently with
/// probability edge_prob, deterministically in seed.
WeightedGraph generate(GraphFamily family, Eigen::Index n, double weight,
                       std::uint64_t seed = 0, double edge_prob = 0.5);

struct GraphStats {
  Eigen::Index d_max = 0;      // max of d_max_out and d_max_in
  Eigen::Index d_max_out = 0;  // max nonzero off-diagonal entries in a row
  Eigen::Index d_max_in = 0;   // max nonzero off-diagonal entries in a column
  double w_max = 0.0;          // max row sum
  Vector row_sums;
  Vector col_sums;
  bool is_balanced = false;
  bool is_symmetric = false;
};

GraphStats stats(const WeightedGraph& g, double tol = 1e-12);

}  // namespace gossip
