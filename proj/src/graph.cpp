#include "gossip/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gossip/rng.hpp"

namespace gossip {

WeightedGraph::WeightedGraph(Matrix weights, bool loops_allowed)
    : weights_(std::move(weights)), loops_allowed_(loops_allowed) {
  if (weights_.rows() != weights_.cols()) {
    throw StructuralError("graph: weight matrix is " + std::to_string(weights_.rows()) + "x" +
                          std::to_string(weights_.cols()) + ", expected square");
  }
  if (weights_.rows() < 1) throw StructuralError("graph: need at least one node");
  if (!weights_.allFinite()) throw StructuralError("graph: non-finite weight");
  if ((weights_.array() < 0.0).any()) throw StructuralError("graph: negative weight");
  if (!loops_allowed_ && weights_.diagonal().cwiseAbs().maxCoeff() != 0.0) {
    throw StructuralError("graph: nonzero diagonal but loops are not allowed");
  }
}

GraphFamily parse_graph_family(std::string_view name) {
  if (name == "cycle") return GraphFamily::kCycle;
  if (name == "complete") return GraphFamily::kComplete;
  if (name == "star") return GraphFamily::kStar;
  if (name == "erdos_renyi") return GraphFamily::kErdosRenyi;
  throw StructuralError("unknown graph family '" + std::string(name) + "'");
}

std::string_view to_string(GraphFamily family) {
  switch (family) {
    case GraphFamily::kCycle: return "cycle";
    case GraphFamily::kComplete: return "complete";
    case GraphFamily::kStar: return "star";
    case GraphFamily::kErdosRenyi: return "erdos_renyi";
  }
  return "?";
}

WeightedGraph generate(GraphFamily family, Eigen::Index n, double weight, std::uint64_t seed,
                       double edge_prob) {
  if (n < 2) throw StructuralError("generate: need n >= 2");
  if (!(weight >= 0.0) || !std::isfinite(weight)) throw StructuralError("generate: weight must be >= 0");
  Matrix a = Matrix::Zero(n, n);
  auto link = [&](Eigen::Index i, Eigen::Index j) { a(i, j) = a(j, i) = weight; };
  switch (family) {
    case GraphFamily::kCycle:
      for (Eigen::Index i = 0; i < n; ++i) link(i, (i + 1) % n);
      break;
    case GraphFamily::kComplete:
      a.setConstant(weight);
      a.diagonal().setZero();
      break;
    case GraphFamily::kStar:
      for (Eigen::Index i = 1; i < n; ++i) link(0, i);
      break;
    case GraphFamily::kErdosRenyi: {
      if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) {
        throw StructuralError("generate: edge probability must be in [0,1]");
      }
      CounterRng rng(seed, 0, 0);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
          if (rng.uniform() < edge_prob) link(i, j);
      break;
    }
  }
  return WeightedGraph(std::move(a));
}

GraphStats stats(const WeightedGraph& g, double tol) {
  const Matrix& w = g.weights();
  const Eigen::Index n = g.n();
  GraphStats s;
  s.row_sums = w.rowwise().sum();
  s.col_sums = w.colwise().sum().transpose();
  s.w_max = s.row_sums.maxCoeff();
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index out = 0, in = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      if (w(i, j) > 0.0) ++out;
      if (w(j, i) > 0.0) ++in;
    }
    s.d_max_out = std::max(s.d_max_out, out);
    s.d_max_in = std::max(s.d_max_in, in);
  }
  s.d_max = std::max(s.d_max_out, s.d_max_in);
  s.is_balanced = (s.row_sums - s.col_sums).cwiseAbs().maxCoeff() <= tol;
  s.is_symmetric = (w - w.transpose()).cwiseAbs().maxCoeff() <= tol;
  return s;
}

}  // namespace gossip
