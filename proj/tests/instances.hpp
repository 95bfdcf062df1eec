#pragma once

// Shared model instances and random generators for the unit and acceptance
// suites.

#include <cmath>
#include <string>
#include <vector>

#include "gossip/graph.hpp"
#include "gossip/rng.hpp"
#include "gossip/update_model.hpp"

namespace gossip::testing {

struct Instance {
  std::string name;
  UpdateModel model;
};

inline WeightedGraph matrix_graph(std::initializer_list<std::initializer_list<double>> rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix w(n, n);
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) w(i, j++) = v;
    ++i;
  }
  return WeightedGraph(w);
}

inline UpdateModel aaga_two_node(double q, bool degenerate = false) {
  return UpdateModel(ModelKind::kAAGA, matrix_graph({{0, 0.5}, {0.5, 0}}), q, degenerate);
}

inline UpdateModel aaga_complete(Eigen::Index n, double q) {
  const double nd = static_cast<double>(n);
  return UpdateModel(ModelKind::kAAGA, generate(GraphFamily::kComplete, n, 1.0 / (nd * (nd - 1))), q);
}

inline UpdateModel bga_cycle(Eigen::Index n, double q) {
  return UpdateModel(ModelKind::kBGA, generate(GraphFamily::kCycle, n, 1.0), q);
}

inline UpdateModel saga_complete(Eigen::Index n, double q) {
  return UpdateModel(ModelKind::kSAGA,
                     generate(GraphFamily::kComplete, n, 1.0 / static_cast<double>(n - 1)), q);
}

inline UpdateModel saga_cycle(Eigen::Index n, double q) {
  return UpdateModel(ModelKind::kSAGA, generate(GraphFamily::kCycle, n, 0.5), q);
}

inline UpdateModel pbga_complete(Eigen::Index n, double w, double q) {
  return UpdateModel(ModelKind::kPBGA, generate(GraphFamily::kComplete, n, w), q);
}

/// The standard enumerable, mean-preserving instances at one q.
inline std::vector<Instance> standard_instances(double q) {
  const std::string qs = "q=" + std::to_string(q).substr(0, 4);
  return {
      {"AAGA 2-node " + qs, aaga_two_node(q)},
      {"AAGA complete-4 " + qs, aaga_complete(4, q)},
      {"BGA cycle-4 " + qs, bga_cycle(4, q)},
      {"BGA cycle-6 " + qs, bga_cycle(6, q)},
      {"BGA star-5 " + qs, UpdateModel(ModelKind::kBGA, generate(GraphFamily::kStar, 5, 1.0), q)},
      {"SAGA complete-4 " + qs, saga_complete(4, q)},
      {"SAGA cycle-4 " + qs, saga_cycle(4, q)},
      {"PBGA complete-3 w=1 " + qs, pbga_complete(3, 1.0, q)},
      {"PBGA complete-4 w=1 " + qs, pbga_complete(4, 1.0, q)},
      {"PBGA complete-3 w=.5 " + qs, pbga_complete(3, 0.5, q)},
      {"PBGA complete-4 w=.5 " + qs, pbga_complete(4, 0.5, q)},
  };
}

inline std::vector<Instance> all_standard_instances() {
  std::vector<Instance> out;
  for (double q : {0.1, 0.5, 0.9}) {
    auto v = standard_instances(q);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

/// Random symmetric matrix with entries uniform in [-1, 1].
inline Matrix random_symmetric(CounterRng& rng, Eigen::Index n) {
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) m(i, j) = m(j, i) = 2.0 * rng.uniform() - 1.0;
  return m;
}

/// Random enumerable mean-preserving model on 3..5 nodes.
inline UpdateModel random_enumerable_model(CounterRng& rng) {
  const auto n = static_cast<Eigen::Index>(3 + rng.below(3));
  const double q = 0.05 + 0.9 * rng.uniform();
  switch (rng.below(4)) {
    case 0: {
      Matrix w = Matrix::Zero(n, n);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
          if (rng.uniform() < 0.7) w(i, j) = w(j, i) = rng.uniform();
      if (w.sum() == 0.0) w(0, 1) = w(1, 0) = 1.0;
      return UpdateModel(ModelKind::kAAGA, WeightedGraph(w / w.sum()), q);
    }
    case 1:
      return UpdateModel(ModelKind::kBGA, generate(GraphFamily::kErdosRenyi, n, 1.0, rng.next_u64(), 0.6), q);
    case 2: {
      // Symmetric circulant mixture of shifts: doubly stochastic, zero diagonal.
      Matrix w = Matrix::Zero(n, n);
      double total = 0.0;
      std::vector<double> c(static_cast<std::size_t>(n), 0.0);
      for (Eigen::Index s = 1; s < n; ++s) total += c[static_cast<std::size_t>(s)] = rng.uniform() + 0.05;
      for (Eigen::Index s = 1; s < n; ++s)
        for (Eigen::Index i = 0; i < n; ++i) {
          const double v = 0.5 * c[static_cast<std::size_t>(s)] / total;
          w(i, (i + s) % n) += v;
          w((i + s) % n, i) += v;
        }
      return UpdateModel(ModelKind::kSAGA, WeightedGraph(w), q);
    }
    default: {
      Matrix w = Matrix::Zero(n, n);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
          if (rng.uniform() < 0.8) w(i, j) = w(j, i) = rng.uniform();
      return UpdateModel(ModelKind::kPBGA, WeightedGraph(w), q);
    }
  }
}

}  // namespace gossip::testing
