#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "gossip/graph.hpp"
#include "gossip/rng.hpp"

namespace gossip {

/// AAGA: asynchronous asymmetric edge gossip, BGA: broadcast gossip,
/// SAGA: synchronous asymmetric gossip, PBGA: probabilistic broadcast gossip.
enum class ModelKind { kAAGA, kBGA, kSAGA, kPBGA };

ModelKind parse_model_kind(std::string_view name);
std::string_view to_string(ModelKind kind);

/// Off-diagonal update coefficient a_ij (row i reads node j).
struct Coefficient {
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  double value = 0.0;

  friend bool operator==(const Coefficient&, const Coefficient&) = default;
};

/// One realization of L(t), stored as its off-diagonal coefficients.
/// L_ij = -a_ij and L_ii = sum_{j != i} a_ij, so L * 1 == 0 by construction.
struct LaplacianEvent {
  double probability = -1.0;  // -1 for sampled events
  Eigen::Index n = 0;
  std::vector<Coefficient> coeffs;

  Matrix dense() const;
  /// x <- x - L x, reading the pre-update state for every row.
  void apply(Vector& x) const;
  /// Same as apply() but returns the change in sum(x).
  double apply_tracking_sum(Vector& x, std::vector<double>& scratch) const;
};

struct StructureBounds {
  double alpha_min = 0.0;  // a_ii >= alpha_min a.s.
  double a_max = 0.0;      // sum_i sum_{j != i} a_ij <= a_max a.s.
  double a_ind_max = 0.0;  // a_ij <= a_ind_max a.s. (i != j)
  double a_row_max = 0.0;  // sum_{j != i} a_ij <= a_row_max a.s.
  double a_col_max = 0.0;  // sum_{i != j} a_ij <= a_col_max a.s.
};

/// An i.i.d. law for L(t), parametrized by a weight matrix W and mixing
/// weight q in (0, 1). Immutable after construction; sampling takes an
/// explicit rng so a model can be shared across threads.
class UpdateModel {
 public:
  /// Validates the per-kind constraint on W. q == 1 is only accepted with
  /// allow_degenerate, since no accuracy certificate exists there.
  UpdateModel(ModelKind kind, WeightedGraph graph, double q, bool allow_degenerate = false);

  ModelKind kind() const { return kind_; }
  const WeightedGraph& graph() const { return graph_; }
  const Matrix& weights() const { return graph_.weights(); }
  double q() const { return q_; }
  Eigen::Index n() const { return graph_.n(); }
  bool degenerate() const { return q_ >= 1.0; }

  LaplacianEvent sample(CounterRng& rng) const;
  void sample_into(CounterRng& rng, LaplacianEvent& out) const;

  /// Number of outcomes the enumerator has to visit (before merging
  /// duplicates and dropping null-probability outcomes). Returned as a double
  /// since SAGA supports overflow any integer type.
  double support_size() const;

 private:
  struct Choice {
    Eigen::Index node;
    double prob;  // cumulative for AAGA/SAGA, marginal for PBGA
  };

  ModelKind kind_;
  WeightedGraph graph_;
  double q_;
  // AAGA: edges with cumulative probabilities.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> edges_;
  std::vector<double> edge_cdf_;
  // SAGA: per-row neighbor cdf. BGA/PBGA: per-broadcaster receiver list.
  std::vector<std::vector<Choice>> choices_;
};

std::vector<LaplacianEvent> enumerate_events(const UpdateModel& model, double budget = 1 << 16);

enum class MomentSource { kClosedForm, kEnumeration, kEmpirical };
std::string_view to_string(MomentSource source);

/// E[L], E[L^T L], E[L^T 1 1^T L] and the drift E[L + L^T - L^T L].
struct MomentSet {
  Matrix el;
  Matrix ell;
  Matrix el11l;
  Matrix edrift;
  MomentSource source = MomentSource::kClosedForm;
  std::size_t trials = 0;  // only for kEmpirical
};

MomentSet make_moments(Matrix el, Matrix ell, Matrix el11l, MomentSource source);
MomentSet moments_from_events(const std::vector<LaplacianEvent>& events);

/// E[L] for any model; every kind has a closed form for the first moment.
Matrix expected_laplacian(const UpdateModel& model);

/// Closed-form moments where a formula applies: AAGA always, BGA with
/// balanced W, PBGA with symmetric W, SAGA always (rows are independent).
std::optional<MomentSet> closed_form_moments(const UpdateModel& model);

/// Closed form when available, enumeration otherwise (CapacityError past budget).
MomentSet exact_moments(const UpdateModel& model, double budget = 1 << 16);

struct EmpiricalMoments {
  MomentSet moments;
  Matrix se_el, se_ell, se_el11l;  // per-entry standard errors of the means
};

/// Sample means over `trials` independent draws; trial k uses stream k.
EmpiricalMoments empirical_moments_detailed(const UpdateModel& model, std::size_t trials,
                                            std::uint64_t seed);
MomentSet empirical_moments(const UpdateModel& model, std::size_t trials, std::uint64_t seed);

StructureBounds structure_bounds(const UpdateModel& model);

/// Which coefficient pairs must be uncorrelated: (a) all distinct pairs,
/// (b) pairs in different rows, (c) pairs in different columns.
enum class CorrelationCase { kA, kB, kC };
CorrelationCase parse_correlation_case(std::string_view name);

struct CovarianceVerdict {
  bool holds = false;
  double max_violation = 0.0;
};

CovarianceVerdict covariance_structure(const UpdateModel& model, CorrelationCase which,
                                       double budget = 1 << 16);

/// True iff every entry of 1^T E[L] is within tol of zero.
bool check_mean_preserving(const MomentSet& moments, double tol = 1e-10);
bool check_mean_preserving(const Matrix& el, double tol = 1e-10);

}  // namespace gossip
