#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "gossip/update_model.hpp"

namespace gossip {

struct TrajectoryPoint {
  double mean = 0.0;          // mean(x(t))
  double disagreement = 0.0;  // V(x(t))
};

using StateObserver = std::function<void(std::size_t t, const Vector& x)>;

/// Simulates x(t+1) = x(t) - L(t) x(t) for `steps` steps, one sampled event
/// per step drawn from CounterRng(seed, stream, t). Returns steps + 1 points.
std::vector<TrajectoryPoint> run_trajectory(const UpdateModel& model, const Vector& x0,
                                            std::size_t steps, std::uint64_t seed,
                                            std::uint64_t stream = 0,
                                            const StateObserver& observer = {});

struct MseEstimate {
  std::size_t t = 0;
  double mse_mean = 0.0;
  double ci_half_width = 0.0;  // 4 sigma
  std::size_t trials = 0;
  double v_mean = 0.0;
};

struct MeanEstimate {
  std::size_t t = 0;
  double mean = 0.0;
  double ci_half_width = 0.0;  // 4 sigma
};

struct MonteCarloOptions {
  std::size_t trials = 1000;
  std::uint64_t master_seed = 0;
  unsigned workers = 0;  // 0: hardware concurrency
};

/// Every step up to 100, then geometrically spaced (ratio ~1.1), always
/// including `steps`.
std::vector<std::size_t> default_record_steps(std::size_t steps);

/// MSE and mean disagreement at each recorded step; trial k uses stream k.
/// Output is independent of the worker count.
std::vector<MseEstimate> estimate_mse(const UpdateModel& model, const Vector& x0,
                                      std::size_t steps, const MonteCarloOptions& opts,
                                      std::vector<std::size_t> record_steps = {});

std::vector<MeanEstimate> estimate_mean_preservation(const UpdateModel& model, const Vector& x0,
                                                     std::size_t steps,
                                                     const MonteCarloOptions& opts,
                                                     std::vector<std::size_t> record_steps = {});

struct ConsensusEstimate {
  double mse_mean = 0.0;
  double ci_half_width = 0.0;  // 4 sigma
  std::size_t trials = 0;
  std::size_t converged_trials = 0;
  std::size_t max_steps_used = 0;
};

/// Runs each trial until V(x(t)) <= rel_tol * V(x0) (checked every N steps)
/// or max_steps, and reports E[(mean(x_final) - mean(x0))^2].
ConsensusEstimate estimate_consensus_mse(const UpdateModel& model, const Vector& x0,
                                         const MonteCarloOptions& opts, double rel_tol = 1e-12,
                                         std::size_t max_steps = 50'000'000);

}  // namespace gossip
