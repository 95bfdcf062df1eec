#pragma once

#include <cstddef>
#include <vector>

#include "gossip/update_model.hpp"

namespace gossip {

/// E[x(t) x(t)^T] and E[x(t)] at step t.
struct SecondMoment {
  Matrix p;
  Vector mean;
  std::size_t t = 0;
};

/// Exact propagation P(t+1) = sum_e p_e (I - L_e) P(t) (I - L_e)^T from
/// P(0) = x0 x0^T over an enumerated event distribution. Returns steps + 1
/// entries.
std::vector<SecondMoment> propagate(const std::vector<LaplacianEvent>& events, const Vector& x0,
                                    std::size_t steps);

/// One step of the second-moment map.
SecondMoment propagate_step(const std::vector<LaplacianEvent>& events, const SecondMoment& s);

/// E[(mean(x(t)) - mean(x(0)))^2] for t = 0..steps. The event law must
/// preserve the expected average; otherwise PreconditionError.
std::vector<double> mse_trajectory(const std::vector<LaplacianEvent>& events, const Vector& x0,
                                   std::size_t steps);

/// E[V(x(t))] = trace((I - 11^T / N) P(t)) / N.
std::vector<double> expected_disagreement(const std::vector<LaplacianEvent>& events,
                                          const Vector& x0, std::size_t steps);

/// E[C(x(t))] = trace((11^T + gamma I) P(t)).
std::vector<double> lyapunov_check(const std::vector<LaplacianEvent>& events, const Vector& x0,
                                   double gamma, std::size_t steps);

struct OracleRow {
  std::size_t t = 0;
  double mse = 0.0;
  double disagreement = 0.0;
  double lyapunov = 0.0;
};

/// All three sequences from a single propagation.
std::vector<OracleRow> oracle_table(const std::vector<LaplacianEvent>& events, const Vector& x0,
                                    double gamma, std::size_t steps);

struct SteadyState {
  double mse = 0.0;
  std::size_t steps = 0;
  bool converged = false;
};

/// Iterates until |MSE(t+1) - MSE(t)| <= 1e-13 * max(1, MSE(t)) for five
/// consecutive steps, or max_steps.
SteadyState steady_state_mse(const std::vector<LaplacianEvent>& events, const Vector& x0,
                             std::size_t max_steps = 100000);

}  // namespace gossip
