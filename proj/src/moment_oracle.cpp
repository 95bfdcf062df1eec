#include "gossip/moment_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gossip {

namespace {

void validate(const std::vector<LaplacianEvent>& events, const Vector& x0) {
  if (events.empty()) throw StructuralError("oracle: empty event list");
  double total = 0.0;
  for (const auto& e : events) {
    total += e.probability;
    if (e.n != x0.size()) throw StructuralError("oracle: x0 length does not match the model");
  }
  if (std::abs(total - 1.0) > 1e-10) {
    throw StructuralError("oracle: event probabilities sum to " + std::to_string(total));
  }
}

void require_mean_preserving(const std::vector<LaplacianEvent>& events) {
  if (!check_mean_preserving(moments_from_events(events).el, 1e-9)) {
    throw PreconditionError("oracle: event law does not preserve the expected average");
  }
}

// B = (I - L) P touches only the rows of L that carry coefficients.
Matrix left_apply(const LaplacianEvent& e, const Matrix& p) {
  Matrix b = p;
  for (const auto& c : e.coeffs) b.row(c.row) += c.value * (p.row(c.col) - p.row(c.row));
  return b;
}

Matrix right_apply_transpose(const LaplacianEvent& e, const Matrix& b) {
  Matrix out = b;
  for (const auto& c : e.coeffs) out.col(c.row) += c.value * (b.col(c.col) - b.col(c.row));
  return out;
}

// The mean-square deviation and disagreement are read off the moment of the
// centered state y = x - mean(x0) 1, which obeys the same recursion since
// (I - L) 1 = 1. This avoids cancelling two O(|x|^2) terms.
SecondMoment centered_start(const Vector& x0) {
  const Vector y = x0.array() - x0.mean();
  return {y * y.transpose(), y, 0};
}

double mse_of(const SecondMoment& c) {
  const double n = static_cast<double>(c.p.rows());
  return std::max(0.0, c.p.sum() / (n * n));
}

double disagreement_of(const SecondMoment& c) {
  const double n = static_cast<double>(c.p.rows());
  return std::max(0.0, (c.p.trace() - c.p.sum() / n) / n);
}

// 1^T P 1 + gamma trace(P) for the uncentered P = E[(y + m 1)(y + m 1)^T].
double lyapunov_of(const SecondMoment& c, double mean0, double gamma) {
  const double n = static_cast<double>(c.p.rows());
  const double ys = c.mean.sum();
  const double total = c.p.sum() + 2.0 * mean0 * n * ys + mean0 * mean0 * n * n;
  const double trace = c.p.trace() + 2.0 * mean0 * ys + n * mean0 * mean0;
  return total + gamma * trace;
}

}  // namespace

SecondMoment propagate_step(const std::vector<LaplacianEvent>& events, const SecondMoment& s) {
  const Eigen::Index n = s.p.rows();
  SecondMoment next;
  next.p = Matrix::Zero(n, n);
  next.mean = Vector::Zero(n);
  next.t = s.t + 1;
  for (const auto& e : events) {
    next.p += e.probability * right_apply_transpose(e, left_apply(e, s.p));
    Vector m = s.mean;
    e.apply(m);
    next.mean += e.probability * m;
  }
  next.p = 0.5 * (next.p + next.p.transpose()).eval();
  return next;
}

std::vector<SecondMoment> propagate(const std::vector<LaplacianEvent>& events, const Vector& x0,
                                    std::size_t steps) {
  validate(events, x0);
  std::vector<SecondMoment> out;
  out.reserve(steps + 1);
  out.push_back({x0 * x0.transpose(), x0, 0});
  for (std::size_t t = 0; t < steps; ++t) out.push_back(propagate_step(events, out.back()));
  return out;
}

std::vector<OracleRow> oracle_table(const std::vector<LaplacianEvent>& events, const Vector& x0,
                                    double gamma, std::size_t steps) {
  validate(events, x0);
  require_mean_preserving(events);
  const double mean0 = x0.mean();
  std::vector<OracleRow> rows;
  rows.reserve(steps + 1);
  SecondMoment c = centered_start(x0);
  for (std::size_t t = 0;; ++t) {
    rows.push_back({t, mse_of(c), disagreement_of(c), lyapunov_of(c, mean0, gamma)});
    if (t == steps) break;
    c = propagate_step(events, c);
  }
  return rows;
}

std::vector<double> mse_trajectory(const std::vector<LaplacianEvent>& events, const Vector& x0,
                                   std::size_t steps) {
  std::vector<double> out;
  for (const auto& r : oracle_table(events, x0, 0.0, steps)) out.push_back(r.mse);
  return out;
}

std::vector<double> expected_disagreement(const std::vector<LaplacianEvent>& events,
                                          const Vector& x0, std::size_t steps) {
  std::vector<double> out;
  for (const auto& c : propagate(events, x0.array() - x0.mean(), steps)) out.push_back(disagreement_of(c));
  return out;
}

std::vector<double> lyapunov_check(const std::vector<LaplacianEvent>& events, const Vector& x0,
                                   double gamma, std::size_t steps) {
  std::vector<double> out;
  for (const auto& s : propagate(events, x0, steps)) out.push_back(s.p.sum() + gamma * s.p.trace());
  return out;
}

SteadyState steady_state_mse(const std::vector<LaplacianEvent>& events, const Vector& x0,
                             std::size_t max_steps) {
  validate(events, x0);
  require_mean_preserving(events);
  SecondMoment c = centered_start(x0);
  double prev = mse_of(c);
  int quiet = 0;
  for (std::size_t t = 1; t <= max_steps; ++t) {
    c = propagate_step(events, c);
    const double cur = mse_of(c);
    quiet = std::abs(cur - prev) <= 1e-13 * std::max(1.0, prev) ? quiet + 1 : 0;
    prev = cur;
    if (quiet >= 5) return {cur, t, true};
  }
  return {prev, max_steps, false};
}

}  // namespace gossip
