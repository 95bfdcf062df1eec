#include "gossip/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace gossip {

namespace {

constexpr std::size_t kBlockTrials = 64;

// Runs fn(block_index, first_trial, last_trial) over fixed-size trial blocks.
// Blocks are the unit of reduction, so the result does not depend on how
// many workers pick them up.
template <typename Fn>
void for_each_block(std::size_t trials, unsigned workers, Fn&& fn) {
  const std::size_t blocks = (trials + kBlockTrials - 1) / kBlockTrials;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(blocks, 1)));
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t b; (b = next.fetch_add(1)) < blocks;) {
      fn(b, b * kBlockTrials, std::min(trials, (b + 1) * kBlockTrials));
    }
  };
  if (workers <= 1) {
    work();
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();
}

void check_dims(const UpdateModel& model, const Vector& x0) {
  if (x0.size() != model.n()) throw StructuralError("simulation: x0 length does not match the model");
}

std::vector<std::size_t> normalize_steps(std::vector<std::size_t> rec, std::size_t steps) {
  if (rec.empty()) rec = default_record_steps(steps);
  std::sort(rec.begin(), rec.end());
  rec.erase(std::unique(rec.begin(), rec.end()), rec.end());
  rec.erase(std::remove_if(rec.begin(), rec.end(), [&](std::size_t t) { return t > steps; }), rec.end());
  return rec;
}

// Sums of (value, value^2) per recorded step for a set of per-trial series.
struct Moments2 {
  std::vector<double> s1, s2, aux;
  explicit Moments2(std::size_t k = 0) : s1(k, 0.0), s2(k, 0.0), aux(k, 0.0) {}
  void add(const Moments2& o) {
    for (std::size_t i = 0; i < s1.size(); ++i) {
      s1[i] += o.s1[i];
      s2[i] += o.s2[i];
      aux[i] += o.aux[i];
    }
  }
};

double four_sigma(double s1, double s2, double trials) {
  if (trials < 2) return 0.0;
  const double mean = s1 / trials;
  const double var = std::max(0.0, (s2 / trials - mean * mean) * trials / (trials - 1.0));
  return 4.0 * std::sqrt(var / trials);
}

// Walks one trial, calling record(slot, x, sum) at each recorded step.
template <typename Record>
void walk(const UpdateModel& model, const Vector& x0, const std::vector<std::size_t>& rec,
          std::uint64_t seed, std::uint64_t stream, LaplacianEvent& ev,
          std::vector<double>& scratch, Record&& record) {
  Vector x = x0;
  std::size_t slot = 0;
  std::size_t t = 0;
  while (slot < rec.size()) {
    if (rec[slot] == t) {
      record(slot, x, x.sum());
      ++slot;
      continue;
    }
    CounterRng rng(seed, stream, t);
    model.sample_into(rng, ev);
    ev.apply_tracking_sum(x, scratch);
    ++t;
  }
}

}  // namespace

std::vector<TrajectoryPoint> run_trajectory(const UpdateModel& model, const Vector& x0,
                                            std::size_t steps, std::uint64_t seed,
                                            std::uint64_t stream, const StateObserver& observer) {
  check_dims(model, x0);
  std::vector<TrajectoryPoint> out;
  out.reserve(steps + 1);
  Vector x = x0;
  LaplacianEvent ev;
  std::vector<double> scratch;
  for (std::size_t t = 0;; ++t) {
    out.push_back({x.mean(), disagreement(x)});
    if (observer) observer(t, x);
    if (t == steps) break;
    CounterRng rng(seed, stream, t);
    model.sample_into(rng, ev);
    ev.apply_tracking_sum(x, scratch);
  }
  return out;
}

std::vector<std::size_t> default_record_steps(std::size_t steps) {
  std::vector<std::size_t> rec;
  for (std::size_t t = 0; t <= std::min<std::size_t>(steps, 100); ++t) rec.push_back(t);
  double next = 100.0;
  while (true) {
    next *= 1.1;
    const auto t = static_cast<std::size_t>(std::llround(next));
    if (t >= steps) break;
    if (t > rec.back()) rec.push_back(t);
  }
  if (rec.back() != steps) rec.push_back(steps);
  return rec;
}

std::vector<MseEstimate> estimate_mse(const UpdateModel& model, const Vector& x0,
                                      std::size_t steps, const MonteCarloOptions& opts,
                                      std::vector<std::size_t> record_steps) {
  check_dims(model, x0);
  if (opts.trials < 2) throw StructuralError("estimate_mse: need at least two trials");
  const auto rec = normalize_steps(std::move(record_steps), steps);
  const double n = static_cast<double>(model.n());
  const double mean0 = x0.mean();
  const std::size_t blocks = (opts.trials + kBlockTrials - 1) / kBlockTrials;
  std::vector<Moments2> partial(blocks, Moments2(rec.size()));

  for_each_block(opts.trials, opts.workers, [&](std::size_t b, std::size_t lo, std::size_t hi) {
    Moments2& acc = partial[b];
    LaplacianEvent ev;
    std::vector<double> scratch;
    for (std::size_t k = lo; k < hi; ++k) {
      walk(model, x0, rec, opts.master_seed, k, ev, scratch,
           [&](std::size_t slot, const Vector& x, double sum) {
             const double dev = sum / n - mean0;
             acc.s1[slot] += dev * dev;
             acc.s2[slot] += dev * dev * dev * dev;
             acc.aux[slot] += disagreement(x);
           });
    }
  });

  Moments2 total(rec.size());
  for (const auto& p : partial) total.add(p);
  const double tn = static_cast<double>(opts.trials);
  std::vector<MseEstimate> out;
  for (std::size_t s = 0; s < rec.size(); ++s) {
    out.push_back({rec[s], total.s1[s] / tn, four_sigma(total.s1[s], total.s2[s], tn), opts.trials,
                   total.aux[s] / tn});
  }
  return out;
}

std::vector<MeanEstimate> estimate_mean_preservation(const UpdateModel& model, const Vector& x0,
                                                     std::size_t steps,
                                                     const MonteCarloOptions& opts,
                                                     std::vector<std::size_t> record_steps) {
  check_dims(model, x0);
  if (opts.trials < 2) throw StructuralError("estimate_mean_preservation: need at least two trials");
  const auto rec = normalize_steps(std::move(record_steps), steps);
  const double n = static_cast<double>(model.n());
  const std::size_t blocks = (opts.trials + kBlockTrials - 1) / kBlockTrials;
  std::vector<Moments2> partial(blocks, Moments2(rec.size()));

  for_each_block(opts.trials, opts.workers, [&](std::size_t b, std::size_t lo, std::size_t hi) {
    Moments2& acc = partial[b];
    LaplacianEvent ev;
    std::vector<double> scratch;
    for (std::size_t k = lo; k < hi; ++k) {
      walk(model, x0, rec, opts.master_seed, k, ev, scratch,
           [&](std::size_t slot, const Vector&, double sum) {
             const double m = sum / n;
             acc.s1[slot] += m;
             acc.s2[slot] += m * m;
           });
    }
  });

  Moments2 total(rec.size());
  for (const auto& p : partial) total.add(p);
  const double tn = static_cast<double>(opts.trials);
  std::vector<MeanEstimate> out;
  for (std::size_t s = 0; s < rec.size(); ++s) {
    out.push_back({rec[s], total.s1[s] / tn, four_sigma(total.s1[s], total.s2[s], tn)});
  }
  return out;
}

ConsensusEstimate estimate_consensus_mse(const UpdateModel& model, const Vector& x0,
                                         const MonteCarloOptions& opts, double rel_tol,
                                         std::size_t max_steps) {
  check_dims(model, x0);
  if (opts.trials < 2) throw StructuralError("estimate_consensus_mse: need at least two trials");
  const auto n = static_cast<std::size_t>(model.n());
  const double mean0 = x0.mean();
  const double threshold = rel_tol * disagreement(x0);
  const std::size_t check_every = std::max<std::size_t>(n, 16);
  const std::size_t blocks = (opts.trials + kBlockTrials - 1) / kBlockTrials;

  struct Partial {
    double s1 = 0.0, s2 = 0.0;
    std::size_t converged = 0, longest = 0;
  };
  std::vector<Partial> partial(blocks);

  for_each_block(opts.trials, opts.workers, [&](std::size_t b, std::size_t lo, std::size_t hi) {
    Partial& acc = partial[b];
    LaplacianEvent ev;
    std::vector<double> scratch;
    for (std::size_t k = lo; k < hi; ++k) {
      Vector x = x0;
      std::size_t t = 0;
      bool done = disagreement(x) <= threshold;
      while (!done && t < max_steps) {
        CounterRng rng(opts.master_seed, k, t);
        model.sample_into(rng, ev);
        ev.apply_tracking_sum(x, scratch);
        ++t;
        if (t % check_every == 0) done = disagreement(x) <= threshold;
      }
      const double dev = x.mean() - mean0;
      acc.s1 += dev * dev;
      acc.s2 += dev * dev * dev * dev;
      acc.converged += done ? 1 : 0;
      acc.longest = std::max(acc.longest, t);
    }
  });

  ConsensusEstimate out;
  double s1 = 0.0, s2 = 0.0;
  for (const auto& p : partial) {
    s1 += p.s1;
    s2 += p.s2;
    out.converged_trials += p.converged;
    out.max_steps_used = std::max(out.max_steps_used, p.longest);
  }
  const double tn = static_cast<double>(opts.trials);
  out.trials = opts.trials;
  out.mse_mean = s1 / tn;
  out.ci_half_width = four_sigma(s1, s2, tn);
  return out;
}

}  // namespace gossip
