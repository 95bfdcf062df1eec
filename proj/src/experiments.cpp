#include "gossip/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>

#include "gossip/moment_oracle.hpp"
#include "gossip/montecarlo.hpp"

namespace gossip {

namespace {

Vector default_x0(Eigen::Index n) {
  Vector x = Vector::Zero(n);
  x(0) = 1.0;
  return x;
}

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

CertifyOutcome run_certify(const UpdateModel& model, const CertifyRequest& req) {
  CertifyOutcome out;
  out.moments = exact_moments(model, req.budget);
  switch (req.mode) {
    case CertifyMode::kGamma:
      out.certificate = check_condition(out.moments, req.gamma, req.tol);
      break;
    case CertifyMode::kMinimal:
      out.certificate = minimal_gamma(model, out.moments, req.tol);
      break;
    case CertifyMode::kFormula: {
      const GammaCertificate formula = formula_gamma(model, req.budget);
      if (!formula.feasible) {
        out.certificate = formula;
        break;
      }
      GammaCertificate checked = check_condition(out.moments, formula.gamma, req.tol);
      checked.method = formula.method;
      out.certificate = checked;
      break;
    }
  }
  const Vector x0 = req.x0 ? *req.x0 : default_x0(model.n());
  const double v0 = disagreement(x0);
  out.bound = out.certificate.feasible ? bound_report(out.certificate.gamma, model.n(), v0)
                                       : BoundReport{out.certificate.gamma, model.n(), v0, v0};
  return out;
}

Json to_json(const CertifyOutcome& o) {
  const auto& c = o.certificate;
  Json j;
  if (c.feasible) {
    j["gamma"] = c.gamma;
  } else {
    j["gamma"] = "infeasible";
  }
  j["method"] = std::string(to_string(c.method));
  j["psd_min_eig"] = std::isnan(c.psd_min_eig) ? Json(nullptr) : Json(c.psd_min_eig);
  j["valid"] = c.valid;
  j["bound_for"] = {{"n", o.bound.n}, {"v0", o.bound.v0}, {"bound", o.bound.bound}};
  j["moments_source"] = std::string(to_string(o.moments.source));
  return j;
}

int exit_code(const CertifyOutcome& o) { return o.certificate.valid ? kExitOk : kExitInfeasible; }

std::vector<SimulateRow> run_simulate(const UpdateModel& model, const SimulateRequest& req) {
  MonteCarloOptions opts{req.trials, req.seed, req.workers};
  const auto est = estimate_mse(model, req.x0, req.steps, opts);
  const double v0 = disagreement(req.x0);

  double bound = v0;
  try {
    const auto cert = formula_gamma(model, req.budget);
    if (cert.feasible) bound = deviation_bound(cert.gamma, static_cast<double>(model.n()), v0);
  } catch (const PreconditionError&) {
    bound = std::numeric_limits<double>::quiet_NaN();
  }

  std::vector<double> oracle;
  if (model.support_size() <= req.budget) {
    try {
      oracle = mse_trajectory(enumerate_events(model, req.budget), req.x0, req.steps);
    } catch (const PreconditionError&) {
      oracle.clear();
    }
  }

  std::vector<SimulateRow> rows;
  for (const auto& e : est) {
    SimulateRow r{e.t, e.mse_mean, e.ci_half_width, e.v_mean, bound, std::nullopt};
    if (!oracle.empty()) r.oracle_mse = oracle[e.t];
    rows.push_back(r);
  }
  return rows;
}

void write_simulate_csv(std::ostream& os, const std::vector<SimulateRow>& rows) {
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    cells.push_back({std::to_string(r.t), format_double(r.mse_mean), format_double(r.mse_ci),
                     format_double(r.v_mean), std::isnan(r.bound) ? "" : format_double(r.bound),
                     cell(r.oracle_mse)});
  }
  write_csv(os, {"t", "mse_mean", "mse_ci", "v_mean", "bound", "oracle_mse"}, cells);
}

std::vector<OracleRow> run_oracle(const UpdateModel& model, const Vector& x0, std::size_t steps,
                                  double budget) {
  double gamma = 0.0;
  const auto cert = formula_gamma(model, budget);
  if (cert.feasible) gamma = cert.gamma;
  return oracle_table(enumerate_events(model, budget), x0, gamma, steps);
}

void write_oracle_csv(std::ostream& os, const std::vector<OracleRow>& rows) {
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    cells.push_back({std::to_string(r.t), format_double(r.mse), format_double(r.disagreement),
                     format_double(r.lyapunov)});
  }
  write_csv(os, {"t", "mse", "disagreement", "lyapunov"}, cells);
}

UpdateModel family_model(std::string_view family, Eigen::Index n, double q) {
  if (family == "bga_cycle") {
    return UpdateModel(ModelKind::kBGA, generate(GraphFamily::kCycle, n, 1.0), q);
  }
  if (family == "saga_cycle") {
    // n == 2 folds both cycle edges onto one pair; W must stay row-stochastic.
    const double w = n == 2 ? 1.0 : 0.5;
    return UpdateModel(ModelKind::kSAGA, generate(GraphFamily::kCycle, n, w), q);
  }
  if (family == "aaga_complete") {
    const double nd = static_cast<double>(n);
    return UpdateModel(ModelKind::kAAGA, generate(GraphFamily::kComplete, n, 1.0 / (nd * (nd - 1.0))), q);
  }
  if (family == "pbga_complete") {
    return UpdateModel(ModelKind::kPBGA, generate(GraphFamily::kComplete, n, 1.0), q);
  }
  throw ConfigError("unknown family '" + std::string(family) + "'");
}

Vector normalized_x0(Eigen::Index n) {
  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = (i % 2 == 0) ? 1.0 : -1.0;
  x.array() -= x.mean();
  return x / std::sqrt(disagreement(x));
}

std::vector<ScalingRow> run_scaling(const ScalingRequest& req) {
  if (req.sizes.empty() ||
      std::adjacent_find(req.sizes.begin(), req.sizes.end(), std::greater_equal<>()) != req.sizes.end()) {
    throw ConfigError("scaling: N list must be non-empty and strictly ascending");
  }
  std::vector<ScalingRow> rows;
  for (const Eigen::Index n : req.sizes) {
    ScalingRow row;
    row.n = n;
    try {
      const UpdateModel model = family_model(req.family, n, req.q);
      const auto cert = formula_gamma(model);
      row.gamma = cert.gamma;
      row.bound_over_v0 = deviation_bound(cert.gamma, static_cast<double>(n), 1.0);
      const Vector x0 = normalized_x0(n);
      if (req.trials >= 2) {
        MonteCarloOptions opts{req.trials, req.seed, req.workers};
        const auto est = estimate_consensus_mse(model, x0, opts, req.rel_tol);
        row.mse_over_v0 = est.mse_mean;
        row.mse_ci = est.ci_half_width;
      }
      for (const auto& b : prior_bounds(model.graph(), model.kind(), {req.q, 1.0, std::nullopt})) {
        if (b.value && (!row.prior_bound_best || *b.value < *row.prior_bound_best)) {
          row.prior_bound_best = b.value;
        }
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_scaling_csv(std::ostream& os, const std::vector<ScalingRow>& rows) {
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    cells.push_back({std::to_string(r.n), format_double(r.gamma), format_double(r.bound_over_v0),
                     cell(r.mse_over_v0), r.mse_over_v0 ? format_double(r.mse_ci) : "",
                     cell(r.prior_bound_best), r.error});
  }
  write_csv(os, {"N", "gamma", "bound_over_v0", "mse_over_v0", "mse_ci", "prior_bound_best", "error"},
            cells);
}

std::vector<BoundRow> run_compare_bounds(const UpdateModel& model, double v0,
                                         std::optional<double> sigma2) {
  std::vector<BoundRow> rows;
  BoundRow ours{"ours", std::nullopt, false, ""};
  try {
    const auto cert = formula_gamma(model);
    if (cert.feasible) {
      ours.value = deviation_bound(cert.gamma, static_cast<double>(model.n()), v0);
    } else {
      ours.error = "no finite gamma";
    }
  } catch (const std::exception& e) {
    ours.error = e.what();
  }
  rows.push_back(ours);
  for (const auto& b : prior_bounds(model.graph(), model.kind(), {model.q(), v0, sigma2})) {
    BoundRow r{b.name, b.value, false, b.error};
    if (b.value) r.vacuous = *b.value > v0;
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_bounds_csv(std::ostream& os, const std::vector<BoundRow>& rows) {
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    cells.push_back({r.name, cell(r.value), r.vacuous ? "1" : "0", r.error});
  }
  write_csv(os, {"bound_name", "value", "vacuous", "error"}, cells);
}

}  // namespace gossip
