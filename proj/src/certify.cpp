#include "gossip/certify.hpp"

#include <cmath>

namespace gossip {

std::string_view to_string(GammaMethod method) {
  switch (method) {
    case GammaMethod::kConditionCheck: return "condition_check";
    case GammaMethod::kBisection: return "bisection";
    case GammaMethod::kDegreeLimited: return "thm_limited";
    case GammaMethod::kUncorrelatedA: return "thm_uncorr_a";
    case GammaMethod::kUncorrelatedB: return "thm_uncorr_b";
    case GammaMethod::kUncorrelatedC: return "thm_uncorr_c";
    case GammaMethod::kBetaRatio: return "lemma_beta";
    case GammaMethod::kPbgaClosedForm: return "prop_pbga";
  }
  return "?";
}

namespace {

GammaCertificate infeasible(GammaMethod method) {
  GammaCertificate c;
  c.method = method;
  c.feasible = false;
  c.valid = false;
  return c;
}

GammaCertificate formula(double gamma, GammaMethod method) {
  GammaCertificate c;
  c.gamma = gamma;
  c.method = method;
  c.valid = true;
  return c;
}

}  // namespace

GammaCertificate check_condition(const MomentSet& m, double gamma, double tol) {
  if (!check_mean_preserving(m, 1e-9)) {
    throw PreconditionError("check_condition: moments do not preserve the expected average (1^T E[L] != 0)");
  }
  if (!(gamma >= 0.0)) throw PreconditionError("check_condition: gamma must be >= 0");
  const Matrix gap = gamma * m.edrift - m.el11l;
  const auto psd = is_psd(gap, tol);
  GammaCertificate c;
  c.gamma = gamma;
  c.method = GammaMethod::kConditionCheck;
  c.psd_min_eig = psd.min_eig;
  c.scale = psd.scale;
  c.valid = psd.psd;
  c.checked = true;
  return c;
}

GammaCertificate minimal_gamma(const MomentSet& m, double gamma_hi, double tol) {
  // The search itself only forgives roundoff. Accepting the caller's tol here
  // would let the answer slip below the true threshold by about tol / lambda,
  // and on tight instances the deviation bound built from it would then sit
  // under the actual mean-square deviation.
  const double search_tol = std::min(tol, 1e-13);
  if (!(gamma_hi > 0.0) || !std::isfinite(gamma_hi)) gamma_hi = 1.0;
  const double cap = std::ldexp(1.0, 60);
  double b = gamma_hi;
  while (!check_condition(m, b, search_tol).valid) {
    if (b >= cap) return infeasible(GammaMethod::kBisection);
    b *= 2.0;
  }

  double a = 0.0;
  if (check_condition(m, 0.0, search_tol).valid) {
    b = 0.0;
  } else {
    // Width relative to the shrinking upper end, so the answer is resolved to
    // ~1e-11 of itself rather than of the (possibly loose) initial bracket.
    while (b - a > 1e-11 * std::max(1.0, b)) {
      const double mid = 0.5 * (a + b);
      if (check_condition(m, mid, search_tol).valid) b = mid; else a = mid;
    }
  }
  GammaCertificate out = check_condition(m, b, tol);
  out.method = GammaMethod::kBisection;
  return out;
}

GammaCertificate minimal_gamma(const UpdateModel& model, const MomentSet& m, double tol) {
  const double alpha = structure_bounds(model).alpha_min;
  if (alpha <= 0.0) return infeasible(GammaMethod::kBisection);
  return minimal_gamma(m, static_cast<double>(model.n()) / alpha, tol);
}

GammaCertificate gamma_limited(const StructureBounds& b) {
  if (b.alpha_min <= 0.0) return infeasible(GammaMethod::kDegreeLimited);
  return formula(b.a_max / b.alpha_min, GammaMethod::kDegreeLimited);
}

GammaCertificate gamma_uncorrelated(const StructureBounds& b, CorrelationCase which,
                                    const CovarianceVerdict& verdict) {
  if (!verdict.holds) {
    throw PreconditionError("gamma_uncorrelated: coefficients are correlated (max |cov| = " +
                            std::to_string(verdict.max_violation) + ")");
  }
  switch (which) {
    case CorrelationCase::kA:
      if (b.alpha_min <= 0.0) return infeasible(GammaMethod::kUncorrelatedA);
      return formula(b.a_ind_max / b.alpha_min, GammaMethod::kUncorrelatedA);
    case CorrelationCase::kB:
      if (b.alpha_min <= 0.0) return infeasible(GammaMethod::kUncorrelatedB);
      return formula(b.a_row_max / b.alpha_min, GammaMethod::kUncorrelatedB);
    case CorrelationCase::kC:
      if (b.alpha_min <= 0.0) return infeasible(GammaMethod::kUncorrelatedC);
      return formula(b.a_col_max / b.alpha_min, GammaMethod::kUncorrelatedC);
  }
  return infeasible(GammaMethod::kUncorrelatedB);
}

GammaCertificate gamma_from_beta(double beta, double alpha_min) {
  if (!(beta >= 0.0)) throw PreconditionError("gamma_from_beta: beta must be >= 0");
  if (alpha_min <= 0.0) return infeasible(GammaMethod::kBetaRatio);
  return formula(beta / alpha_min, GammaMethod::kBetaRatio);
}

GammaCertificate gamma_pbga(double w_max, double q) {
  if (!(q > 0.0 && q < 1.0)) throw PreconditionError("gamma_pbga: q must lie in (0,1)");
  if (!(w_max >= 0.0)) throw PreconditionError("gamma_pbga: W_max must be >= 0");
  return formula((w_max + 1.0) * q / (1.0 - q), GammaMethod::kPbgaClosedForm);
}

GammaCertificate formula_gamma(const UpdateModel& model, double budget) {
  if (!check_mean_preserving(expected_laplacian(model), 1e-9)) {
    throw PreconditionError("formula_gamma: model does not preserve the expected average");
  }
  const StructureBounds b = structure_bounds(model);
  switch (model.kind()) {
    case ModelKind::kAAGA:
    case ModelKind::kBGA:
      return gamma_limited(b);
    case ModelKind::kSAGA:
      return gamma_uncorrelated(b, CorrelationCase::kB,
                                covariance_structure(model, CorrelationCase::kB, budget));
    case ModelKind::kPBGA: {
      const GraphStats s = stats(model.graph());
      if (s.is_symmetric && model.q() < 1.0) return gamma_pbga(s.w_max, model.q());
      return gamma_limited(b);
    }
  }
  return gamma_limited(b);
}

double deviation_bound(double gamma, double n, double v0) {
  if (!(gamma >= 0.0) || !(n >= 1.0) || !(v0 >= 0.0)) {
    throw PreconditionError("deviation_bound: need gamma >= 0, n >= 1, v0 >= 0");
  }
  if (std::isinf(gamma)) return v0;
  return gamma / (n + gamma) * v0;
}

BoundReport bound_report(double gamma, Eigen::Index n, double v0) {
  return {gamma, n, v0, deviation_bound(gamma, static_cast<double>(n), v0)};
}

Matrix supermartingale_matrix(const std::vector<LaplacianEvent>& events, double gamma) {
  if (events.empty()) throw StructuralError("supermartingale_gap: empty event list");
  double total = 0.0;
  for (const auto& e : events) total += e.probability;
  if (std::abs(total - 1.0) > 1e-10) {
    throw StructuralError("supermartingale_gap: probabilities sum to " + std::to_string(total));
  }
  const Eigen::Index n = events.front().n;
  const Matrix q = Matrix::Ones(n, n) + gamma * Matrix::Identity(n, n);
  Matrix expected = Matrix::Zero(n, n);
  for (const auto& e : events) {
    const Matrix step = Matrix::Identity(n, n) - e.dense();
    expected.noalias() += e.probability * step.transpose() * q * step;
  }
  return q - expected;
}

PsdResult<double> supermartingale_gap(const std::vector<LaplacianEvent>& events, double gamma,
                                      double tol) {
  return is_psd(supermartingale_matrix(events, gamma), tol);
}

std::vector<PriorBound> prior_bounds(const WeightedGraph& g, ModelKind kind,
                                     const PriorBoundInput& in) {
  const double n = static_cast<double>(g.n());
  const double q = in.q;
  std::vector<PriorBound> out;

  std::optional<GraphSpectrum> cached;
  std::string spectrum_error;
  auto spectrum = [&]() -> const GraphSpectrum* {
    if (!cached && spectrum_error.empty()) {
      try {
        cached = graph_spectrum(g);
      } catch (const std::exception& e) {
        spectrum_error = e.what();
      }
    }
    return cached ? &*cached : nullptr;
  };

  switch (kind) {
    case ModelKind::kAAGA: {
      PriorBound b{"aaga_ffsz", std::nullopt, ""};
      if (n < 2) {
        b.error = "needs N >= 2";
      } else {
        const double sigma2 = in.sigma2.value_or(in.v0 * n / (n - 1.0));
        b.value = (q - q / n) / (1.0 - q + q / n) * sigma2 / n;
      }
      out.push_back(std::move(b));
      break;
    }
    case ModelKind::kBGA: {
      PriorBound tca{"bga_tca", std::nullopt, ""};
      PriorBound ffpf{"bga_ffpf", std::nullopt, ""};
      const GraphSpectrum* s = spectrum();
      if (!s) {
        tca.error = ffpf.error = spectrum_error;
      } else if (!s->connected) {
        tca.error = ffpf.error = "graph is disconnected";
      } else {
        const double l1 = s->lambda_1;
        const double llast = s->lambda_last;
        tca.value = in.v0 * (1.0 - (l1 / llast) / (1.0 - 0.5 * (q / n) * llast));
        const double dmax = static_cast<double>(stats(g).d_max);
        ffpf.value = 2.0 * in.v0 * q / (1.0 - q) * dmax * dmax / (n * l1);
      }
      out.push_back(std::move(tca));
      out.push_back(std::move(ffpf));
      break;
    }
    case ModelKind::kSAGA: {
      PriorBound b{"saga_ffsz", std::nullopt, ""};
      const GraphSpectrum* s = spectrum();
      if (!s) {
        b.error = spectrum_error;
      } else if (s->esr >= 1.0 - 1e-12) {
        b.error = "esr(W) = 1";
      } else {
        b.value = q / (1.0 - q) / (2.0 * n) / (1.0 - s->esr) * in.v0;
      }
      out.push_back(std::move(b));
      break;
    }
    case ModelKind::kPBGA:
      break;
  }
  return out;
}

}  // namespace gossip
