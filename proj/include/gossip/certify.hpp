#pragma once

#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gossip/spectral.hpp"
#include "gossip/update_model.hpp"

namespace gossip {

enum class GammaMethod {
  kConditionCheck,
  kBisection,
  kDegreeLimited,
  kUncorrelatedA,
  kUncorrelatedB,
  kUncorrelatedC,
  kBetaRatio,
  kPbgaClosedForm,
};

std::string_view to_string(GammaMethod method);

/// A value of gamma for the accuracy condition
///   E[L^T 1 1^T L] <= gamma * E[L + L^T - L^T L]   (semidefinite order).
///
/// Certificates produced by a formula carry checked == false: their validity
/// follows from the formula's derivation, and psd_min_eig is NaN until
/// check_condition() is run against actual moments.
struct GammaCertificate {
  double gamma = std::numeric_limits<double>::infinity();
  GammaMethod method = GammaMethod::kConditionCheck;
  double psd_min_eig = std::numeric_limits<double>::quiet_NaN();
  double scale = 1.0;
  bool valid = false;
  bool feasible = true;  // false: no finite gamma (infeasible marker)
  bool checked = false;
};

inline constexpr double kCertificateTol = 1e-9;

/// PSD test of gamma * EDrift - EL11L with threshold -tol * max(1, ||.||).
/// Throws PreconditionError when 1^T E[L] != 0.
GammaCertificate check_condition(const MomentSet& m, double gamma, double tol = kCertificateTol);

/// Smallest gamma passing check_condition, by bisection on [0, gamma_hi].
/// gamma_hi is doubled (up to 2^60) while it fails; if it never passes the
/// result is infeasible.
GammaCertificate minimal_gamma(const MomentSet& m, double gamma_hi, double tol = kCertificateTol);

/// Same, with gamma_hi from the trivial bound sum a_ij <= N. Models without a
/// positive self-confidence (q == 1) are infeasible.
GammaCertificate minimal_gamma(const UpdateModel& model, const MomentSet& m,
                               double tol = kCertificateTol);

/// gamma = A_max / alpha_min.
GammaCertificate gamma_limited(const StructureBounds& b);

/// gamma = a_ind_max / alpha_min (a), a_row_max / alpha_min (b), a_col_max /
/// alpha_min (c). Only meaningful when the coefficients really are
/// uncorrelated, so the verdict from covariance_structure must be passed in.
GammaCertificate gamma_uncorrelated(const StructureBounds& b, CorrelationCase which,
                                    const CovarianceVerdict& verdict);

/// gamma = beta / alpha_min, from E[L^T 1 1^T L] <= beta E[L + L^T].
GammaCertificate gamma_from_beta(double beta, double alpha_min);

/// gamma = (W_max + 1) q / (1 - q), for PBGA with symmetric W.
GammaCertificate gamma_pbga(double w_max, double q);

/// The formula certificate that applies to the model's kind: AAGA/BGA via
/// limited updates, SAGA via uncorrelated updates, PBGA via its own formula
/// when W is symmetric (limited updates otherwise).
GammaCertificate formula_gamma(const UpdateModel& model, double budget = 1 << 16);

/// gamma / (n + gamma) * v0.
double deviation_bound(double gamma, double n, double v0);

struct BoundReport {
  double gamma = 0.0;
  Eigen::Index n = 0;
  double v0 = 0.0;
  double bound = 0.0;
};

BoundReport bound_report(double gamma, Eigen::Index n, double v0);

/// PSD test of (11^T + gamma I) - sum_e p_e (I - L_e)^T (11^T + gamma I) (I - L_e),
/// i.e. whether E[C(x(t+1)) | x(t)] <= C(x(t)) for C(y) = y^T (11^T + gamma I) y.
PsdResult<double> supermartingale_gap(const std::vector<LaplacianEvent>& events, double gamma,
                                      double tol = kCertificateTol);
Matrix supermartingale_matrix(const std::vector<LaplacianEvent>& events, double gamma);

struct PriorBound {
  std::string name;
  std::optional<double> value;
  std::string error;  // set when the bound does not apply to this graph
};

struct PriorBoundInput {
  double q = 0.5;
  double v0 = 1.0;                // V(x(0))
  std::optional<double> sigma2;   // i.i.d. variance; AAGA default v0 * N / (N - 1)
};

/// Bounds from earlier analyses of the same algorithms, reproduced as
/// published: bga_tca, bga_ffpf (BGA), aaga_ffsz (AAGA), saga_ffsz (SAGA).
std::vector<PriorBound> prior_bounds(const WeightedGraph& g, ModelKind kind,
                                     const PriorBoundInput& in);

}  // namespace gossip
