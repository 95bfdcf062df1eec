#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gossip/certify.hpp"
#include "gossip/io.hpp"
#include "gossip/moment_oracle.hpp"

namespace gossip {

/// Process exit codes shared by all subcommands.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitInfeasible = 2,
  kExitCapacity = 3,
  kExitConfig = 4,
};

enum class CertifyMode { kGamma, kMinimal, kFormula };

struct CertifyRequest {
  CertifyMode mode = CertifyMode::kFormula;
  double gamma = 1.0;             // for kGamma
  std::optional<Vector> x0;       // for the bound; default x0 = e_0
  double budget = 1 << 16;
  double tol = kCertificateTol;
};

struct CertifyOutcome {
  GammaCertificate certificate;
  BoundReport bound;
  MomentSet moments;
};

/// Formula / bisection / fixed gamma, always re-checked against the exact
/// moments so the reported psd_min_eig is real.
CertifyOutcome run_certify(const UpdateModel& model, const CertifyRequest& req);
Json to_json(const CertifyOutcome& outcome);
int exit_code(const CertifyOutcome& outcome);

struct SimulateRow {
  std::size_t t = 0;
  double mse_mean = 0.0;
  double mse_ci = 0.0;
  double v_mean = 0.0;
  double bound = 0.0;
  std::optional<double> oracle_mse;
};

struct SimulateRequest {
  Vector x0;
  std::size_t steps = 100;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  double budget = 4096;  // oracle column only when the support fits
};

std::vector<SimulateRow> run_simulate(const UpdateModel& model, const SimulateRequest& req);
void write_simulate_csv(std::ostream& os, const std::vector<SimulateRow>& rows);

std::vector<OracleRow> run_oracle(const UpdateModel& model, const Vector& x0, std::size_t steps,
                                  double budget = 1 << 16);
void write_oracle_csv(std::ostream& os, const std::vector<OracleRow>& rows);

/// bga_cycle: unit cycle; saga_cycle: cycle with W = adjacency / 2;
/// aaga_complete: complete graph with W = adjacency / (N (N - 1));
/// pbga_complete: complete graph with unit W.
UpdateModel family_model(std::string_view family, Eigen::Index n, double q);

/// x0 with mean 0 and V(x0) = 1 (alternating +/-1, recentered for odd n).
Vector normalized_x0(Eigen::Index n);

struct ScalingRow {
  Eigen::Index n = 0;
  double gamma = 0.0;
  double bound_over_v0 = 0.0;
  std::optional<double> mse_over_v0;
  double mse_ci = 0.0;
  std::optional<double> prior_bound_best;
  std::string error;
};

struct ScalingRequest {
  std::string family = "bga_cycle";
  std::vector<Eigen::Index> sizes{8, 16, 32};
  double q = 0.5;
  std::size_t trials = 1000;  // 0: skip simulation
  std::uint64_t seed = 0;
  unsigned workers = 0;
  double rel_tol = 1e-12;
};

std::vector<ScalingRow> run_scaling(const ScalingRequest& req);
void write_scaling_csv(std::ostream& os, const std::vector<ScalingRow>& rows);

struct BoundRow {
  std::string name;
  std::optional<double> value;
  bool vacuous = false;  // value exceeds V(x0)
  std::string error;
};

/// Our gamma / (N + gamma) * v0 next to every applicable prior bound.
std::vector<BoundRow> run_compare_bounds(const UpdateModel& model, double v0,
                                         std::optional<double> sigma2 = std::nullopt);
void write_bounds_csv(std::ostream& os, const std::vector<BoundRow>& rows);

}  // namespace gossip
