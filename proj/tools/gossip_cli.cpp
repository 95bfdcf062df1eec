// gossip: certify, simulate and compare accuracy bounds for randomized
// average-preserving consensus systems.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gossip/experiments.hpp"
#include "gossip/moment_oracle.hpp"

namespace {

using gossip::Json;

// JSON config files: top-level keys are global options, nested objects are
// subcommand sections, e.g. {"seed": 3, "simulate": {"model": {...}, "steps": 50}}.
class ConfigJson : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    return "{}";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    Json j;
    try {
      j = Json::parse(input);
    } catch (const Json::parse_error& e) {
      throw CLI::ConversionError(std::string("config: ") + e.what());
    }
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

 private:
  static void collect(const Json& j, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& out) {
    for (const auto& [key, value] : j.items()) {
      // An object under a subcommand name opens a section; any other object
      // (a model or graph) is passed through as inline JSON.
      if (value.is_object() && parents.empty() && is_section(key)) {
        CLI::ConfigItem open;
        open.parents = parents;
        open.name = key;
        open.inputs = {"ON"};
        out.push_back(open);
        auto sub = parents;
        sub.push_back(key);
        collect(value, sub, out);
        CLI::ConfigItem close;
        close.parents = sub;
        close.name = "--";
        out.push_back(close);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array() && !value.empty() && !value.front().is_structured()) {
        for (const auto& v : value) item.inputs.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      } else if (value.is_string()) {
        item.inputs = {value.get<std::string>()};
      } else if (value.is_boolean()) {
        item.inputs = {value.get<bool>() ? "true" : "false"};
      } else {
        item.inputs = {value.dump()};
      }
      out.push_back(std::move(item));
    }
  }

  static bool is_section(const std::string& key) {
    return key == "certify" || key == "simulate" || key == "oracle" || key == "scaling" ||
           key == "compare-bounds";
  }
};

struct Sink {
  std::ofstream file;
  std::ostream* os = &std::cout;
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file.open(path);
      if (!file) throw gossip::ConfigError("cannot open output '" + path + "'");
      os = &file;
    }
  }
};

Json rows_json(const std::vector<gossip::SimulateRow>& rows) {
  Json a = Json::array();
  for (const auto& r : rows) {
    a.push_back({{"t", r.t}, {"mse_mean", r.mse_mean}, {"mse_ci", r.mse_ci}, {"v_mean", r.v_mean},
                 {"bound", r.bound}, {"oracle_mse", r.oracle_mse ? Json(*r.oracle_mse) : Json(nullptr)}});
  }
  return a;
}

Json rows_json(const std::vector<gossip::OracleRow>& rows) {
  Json a = Json::array();
  for (const auto& r : rows) {
    a.push_back({{"t", r.t}, {"mse", r.mse}, {"disagreement", r.disagreement}, {"lyapunov", r.lyapunov}});
  }
  return a;
}

Json rows_json(const std::vector<gossip::ScalingRow>& rows) {
  Json a = Json::array();
  for (const auto& r : rows) {
    Json j{{"N", r.n}, {"gamma", r.gamma}, {"bound_over_v0", r.bound_over_v0}};
    j["mse_over_v0"] = r.mse_over_v0 ? Json(*r.mse_over_v0) : Json(nullptr);
    j["mse_ci"] = r.mse_ci;
    j["prior_bound_best"] = r.prior_bound_best ? Json(*r.prior_bound_best) : Json(nullptr);
    if (!r.error.empty()) j["error"] = r.error;
    a.push_back(std::move(j));
  }
  return a;
}

Json rows_json(const std::vector<gossip::BoundRow>& rows) {
  Json a = Json::array();
  for (const auto& r : rows) {
    Json j{{"bound_name", r.name}, {"value", r.value ? Json(*r.value) : Json(nullptr)}, {"vacuous", r.vacuous}};
    if (!r.error.empty()) j["error"] = r.error;
    a.push_back(std::move(j));
  }
  return a;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Accuracy certificates and simulation for randomized average consensus"};
  app.fallthrough();
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<ConfigJson>());
  app.set_config("--config", "", "JSON config file");

  std::uint64_t seed = 0;
  std::string out_path;
  std::string format = "csv";
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--out", out_path, "Output path (default stdout)");
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  std::string model_arg;
  std::string x0_arg = "alternating";
  double budget = 1 << 16;

  // certify
  auto* certify = app.add_subcommand("certify", "Check or search a gamma certificate");
  double gamma = 0.0;
  bool minimal = false;
  std::string formula_choice;
  certify->add_option("--model", model_arg, "Model JSON (inline or path)")->required();
  auto* gamma_opt = certify->add_option("--gamma", gamma, "Check this gamma");
  auto* minimal_opt = certify->add_flag("--minimal", minimal, "Bisect for the smallest valid gamma");
  auto* formula_opt = certify->add_option("--theorem", formula_choice, "Formula gamma")->check(CLI::IsMember({"auto"}));
  gamma_opt->excludes(minimal_opt)->excludes(formula_opt);
  minimal_opt->excludes(formula_opt);
  certify->add_option("--x0", x0_arg, "Initial state for the bound");
  certify->add_option("--budget", budget, "Enumeration budget");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo MSE trajectory");
  gossip::SimulateRequest sim;
  simulate->add_option("--model", model_arg, "Model JSON (inline or path)")->required();
  simulate->add_option("--x0", x0_arg, "Initial state");
  simulate->add_option("--steps", sim.steps, "Horizon T");
  simulate->add_option("--trials", sim.trials, "Trials K")->check(CLI::Range(2ul, 1ul << 40));
  simulate->add_option("--workers", sim.workers, "Worker threads (0: all cores)");
  simulate->add_option("--budget", sim.budget, "Enumeration budget for the oracle column");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Exact second-moment trajectory");
  std::size_t oracle_steps = 100;
  oracle->add_option("--model", model_arg, "Model JSON (inline or path)")->required();
  oracle->add_option("--x0", x0_arg, "Initial state");
  oracle->add_option("--steps", oracle_steps, "Horizon T");
  oracle->add_option("--budget", budget, "Enumeration budget");

  // scaling
  auto* scaling = app.add_subcommand("scaling", "Bound and simulated MSE across network sizes");
  gossip::ScalingRequest scale;
  std::vector<long> sizes;
  scaling->add_option("--family", scale.family, "Graph/model family")
      ->check(CLI::IsMember({"bga_cycle", "saga_cycle", "aaga_complete", "pbga_complete"}));
  scaling->add_option("--sizes", sizes, "Ascending list of N")->expected(1, -1);
  scaling->add_option("--q", scale.q, "Mixing weight");
  scaling->add_option("--trials", scale.trials, "Trials per N (0 skips simulation)");
  scaling->add_option("--workers", scale.workers, "Worker threads (0: all cores)");
  scaling->add_option("--rel-tol", scale.rel_tol, "Consensus threshold on V(x)/V(x0)");

  // compare-bounds
  auto* compare = app.add_subcommand("compare-bounds", "Our bound next to prior bounds");
  std::optional<double> v0_arg, sigma2_arg;
  compare->add_option("--model", model_arg, "Model JSON (inline or path)")->required();
  compare->add_option("--x0", x0_arg, "Initial state (sets V(x0))");
  compare->add_option("--v0", v0_arg, "Use this V(x0) directly");
  compare->add_option("--sigma2", sigma2_arg, "i.i.d. variance for the AAGA comparison");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : gossip::kExitConfig;
  }

  try {
    Sink sink(out_path);
    std::ostream& os = *sink.os;

    if (*certify) {
      const auto model = gossip::model_from_json(gossip::load_json_arg(model_arg));
      gossip::CertifyRequest req;
      req.budget = budget;
      if (*gamma_opt) {
        req.mode = gossip::CertifyMode::kGamma;
        req.gamma = gamma;
      } else if (minimal) {
        req.mode = gossip::CertifyMode::kMinimal;
      }
      if (certify->count("--x0") > 0) req.x0 = gossip::parse_x0(x0_arg, model.n(), seed);
      const auto outcome = gossip::run_certify(model, req);
      os << gossip::to_json(outcome).dump(2) << '\n';
      if (!outcome.certificate.feasible) std::cerr << "infeasible: no valid gamma\n";
      return gossip::exit_code(outcome);
    }
    if (*simulate) {
      const auto model = gossip::model_from_json(gossip::load_json_arg(model_arg));
      sim.x0 = gossip::parse_x0(x0_arg, model.n(), seed);
      sim.seed = seed;
      const auto rows = gossip::run_simulate(model, sim);
      if (format == "json") os << rows_json(rows).dump(2) << '\n';
      else gossip::write_simulate_csv(os, rows);
      return gossip::kExitOk;
    }
    if (*oracle) {
      const auto model = gossip::model_from_json(gossip::load_json_arg(model_arg));
      const auto x0 = gossip::parse_x0(x0_arg, model.n(), seed);
      const auto rows = gossip::run_oracle(model, x0, oracle_steps, budget);
      if (format == "json") os << rows_json(rows).dump(2) << '\n';
      else gossip::write_oracle_csv(os, rows);
      return gossip::kExitOk;
    }
    if (*scaling) {
      if (!sizes.empty()) scale.sizes.assign(sizes.begin(), sizes.end());
      scale.seed = seed;
      const auto rows = gossip::run_scaling(scale);
      if (format == "json") os << rows_json(rows).dump(2) << '\n';
      else gossip::write_scaling_csv(os, rows);
      bool capacity = false;
      for (const auto& r : rows) capacity = capacity || r.error.find("exceeds budget") != std::string::npos;
      return capacity ? gossip::kExitCapacity : gossip::kExitOk;
    }
    if (*compare) {
      const auto model = gossip::model_from_json(gossip::load_json_arg(model_arg));
      const double v0 = v0_arg ? *v0_arg : gossip::disagreement(gossip::parse_x0(x0_arg, model.n(), seed));
      const auto rows = gossip::run_compare_bounds(model, v0, sigma2_arg);
      if (format == "json") os << rows_json(rows).dump(2) << '\n';
      else gossip::write_bounds_csv(os, rows);
      return gossip::kExitOk;
    }
  } catch (const gossip::CapacityError& e) {
    std::cerr << "capacity: " << e.what() << '\n';
    return gossip::kExitCapacity;
  } catch (const gossip::ConfigError& e) {
    std::cerr << "config: " << e.what() << '\n';
    return gossip::kExitConfig;
  } catch (const gossip::StructuralError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return gossip::kExitConfig;
  } catch (const gossip::PreconditionError& e) {
    std::cerr << "precondition: " << e.what() << '\n';
    return gossip::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return gossip::kExitFailure;
  }
  return gossip::kExitOk;
}
