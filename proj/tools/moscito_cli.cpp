// moscito: command-line front end for the temporal subspace clustering
// pipeline. Exit codes: 0 success, 1 runtime failure, 2 usage/config error.

#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <vector>

#include "moscito/app/commands.hpp"
#include "moscito/app/config.hpp"
#include "moscito/error.hpp"

namespace {

using moscito::app::ErrorInfo;

int report(const ErrorInfo& info, bool json) {
  if (json)
    std::cerr << moscito::app::error_json(info) << '\n';
  else
    std::cerr << "error: " << info.message << '\n';
  return info.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal subspace clustering of trajectories (dictionary learning + MSM scoring)", "moscito"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  bool json_errors = false;
  bool dump_config = false;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "INI configuration file");
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (synthetic data, solver init, k-means)");
  app.add_option("--out", out_dir, "Output directory");
  app.add_flag("--json-errors", json_errors, "Emit errors as a JSON record on stderr");
  app.add_option("--set", overrides, "Override a setting: section.key=value (repeatable)");
  app.add_flag("--dump-config", dump_config, "Print the resolved configuration and exit");

  auto* featurize = app.add_subcommand("featurize", "Compute the feature matrix from the configured input");
  auto* cluster = app.add_subcommand("cluster", "Cluster with every configured method and k");
  auto* score = app.add_subcommand("score", "VAMP-score existing discrete trajectories per lag time");
  auto* sweep = app.add_subcommand("sweep", "Run MOSCITO once per value of one parameter");
  auto* synth = app.add_subcommand("synth", "Write a synthetic trajectory with planted states");
  auto* runtime = app.add_subcommand("runtime", "Report wall time per pipeline stage");
  moscito::app::SweepRequest sweep_req;
  sweep->add_option("--axis", sweep_req.axis, "Parameter to vary (s, d, weight_mode, lambda2, or section.key)")
      ->required();
  sweep->add_option("--values", sweep_req.values, "Comma-separated values")->required()->delimiter(',');

  // Peek for --json-errors so argument errors honor it too.
  for (int i = 1; i < argc; ++i)
    if (std::string(argv[i]) == "--json-errors") json_errors = true;

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    ErrorInfo info;
    info.exit_code = 2;
    info.kind = "usage";
    info.message = e.what();
    return report(info, json_errors);
  }

  moscito::app::PipelineConfig cfg;
  try {
    if (!config_path.empty()) cfg = moscito::app::load_config(config_path);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw moscito::ConfigError("--set", "expected section.key=value, got '" + kv + "'");
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (*seed_opt) cfg.seed = seed;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (dump_config) {
      std::cout << cfg.dump();
      return 0;
    }
    if (app.get_subcommands().empty())
      throw moscito::ConfigError("command", "a subcommand is required (featurize, cluster, score, sweep, synth, runtime)");
    cfg.validate();
  } catch (const std::exception& e) {
    ErrorInfo info = moscito::app::classify_error(e);
    info.exit_code = 2;
    if (info.kind != "config") info.kind = "config";
    return report(info, json_errors);
  }

  try {
    if (*featurize) return moscito::app::cmd_featurize(cfg, std::cout, std::cerr);
    if (*cluster) return moscito::app::cmd_cluster(cfg, std::cout, std::cerr);
    if (*score) return moscito::app::cmd_score(cfg, std::cout, std::cerr);
    if (*sweep) return moscito::app::cmd_sweep(cfg, sweep_req, std::cout, std::cerr);
    if (*synth) return moscito::app::cmd_synth(cfg, std::cout, std::cerr);
    if (*runtime) return moscito::app::cmd_runtime(cfg, std::cout, std::cerr);
  } catch (const std::exception& e) {
    return report(moscito::app::classify_error(e), json_errors);
  }
  return 2;
}
