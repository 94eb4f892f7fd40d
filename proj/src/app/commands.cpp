#include "moscito/app/commands.hpp"

#include <algorithm>
#include <chrono>
#include <optional>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "moscito/app/pipeline.hpp"
#include "moscito/bench.hpp"
#include "moscito/error.hpp"
#include "moscito/graphclust.hpp"
#include "moscito/io.hpp"
#include "moscito/simd.hpp"
#include "moscito/tempreg.hpp"
#include "../text.hpp"

namespace moscito::app {
namespace fs = std::filesystem;
namespace {

template <class Writer>
void write_output(const fs::path& path, Writer&& writer) {
  std::ostringstream buf;
  writer(buf);
  io::write_file_atomic(path, buf.str());
}

void write_features(const fs::path& dir, const Inputs& in, std::ostream& out) {
  write_output(dir / "features.csv", [&](std::ostream& o) { io::write_features_csv(o, in.features); });
  write_output(dir / "features.bin", [&](std::ostream& o) { io::write_features_binary(o, in.features); });
  out << "features: " << in.features.dims() << " x " << in.features.frames() << " -> "
      << (dir / "features.csv").string() << '\n';
  if (in.planted) {
    write_output(dir / "planted.csv", [&](std::ostream& o) { io::write_labels_csv(o, *in.planted); });
    out << "planted labels -> " << (dir / "planted.csv").string() << '\n';
  }
}

bool needs_new_inputs(const std::string& key) {
  return key.rfind("input.", 0) == 0 || key.rfind("synth.", 0) == 0 || key.rfind("features.", 0) == 0 ||
         key == "run.seed";
}

}  // namespace

int cmd_featurize(const PipelineConfig& cfg, std::ostream& out, std::ostream&) {
  const Inputs in = load_inputs(cfg);
  write_features(cfg.output_dir, in, out);
  return 0;
}

int cmd_synth(const PipelineConfig& cfg, std::ostream& out, std::ostream& err) {
  PipelineConfig c = cfg;
  c.source = InputSource::synth;
  return cmd_featurize(c, out, err);
}

int cmd_cluster(const PipelineConfig& cfg, std::ostream& out, std::ostream& err) {
  const Inputs in = load_inputs(cfg);
  const fs::path dir = cfg.output_dir;
  const ClusterRun run = cluster_all(in.features, cfg);
  for (const auto& w : run.warnings) err << "warning: " << w << '\n';
  for (const auto& r : run.results) {
    const std::string stem = dtraj_stem(r.method, r.k);
    write_output(dir / (stem + ".csv"), [&](std::ostream& o) { io::write_labels_csv(o, r.dtraj); });
    write_output(dir / (stem + ".svg"), [&](std::ostream& o) { io::write_segmentation_svg(o, r.dtraj); });
    out << r.method << " k=" << r.k << " segments=" << bench::segment_count(r.dtraj);
    if (in.planted) out << " ari=" << text::format_double(bench::ari(r.dtraj, *in.planted));
    out << '\n';
  }
  if (run.moscito_diagnostics)
    io::write_file_atomic(dir / "diagnostics_moscito.json", run.moscito_diagnostics->to_json(true) + "\n");
  if (in.planted) write_output(dir / "planted.csv", [&](std::ostream& o) { io::write_labels_csv(o, *in.planted); });
  return 0;
}

int cmd_score(const PipelineConfig& cfg, std::ostream& out, std::ostream& err) {
  cfg.validate();
  const fs::path dir = cfg.output_dir;
  std::vector<ClusterResult> found;
  std::vector<std::string> missing;
  for (const auto& method : cfg.methods)
    for (int k : cfg.k_list) {
      const fs::path path = dir / (dtraj_stem(method, k) + ".csv");
      std::ifstream f(path);
      if (!f) {
        missing.push_back(path.string());
        continue;
      }
      found.push_back({method, k, io::read_labels_csv(f, path.string())});
    }
  for (const auto& m : missing) err << "missing discrete trajectory: " << m << '\n';
  if (found.empty()) throw Error("no discrete trajectories found in '" + dir.string() + "'; run `cluster` first");

  const msm::ScoreTable table = score_all(found, cfg);
  write_output(dir / "scores.csv", [&](std::ostream& o) { table.write_csv(o); });
  write_output(dir / "rankings.csv", [&](std::ostream& o) { table.write_rankings(o); });
  table.write_csv(out);
  return 0;
}

int cmd_sweep(const PipelineConfig& cfg, const SweepRequest& sweep, std::ostream& out, std::ostream& err) {
  const std::string key = resolve_axis(sweep.axis);
  if (sweep.values.empty()) throw ConfigError("--values", "at least one value is required");
  cfg.validate();
  const std::string method = cfg.methods.front();
  const int k = cfg.k_list.front();
  const int tau = cfg.tau_list.front();

  // Validate every value before spending time on any run.
  std::vector<PipelineConfig> configs;
  for (const auto& v : sweep.values) {
    PipelineConfig c = cfg;
    c.set(key, v);
    c.methods = {method};
    c.k_list = {k};
    c.tau_list = {tau};
    c.validate();
    configs.push_back(std::move(c));
  }

  std::ostringstream csv;
  csv << "axis,value,method,k,tau,m,r,score,segments,ari\r\n";
  std::optional<Inputs> shared;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const PipelineConfig& c = configs[i];
    if (!shared || needs_new_inputs(key)) shared = load_inputs(c);
    const ClusterRun run = cluster_all(shared->features, c);
    for (const auto& w : run.warnings) err << "warning: " << w << '\n';
    const auto& r = run.results.front();
    const double score = msm::vamp_r(r.dtraj, tau, c.m, c.r);
    csv << key << ',' << sweep.values[i] << ',' << method << ',' << k << ',' << tau << ',' << c.m << ','
        << text::format_double(c.r) << ',' << text::format_double(score) << ',' << bench::segment_count(r.dtraj)
        << ',' << (shared->planted ? text::format_double(bench::ari(r.dtraj, *shared->planted)) : "") << "\r\n";
  }
  std::string name = key;
  std::replace(name.begin(), name.end(), '.', '_');
  io::write_file_atomic(fs::path(cfg.output_dir) / ("sweep_" + name + ".csv"), csv.str());
  out << csv.str();
  return 0;
}

int cmd_runtime(const PipelineConfig& cfg, std::ostream& out, std::ostream& err) {
  PipelineConfig c = cfg;
  c.solver.tol = 0.0;  // always run exactly max_iters iterations
  std::vector<std::pair<std::string, double>> stages;
  const StageTimer timer = [&](const std::string& stage, double seconds) { stages.emplace_back(stage, seconds); };
  const Inputs in = load_inputs(c, timer);
  const ClusterRun run = cluster_all(in.features, c, timer);
  for (const auto& w : run.warnings) err << "warning: " << w << '\n';
  {
    const auto start = std::chrono::steady_clock::now();
    (void)score_all(run.results, c);
    stages.emplace_back("msm_scoring", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }

  nlohmann::json j;
  j["frames"] = in.features.frames();
  j["features"] = in.features.dims();
  j["solver_iterations"] = c.solver.max_iters;
  j["simd_backend"] = std::string(simd::backend_name(simd::active_backend()));
  auto& arr = j["stages"] = nlohmann::json::array();
  for (const auto& [name, seconds] : stages) {
    arr.push_back({{"stage", name}, {"seconds", seconds}});
    out << name << ": " << seconds << " s\n";
  }
  io::write_file_atomic(fs::path(c.output_dir) / "runtime.json", j.dump(2) + "\n");
  return 0;
}

ErrorInfo classify_error(const std::exception& e) {
  ErrorInfo info;
  info.message = e.what();
  if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) {
    info.exit_code = 2;
    info.kind = "config";
    info.field = ce->field();
  } else if (const auto* pe = dynamic_cast<const ParseError*>(&e)) {
    info.kind = "parse";
    info.line = pe->line();
  } else if (dynamic_cast<const ConvergenceError*>(&e)) {
    info.kind = "convergence";
  } else if (dynamic_cast<const DimensionError*>(&e)) {
    info.kind = "dimension";
  } else if (dynamic_cast<const ValidationError*>(&e)) {
    info.kind = "validation";
  } else if (dynamic_cast<const Error*>(&e)) {
    info.kind = "runtime";
  } else if (dynamic_cast<const fs::filesystem_error*>(&e)) {
    info.kind = "io";
  } else {
    info.kind = "internal";
  }
  return info;
}

std::string error_json(const ErrorInfo& info) {
  nlohmann::json j;
  j["error"] = {{"kind", info.kind}, {"message", info.message}, {"exit_code", info.exit_code}};
  if (!info.field.empty()) j["error"]["field"] = info.field;
  if (info.line > 0) j["error"]["line"] = info.line;
  return j.dump();
}

}  // namespace moscito::app
