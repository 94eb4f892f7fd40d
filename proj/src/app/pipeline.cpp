#include "moscito/app/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>

#include "moscito/baselines.hpp"
#include "moscito/bench.hpp"
#include "moscito/error.hpp"
#include "moscito/graphclust.hpp"
#include "moscito/io.hpp"
#include "moscito/tempreg.hpp"
#include "moscito/trajio.hpp"

namespace moscito::app {
namespace {

class Stopwatch {
 public:
  Stopwatch(const StageTimer& timer, std::string stage)
      : timer_(timer), stage_(std::move(stage)), start_(std::chrono::steady_clock::now()) {}
  ~Stopwatch() {
    if (timer_)
      timer_(stage_, std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count());
  }

 private:
  const StageTimer& timer_;
  std::string stage_;
  std::chrono::steady_clock::time_point start_;
};

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

features::FeatureMatrix read_feature_file(const std::string& path) {
  if (ends_with(path, ".bin")) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open feature file '" + path + "'");
    return io::read_features_binary(in, path);
  }
  std::ifstream in(path);
  if (!in) throw Error("cannot open feature file '" + path + "'");
  return io::read_features_csv(in, path);
}

}  // namespace

Inputs load_inputs(const PipelineConfig& cfg, const StageTimer& timer) {
  cfg.validate();
  Stopwatch sw(timer, "inputs");
  Inputs in;
  switch (cfg.resolved_source()) {
    case InputSource::trajectory: {
      const auto topology = trajio::load_topology(cfg.topology_path);
      const auto traj = trajio::load_trajectory(cfg.trajectory_path, topology);
      in.features = features::assemble_features(
          traj, std::set<std::string>(cfg.selection.begin(), cfg.selection.end()), cfg.scaling,
          cfg.feature_options);
      break;
    }
    case InputSource::features:
      in.features = read_feature_file(cfg.features_path);
      if (cfg.scaling == features::Scaling::minmax01 && in.features.scaling != features::Scaling::minmax01)
        features::minmax_scale(in.features);
      break;
    default: {
      bench::SynthSpec spec = cfg.synth;
      spec.seed = cfg.seed;
      auto data = bench::synth_trajectory(spec);
      in.features = std::move(data.features);
      in.planted = std::move(data.planted);
      if (cfg.scaling == features::Scaling::minmax01) features::minmax_scale(in.features);
      break;
    }
  }
  return in;
}

std::string dtraj_stem(const std::string& method, int k) { return "dtraj_" + method + "_k" + std::to_string(k); }

ClusterRun cluster_all(const features::FeatureMatrix& fm, const PipelineConfig& cfg, const StageTimer& timer) {
  cfg.validate();
  fm.validate();
  const Eigen::MatrixXd& x = fm.values;
  ClusterRun run;
  for (int k : cfg.k_list)
    if (k > x.cols())
      throw ValidationError("k=" + std::to_string(k) + " exceeds the number of frames " + std::to_string(x.cols()));

  for (const auto& method : cfg.methods) {
    if (method == "moscito") {
      dictlearn::FitResult fit;
      {
        Stopwatch sw(timer, "moscito_fit");
        const auto lap = tempreg::temporal_laplacian(x.cols(), cfg.tempreg);
        fit = dictlearn::fit(x, lap, cfg.solver_config());
      }
      run.moscito_diagnostics = fit.diagnostics;
      graphclust::AffinityGraph g;
      {
        Stopwatch sw(timer, "moscito_affinity");
        g = graphclust::affinity(fit.Z);
      }
      Stopwatch sw(timer, "moscito_spectral");
      for (int k : cfg.k_list)
        run.results.push_back({method, k, graphclust::spectral_clustering(g, k, cfg.seed, &run.warnings)});
    } else if (method == "pca_kmeans") {
      Stopwatch sw(timer, "pca_kmeans");
      const int dims = baselines::pca_dims_for_variance(x, cfg.pca_variance);
      const Eigen::MatrixXd y = baselines::pca_project(x, dims);
      for (int k : cfg.k_list) run.results.push_back({method, k, baselines::kmeans(y, k, cfg.seed)});
    } else if (method == "tica_kmeans") {
      Stopwatch sw(timer, "tica_kmeans");
      const int dims = baselines::tica_dims_for_kinetic_variance(x, cfg.tica_lag, cfg.tica_variance);
      const Eigen::MatrixXd y = baselines::tica_project(x, cfg.tica_lag, dims);
      for (int k : cfg.k_list) run.results.push_back({method, k, baselines::kmeans(y, k, cfg.seed)});
    } else if (method == "ssc") {
      Stopwatch sw(timer, "ssc");
      const double lambda = cfg.ssc_lambda > 0.0 ? cfg.ssc_lambda : baselines::ssc_default_lambda(x);
      const auto model = baselines::ssc_coefficients(x, lambda);
      const Eigen::MatrixXd a = model.C.cwiseAbs() + model.C.cwiseAbs().transpose();
      const auto g = graphclust::affinity_from_matrix(a);
      for (int k : cfg.k_list)
        run.results.push_back({method, k, graphclust::spectral_clustering(g, k, cfg.seed, &run.warnings)});
    } else {
      throw ConfigError("run.methods", "unknown method '" + method + "'");
    }
  }
  return run;
}

msm::ScoreTable score_all(const std::vector<ClusterResult>& results, const PipelineConfig& cfg) {
  msm::ScoreTable table;
  for (const auto& res : results)
    for (int tau : cfg.tau_list)
      table.add({res.method, res.k, tau, cfg.m, cfg.r, msm::vamp_r(res.dtraj, tau, cfg.m, cfg.r)});
  return table;
}

}  // namespace moscito::app
