#pragma once

// In-memory pipeline stages shared by the subcommands.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "moscito/app/config.hpp"
#include "moscito/dictlearn.hpp"
#include "moscito/dtraj.hpp"
#include "moscito/features.hpp"
#include "moscito/msm.hpp"

namespace moscito::app {

struct Inputs {
  features::FeatureMatrix features;
  std::optional<DiscreteTrajectory> planted;  // synthetic input only
};

/// Records wall time per named stage when non-null.
using StageTimer = std::function<void(const std::string& stage, double seconds)>;

Inputs load_inputs(const PipelineConfig& cfg, const StageTimer& timer = {});

struct ClusterResult {
  std::string method;
  int k = 0;
  DiscreteTrajectory dtraj;
};

struct ClusterRun {
  std::vector<ClusterResult> results;  // methods in config order, then k
  std::optional<dictlearn::Diagnostics> moscito_diagnostics;
  std::vector<std::string> warnings;
};

/// Expensive per-method work (solver fit, projections, SSC coefficients) is
/// done once and shared across the k list.
ClusterRun cluster_all(const features::FeatureMatrix& fm, const PipelineConfig& cfg,
                       const StageTimer& timer = {});

/// VAMP-r for every result and every tau in the config.
msm::ScoreTable score_all(const std::vector<ClusterResult>& results, const PipelineConfig& cfg);

std::string dtraj_stem(const std::string& method, int k);

}  // namespace moscito::app
