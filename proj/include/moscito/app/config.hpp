#pragma once

// Pipeline configuration: typed settings addressable by dotted keys
// (`section.name`) so the config file, `--set`, and `sweep` share one path.
// Precedence: built-in defaults < config file < command-line flags.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "moscito/bench.hpp"
#include "moscito/dictlearn.hpp"
#include "moscito/features.hpp"
#include "moscito/tempreg.hpp"

namespace moscito::app {

enum class InputSource { automatic, synth, trajectory, features };

struct PipelineConfig {
  // [input]
  InputSource source = InputSource::automatic;
  std::string trajectory_path;
  std::string topology_path;
  std::string features_path;

  bench::SynthSpec synth;  // [synth]; seed comes from run.seed

  // [features]
  std::vector<std::string> selection{"backbone"};
  features::Scaling scaling = features::Scaling::minmax01;
  features::FeatureOptions feature_options;

  tempreg::TemporalWeightConfig tempreg;  // [tempreg]
  dictlearn::SolverConfig solver;         // [solver]; seed comes from run.seed

  // [clustering]
  std::vector<int> k_list{3, 10};

  // [msm]
  std::vector<int> tau_list{1, 10};
  int m = 5;
  double r = 2.0;

  // [baselines]
  double pca_variance = 0.95;
  int tica_lag = 10;
  double tica_variance = 0.95;
  double ssc_lambda = 0.0;  // 0 selects the data-driven default

  // [run]
  std::vector<std::string> methods{"moscito", "pca_kmeans", "tica_kmeans", "ssc"};
  std::string output_dir = "moscito_out";
  std::uint64_t seed = 0;

  /// Assigns a value given as text. Throws ConfigError naming the key for an
  /// unknown key or an unparsable value.
  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;
  /// Every settable key, in dump order.
  static const std::vector<std::string>& keys();

  /// Cross-field checks (e.g. a trajectory needs a topology).
  void validate() const;
  InputSource resolved_source() const;
  dictlearn::SolverConfig solver_config() const;

  /// INI text that loads back to the same configuration.
  std::string dump() const;
};

/// Sweep axis shorthands: s, d, weight_mode, lambda1, ... -> dotted keys.
std::string resolve_axis(const std::string& axis);

/// Parses INI text; keys outside the known set are errors.
void apply_ini(PipelineConfig& cfg, std::istream& in, const std::string& source);
PipelineConfig load_config(const std::string& path);

std::string source_name(InputSource s);
std::vector<std::string> split_list(const std::string& text);

inline const std::vector<std::string> kMethods{"moscito", "pca_kmeans", "tica_kmeans", "ssc"};

}  // namespace moscito::app
