#pragma once

// Synthetic metastable trajectories with planted states, and the metrics
// used to score clusterings against them.

#include <cstdint>

#include "moscito/dtraj.hpp"
#include "moscito/features.hpp"

namespace moscito::bench {

struct SynthSpec {
  int n_states = 3;
  double stay_prob = 0.995;
  int n_frames = 2000;
  int d_feat = 20;
  double state_separation = 4.0;  // center distance in units of the noise sigma
  int smoothing_window = 5;       // centered moving average; 0 or 1 disables
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthData {
  features::FeatureMatrix features;
  DiscreteTrajectory planted;
};

/// Gaussian-emission hidden Markov chain. Centers sit on scaled, randomly
/// rotated coordinate axes so every pair is state_separation apart; rows are
/// shifted to be nonnegative after smoothing.
SynthData synth_trajectory(const SynthSpec& spec);

/// Adjusted Rand index.
double ari(const DiscreteTrajectory& a, const DiscreteTrajectory& b);

/// Number of maximal constant-label runs (0 for an empty trajectory).
int segment_count(const DiscreteTrajectory& d);

}  // namespace moscito::bench
