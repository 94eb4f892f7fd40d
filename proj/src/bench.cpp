#include "moscito/bench.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>

#include "moscito/error.hpp"

namespace moscito::bench {

void SynthSpec::validate() const {
  if (n_states < 2) throw ValidationError("synth: n_states must be >= 2");
  if (!(stay_prob > 0.0 && stay_prob <= 1.0)) throw ValidationError("synth: stay_prob must lie in (0, 1]");
  if (n_frames < 1) throw ValidationError("synth: n_frames must be >= 1");
  if (d_feat < n_states)
    throw ValidationError("synth: d_feat must be >= n_states so centers are equidistant");
  if (!(state_separation >= 0.0) || !std::isfinite(state_separation))
    throw ValidationError("synth: state_separation must be finite and >= 0");
  if (smoothing_window < 0) throw ValidationError("synth: smoothing_window must be >= 0");
}

SynthData synth_trajectory(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int k = spec.n_states;
  const int d = spec.d_feat;
  const int n = spec.n_frames;
  constexpr double sigma = 1.0;

  Eigen::MatrixXd gauss(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) gauss(i, j) = normal(rng);
  const Eigen::MatrixXd rotation = Eigen::HouseholderQR<Eigen::MatrixXd>(gauss).householderQ();
  const double offset = spec.state_separation * sigma / std::sqrt(2.0);
  Eigen::MatrixXd centers = offset * rotation.leftCols(k);

  std::vector<int> labels(static_cast<std::size_t>(n));
  std::uniform_int_distribution<int> start(0, k - 1);
  std::uniform_int_distribution<int> other(0, k - 2);
  labels[0] = start(rng);
  for (int t = 1; t < n; ++t) {
    if (unif(rng) < spec.stay_prob) {
      labels[t] = labels[t - 1];
    } else {
      const int o = other(rng);
      labels[t] = o >= labels[t - 1] ? o + 1 : o;
    }
  }

  Eigen::MatrixXd x(d, n);
  for (int t = 0; t < n; ++t)
    for (int i = 0; i < d; ++i) x(i, t) = centers(i, labels[t]) + sigma * normal(rng);

  if (spec.smoothing_window > 1) {
    const int left = (spec.smoothing_window - 1) / 2;
    const int right = spec.smoothing_window - 1 - left;
    Eigen::MatrixXd smooth(d, n);
    for (int t = 0; t < n; ++t) {
      const int lo = std::max(0, t - left);
      const int hi = std::min(n - 1, t + right);
      smooth.col(t) = x.middleCols(lo, hi - lo + 1).rowwise().mean();
    }
    x = std::move(smooth);
  }
  x.colwise() -= x.rowwise().minCoeff();

  SynthData out;
  out.features.values = std::move(x);
  out.features.scaling = features::Scaling::raw;
  for (int i = 0; i < d; ++i) out.features.labels.push_back({"synth", i});
  out.planted.labels = std::move(labels);
  out.planted.k = k;
  return out;
}

double ari(const DiscreteTrajectory& a, const DiscreteTrajectory& b) {
  if (a.size() != b.size())
    throw DimensionError("ari: length mismatch (" + std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                         ")");
  const auto n = static_cast<double>(a.size());
  if (a.size() < 2) return 1.0;
  std::map<std::pair<int, int>, long long> joint;
  std::map<int, long long> ra, rb;
  for (std::size_t t = 0; t < a.size(); ++t) {
    ++joint[{a.labels[t], b.labels[t]}];
    ++ra[a.labels[t]];
    ++rb[b.labels[t]];
  }
  auto pairs = [](long long c) { return 0.5 * static_cast<double>(c) * static_cast<double>(c - 1); };
  double index = 0.0, sa = 0.0, sb = 0.0;
  for (const auto& [key, c] : joint) index += pairs(c);
  for (const auto& [key, c] : ra) sa += pairs(c);
  for (const auto& [key, c] : rb) sb += pairs(c);
  const double expected = sa * sb / pairs(static_cast<long long>(n));
  const double max_index = 0.5 * (sa + sb);
  // Both partitions trivial in the same way (all one cluster, or all singletons).
  if (max_index == expected) return index == max_index ? 1.0 : 0.0;
  return (index - expected) / (max_index - expected);
}

int segment_count(const DiscreteTrajectory& d) {
  if (d.labels.empty()) return 0;
  int runs = 1;
  for (std::size_t t = 1; t < d.labels.size(); ++t)
    if (d.labels[t] != d.labels[t - 1]) ++runs;
  return runs;
}

}  // namespace moscito::bench
