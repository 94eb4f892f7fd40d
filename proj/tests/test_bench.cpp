#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "doctest.h"
#include "moscito/bench.hpp"
#include "moscito/error.hpp"

using namespace moscito;

namespace {

// Adjusted Rand index by explicit pair counting.
double ari_by_pairs(const std::vector<int>& a, const std::vector<int>& b) {
  const std::size_t n = a.size();
  double both = 0, in_a = 0, in_b = 0, pairs = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool sa = a[i] == a[j], sb = b[i] == b[j];
      both += sa && sb;
      in_a += sa;
      in_b += sb;
      pairs += 1;
    }
  const double expected = in_a * in_b / pairs;
  const double max_index = 0.5 * (in_a + in_b);
  return (both - expected) / (max_index - expected);
}

DiscreteTrajectory random_labels(int n, int k, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> u(0, k - 1);
  std::vector<int> l(static_cast<std::size_t>(n));
  for (auto& x : l) x = u(rng);
  return DiscreteTrajectory{l, k};
}

}  // namespace

TEST_CASE("synth output is deterministic, nonnegative and shaped as requested") {
  bench::SynthSpec spec;
  spec.n_frames = 500;
  spec.seed = 4;
  const auto a = bench::synth_trajectory(spec);
  const auto b = bench::synth_trajectory(spec);
  CHECK(a.features.values == b.features.values);
  CHECK(a.planted == b.planted);
  CHECK(a.features.dims() == 20);
  CHECK(a.features.frames() == 500);
  CHECK(a.features.values.minCoeff() == 0.0);
  CHECK(a.planted.k == 3);
  a.features.validate();
  spec.seed = 5;
  CHECK(bench::synth_trajectory(spec).features.values != a.features.values);
}

TEST_CASE("stay probability 1 plants a single state") {
  bench::SynthSpec spec;
  spec.stay_prob = 1.0;
  spec.n_frames = 300;
  const auto d = bench::synth_trajectory(spec).planted;
  CHECK(std::set<int>(d.labels.begin(), d.labels.end()).size() == 1);
}

TEST_CASE("empirical self-transition frequency matches stay_prob") {
  bench::SynthSpec spec;
  spec.n_frames = 10000;
  spec.stay_prob = 0.99;
  spec.seed = 8;
  const auto d = bench::synth_trajectory(spec).planted;
  int stays = 0;
  for (std::size_t t = 1; t < d.size(); ++t) stays += d.labels[t] == d.labels[t - 1];
  CHECK(std::abs(stays / 9999.0 - 0.99) <= 0.01);
}

TEST_CASE("planted run lengths are geometric") {
  bench::SynthSpec spec;
  spec.n_frames = 100000;
  spec.stay_prob = 0.99;
  spec.d_feat = 3;
  spec.seed = 2;
  const auto d = bench::synth_trajectory(spec).planted;
  const double mean_run = 100000.0 / bench::segment_count(d);
  CHECK(std::abs(mean_run - 1.0 / (1.0 - 0.99)) <= 0.1 * 100.0);
}

TEST_CASE("state centers are separation * sigma apart") {
  bench::SynthSpec spec;
  spec.n_frames = 30000;
  spec.stay_prob = 0.9;
  spec.smoothing_window = 0;
  spec.d_feat = 6;
  spec.state_separation = 5.0;
  spec.seed = 3;
  const auto data = bench::synth_trajectory(spec);
  std::vector<Eigen::VectorXd> mean(3, Eigen::VectorXd::Zero(6));
  std::vector<int> count(3, 0);
  for (std::size_t t = 0; t < data.planted.size(); ++t) {
    mean[data.planted.labels[t]] += data.features.values.col(static_cast<Eigen::Index>(t));
    ++count[data.planted.labels[t]];
  }
  for (int s = 0; s < 3; ++s) mean[s] /= count[s];
  for (int s = 0; s < 3; ++s)
    for (int r = s + 1; r < 3; ++r) CHECK((mean[s] - mean[r]).norm() == doctest::Approx(5.0).epsilon(0.03));
}

TEST_CASE("invalid synth specs are rejected") {
  auto bad = [](auto mutate) {
    bench::SynthSpec s;
    mutate(s);
    return s;
  };
  CHECK_THROWS_AS(bench::synth_trajectory(bad([](auto& s) { s.n_states = 1; })), ValidationError);
  CHECK_THROWS_AS(bench::synth_trajectory(bad([](auto& s) { s.stay_prob = 0.0; })), ValidationError);
  CHECK_THROWS_AS(bench::synth_trajectory(bad([](auto& s) { s.stay_prob = 1.5; })), ValidationError);
  CHECK_THROWS_AS(bench::synth_trajectory(bad([](auto& s) { s.n_frames = 0; })), ValidationError);
  CHECK_THROWS_AS(bench::synth_trajectory(bad([](auto& s) { s.d_feat = 2; })), ValidationError);
  CHECK_THROWS_AS(bench::synth_trajectory(bad([](auto& s) { s.state_separation = -1; })), ValidationError);
  CHECK_THROWS_AS(bench::synth_trajectory(bad([](auto& s) { s.smoothing_window = -1; })), ValidationError);
}

TEST_CASE("ARI of identical and relabeled partitions is 1") {
  const auto a = make_dtraj({0, 0, 1, 1, 2, 2, 2});
  CHECK(bench::ari(a, a) == 1.0);
  const auto b = make_dtraj({2, 2, 0, 0, 1, 1, 1});
  CHECK(bench::ari(a, b) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("ARI matches pair counting and is symmetric") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_labels(60, 2 + trial % 4, rng);
    const auto b = random_labels(60, 2 + trial % 3, rng);
    CHECK(bench::ari(a, b) == doctest::Approx(ari_by_pairs(a.labels, b.labels)).epsilon(1e-12));
    CHECK(bench::ari(a, b) == bench::ari(b, a));
  }
}

TEST_CASE("independent random labelings have ARI near zero") {
  std::mt19937_64 rng(5);
  const auto a = random_labels(10000, 4, rng);
  const auto b = random_labels(10000, 4, rng);
  CHECK(std::abs(bench::ari(a, b)) < 0.02);
}

TEST_CASE("ARI length mismatch is an error") {
  CHECK_THROWS_AS(bench::ari(make_dtraj({0, 1}), make_dtraj({0, 1, 1})), DimensionError);
}

TEST_CASE("segment counts") {
  CHECK(bench::segment_count(make_dtraj({0, 0, 1, 1, 0})) == 3);
  CHECK(bench::segment_count(make_dtraj({2, 2, 2})) == 1);
  std::vector<int> alt(17);
  for (int i = 0; i < 17; ++i) alt[i] = i % 2;
  CHECK(bench::segment_count(make_dtraj(alt)) == 17);
  CHECK(bench::segment_count(DiscreteTrajectory{}) == 0);
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const auto d = random_labels(30, 5, rng);
    CHECK(bench::segment_count(d) >= static_cast<int>(std::set<int>(d.labels.begin(), d.labels.end()).size()));
  }
}
