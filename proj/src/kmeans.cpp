#include <algorithm>
#include <limits>
#include <random>
#include <span>

#include "moscito/baselines.hpp"
#include "moscito/error.hpp"
#include "moscito/simd.hpp"

namespace moscito {

void DiscreteTrajectory::validate() const {
  if (k < 1 && !labels.empty()) throw ValidationError("discrete trajectory: k must be >= 1");
  for (std::size_t t = 0; t < labels.size(); ++t)
    if (labels[t] < 0 || labels[t] >= k)
      throw ValidationError("discrete trajectory: label " + std::to_string(labels[t]) +
                            " at frame " + std::to_string(t) + " outside [0, " +
                            std::to_string(k) + ")");
}

DiscreteTrajectory make_dtraj(std::vector<int> labels) {
  DiscreteTrajectory d;
  d.k = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  d.labels = std::move(labels);
  d.validate();
  return d;
}

}  // namespace moscito

namespace moscito::baselines {
namespace {

std::span<const double> col(const Eigen::MatrixXd& m, Eigen::Index j) {
  return {m.col(j).data(), static_cast<std::size_t>(m.rows())};
}

struct Run {
  std::vector<int> labels;
  Eigen::MatrixXd centroids;
  double inertia = 0.0;
  std::vector<double> trace;
};

Eigen::MatrixXd plus_plus_seeds(const Eigen::MatrixXd& y, int k, std::mt19937_64& rng) {
  const Eigen::Index n = y.cols();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd centers(y.rows(), k);
  std::vector<char> chosen(static_cast<std::size_t>(n), 0);

  auto first = std::min<Eigen::Index>(n - 1, static_cast<Eigen::Index>(unif(rng) * n));
  centers.col(0) = y.col(first);
  chosen[first] = 1;
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) d2[i] = simd::squared_distance(col(y, i), col(centers, 0));

  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (double v : d2) total += v;
    const double u = unif(rng);
    Eigen::Index pick = -1;
    if (total > 0.0) {
      const double target = u * total;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc > target && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
      if (pick < 0)
        for (Eigen::Index i = n - 1; i >= 0 && pick < 0; --i)
          if (d2[i] > 0.0) pick = i;
    } else {
      // Every point coincides with a center; take the u-quantile unchosen one.
      std::vector<Eigen::Index> free;
      for (Eigen::Index i = 0; i < n; ++i)
        if (!chosen[i]) free.push_back(i);
      pick = free[std::min(free.size() - 1, static_cast<std::size_t>(u * free.size()))];
    }
    chosen[pick] = 1;
    centers.col(c) = y.col(pick);
    for (Eigen::Index i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], simd::squared_distance(col(y, i), col(centers, c)));
  }
  return centers;
}

double assign(const Eigen::MatrixXd& y, const Eigen::MatrixXd& centers, std::vector<int>& labels,
              std::vector<double>& dist) {
  double inertia = 0.0;
  for (Eigen::Index i = 0; i < y.cols(); ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < centers.cols(); ++c) {
      const double d = simd::squared_distance(col(y, i), col(centers, c));
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    labels[i] = best;
    dist[i] = best_d;
    inertia += best_d;
  }
  return inertia;
}

Run lloyd(const Eigen::MatrixXd& y, Eigen::MatrixXd centers, const KMeansOptions& opts) {
  const Eigen::Index n = y.cols();
  const Eigen::Index k = centers.cols();
  Run run;
  run.labels.assign(static_cast<std::size_t>(n), 0);
  std::vector<double> dist(static_cast<std::size_t>(n));
  for (int it = 0; it < opts.max_iters; ++it) {
    run.trace.push_back(assign(y, centers, run.labels, dist));

    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(y.rows(), k);
    std::vector<int> count(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      next.col(run.labels[i]) += y.col(i);
      ++count[run.labels[i]];
    }
    std::vector<char> taken(static_cast<std::size_t>(n), 0);
    for (Eigen::Index c = 0; c < k; ++c) {
      if (count[c] > 0) {
        next.col(c) /= count[c];
        continue;
      }
      // Empty cluster: move it onto the worst-served point.
      Eigen::Index far = -1;
      for (Eigen::Index i = 0; i < n; ++i)
        if (!taken[i] && (far < 0 || dist[i] > dist[far])) far = i;
      taken[far] = 1;
      dist[far] = 0.0;
      next.col(c) = y.col(far);
    }
    double movement = 0.0;
    for (Eigen::Index c = 0; c < k; ++c)
      movement = std::max(movement, simd::squared_distance(col(next, c), col(centers, c)));
    centers = std::move(next);
    if (std::sqrt(movement) < opts.tol) break;
  }
  run.inertia = assign(y, centers, run.labels, dist);
  run.centroids = std::move(centers);
  return run;
}

}  // namespace

KMeansResult kmeans_fit(const Eigen::MatrixXd& y, int k, std::uint64_t seed, const KMeansOptions& opts) {
  const Eigen::Index n = y.cols();
  if (k < 1) throw ValidationError("kmeans: k must be >= 1");
  if (k > n)
    throw ValidationError("kmeans: k=" + std::to_string(k) + " exceeds the number of points " +
                          std::to_string(n));
  if (!y.allFinite()) throw ValidationError("kmeans: non-finite input");

  Run best;
  bool have = false;
  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    Run run = lloyd(y, plus_plus_seeds(y, k, rng), opts);
    if (!have || run.inertia < best.inertia) {
      best = std::move(run);
      have = true;
    }
  }

  // Relabel by order of first appearance; unused clusters go last.
  std::vector<int> remap(static_cast<std::size_t>(k), -1);
  int next = 0;
  for (int l : best.labels)
    if (remap[l] < 0) remap[l] = next++;
  for (auto& m : remap)
    if (m < 0) m = next++;

  KMeansResult out;
  out.labels.k = k;
  out.labels.labels.reserve(best.labels.size());
  for (int l : best.labels) out.labels.labels.push_back(remap[l]);
  out.centroids.resize(y.rows(), k);
  for (int c = 0; c < k; ++c) out.centroids.col(remap[c]) = best.centroids.col(c);
  out.inertia = best.inertia;
  out.inertia_trace = std::move(best.trace);
  return out;
}

DiscreteTrajectory kmeans(const Eigen::MatrixXd& y, int k, std::uint64_t seed) {
  return kmeans_fit(y, k, seed).labels;
}

}  // namespace moscito::baselines
