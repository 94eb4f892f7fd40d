#include "moscito/graphclust.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <queue>
#include <random>

#include "moscito/baselines.hpp"
#include "moscito/error.hpp"

namespace moscito::graphclust {
namespace {

// Orthonormalizes `w` against `basis` (two Gram-Schmidt passes) and then
// within itself. Columns that vanish are replaced by fresh random directions.
Eigen::MatrixXd orthonormal_block(const Eigen::MatrixXd& basis, Eigen::MatrixXd w,
                                  std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  const Eigen::Index n = w.rows();
  // Block Gram-Schmidt with reorthogonalization. A column that collapses
  // (the Krylov space became invariant) is replaced by a random direction.
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    bool done = false;
    for (int attempt = 0; attempt < 8 && !done; ++attempt) {
      const double before = w.col(j).norm();
      for (int pass = 0; pass < 2; ++pass) {
        if (basis.cols() > 0) w.col(j) -= basis * (basis.transpose() * w.col(j));
        for (Eigen::Index i = 0; i < j; ++i) w.col(j) -= w.col(i).dot(w.col(j)) * w.col(i);
      }
      const double after = w.col(j).norm();
      if (after > 1e-10 * std::max(1.0, before) && after > 0.0) {
        w.col(j) /= after;
        done = true;
      } else {
        for (Eigen::Index r = 0; r < n; ++r) w(r, j) = normal(rng);
      }
    }
    if (!done) throw Error("block Krylov: could not extend the orthonormal basis");
  }
  return w;
}

}  // namespace

AffinityGraph affinity(const Eigen::MatrixXd& z) {
  if (!z.allFinite()) throw ValidationError("affinity: Z has non-finite entries");
  const Eigen::Index n = z.cols();
  Eigen::MatrixXd unit = z;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double norm = z.col(j).norm();
    if (norm > 0.0) unit.col(j) /= norm;
  }
  AffinityGraph g;
  g.raw = unit.transpose() * unit;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (z.col(j).norm() > 0.0) g.raw(j, j) = 1.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = std::clamp(0.5 * (g.raw(i, j) + g.raw(j, i)), -1.0, 1.0);
      g.raw(i, j) = v;
      g.raw(j, i) = v;
    }
  }
  g.graph = g.raw.cwiseMax(0.0);
  return g;
}

AffinityGraph affinity_from_matrix(const Eigen::MatrixXd& similarity) {
  if (similarity.rows() != similarity.cols()) throw DimensionError("affinity: matrix must be square");
  if (!similarity.allFinite()) throw ValidationError("affinity: non-finite entries");
  AffinityGraph g;
  g.raw = 0.5 * (similarity + similarity.transpose());
  g.graph = g.raw.cwiseMax(0.0);
  return g;
}

EigenPairs top_eigenpairs_dense(const Eigen::MatrixXd& a, int k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) throw Error("dense eigensolver failed");
  const Eigen::Index n = a.rows();
  EigenPairs out;
  out.values.resize(k);
  out.vectors.resize(n, k);
  for (int i = 0; i < k; ++i) {
    out.values(i) = es.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  return out;
}

EigenPairs top_eigenpairs_krylov(const Eigen::MatrixXd& a, int k, std::uint64_t seed,
                                 const KrylovOptions& opts) {
  const Eigen::Index n = a.rows();
  if (k < 1 || k > n) throw ValidationError("krylov: need 1 <= k <= n");
  const Eigen::Index block = std::min<Eigen::Index>(n, k + opts.extra_block);
  const Eigen::Index steps = std::max<Eigen::Index>(
      3, (std::max<Eigen::Index>(opts.min_subspace, 3 * k) + block - 1) / block);
  if (block * steps >= n) return top_eigenpairs_dense(a, k);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd start(n, block);
  for (Eigen::Index j = 0; j < block; ++j)
    for (Eigen::Index i = 0; i < n; ++i) start(i, j) = normal(rng);
  start = orthonormal_block(Eigen::MatrixXd(n, 0), start, rng);

  EigenPairs best;
  for (int restart = 0; restart <= opts.max_restarts; ++restart) {
    Eigen::MatrixXd q(n, block * steps);
    Eigen::MatrixXd aq(n, block * steps);
    q.leftCols(block) = start;
    for (Eigen::Index s = 0; s < steps; ++s) {
      aq.middleCols(s * block, block) = a * q.middleCols(s * block, block);
      if (s + 1 < steps)
        q.middleCols((s + 1) * block, block) =
            orthonormal_block(q.leftCols((s + 1) * block), aq.middleCols(s * block, block), rng);
    }
    Eigen::MatrixXd t = q.transpose() * aq;
    t = 0.5 * (t + t.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const Eigen::Index m = t.rows();
    // Ritz pairs in descending order.
    Eigen::MatrixXd s_top(m, block);
    Eigen::VectorXd theta(block);
    for (Eigen::Index i = 0; i < block; ++i) {
      theta(i) = es.eigenvalues()(m - 1 - i);
      s_top.col(i) = es.eigenvectors().col(m - 1 - i);
    }
    const Eigen::MatrixXd y = q * s_top;
    const Eigen::MatrixXd ay = aq * s_top;
    double worst = 0.0;
    for (int i = 0; i < k; ++i) worst = std::max(worst, (ay.col(i) - theta(i) * y.col(i)).norm());

    best.values = theta.head(k);
    best.vectors = y.leftCols(k);
    if (worst <= opts.tol) break;
    start = orthonormal_block(Eigen::MatrixXd(n, 0), y, rng);
  }
  return best;
}

int connected_components(const Eigen::MatrixXd& graph) {
  const Eigen::Index n = graph.rows();
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  int components = 0;
  std::queue<Eigen::Index> todo;
  for (Eigen::Index s = 0; s < n; ++s) {
    if (seen[s]) continue;
    ++components;
    seen[s] = 1;
    todo.push(s);
    while (!todo.empty()) {
      const Eigen::Index u = todo.front();
      todo.pop();
      for (Eigen::Index v = 0; v < n; ++v)
        if (!seen[v] && v != u && graph(v, u) > 0.0) {
          seen[v] = 1;
          todo.push(v);
        }
    }
  }
  return components;
}

Eigen::MatrixXd spectral_embedding(const Eigen::MatrixXd& graph, int k, std::uint64_t seed,
                                   const SpectralOptions& opts) {
  const Eigen::Index n = graph.rows();
  const Eigen::VectorXd degree = graph.rowwise().sum();
  Eigen::VectorXd inv_sqrt(n);
  for (Eigen::Index i = 0; i < n; ++i) inv_sqrt(i) = degree(i) > 0.0 ? 1.0 / std::sqrt(degree(i)) : 0.0;
  // Smallest eigenvalues of I - N are the largest of N.
  const Eigen::MatrixXd normalized = inv_sqrt.asDiagonal() * graph * inv_sqrt.asDiagonal();
  const bool dense = n <= opts.dense_threshold || 4 * static_cast<Eigen::Index>(k) > n;
  const EigenPairs pairs =
      dense ? top_eigenpairs_dense(normalized, k) : top_eigenpairs_krylov(normalized, k, seed, opts.krylov);
  Eigen::MatrixXd emb = pairs.vectors;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = emb.row(i).norm();
    if (norm > 0.0) emb.row(i) /= norm;
  }
  return emb;
}

DiscreteTrajectory spectral_clustering(const AffinityGraph& g, int k, std::uint64_t seed,
                                       std::vector<std::string>* warnings,
                                       const SpectralOptions& opts) {
  const Eigen::Index n = g.size();
  if (k < 1) throw ValidationError("spectral_clustering: k must be >= 1");
  if (k > n)
    throw ValidationError("spectral_clustering: k=" + std::to_string(k) + " exceeds n=" +
                          std::to_string(n));
  if (warnings) {
    const int components = connected_components(g.graph);
    if (components > k)
      warnings->push_back("affinity graph has " + std::to_string(components) +
                          " connected components, more than k=" + std::to_string(k));
  }
  if (k == 1) return DiscreteTrajectory{std::vector<int>(static_cast<std::size_t>(n), 0), 1};

  const Eigen::MatrixXd emb = spectral_embedding(g.graph, k, seed, opts);
  baselines::KMeansOptions km;
  km.restarts = opts.restarts;
  return baselines::kmeans_fit(emb.transpose(), k, seed, km).labels;
}

}  // namespace moscito::graphclust
