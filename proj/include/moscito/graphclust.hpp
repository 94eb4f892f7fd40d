#pragma once

// Cosine affinity between coding vectors and normalized spectral clustering.

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "moscito/dtraj.hpp"

namespace moscito::graphclust {

struct AffinityGraph {
  Eigen::MatrixXd raw;    // cosine similarities in [-1, 1]
  Eigen::MatrixXd graph;  // raw clipped to [0, 1]; used for clustering

  Eigen::Index size() const noexcept { return graph.rows(); }
};

/// G(i, j) = z_i^T z_j / (|z_i| |z_j|); zero columns give zero rows/columns.
AffinityGraph affinity(const Eigen::MatrixXd& z);

/// Wraps an arbitrary symmetric similarity matrix (negatives clipped).
AffinityGraph affinity_from_matrix(const Eigen::MatrixXd& similarity);

struct EigenPairs {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // one column per value
};

/// Largest-k eigenpairs of a symmetric matrix by a dense solve.
EigenPairs top_eigenpairs_dense(const Eigen::MatrixXd& a, int k);

struct KrylovOptions {
  double tol = 1e-8;  // eigen-residual norm |A y - theta y|
  int max_restarts = 200;
  int extra_block = 2;
  int min_subspace = 60;
};

/// Largest-k eigenpairs by restarted block Krylov with Rayleigh-Ritz
/// extraction. The block width is at least k, so repeated eigenvalues (for
/// example one per disconnected component) are resolved.
EigenPairs top_eigenpairs_krylov(const Eigen::MatrixXd& a, int k, std::uint64_t seed,
                                 const KrylovOptions& opts = {});

int connected_components(const Eigen::MatrixXd& graph);

struct SpectralOptions {
  int restarts = 10;
  Eigen::Index dense_threshold = 600;
  KrylovOptions krylov;
};

/// Row-normalized eigenvectors of the k smallest eigenvalues of
/// I - D^{-1/2} G D^{-1/2}; n x k.
Eigen::MatrixXd spectral_embedding(const Eigen::MatrixXd& graph, int k, std::uint64_t seed,
                                   const SpectralOptions& opts = {});

DiscreteTrajectory spectral_clustering(const AffinityGraph& g, int k, std::uint64_t seed,
                                       std::vector<std::string>* warnings = nullptr,
                                       const SpectralOptions& opts = {});

}  // namespace moscito::graphclust
