#pragma once

// Comparison pipelines: PCA + k-means, TICA + k-means and sparse subspace
// clustering (SSC), plus the k-means used everywhere.

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "moscito/dtraj.hpp"

namespace moscito::baselines {

// ---------------------------------------------------------------- k-means

struct KMeansOptions {
  int restarts = 10;
  int max_iters = 300;
  double tol = 1e-8;  // centroid movement
};

struct KMeansResult {
  DiscreteTrajectory labels;      // relabeled by first appearance
  Eigen::MatrixXd centroids;      // p x k, column c is cluster c
  double inertia = 0.0;
  std::vector<double> inertia_trace;  // per Lloyd iteration of the winning restart
};

/// k-means++ seeding and Lloyd iterations; best inertia over restarts.
/// Columns of `y` are points.
KMeansResult kmeans_fit(const Eigen::MatrixXd& y, int k, std::uint64_t seed,
                        const KMeansOptions& opts = {});
DiscreteTrajectory kmeans(const Eigen::MatrixXd& y, int k, std::uint64_t seed);

// ---------------------------------------------------------------- PCA

struct PcaResult {
  Eigen::MatrixXd projection;          // dims x n
  Eigen::MatrixXd components;          // d_feat x dims, orthonormal
  Eigen::VectorXd explained_variance;  // all eigenvalues, descending
  Eigen::VectorXd mean;
};

PcaResult pca(const Eigen::MatrixXd& x, int dims);
Eigen::MatrixXd pca_project(const Eigen::MatrixXd& x, int dims);
/// Smallest number of components whose variance share reaches `fraction`.
int pca_dims_for_variance(const Eigen::MatrixXd& x, double fraction);

// ---------------------------------------------------------------- TICA

inline constexpr double kRankEpsilon = 1e-10;

struct TicaResult {
  Eigen::MatrixXd projection;     // dims x n
  Eigen::MatrixXd eigenvectors;   // d_feat x dims, C0-orthonormal
  Eigen::VectorXd eigenvalues;    // all retained-rank eigenvalues, descending
  Eigen::MatrixXd c0;             // symmetrized instantaneous covariance
  Eigen::MatrixXd ctau;           // symmetrized time-lagged covariance
  Eigen::VectorXd mean;
};

TicaResult tica(const Eigen::MatrixXd& x, int lag, int dims, double eps_rank = kRankEpsilon);
Eigen::MatrixXd tica_project(const Eigen::MatrixXd& x, int lag, int dims);
/// Smallest number of ICs whose squared-eigenvalue share reaches `fraction`.
int tica_dims_for_kinetic_variance(const Eigen::MatrixXd& x, int lag, double fraction);

// ---------------------------------------------------------------- SSC

struct LassoOptions {
  double tol = 1e-6;  // max coefficient change per sweep
  int max_sweeps = 1000;
};

struct LassoResult {
  Eigen::VectorXd coef;
  int sweeps = 0;
  std::vector<double> objective_trace;  // after each sweep
};

/// Coordinate descent for min_c 1/2 |y - Y c|^2 + lambda |c|_1 given the
/// Gram matrix G = Y^T Y and correlations Y^T y. Coefficient `excluded`
/// (if >= 0) is pinned at zero.
LassoResult lasso_coordinate_descent(const Eigen::MatrixXd& gram, const Eigen::VectorXd& corr,
                                     double yy, double lambda, Eigen::Index excluded,
                                     const LassoOptions& opts = {});

/// Same problem solved from the data: keeps the residual y - Y c, so each
/// coordinate step costs O(rows of Y) instead of O(columns of Y).
LassoResult lasso_coordinate_descent_data(const Eigen::MatrixXd& y_mat, const Eigen::VectorXd& y,
                                          double lambda, Eigen::Index excluded,
                                          const LassoOptions& opts = {});

struct SscModel {
  Eigen::MatrixXd C;  // n x n, column i encodes x_i, zero diagonal
  double lambda_ssc = 0.0;
};

/// 0.01 * max_i |X^T x_i|_inf
double ssc_default_lambda(const Eigen::MatrixXd& x);

SscModel ssc_coefficients(const Eigen::MatrixXd& x, double lambda_ssc, const LassoOptions& opts = {});

DiscreteTrajectory ssc_cluster(const Eigen::MatrixXd& x, double lambda_ssc, int k, std::uint64_t seed);

}  // namespace moscito::baselines
