#pragma once

// Markov state models from discrete trajectories and VAMP-r scoring.

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

#include "moscito/dtraj.hpp"

namespace moscito::msm {

inline constexpr double kRankEpsilon = 1e-10;

struct TransitionModel {
  int tau = 1;
  Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic> counts;
  Eigen::MatrixXd P;  // row-stochastic
};

/// Counts transitions t -> t + tau. Rows without outgoing counts become
/// self-loops so P stays stochastic.
TransitionModel transition_matrix(const DiscreteTrajectory& dtraj, int tau);

struct VampComputation {
  Eigen::MatrixXd C00, C01, C11;
  Eigen::MatrixXd K;
  Eigen::VectorXd sigma;  // retained singular values, nonincreasing
  int m = 0;
  double r = 2.0;
  double score = 0.0;
};

/// Pseudo-inverse square root of a symmetric PSD matrix; eigenvalues below
/// eps are dropped.
Eigen::MatrixXd inverse_sqrt_psd(const Eigen::MatrixXd& c, double eps = kRankEpsilon);

/// K = C00^{-1/2} C01 C11^{-1/2} over one-hot state indicators (no mean
/// removal). sigma has length m; entries past k are zero.
VampComputation koopman_matrix(const DiscreteTrajectory& dtraj, int tau, int m,
                               double eps = kRankEpsilon);

/// sum_{i <= m} sigma_i^r
double vamp_r(const DiscreteTrajectory& dtraj, int tau, int m = 5, double r = 2.0,
              double eps = kRankEpsilon);

struct ScoreRow {
  std::string method;
  int k = 0;
  int tau = 0;
  int m = 0;
  double r = 2.0;
  double score = 0.0;
};

/// Score table keyed by (method, k, tau). Rankings are only ever formed
/// among rows sharing one lag time.
class ScoreTable {
 public:
  void add(ScoreRow row);
  const std::vector<ScoreRow>& rows() const noexcept { return rows_; }
  std::vector<int> lag_times() const;

  /// Rows with the given tau, best score first (ties by method name, k).
  std::vector<ScoreRow> ranking(int tau) const;

  void write_csv(std::ostream& out) const;
  /// Columns tau,rank,method,k,score; ranks restart for every tau.
  void write_rankings(std::ostream& out) const;

 private:
  std::vector<ScoreRow> rows_;
};

/// Throws ValidationError if `rows` mix lag times.
std::vector<ScoreRow> rank_rows(std::vector<ScoreRow> rows);

}  // namespace moscito::msm
