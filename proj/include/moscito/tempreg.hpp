#pragma once

// Sequential-neighbor weights and the temporal graph Laplacian L = D - W.

#include <Eigen/Core>
#include <optional>
#include <string>
#include <string_view>

namespace moscito::tempreg {

enum class WeightMode { binary, gaussian, logarithmic, exponential };

std::string_view mode_name(WeightMode mode) noexcept;
/// Throws ValidationError for an unknown name.
WeightMode parse_mode(std::string_view name);

struct TemporalWeightConfig {
  int s = 3;  // neighbors per side
  WeightMode mode = WeightMode::binary;
  std::optional<double> gaussian_sigma;  // default s / 2
  double exp_theta = 1.0;

  double sigma() const noexcept { return gaussian_sigma.value_or(0.5 * s); }
  void validate() const;
};

/// Weight of a neighbor at temporal offset 1 <= offset <= s.
double neighbor_weight(int offset, const TemporalWeightConfig& cfg);

/// Symmetric matrix with nonzeros only within `bandwidth` of the diagonal.
/// band(k, i) stores A(i, i + k).
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(Eigen::Index n, Eigen::Index bandwidth);

  Eigen::Index size() const noexcept { return n_; }
  Eigen::Index bandwidth() const noexcept { return bw_; }

  double operator()(Eigen::Index i, Eigen::Index j) const noexcept;
  double& band(Eigen::Index k, Eigen::Index i) noexcept { return band_(k, i); }
  double band(Eigen::Index k, Eigen::Index i) const noexcept { return band_(k, i); }
  Eigen::VectorXd diagonal() const { return band_.row(0).transpose(); }

  Eigen::MatrixXd dense() const;
  static BandedMatrix from_dense(const Eigen::MatrixXd& a, double tol = 0.0);

  /// out += scale * V * A, for V with n columns. Column-wise axpy kernels.
  void accumulate_right_product(const Eigen::MatrixXd& V, double scale, Eigen::MatrixXd& out) const;

 private:
  Eigen::Index n_ = 0;
  Eigen::Index bw_ = 0;
  Eigen::MatrixXd band_;  // (bw + 1) x n
};

/// Cholesky factor of (shift * I + scale * A) for a banded SPD matrix A.
class BandedCholesky {
 public:
  BandedCholesky(const BandedMatrix& a, double shift, double scale);
  /// Solves in place.
  void solve(Eigen::Ref<Eigen::VectorXd> b) const;

 private:
  Eigen::Index n_;
  Eigen::Index bw_;
  Eigen::MatrixXd lower_;  // lower_(k, i) = L(i, i - k)
};

Eigen::MatrixXd weight_matrix(Eigen::Index n, const TemporalWeightConfig& cfg);
BandedMatrix banded_weight_matrix(Eigen::Index n, const TemporalWeightConfig& cfg);

struct TemporalLaplacian {
  BandedMatrix weights;
  Eigen::VectorXd degree;
  BandedMatrix laplacian;

  Eigen::Index size() const noexcept { return laplacian.size(); }
};

/// Throws ValidationError for an asymmetric, negative, or nonzero-diagonal W.
TemporalLaplacian temporal_laplacian(const Eigen::MatrixXd& w);
TemporalLaplacian temporal_laplacian(const BandedMatrix& w);
TemporalLaplacian temporal_laplacian(Eigen::Index n, const TemporalWeightConfig& cfg);

/// tr(Z L Z^T) = 1/2 sum_ij w_ij |z_i - z_j|^2.
double regularizer_value(const Eigen::MatrixXd& z, const TemporalLaplacian& lap);

}  // namespace moscito::tempreg
