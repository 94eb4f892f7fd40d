#include "moscito/tempreg.hpp"

#include <cmath>
#include <span>

#include "moscito/error.hpp"
#include "moscito/simd.hpp"

namespace moscito::tempreg {

std::string_view mode_name(WeightMode mode) noexcept {
  switch (mode) {
    case WeightMode::binary: return "binary";
    case WeightMode::gaussian: return "gaussian";
    case WeightMode::logarithmic: return "logarithmic";
    case WeightMode::exponential: return "exponential";
  }
  return "?";
}

WeightMode parse_mode(std::string_view name) {
  for (auto m : {WeightMode::binary, WeightMode::gaussian, WeightMode::logarithmic,
                 WeightMode::exponential})
    if (mode_name(m) == name) return m;
  throw ValidationError("unknown weighting mode '" + std::string(name) + "'");
}

void TemporalWeightConfig::validate() const {
  if (s < 0) throw ValidationError("tempreg: s must be >= 0");
  if (gaussian_sigma && !(*gaussian_sigma > 0.0))
    throw ValidationError("tempreg: gaussian_sigma must be > 0");
  if (!(exp_theta > 0.0)) throw ValidationError("tempreg: exp_theta must be > 0");
}

double neighbor_weight(int offset, const TemporalWeightConfig& cfg) {
  if (offset < 1 || offset > cfg.s) return 0.0;
  const double j = offset;
  switch (cfg.mode) {
    case WeightMode::binary:
      return 1.0;
    case WeightMode::gaussian: {
      const double sigma = cfg.sigma();
      return std::exp(-j * j / (2.0 * sigma * sigma));
    }
    case WeightMode::logarithmic:
      // s = 1 degenerates to binary.
      return cfg.s == 1 ? 1.0 : 1.0 - std::log(j) / std::log(static_cast<double>(cfg.s));
    case WeightMode::exponential:
      return std::exp(-(j - 1.0) / cfg.exp_theta);
  }
  return 0.0;
}

BandedMatrix::BandedMatrix(Eigen::Index n, Eigen::Index bandwidth)
    : n_(n), bw_(bandwidth), band_(Eigen::MatrixXd::Zero(bandwidth + 1, n)) {}

double BandedMatrix::operator()(Eigen::Index i, Eigen::Index j) const noexcept {
  if (i > j) std::swap(i, j);
  const Eigen::Index k = j - i;
  return k > bw_ ? 0.0 : band_(k, i);
}

Eigen::MatrixXd BandedMatrix::dense() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_, n_);
  for (Eigen::Index k = 0; k <= bw_; ++k)
    for (Eigen::Index i = 0; i + k < n_; ++i) {
      a(i, i + k) = band_(k, i);
      a(i + k, i) = band_(k, i);
    }
  return a;
}

BandedMatrix BandedMatrix::from_dense(const Eigen::MatrixXd& a, double tol) {
  const Eigen::Index n = a.rows();
  Eigen::Index bw = 0;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < j; ++i)
      if (std::abs(a(i, j)) > tol) bw = std::max(bw, j - i);
  BandedMatrix b(n, bw);
  for (Eigen::Index k = 0; k <= bw; ++k)
    for (Eigen::Index i = 0; i + k < n; ++i) b.band_(k, i) = a(i, i + k);
  return b;
}

void BandedMatrix::accumulate_right_product(const Eigen::MatrixXd& v, double scale,
                                            Eigen::MatrixXd& out) const {
  // (V A)(:, i) = sum_j V(:, j) A(j, i)
  const auto rows = static_cast<std::size_t>(v.rows());
  for (Eigen::Index i = 0; i < n_; ++i) {
    std::span<double> dst(out.col(i).data(), rows);
    simd::axpy(scale * band_(0, i), {v.col(i).data(), rows}, dst);
    for (Eigen::Index k = 1; k <= bw_; ++k) {
      if (i + k < n_ && band_(k, i) != 0.0)
        simd::axpy(scale * band_(k, i), {v.col(i + k).data(), rows}, dst);
      if (i - k >= 0 && band_(k, i - k) != 0.0)
        simd::axpy(scale * band_(k, i - k), {v.col(i - k).data(), rows}, dst);
    }
  }
}

BandedCholesky::BandedCholesky(const BandedMatrix& a, double shift, double scale)
    : n_(a.size()), bw_(a.bandwidth()), lower_(Eigen::MatrixXd::Zero(a.bandwidth() + 1, a.size())) {
  for (Eigen::Index i = 0; i < n_; ++i) {
    const Eigen::Index jmin = std::max<Eigen::Index>(0, i - bw_);
    for (Eigen::Index j = jmin; j <= i; ++j) {
      double s = (j == i ? shift : 0.0) + scale * a.band(i - j, j);
      const Eigen::Index kmin = std::max<Eigen::Index>(jmin, j - bw_);
      for (Eigen::Index k = kmin; k < j; ++k) s -= lower_(i - k, k) * lower_(j - k, k);
      if (j == i) {
        if (!(s > 0.0)) throw ValidationError("banded Cholesky: matrix is not positive definite");
        lower_(0, i) = std::sqrt(s);
      } else {
        lower_(i - j, j) = s / lower_(0, j);
      }
    }
  }
}

void BandedCholesky::solve(Eigen::Ref<Eigen::VectorXd> b) const {
  // lower_(k, j) holds L(j + k, j).
  for (Eigen::Index i = 0; i < n_; ++i) {
    double s = b(i);
    for (Eigen::Index k = std::max<Eigen::Index>(0, i - bw_); k < i; ++k) s -= lower_(i - k, k) * b(k);
    b(i) = s / lower_(0, i);
  }
  for (Eigen::Index i = n_ - 1; i >= 0; --i) {
    double s = b(i);
    for (Eigen::Index k = i + 1; k <= std::min(n_ - 1, i + bw_); ++k) s -= lower_(k - i, i) * b(k);
    b(i) = s / lower_(0, i);
  }
}

BandedMatrix banded_weight_matrix(Eigen::Index n, const TemporalWeightConfig& cfg) {
  cfg.validate();
  if (n < 1) throw ValidationError("tempreg: n must be >= 1");
  const Eigen::Index bw = std::min<Eigen::Index>(cfg.s, n - 1);
  BandedMatrix w(n, bw);
  for (Eigen::Index k = 1; k <= bw; ++k) {
    const double g = neighbor_weight(static_cast<int>(k), cfg);
    for (Eigen::Index i = 0; i + k < n; ++i) w.band(k, i) = g;
  }
  return w;
}

Eigen::MatrixXd weight_matrix(Eigen::Index n, const TemporalWeightConfig& cfg) {
  return banded_weight_matrix(n, cfg).dense();
}

TemporalLaplacian temporal_laplacian(const BandedMatrix& w) {
  const Eigen::Index n = w.size();
  for (Eigen::Index i = 0; i < n; ++i)
    if (w.band(0, i) != 0.0) throw ValidationError("temporal_laplacian: W has a nonzero diagonal");
  TemporalLaplacian lap;
  lap.weights = w;
  lap.degree = Eigen::VectorXd::Zero(n);
  lap.laplacian = BandedMatrix(n, w.bandwidth());
  for (Eigen::Index k = 1; k <= w.bandwidth(); ++k)
    for (Eigen::Index i = 0; i + k < n; ++i) {
      const double v = w.band(k, i);
      if (v < 0.0) throw ValidationError("temporal_laplacian: W has a negative entry");
      lap.degree(i) += v;
      lap.degree(i + k) += v;
      lap.laplacian.band(k, i) = -v;
    }
  for (Eigen::Index i = 0; i < n; ++i) lap.laplacian.band(0, i) = lap.degree(i);
  return lap;
}

TemporalLaplacian temporal_laplacian(const Eigen::MatrixXd& w) {
  if (w.rows() != w.cols()) throw DimensionError("temporal_laplacian: W must be square");
  const double scale = w.size() == 0 ? 1.0 : std::max(1.0, w.cwiseAbs().maxCoeff());
  if (w.size() != 0 && (w - w.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ValidationError("temporal_laplacian: W is not symmetric");
  return temporal_laplacian(BandedMatrix::from_dense(w));
}

TemporalLaplacian temporal_laplacian(Eigen::Index n, const TemporalWeightConfig& cfg) {
  return temporal_laplacian(banded_weight_matrix(n, cfg));
}

double regularizer_value(const Eigen::MatrixXd& z, const TemporalLaplacian& lap) {
  if (z.cols() != lap.size())
    throw DimensionError("regularizer_value: Z has " + std::to_string(z.cols()) +
                         " columns, Laplacian has size " + std::to_string(lap.size()));
  Eigen::MatrixXd zl = Eigen::MatrixXd::Zero(z.rows(), z.cols());
  lap.laplacian.accumulate_right_product(z, 1.0, zl);
  return std::max(0.0, (z.array() * zl.array()).sum());
}

}  // namespace moscito::tempreg
