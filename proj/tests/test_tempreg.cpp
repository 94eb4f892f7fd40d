#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "doctest.h"
#include "moscito/error.hpp"
#include "moscito/tempreg.hpp"
#include "support.hpp"

using namespace moscito;
using tempreg::TemporalWeightConfig;
using tempreg::WeightMode;

namespace {

const WeightMode kModes[] = {WeightMode::binary, WeightMode::gaussian, WeightMode::logarithmic,
                             WeightMode::exponential};

// 1/2 sum_ij w_ij |z_i - z_j|^2 by the direct double sum.
double double_sum(const Eigen::MatrixXd& z, const Eigen::MatrixXd& w) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    for (Eigen::Index j = 0; j < w.cols(); ++j) s += w(i, j) * (z.col(i) - z.col(j)).squaredNorm();
  return 0.5 * s;
}

Eigen::MatrixXd random_weights(Eigen::Index n, std::mt19937_64& rng) {
  Eigen::MatrixXd w = testing::random_matrix(n, n, rng, 0.0, 1.0);
  w = 0.5 * (w + w.transpose()).eval();
  w.diagonal().setZero();
  return w;
}

}  // namespace

TEST_CASE("binary weights, n = 5, s = 2") {
  TemporalWeightConfig cfg;
  cfg.s = 2;
  const auto w = tempreg::weight_matrix(5, cfg);
  Eigen::RowVectorXd row(5);
  row << 1, 1, 0, 1, 1;
  CHECK(w.row(2) == row);
  CHECK(w(0, 3) == 0.0);
  CHECK(w == w.transpose());
}

TEST_CASE("s = 0 gives the zero matrix for every mode") {
  for (auto mode : kModes) {
    TemporalWeightConfig cfg;
    cfg.s = 0;
    cfg.mode = mode;
    CHECK(tempreg::weight_matrix(6, cfg).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("logarithmic weight at offset 2 with s = 4 is one half") {
  TemporalWeightConfig cfg;
  cfg.s = 4;
  cfg.mode = WeightMode::logarithmic;
  CHECK(tempreg::neighbor_weight(2, cfg) == doctest::Approx(1.0 - std::log(2.0) / std::log(4.0)));
  CHECK(tempreg::neighbor_weight(2, cfg) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(tempreg::neighbor_weight(1, cfg) == 1.0);
  CHECK(tempreg::neighbor_weight(4, cfg) == doctest::Approx(0.0));
  cfg.s = 1;
  CHECK(tempreg::neighbor_weight(1, cfg) == 1.0);
}

TEST_CASE("gaussian and exponential weight formulas") {
  TemporalWeightConfig cfg;
  cfg.s = 6;
  cfg.mode = WeightMode::gaussian;
  CHECK(cfg.sigma() == 3.0);
  CHECK(tempreg::neighbor_weight(4, cfg) == doctest::Approx(std::exp(-16.0 / 18.0)));
  cfg.gaussian_sigma = 1.5;
  CHECK(tempreg::neighbor_weight(2, cfg) == doctest::Approx(std::exp(-4.0 / 4.5)));
  cfg.mode = WeightMode::exponential;
  cfg.exp_theta = 2.0;
  CHECK(tempreg::neighbor_weight(1, cfg) == 1.0);
  CHECK(tempreg::neighbor_weight(3, cfg) == doctest::Approx(std::exp(-1.0)));
  CHECK(tempreg::neighbor_weight(7, cfg) == 0.0);
  CHECK(tempreg::neighbor_weight(0, cfg) == 0.0);
}

TEST_CASE("g(1) is the largest weight and g never increases with the offset") {
  for (auto mode : kModes) {
    for (int s = 1; s <= 12; ++s) {
      TemporalWeightConfig cfg;
      cfg.s = s;
      cfg.mode = mode;
      const double g1 = tempreg::neighbor_weight(1, cfg);
      for (int j = 2; j <= s; ++j) {
        CHECK(tempreg::neighbor_weight(j, cfg) <= g1);
        CHECK(tempreg::neighbor_weight(j, cfg) <= tempreg::neighbor_weight(j - 1, cfg));
      }
    }
  }
}

TEST_CASE("mode names round-trip and bad configs are rejected") {
  for (auto mode : kModes) CHECK(tempreg::parse_mode(tempreg::mode_name(mode)) == mode);
  CHECK_THROWS_AS(tempreg::parse_mode("cubic"), ValidationError);
  TemporalWeightConfig cfg;
  cfg.s = -1;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg.s = 2;
  cfg.gaussian_sigma = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg.gaussian_sigma.reset();
  cfg.exp_theta = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("Laplacian of a two-node graph") {
  Eigen::MatrixXd w(2, 2);
  w << 0, 1, 1, 0;
  const auto lap = tempreg::temporal_laplacian(w);
  Eigen::MatrixXd want(2, 2);
  want << 1, -1, -1, 1;
  CHECK(lap.laplacian.dense() == want);
  CHECK(lap.degree == Eigen::Vector2d(1, 1));
}

TEST_CASE("zero weights give a zero Laplacian") {
  const auto lap = tempreg::temporal_laplacian(Eigen::MatrixXd::Zero(4, 4));
  CHECK(lap.laplacian.dense().cwiseAbs().maxCoeff() == 0.0);
  const auto empty = tempreg::temporal_laplacian(Eigen::MatrixXd(0, 0));
  CHECK(empty.size() == 0);
}

TEST_CASE("random Laplacians are symmetric PSD with the ones vector in the null space") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const auto w = random_weights(6, rng);
    const Eigen::MatrixXd l = tempreg::temporal_laplacian(w).laplacian.dense();
    CHECK((l - l.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((l * Eigen::VectorXd::Ones(6)).cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(l);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
    CHECK((l - (Eigen::MatrixXd(w.rowwise().sum().asDiagonal()) - w)).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("invalid weight matrices are rejected") {
  Eigen::MatrixXd w(2, 2);
  w << 0, 1, 0.5, 0;
  CHECK_THROWS_AS(tempreg::temporal_laplacian(w), ValidationError);
  w << 0, -1, -1, 0;
  CHECK_THROWS_AS(tempreg::temporal_laplacian(w), ValidationError);
  w << 1, 1, 1, 0;
  CHECK_THROWS_AS(tempreg::temporal_laplacian(w), ValidationError);
  CHECK_THROWS_AS(tempreg::temporal_laplacian(Eigen::MatrixXd::Zero(2, 3)), DimensionError);
}

TEST_CASE("regularizer examples") {
  Eigen::MatrixXd w(2, 2);
  w << 0, 1, 1, 0;
  Eigen::MatrixXd z(1, 2);
  z << 1, 0;
  CHECK(tempreg::regularizer_value(z, tempreg::temporal_laplacian(w)) == doctest::Approx(1.0).epsilon(1e-15));

  TemporalWeightConfig cfg;
  cfg.s = 3;
  const auto lap = tempreg::temporal_laplacian(10, cfg);
  const Eigen::MatrixXd same = Eigen::VectorXd::LinSpaced(4, 1, 4).replicate(1, 10);
  CHECK(std::abs(tempreg::regularizer_value(same, lap)) < 1e-12);
  CHECK_THROWS_AS(tempreg::regularizer_value(Eigen::MatrixXd::Zero(2, 9), lap), DimensionError);
}

TEST_CASE("trace form equals the double sum for random inputs in every mode") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> sdist(0, 6), ndist(1, 25), ddist(1, 5);
  for (int trial = 0; trial < 100; ++trial) {
    TemporalWeightConfig cfg;
    cfg.mode = kModes[trial % 4];
    cfg.s = sdist(rng);
    const int n = ndist(rng);
    const auto z = testing::random_matrix(ddist(rng), n, rng);
    const auto lap = tempreg::temporal_laplacian(n, cfg);
    const double want = double_sum(z, tempreg::weight_matrix(n, cfg));
    CHECK(std::abs(tempreg::regularizer_value(z, lap) - want) <= 1e-10 * std::max(1.0, want));
    CHECK(tempreg::regularizer_value(z, lap) >= 0.0);
  }
}

TEST_CASE("banded storage has bandwidth s and matches the dense matrix") {
  TemporalWeightConfig cfg;
  cfg.s = 3;
  cfg.mode = WeightMode::gaussian;
  const auto bw = tempreg::banded_weight_matrix(12, cfg);
  CHECK(bw.bandwidth() == 3);
  CHECK(bw.dense() == tempreg::weight_matrix(12, cfg));
  const auto lap = tempreg::temporal_laplacian(12, cfg);
  CHECK(lap.laplacian.bandwidth() == 3);
  const auto back = tempreg::BandedMatrix::from_dense(lap.laplacian.dense());
  CHECK(back.dense() == lap.laplacian.dense());
  for (Eigen::Index i = 0; i < 12; ++i)
    for (Eigen::Index j = 0; j < 12; ++j) CHECK(lap.laplacian(i, j) == lap.laplacian.dense()(i, j));
}

TEST_CASE("banded right product and Cholesky agree with dense algebra") {
  std::mt19937_64 rng(8);
  TemporalWeightConfig cfg;
  cfg.s = 4;
  cfg.mode = WeightMode::exponential;
  const auto lap = tempreg::temporal_laplacian(30, cfg);
  const Eigen::MatrixXd l = lap.laplacian.dense();

  const auto v = testing::random_matrix(5, 30, rng);
  Eigen::MatrixXd out = testing::random_matrix(5, 30, rng);
  const Eigen::MatrixXd start = out;
  lap.laplacian.accumulate_right_product(v, 2.5, out);
  CHECK((out - (start + 2.5 * v * l)).cwiseAbs().maxCoeff() < 1e-12);

  const tempreg::BandedCholesky chol(lap.laplacian, 0.3, 15.0);
  const Eigen::MatrixXd a = 0.3 * Eigen::MatrixXd::Identity(30, 30) + 15.0 * l;
  Eigen::VectorXd b = testing::random_matrix(30, 1, rng);
  const Eigen::VectorXd want = a.llt().solve(b);
  chol.solve(b);
  CHECK((b - want).cwiseAbs().maxCoeff() < 1e-10);
  CHECK_THROWS_AS(tempreg::BandedCholesky(lap.laplacian, -1.0, 1.0), ValidationError);
}
