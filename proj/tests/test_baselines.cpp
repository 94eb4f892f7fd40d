#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "doctest.h"
#include "moscito/baselines.hpp"
#include "moscito/bench.hpp"
#include "moscito/error.hpp"
#include "support.hpp"

using namespace moscito;

namespace {

Eigen::MatrixXd two_blobs(int per_blob, std::mt19937_64& rng, std::vector<int>& planted) {
  std::normal_distribution<double> g(0.0, 0.3);
  Eigen::MatrixXd y(2, 2 * per_blob);
  planted.clear();
  for (int i = 0; i < 2 * per_blob; ++i) {
    const int b = i % 2;
    y(0, i) = (b ? 10.0 : -10.0) + g(rng);
    y(1, i) = g(rng);
    planted.push_back(b);
  }
  return y;
}

double kmeans_inertia(const Eigen::MatrixXd& y, const baselines::KMeansResult& r) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < y.cols(); ++i) s += (y.col(i) - r.centroids.col(r.labels.labels[i])).squaredNorm();
  return s;
}

// Worst violation of the LASSO optimality conditions
//   g_j = lambda sign(c_j) for c_j != 0, |g_j| <= lambda otherwise,
// with g = Y^T (y - Y c).
double kkt_violation(const Eigen::MatrixXd& ymat, const Eigen::VectorXd& y, const Eigen::VectorXd& c,
                     double lambda, Eigen::Index excluded) {
  const Eigen::VectorXd g = ymat.transpose() * (y - ymat * c);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < c.size(); ++j) {
    if (j == excluded) continue;
    if (c(j) != 0.0)
      worst = std::max(worst, std::abs(g(j) - lambda * (c(j) > 0 ? 1.0 : -1.0)));
    else
      worst = std::max(worst, std::abs(g(j)) - lambda);
  }
  return worst;
}

}  // namespace

// ---------------------------------------------------------------- k-means

TEST_CASE("k-means separates two blobs") {
  std::mt19937_64 rng(1);
  std::vector<int> planted;
  const auto y = two_blobs(40, rng, planted);
  const auto labels = baselines::kmeans(y, 2, 3);
  CHECK(bench::ari(labels, make_dtraj(planted)) == 1.0);
}

TEST_CASE("k-means with k = n has zero inertia") {
  std::mt19937_64 rng(2);
  const auto y = testing::random_matrix(3, 12, rng);
  const auto r = baselines::kmeans_fit(y, 12, 0);
  CHECK(r.inertia == doctest::Approx(0.0));
  CHECK(std::set<int>(r.labels.labels.begin(), r.labels.labels.end()).size() == 12);
}

TEST_CASE("duplicating every point keeps the centroids") {
  std::mt19937_64 rng(3);
  std::vector<int> planted;
  const auto y = two_blobs(25, rng, planted);
  Eigen::MatrixXd twice(2, 100);
  twice << y, y;
  const auto a = baselines::kmeans_fit(y, 2, 7);
  const auto b = baselines::kmeans_fit(twice, 2, 7);
  for (int c = 0; c < 2; ++c) {
    double best = 1e300;
    for (int d = 0; d < 2; ++d) best = std::min(best, (a.centroids.col(c) - b.centroids.col(d)).norm());
    CHECK(best < 1e-8);
  }
  CHECK(b.inertia == doctest::Approx(2.0 * a.inertia).epsilon(1e-10));
}

TEST_CASE("k-means inertia never increases and matches the labels") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const auto y = testing::random_matrix(4, 200, rng);
    const auto r = baselines::kmeans_fit(y, 6, static_cast<std::uint64_t>(trial));
    REQUIRE(!r.inertia_trace.empty());
    for (std::size_t i = 1; i < r.inertia_trace.size(); ++i)
      CHECK(r.inertia_trace[i] <= r.inertia_trace[i - 1] * (1.0 + 1e-12));
    CHECK(r.inertia == doctest::Approx(kmeans_inertia(y, r)).epsilon(1e-10));
  }
}

TEST_CASE("k-means is deterministic, validates k, and labels by first appearance") {
  std::mt19937_64 rng(5);
  const auto y = testing::random_matrix(3, 50, rng);
  const auto a = baselines::kmeans(y, 4, 11);
  CHECK(a == baselines::kmeans(y, 4, 11));
  CHECK(a.labels[0] == 0);
  CHECK_THROWS_AS(baselines::kmeans(y, 51, 0), ValidationError);
  CHECK_THROWS_AS(baselines::kmeans(y, 0, 0), ValidationError);
}

// ---------------------------------------------------------------- PCA

TEST_CASE("points on a line have one principal component") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-5, 5);
  Eigen::MatrixXd x(3, 40);
  for (int i = 0; i < 40; ++i) x.col(i) = Eigen::Vector3d(1, 2, -0.5) + u(rng) * Eigen::Vector3d(0.3, -1, 2);
  const auto r = baselines::pca(x, 1);
  CHECK(r.explained_variance(0) / r.explained_variance.sum() >= 0.99999);
  CHECK_THROWS_AS(baselines::pca(x, 2), ValidationError);
  CHECK(baselines::pca_dims_for_variance(x, 0.95) == 1);
}

TEST_CASE("full PCA reconstructs the data") {
  std::mt19937_64 rng(7);
  const auto x = testing::random_matrix(5, 30, rng);
  const auto r = baselines::pca(x, 5);
  const Eigen::MatrixXd back = (r.components * r.projection).colwise() + r.mean;
  CHECK((back - x).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("explained variances match an independent covariance eigen-solve") {
  std::mt19937_64 rng(8);
  const auto x = testing::random_matrix(5, 50, rng);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(5, 5);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(5);
  for (int j = 0; j < 50; ++j) mean += x.col(j) / 50.0;
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b)
      for (int j = 0; j < 50; ++j) cov(a, b) += (x(a, j) - mean(a)) * (x(b, j) - mean(b)) / 49.0;
  Eigen::VectorXd want = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(cov).eigenvalues().reverse();
  const auto r = baselines::pca(x, 3);
  CHECK((r.explained_variance - want).cwiseAbs().maxCoeff() < 1e-12);
  // Projected rows are uncorrelated and carry the leading variances.
  const Eigen::MatrixXd pc = r.projection * r.projection.transpose() / 49.0;
  for (int a = 0; a < 3; ++a) {
    CHECK(pc(a, a) == doctest::Approx(want(a)));
    for (int b = 0; b < 3; ++b)
      if (a != b) CHECK(std::abs(pc(a, b)) < 1e-8);
  }
}

TEST_CASE("PCA dims for a variance share") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(3, 4);
  // Variances 8/3, 2/3 and 0 along the axes: shares 0.8, 0.2.
  x << 2, -2, 0, 0, 0, 0, 1, -1, 0, 0, 0, 0;
  CHECK(baselines::pca_dims_for_variance(x, 0.8) == 1);
  CHECK(baselines::pca_dims_for_variance(x, 0.81) == 2);
  CHECK_THROWS_AS(baselines::pca_dims_for_variance(x, 0.0), ValidationError);
}

// ---------------------------------------------------------------- TICA

TEST_CASE("TICA finds the slow sinusoid") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  const int n = 4000, period = 400;
  Eigen::MatrixXd x(3, n);
  for (int t = 0; t < n; ++t) {
    x(0, t) = g(rng);
    x(1, t) = std::sin(2 * std::numbers::pi * t / period);
    x(2, t) = g(rng);
  }
  const auto r = baselines::tica(x, period / 4 - 20, 1);
  const Eigen::Vector3d v = r.eigenvectors.col(0).normalized();
  CHECK(std::abs(v(1)) > 0.99);
}

TEST_CASE("TICA eigenvalues are bounded and eigenvectors C0-orthonormal") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd x = testing::random_matrix(6, 300, rng);
    for (int t = 1; t < 300; ++t) x.col(t) = 0.8 * x.col(t - 1) + 0.2 * x.col(t);  // autocorrelated
    const auto r = baselines::tica(x, 1 + trial, 6);
    CHECK(r.eigenvalues.maxCoeff() <= 1.0 + 1e-6);
    const Eigen::MatrixXd gram = r.eigenvectors.transpose() * r.c0 * r.eigenvectors;
    CHECK((gram - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((r.c0 - r.c0.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((r.ctau - r.ctau.transpose()).cwiseAbs().maxCoeff() < 1e-15);
    for (Eigen::Index i = 1; i < r.eigenvalues.size(); ++i) CHECK(r.eigenvalues(i) <= r.eigenvalues(i - 1));
  }
}

TEST_CASE("TICA tolerates a constant row") {
  std::mt19937_64 rng(11);
  Eigen::MatrixXd x = testing::random_matrix(4, 100, rng);
  x.row(2).setConstant(3.0);
  const auto r = baselines::tica(x, 2, 3);
  CHECK(r.projection.allFinite());
  CHECK(r.eigenvalues.size() == 3);
  CHECK_THROWS_AS(baselines::tica(x, 2, 4), ValidationError);
}

TEST_CASE("TICA lag checks") {
  std::mt19937_64 rng(12);
  const auto x = testing::random_matrix(3, 20, rng);
  CHECK_THROWS_AS(baselines::tica(x, 20, 1), ValidationError);
  CHECK_THROWS_AS(baselines::tica(x, 0, 1), ValidationError);
  CHECK(baselines::tica_project(x, 19, 1).cols() == 20);
}

// ---------------------------------------------------------------- SSC

TEST_CASE("two orthogonal subspaces are recovered exactly") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(3, 20);
  std::vector<int> planted;
  for (int i = 0; i < 20; ++i) {
    x(i % 2, i) = (i % 3 == 0 ? -1.0 : 1.0) * u(rng);
    planted.push_back(i % 2);
  }
  const double lambda = baselines::ssc_default_lambda(x);
  const auto m = baselines::ssc_coefficients(x, lambda);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j)
      if (planted[i] != planted[j]) CHECK(m.C(i, j) == 0.0);
  CHECK(bench::ari(baselines::ssc_cluster(x, lambda, 2, 0), make_dtraj(planted)) == 1.0);
}

TEST_CASE("duplicate pair: closed-form LASSO weight") {
  Eigen::MatrixXd x(3, 2);
  x << 1, 1, 2, 2, -1, -1;
  const double lambda = 0.5;
  const auto m = baselines::ssc_coefficients(x, lambda);
  const double yy = 6.0;
  CHECK(m.C(1, 0) == doctest::Approx((yy - lambda) / yy).epsilon(1e-9));
  CHECK(m.C(0, 1) == doctest::Approx((yy - lambda) / yy).epsilon(1e-9));
  CHECK(m.C(0, 0) == 0.0);
}

TEST_CASE("duplicate column draws the largest weight with a sparse support") {
  std::mt19937_64 rng(14);
  Eigen::MatrixXd x = testing::random_matrix(6, 15, rng);
  x.col(9) = x.col(4);
  const auto m = baselines::ssc_coefficients(x, 0.05 * baselines::ssc_default_lambda(x));
  Eigen::Index arg = 0;
  m.C.col(4).cwiseAbs().maxCoeff(&arg);
  CHECK(arg == 9);
  CHECK(m.C(9, 4) > 0.5);
  CHECK((m.C.col(4).array() != 0.0).count() <= 6);
}

TEST_CASE("coefficient matrices have a zero diagonal") {
  std::mt19937_64 rng(15);
  const auto x = testing::random_matrix(5, 40, rng, 0.0, 1.0);
  const auto m = baselines::ssc_coefficients(x, baselines::ssc_default_lambda(x));
  CHECK(m.C.diagonal().isZero(0.0));
}

TEST_CASE("default SSC lambda") {
  Eigen::MatrixXd x(2, 2);
  x << 1, 2, 0, 3;
  // X^T X = [[1, 2], [2, 13]]
  CHECK(baselines::ssc_default_lambda(x) == doctest::Approx(0.13));
}

TEST_CASE("SSC argument checks") {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Ones(3, 4);
  CHECK_THROWS_AS(baselines::ssc_coefficients(x, 0.0), ValidationError);
  CHECK_THROWS_AS(baselines::ssc_coefficients(x, -1.0), ValidationError);
  CHECK_THROWS_AS(baselines::ssc_coefficients(Eigen::MatrixXd::Ones(3, 1), 1.0), ValidationError);
}

TEST_CASE("LASSO solvers satisfy the optimality conditions and agree") {
  std::mt19937_64 rng(16);
  baselines::LassoOptions opts;
  opts.tol = 1e-12;
  for (int trial = 0; trial < 10; ++trial) {
    const auto ymat = testing::random_matrix(8, 60, rng, 0.0, 1.0);
    const Eigen::Index i = trial;
    const Eigen::VectorXd y = ymat.col(i);
    const Eigen::MatrixXd gram = ymat.transpose() * ymat;
    const double lambda = 0.01 * gram.cwiseAbs().maxCoeff() * (1 + trial);
    const auto a = baselines::lasso_coordinate_descent(gram, gram.col(i), y.squaredNorm(), lambda, i, opts);
    const auto b = baselines::lasso_coordinate_descent_data(ymat, y, lambda, i, opts);
    CHECK(a.coef(i) == 0.0);
    CHECK(b.coef(i) == 0.0);
    CHECK(kkt_violation(ymat, y, a.coef, lambda, i) < 1e-8);
    CHECK(kkt_violation(ymat, y, b.coef, lambda, i) < 1e-8);
    auto obj = [&](const Eigen::VectorXd& c) { return 0.5 * (y - ymat * c).squaredNorm() + lambda * c.lpNorm<1>(); };
    CHECK(obj(a.coef) == doctest::Approx(obj(b.coef)).epsilon(1e-9));
    CHECK(a.objective_trace.back() == doctest::Approx(obj(a.coef)).epsilon(1e-9));
    CHECK(b.objective_trace.back() == doctest::Approx(obj(b.coef)).epsilon(1e-9));
  }
}

TEST_CASE("LASSO objective never increases across sweeps") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const auto ymat = testing::random_matrix(5, 80, rng, 0.0, 1.0);
    const Eigen::MatrixXd gram = ymat.transpose() * ymat;
    const double lambda = 0.01 * gram.cwiseAbs().maxCoeff();
    const auto a = baselines::lasso_coordinate_descent(gram, gram.col(trial), gram(trial, trial), lambda, trial);
    const auto b = baselines::lasso_coordinate_descent_data(ymat, ymat.col(trial), lambda, trial);
    for (const auto* r : {&a, &b}) {
      REQUIRE(!r->objective_trace.empty());
      CHECK(static_cast<int>(r->objective_trace.size()) == r->sweeps);
      for (std::size_t s = 1; s < r->objective_trace.size(); ++s)
        CHECK(r->objective_trace[s] <= r->objective_trace[s - 1] * (1.0 + 1e-12) + 1e-15);
    }
  }
}
