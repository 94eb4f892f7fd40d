#include "moscito/baselines.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "moscito/error.hpp"
#include "moscito/graphclust.hpp"

namespace moscito::baselines {
namespace {

void check_data(const Eigen::MatrixXd& x, const char* who) {
  if (x.rows() < 1 || x.cols() < 1) throw DimensionError(std::string(who) + ": empty data matrix");
  if (!x.allFinite()) throw ValidationError(std::string(who) + ": non-finite data");
}

struct Spectrum {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // matching columns
};

Spectrum descending_eigen(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) throw Error("symmetric eigensolver failed");
  Spectrum s;
  s.values = es.eigenvalues().reverse();
  s.vectors = es.eigenvectors().rowwise().reverse();
  return s;
}

int share_cutoff(const Eigen::VectorXd& weights, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ValidationError("variance fraction must lie in (0, 1]");
  const double total = weights.sum();
  if (total <= 0.0) return 1;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    acc += weights(i);
    if (acc >= fraction * total * (1.0 - 1e-12)) return static_cast<int>(i + 1);
  }
  return static_cast<int>(weights.size());
}

}  // namespace

// ---------------------------------------------------------------- PCA

PcaResult pca(const Eigen::MatrixXd& x, int dims) {
  check_data(x, "pca");
  const Eigen::Index n = x.cols();
  if (dims < 1 || dims > std::min(x.rows(), n))
    throw ValidationError("pca: dims=" + std::to_string(dims) + " must lie in [1, min(d_feat, n)]");

  PcaResult r;
  r.mean = x.rowwise().mean();
  const Eigen::MatrixXd xc = x.colwise() - r.mean;
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  const Spectrum s = descending_eigen(xc * xc.transpose() / denom);
  r.explained_variance = s.values.cwiseMax(0.0);

  const double top = std::max(r.explained_variance(0), 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < r.explained_variance.size(); ++i)
    if (r.explained_variance(i) > kRankEpsilon * std::max(1.0, top)) ++rank;
  if (dims > rank)
    throw ValidationError("pca: dims=" + std::to_string(dims) + " exceeds the data rank " + std::to_string(rank));

  r.components = s.vectors.leftCols(dims);
  r.projection = r.components.transpose() * xc;
  return r;
}

Eigen::MatrixXd pca_project(const Eigen::MatrixXd& x, int dims) { return pca(x, dims).projection; }

int pca_dims_for_variance(const Eigen::MatrixXd& x, double fraction) {
  check_data(x, "pca");
  const Eigen::MatrixXd xc = x.colwise() - x.rowwise().mean();
  const Eigen::VectorXd ev = descending_eigen(xc * xc.transpose()).values.cwiseMax(0.0);
  return share_cutoff(ev, fraction);
}

// ---------------------------------------------------------------- TICA

TicaResult tica(const Eigen::MatrixXd& x, int lag, int dims, double eps_rank) {
  check_data(x, "tica");
  const Eigen::Index n = x.cols();
  if (lag < 1) throw ValidationError("tica: lag must be >= 1");
  if (lag >= n)
    throw ValidationError("tica: lag=" + std::to_string(lag) + " must be smaller than n=" + std::to_string(n));

  TicaResult r;
  r.mean = x.rowwise().mean();
  const Eigen::MatrixXd xc = x.colwise() - r.mean;
  const Eigen::Index pairs = n - lag;
  const auto x0 = xc.leftCols(pairs);
  const auto xt = xc.rightCols(pairs);
  const double scale = 1.0 / (2.0 * static_cast<double>(pairs));
  r.c0 = scale * (x0 * x0.transpose() + xt * xt.transpose());
  r.ctau = scale * (x0 * xt.transpose() + xt * x0.transpose());
  // Products are not bitwise symmetric; restore exact symmetry.
  r.c0 = (0.5 * (r.c0 + r.c0.transpose())).eval();
  r.ctau = (0.5 * (r.ctau + r.ctau.transpose())).eval();

  // Whiten on the retained range of C(0).
  const Spectrum c0s = descending_eigen(r.c0);
  Eigen::Index rank = 0;
  while (rank < c0s.values.size() && c0s.values(rank) >= eps_rank) ++rank;
  if (dims < 1 || dims > rank)
    throw ValidationError("tica: dims=" + std::to_string(dims) + " must lie in [1, " + std::to_string(rank) +
                          "] (rank of C(0))");
  const Eigen::MatrixXd w =
      c0s.vectors.leftCols(rank) * c0s.values.head(rank).cwiseSqrt().cwiseInverse().asDiagonal();
  const Spectrum m = descending_eigen(w.transpose() * r.ctau * w);

  r.eigenvalues = m.values;
  r.eigenvectors = w * m.vectors.leftCols(dims);
  r.projection = r.eigenvectors.transpose() * xc;
  return r;
}

Eigen::MatrixXd tica_project(const Eigen::MatrixXd& x, int lag, int dims) { return tica(x, lag, dims).projection; }

int tica_dims_for_kinetic_variance(const Eigen::MatrixXd& x, int lag, double fraction) {
  const TicaResult r = tica(x, lag, 1);
  return share_cutoff(r.eigenvalues.cwiseAbs2(), fraction);
}

// ---------------------------------------------------------------- SSC

constexpr int kInnerPasses = 200;

LassoResult lasso_coordinate_descent(const Eigen::MatrixXd& gram, const Eigen::VectorXd& corr, double yy,
                                     double lambda, Eigen::Index excluded, const LassoOptions& opts) {
  const Eigen::Index n = gram.rows();
  if (gram.cols() != n || corr.size() != n) throw DimensionError("lasso: gram/corr size mismatch");
  if (lambda < 0.0) throw ValidationError("lasso: lambda must be >= 0");

  LassoResult r;
  r.coef = Eigen::VectorXd::Zero(n);
  // g = corr - G c, kept current so each coordinate step is O(1) unless the
  // coefficient actually moves.
  Eigen::VectorXd g = corr;
  auto objective = [&] {
    double l1 = 0.0, quad = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (r.coef(j) == 0.0) continue;
      l1 += std::abs(r.coef(j));
      quad += r.coef(j) * (corr(j) + g(j));
    }
    return std::max(0.0, 0.5 * yy - 0.5 * quad) + lambda * l1;
  };

  // Active-set strategy: full sweeps find the support, inner passes over
  // the nonzero coefficients settle their values, and a full sweep with no
  // change above tol confirms convergence. Inner passes are cheap (g is kept
  // current on the active set only), so they run to a tighter tolerance and
  // do not count as sweeps.
  auto soft_step = [&](double gj, double gjj, double old) {
    const double rho = gj + gjj * old;
    const double shrunk = std::abs(rho) > lambda ? (rho > 0.0 ? rho - lambda : rho + lambda) : 0.0;
    return shrunk / gjj - old;
  };
  std::vector<Eigen::Index> active;
  while (r.sweeps < opts.max_sweeps) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double gjj = gram(j, j);
      if (j == excluded || gjj <= 0.0) continue;
      const double delta = soft_step(g(j), gjj, r.coef(j));
      if (delta == 0.0) continue;
      r.coef(j) += delta;
      g.noalias() -= delta * gram.col(j);
      max_change = std::max(max_change, std::abs(delta));
    }
    ++r.sweeps;
    r.objective_trace.push_back(objective());
    if (max_change < opts.tol) break;

    active.clear();
    for (Eigen::Index j = 0; j < n; ++j)
      if (r.coef(j) != 0.0) active.push_back(j);
    const auto na = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXd gaa(na, na);
    Eigen::VectorXd ga(na), ca(na);
    for (Eigen::Index a = 0; a < na; ++a) {
      ga(a) = g(active[a]);
      ca(a) = r.coef(active[a]);
      for (Eigen::Index b = 0; b < na; ++b) gaa(a, b) = gram(active[a], active[b]);
    }
    for (int pass = 0; pass < kInnerPasses; ++pass) {
      double inner = 0.0;
      for (Eigen::Index a = 0; a < na; ++a) {
        const double delta = soft_step(ga(a), gaa(a, a), ca(a));
        if (delta == 0.0) continue;
        ca(a) += delta;
        ga.noalias() -= delta * gaa.col(a);
        inner = std::max(inner, std::abs(delta));
      }
      if (inner < opts.tol) break;
    }
    // With the sign pattern fixed the subproblem is a linear system; take
    // its solution when it keeps every sign and does not raise the objective.
    if (na > 0) {
      Eigen::VectorXd sign(na);
      for (Eigen::Index a = 0; a < na; ++a) sign(a) = ca(a) > 0.0 ? 1.0 : (ca(a) < 0.0 ? -1.0 : 0.0);
      Eigen::VectorXd target(na);
      for (Eigen::Index a = 0; a < na; ++a) target(a) = corr(active[a]) - lambda * sign(a);
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(gaa);
      if (ldlt.info() == Eigen::Success && sign.cwiseAbs().minCoeff() > 0.0) {
        const Eigen::VectorXd exact = ldlt.solve(target);
        const bool consistent = exact.allFinite() && (gaa * exact - target).norm() <= 1e-9 * std::max(1.0, target.norm()) &&
                                (exact.array() * sign.array() > 0.0).all();
        // Objective restricted to the active set: 1/2 c'Gc - c'corr + lambda |c|_1.
        auto restricted = [&](const Eigen::VectorXd& c) {
          double lin = 0.0;
          for (Eigen::Index a = 0; a < na; ++a) lin += c(a) * corr(active[a]);
          return 0.5 * c.dot(gaa * c) - lin + lambda * c.lpNorm<1>();
        };
        if (consistent && restricted(exact) <= restricted(ca)) ca = exact;
      }
    }
    for (Eigen::Index a = 0; a < na; ++a) r.coef(active[a]) = ca(a);
    g = corr;
    for (Eigen::Index a = 0; a < na; ++a)
      if (ca(a) != 0.0) g.noalias() -= ca(a) * gram.col(active[a]);
  }
  return r;
}

LassoResult lasso_coordinate_descent_data(const Eigen::MatrixXd& y_mat, const Eigen::VectorXd& y,
                                          double lambda, Eigen::Index excluded, const LassoOptions& opts) {
  const Eigen::Index n = y_mat.cols();
  if (y.size() != y_mat.rows()) throw DimensionError("lasso: target length does not match rows");
  if (lambda < 0.0) throw ValidationError("lasso: lambda must be >= 0");

  LassoResult r;
  r.coef = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd resid = y;
  const Eigen::VectorXd norms = y_mat.colwise().squaredNorm().transpose();
  auto step = [&](Eigen::Index j) {
    const double gjj = norms(j);
    const double old = r.coef(j);
    const double rho = y_mat.col(j).dot(resid) + gjj * old;
    const double shrunk = std::abs(rho) > lambda ? (rho > 0.0 ? rho - lambda : rho + lambda) : 0.0;
    const double delta = shrunk / gjj - old;
    if (delta != 0.0) {
      r.coef(j) += delta;
      resid.noalias() -= delta * y_mat.col(j);
    }
    return std::abs(delta);
  };

  std::vector<Eigen::Index> active;
  while (r.sweeps < opts.max_sweeps) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == excluded || norms(j) <= 0.0) continue;
      max_change = std::max(max_change, step(j));
    }
    ++r.sweeps;
    r.objective_trace.push_back(0.5 * resid.squaredNorm() + lambda * r.coef.lpNorm<1>());
    if (max_change < opts.tol) break;

    active.clear();
    for (Eigen::Index j = 0; j < n; ++j)
      if (r.coef(j) != 0.0) active.push_back(j);
    for (int pass = 0; pass < kInnerPasses; ++pass) {
      double inner = 0.0;
      for (const Eigen::Index j : active) inner = std::max(inner, step(j));
      if (inner < opts.tol) break;
    }
  }
  return r;
}

double ssc_default_lambda(const Eigen::MatrixXd& x) {
  check_data(x, "ssc");
  return 0.01 * (x.transpose() * x).cwiseAbs().maxCoeff();
}

SscModel ssc_coefficients(const Eigen::MatrixXd& x, double lambda_ssc, const LassoOptions& opts) {
  check_data(x, "ssc");
  const Eigen::Index n = x.cols();
  if (n < 2) throw ValidationError("ssc: need at least 2 columns");
  if (!(lambda_ssc > 0.0)) throw ValidationError("ssc: lambda_ssc must be > 0");
  SscModel m;
  m.lambda_ssc = lambda_ssc;
  m.C.setZero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    LassoResult r = lasso_coordinate_descent_data(x, x.col(i), lambda_ssc, i, opts);
    r.coef(i) = 0.0;
    m.C.col(i) = r.coef;
  }
  return m;
}

DiscreteTrajectory ssc_cluster(const Eigen::MatrixXd& x, double lambda_ssc, int k, std::uint64_t seed) {
  const SscModel m = ssc_coefficients(x, lambda_ssc);
  const Eigen::MatrixXd a = m.C.cwiseAbs() + m.C.cwiseAbs().transpose();
  return graphclust::spectral_clustering(graphclust::affinity_from_matrix(a), k, seed);
}

}  // namespace moscito::baselines
