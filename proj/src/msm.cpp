#include "moscito/msm.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "moscito/error.hpp"
#include "text.hpp"

namespace moscito::msm {
namespace {

void check_lag(const DiscreteTrajectory& dtraj, int tau) {
  dtraj.validate();
  if (tau < 1) throw ValidationError("msm: tau must be >= 1");
  if (static_cast<std::size_t>(tau) >= dtraj.size())
    throw ValidationError("msm: tau=" + std::to_string(tau) + " must be smaller than the trajectory length " +
                          std::to_string(dtraj.size()));
}

}  // namespace

TransitionModel transition_matrix(const DiscreteTrajectory& dtraj, int tau) {
  check_lag(dtraj, tau);
  const int k = dtraj.k;
  TransitionModel tm;
  tm.tau = tau;
  tm.counts.setZero(k, k);
  for (std::size_t t = 0; t + tau < dtraj.size(); ++t) ++tm.counts(dtraj.labels[t], dtraj.labels[t + tau]);
  tm.P.setZero(k, k);
  for (int i = 0; i < k; ++i) {
    const long long total = tm.counts.row(i).sum();
    if (total == 0) {
      tm.P(i, i) = 1.0;
      continue;
    }
    for (int j = 0; j < k; ++j) tm.P(i, j) = static_cast<double>(tm.counts(i, j)) / static_cast<double>(total);
  }
  return tm;
}

Eigen::MatrixXd inverse_sqrt_psd(const Eigen::MatrixXd& c, double eps) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
  Eigen::VectorXd inv = es.eigenvalues();
  for (Eigen::Index i = 0; i < inv.size(); ++i) inv(i) = inv(i) < eps ? 0.0 : 1.0 / std::sqrt(inv(i));
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

VampComputation koopman_matrix(const DiscreteTrajectory& dtraj, int tau, int m, double eps) {
  check_lag(dtraj, tau);
  if (m < 1) throw ValidationError("msm: m must be >= 1");
  const int k = dtraj.k;
  const auto pairs = static_cast<double>(dtraj.size() - static_cast<std::size_t>(tau));

  VampComputation v;
  v.C00.setZero(k, k);
  v.C01.setZero(k, k);
  v.C11.setZero(k, k);
  for (std::size_t t = 0; t + tau < dtraj.size(); ++t) {
    const int a = dtraj.labels[t];
    const int b = dtraj.labels[t + tau];
    v.C00(a, a) += 1.0;
    v.C11(b, b) += 1.0;
    v.C01(a, b) += 1.0;
  }
  v.C00 /= pairs;
  v.C01 /= pairs;
  v.C11 /= pairs;
  v.K = inverse_sqrt_psd(v.C00, eps) * v.C01 * inverse_sqrt_psd(v.C11, eps);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(v.K);
  // Singular values beyond the number of states are reported as zero.
  v.m = m;
  v.sigma = Eigen::VectorXd::Zero(m);
  const Eigen::Index kept = std::min<Eigen::Index>(m, svd.singularValues().size());
  v.sigma.head(kept) = svd.singularValues().head(kept);
  v.r = 2.0;
  v.score = v.sigma.squaredNorm();
  return v;
}

double vamp_r(const DiscreteTrajectory& dtraj, int tau, int m, double r, double eps) {
  if (r < 1.0) throw ValidationError("msm: r must be >= 1");
  const VampComputation v = koopman_matrix(dtraj, tau, m, eps);
  double score = 0.0;
  for (Eigen::Index i = 0; i < v.sigma.size(); ++i) score += std::pow(v.sigma(i), r);
  return score;
}

void ScoreTable::add(ScoreRow row) { rows_.push_back(std::move(row)); }

std::vector<int> ScoreTable::lag_times() const {
  std::set<int> taus;
  for (const auto& r : rows_) taus.insert(r.tau);
  return {taus.begin(), taus.end()};
}

std::vector<ScoreRow> rank_rows(std::vector<ScoreRow> rows) {
  for (const auto& r : rows)
    if (r.tau != rows.front().tau)
      throw ValidationError("VAMP scores for different lag times cannot be ranked together");
  std::stable_sort(rows.begin(), rows.end(), [](const ScoreRow& a, const ScoreRow& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.method != b.method) return a.method < b.method;
    return a.k < b.k;
  });
  return rows;
}

std::vector<ScoreRow> ScoreTable::ranking(int tau) const {
  std::vector<ScoreRow> sel;
  for (const auto& r : rows_)
    if (r.tau == tau) sel.push_back(r);
  return rank_rows(std::move(sel));
}

void ScoreTable::write_csv(std::ostream& out) const {
  out << "method,k,tau,m,r,score\r\n";
  for (const auto& r : rows_)
    out << r.method << ',' << r.k << ',' << r.tau << ',' << r.m << ',' << text::format_double(r.r) << ','
        << text::format_double(r.score) << "\r\n";
}

void ScoreTable::write_rankings(std::ostream& out) const {
  out << "tau,rank,method,k,score\r\n";
  for (int tau : lag_times()) {
    int rank = 1;
    for (const auto& r : ranking(tau))
      out << tau << ',' << rank++ << ',' << r.method << ',' << r.k << ',' << text::format_double(r.score) << "\r\n";
  }
}

}  // namespace moscito::msm
