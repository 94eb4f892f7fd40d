#include "moscito/dictlearn.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <json.hpp>
#include <numeric>
#include <optional>
#include <random>
#include <span>

#include "moscito/error.hpp"
#include "moscito/simd.hpp"

namespace moscito::dictlearn {

using tempreg::TemporalLaplacian;

namespace {

std::span<const double> flat(const Eigen::MatrixXd& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}
std::span<double> flat(Eigen::MatrixXd& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }

double relative(double residual, double norm) { return norm > 0.0 ? residual / norm : residual; }

// banded: drops the off-diagonal of the Gram part, which decouples M into
// one banded system per row of V.
// spectral: rotates V into the eigenbasis of the Gram part first, where M
// decouples exactly; CG then only mops up rounding.
class VPreconditioner {
 public:
  VPreconditioner(const Eigen::MatrixXd& gram_shifted, double lambda2, const TemporalLaplacian& lap,
                  Preconditioner kind)
      : kind_(kind) {
    const Eigen::Index d = gram_shifted.rows();
    const Eigen::VectorXd ldiag = lap.laplacian.diagonal();
    if (kind_ == Preconditioner::jacobi) {
      inv_diag_.resize(d, lap.size());
      for (Eigen::Index r = 0; r < d; ++r)
        inv_diag_.row(r) = (gram_shifted(r, r) + lambda2 * ldiag.array()).inverse().transpose();
    } else if (kind_ == Preconditioner::banded) {
      factors_.reserve(static_cast<std::size_t>(d));
      for (Eigen::Index r = 0; r < d; ++r)
        factors_.emplace_back(lap.laplacian, gram_shifted(r, r), lambda2);
    } else if (kind_ == Preconditioner::spectral) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram_shifted);
      if (es.info() != Eigen::Success) throw Error("dictlearn: eigensolver failed in the V preconditioner");
      basis_ = es.eigenvectors();
      factors_.reserve(static_cast<std::size_t>(d));
      for (Eigen::Index r = 0; r < d; ++r)
        factors_.emplace_back(lap.laplacian, std::max(es.eigenvalues()(r), 0.0), lambda2);
    }
  }

  void apply(const Eigen::MatrixXd& r, Eigen::MatrixXd& z) const {
    switch (kind_) {
      case Preconditioner::none:
        z = r;
        break;
      case Preconditioner::jacobi:
        z = r.cwiseProduct(inv_diag_);
        break;
      case Preconditioner::banded:
        z = r;
        solve_rows(z);
        break;
      case Preconditioner::spectral:
        z.noalias() = basis_.transpose() * r;
        solve_rows(z);
        z = basis_ * z;
        break;
    }
  }

 private:
  void solve_rows(Eigen::MatrixXd& z) const {
    Eigen::VectorXd row(z.cols());
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      row = z.row(i).transpose();
      factors_[static_cast<std::size_t>(i)].solve(row);
      z.row(i) = row.transpose();
    }
  }

  Preconditioner kind_;
  Eigen::MatrixXd inv_diag_;
  Eigen::MatrixXd basis_;
  std::vector<tempreg::BandedCholesky> factors_;
};

void check_finite(const AdmmState& s, int iter) {
  if (!s.V.allFinite() || !s.U.allFinite() || !s.Z.allFinite() || !s.D.allFinite() ||
      !s.Pi.allFinite() || !s.Lam.allFinite())
    throw Error("dictlearn: non-finite value at iteration " + std::to_string(iter));
}

}  // namespace

std::string_view pairing_name(MultiplierPairing p) noexcept {
  return p == MultiplierPairing::lagrangian ? "lagrangian" : "swapped";
}

MultiplierPairing parse_pairing(std::string_view name) {
  if (name == "lagrangian") return MultiplierPairing::lagrangian;
  if (name == "swapped") return MultiplierPairing::swapped;
  throw ValidationError("unknown multiplier pairing '" + std::string(name) + "'");
}

std::string_view preconditioner_name(Preconditioner p) noexcept {
  switch (p) {
    case Preconditioner::none: return "none";
    case Preconditioner::jacobi: return "jacobi";
    case Preconditioner::banded: return "banded";
    case Preconditioner::spectral: return "spectral";
  }
  return "?";
}

Preconditioner parse_preconditioner(std::string_view name) {
  for (auto p : {Preconditioner::none, Preconditioner::jacobi, Preconditioner::banded,
                 Preconditioner::spectral})
    if (preconditioner_name(p) == name) return p;
  throw ValidationError("unknown preconditioner '" + std::string(name) + "'");
}

void SolverConfig::validate() const {
  if (d < 1) throw ValidationError("solver: d must be >= 1");
  if (lambda1 < 0.0 || lambda2 < 0.0) throw ValidationError("solver: lambda1, lambda2 must be >= 0");
  if (!(alpha > 0.0) || !(beta > 0.0)) throw ValidationError("solver: alpha, beta must be > 0");
  if (!(nu >= 0.0)) throw ValidationError("solver: nu must be >= 0");
  if (max_iters < 0) throw ValidationError("solver: max_iters must be >= 0");
  if (!(tol >= 0.0) || !(cg_tol > 0.0) || cg_max_iters < 1)
    throw ValidationError("solver: invalid tolerance settings");
}

AdmmState init_state(const Eigen::MatrixXd& x, const SolverConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = x.cols();
  if (cfg.d > n)
    throw ValidationError("dictlearn: dictionary size d=" + std::to_string(cfg.d) +
                          " exceeds the number of time steps n=" + std::to_string(n));
  if (!x.allFinite()) throw ValidationError("dictlearn: X has non-finite entries");

  // Partial Fisher-Yates: first d entries are distinct uniform picks.
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(cfg.seed);
  for (int i = 0; i < cfg.d; ++i) {
    std::uniform_int_distribution<int> pick(i, static_cast<int>(n) - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(static_cast<std::size_t>(cfg.d));

  AdmmState s;
  s.seed_columns = idx;
  s.D.resize(x.rows(), cfg.d);
  for (int j = 0; j < cfg.d; ++j) {
    s.D.col(j) = x.col(idx[j]).cwiseMax(0.0);
    const double norm = s.D.col(j).norm();
    if (norm > 0.0) s.D.col(j) /= norm;
  }
  s.Z = Eigen::MatrixXd::Constant(cfg.d, n, kInitialCode);
  s.U = s.D;
  s.V = s.Z;
  s.Pi = Eigen::MatrixXd::Zero(cfg.d, n);
  s.Lam = Eigen::MatrixXd::Zero(x.rows(), cfg.d);
  return s;
}

Eigen::MatrixXd apply_v_operator(const Eigen::MatrixXd& v, const Eigen::MatrixXd& gram_shifted,
                                 double lambda2, const TemporalLaplacian& lap) {
  Eigen::MatrixXd out = gram_shifted * v;
  if (lambda2 != 0.0) lap.laplacian.accumulate_right_product(v, lambda2, out);
  return out;
}

CgReport solve_v_system(const Eigen::MatrixXd& gram_shifted, double lambda2,
                        const TemporalLaplacian& lap, const Eigen::MatrixXd& rhs, Eigen::MatrixXd& v,
                        const CgOptions& opts) {
  if (rhs.cols() != lap.size() || rhs.rows() != gram_shifted.rows())
    throw DimensionError("solve_v_system: shape mismatch");
  if (v.rows() != rhs.rows() || v.cols() != rhs.cols()) v = Eigen::MatrixXd::Zero(rhs.rows(), rhs.cols());

  const double bnorm = std::sqrt(simd::dot(flat(rhs), flat(rhs)));
  if (bnorm == 0.0) {
    v.setZero();
    return {0, 0.0};
  }
  const VPreconditioner precond(gram_shifted, lambda2, lap, opts.preconditioner);

  Eigen::MatrixXd r = rhs - apply_v_operator(v, gram_shifted, lambda2, lap);
  Eigen::MatrixXd z;
  precond.apply(r, z);
  Eigen::MatrixXd p = z;
  double rz = simd::dot(flat(r), flat(z));
  double rnorm = std::sqrt(simd::dot(flat(r), flat(r)));
  int it = 0;
  while (rnorm > opts.tol * bnorm) {
    if (it == opts.max_iters)
      throw ConvergenceError("dictlearn: CG for the V update did not converge", it, rnorm / bnorm);
    const Eigen::MatrixXd q = apply_v_operator(p, gram_shifted, lambda2, lap);
    const double pq = simd::dot(flat(p), flat(q));
    if (!(pq > 0.0))
      throw ConvergenceError("dictlearn: V operator is not positive definite", it, rnorm / bnorm);
    const double step = rz / pq;
    simd::axpy(step, flat(p), flat(v));
    simd::axpy(-step, flat(q), flat(r));
    precond.apply(r, z);
    const double rz_next = simd::dot(flat(r), flat(z));
    const double beta = rz_next / rz;
    rz = rz_next;
    p *= beta;
    p += z;
    rnorm = std::sqrt(simd::dot(flat(r), flat(r)));
    ++it;
  }
  return {it, rnorm / bnorm};
}

CgReport update_V(AdmmState& s, const Eigen::MatrixXd& x, const TemporalLaplacian& lap,
                  const SolverConfig& cfg) {
  const double rho = cfg.penalty_v();
  Eigen::MatrixXd gram = s.U.transpose() * s.U;
  gram.diagonal().array() += cfg.lambda1 + rho;
  const Eigen::MatrixXd rhs = s.U.transpose() * x - s.Pi + rho * s.Z;
  if (!gram.allFinite() || !rhs.allFinite()) throw Error("dictlearn: V system has non-finite entries");
  return solve_v_system(gram, cfg.lambda2, lap, rhs, s.V,
                        {cfg.cg_tol, cfg.cg_max_iters, cfg.preconditioner});
}

void update_U(AdmmState& s, const Eigen::MatrixXd& x, const SolverConfig& cfg) {
  const double rho = cfg.penalty_u();
  Eigen::MatrixXd gram = s.V * s.V.transpose();
  gram.diagonal().array() += rho;
  const Eigen::MatrixXd rhs = x * s.V.transpose() - s.Lam + rho * s.D;
  s.U = gram.llt().solve(rhs.transpose()).transpose();
}

void update_Z(AdmmState& s, const SolverConfig& cfg) {
  s.Z = (s.V + s.Pi / cfg.penalty_v()).cwiseMax(0.0);
}

void project_columns_to_unit_ball(Eigen::MatrixXd& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double norm = m.col(j).norm();
    if (norm > 1.0) m.col(j) /= norm;
  }
}

void update_D(AdmmState& s, const SolverConfig& cfg) {
  s.D = (s.U + s.Lam / cfg.penalty_u()).cwiseMax(0.0);
  project_columns_to_unit_ball(s.D);
}

void update_multipliers(AdmmState& s, const SolverConfig& cfg) {
  s.Pi += cfg.step_v() * (s.V - s.Z);
  s.Lam += cfg.step_u() * (s.U - s.D);
}

double objective(const Eigen::MatrixXd& x, const Eigen::MatrixXd& d, const Eigen::MatrixXd& z,
                 double lambda1, double lambda2, const TemporalLaplacian& lap) {
  if (d.rows() != x.rows() || d.cols() != z.rows() || z.cols() != x.cols())
    throw DimensionError("objective: inconsistent shapes of X, D, Z");
  double value = (x - d * z).squaredNorm() + lambda1 * z.squaredNorm();
  if (lambda2 != 0.0) value += lambda2 * tempreg::regularizer_value(z, lap);
  return value;
}

std::string Diagnostics::to_json(bool include_timing) const {
  nlohmann::json j;
  j["converged"] = converged;
  j["n_iterations"] = iterations.size();
  if (include_timing) j["total_seconds"] = total_seconds;
  auto& arr = j["iterations"] = nlohmann::json::array();
  for (const auto& r : iterations) {
    nlohmann::json e{{"iter", r.iter},
                     {"objective", r.objective},
                     {"primal_res_U", r.primal_res_U},
                     {"primal_res_V", r.primal_res_V},
                     {"rel_res_U", r.rel_res_U},
                     {"rel_res_V", r.rel_res_V},
                     {"cg_iterations", r.cg_iterations},
                     {"cg_residual", r.cg_residual}};
    if (include_timing) e["seconds"] = r.seconds;
    arr.push_back(std::move(e));
  }
  return j.dump(2);
}

FitResult fit(const Eigen::MatrixXd& x, const TemporalLaplacian& lap, const SolverConfig& cfg,
              const IterationObserver& observer) {
  if (lap.size() != x.cols())
    throw DimensionError("fit: Laplacian size " + std::to_string(lap.size()) +
                         " does not match n=" + std::to_string(x.cols()));
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();

  FitResult result;
  AdmmState& s = result.state;
  s = init_state(x, cfg);

  for (int it = 1; it <= cfg.max_iters; ++it) {
    const auto t0 = clock::now();
    IterationRecord rec;
    rec.iter = it;
    CgReport cg;
    try {
      cg = update_V(s, x, lap, cfg);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError(std::string(e.what()) + " at ADMM iteration " + std::to_string(it),
                             e.iterations(), e.residual());
    } catch (const Error& e) {
      throw Error(std::string(e.what()) + " at ADMM iteration " + std::to_string(it));
    }
    update_U(s, x, cfg);
    update_Z(s, cfg);
    update_D(s, cfg);
    update_multipliers(s, cfg);
    s.iter = it;
    check_finite(s, it);

    s.primal_res_V = (s.V - s.Z).norm();
    s.primal_res_U = (s.U - s.D).norm();
    const double z_norm = s.Z.norm();
    const double d_norm = s.D.norm();
    rec.objective = objective(x, s.D, s.Z, cfg.lambda1, cfg.lambda2, lap);
    rec.primal_res_U = s.primal_res_U;
    rec.primal_res_V = s.primal_res_V;
    rec.rel_res_U = relative(s.primal_res_U, d_norm);
    rec.rel_res_V = relative(s.primal_res_V, z_norm);
    rec.cg_iterations = cg.iterations;
    rec.cg_residual = cg.relative_residual;
    rec.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    result.diagnostics.iterations.push_back(rec);
    if (observer) observer(s, rec);

    const double scale = std::max({1.0, z_norm, d_norm});
    if (std::max(s.primal_res_V, s.primal_res_U) / scale < cfg.tol) {
      result.diagnostics.converged = true;
      break;
    }
  }
  result.diagnostics.total_seconds = std::chrono::duration<double>(clock::now() - start).count();
  result.D = s.D;
  result.Z = s.Z;
  return result;
}

}  // namespace moscito::dictlearn
