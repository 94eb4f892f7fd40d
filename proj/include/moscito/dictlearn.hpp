#pragma once

// Nonnegative dictionary learning with temporal Laplacian regularization:
//
//   min_{D,Z} |X - D Z|_F^2 + lambda1 |Z|_F^2 + lambda2 tr(Z L Z^T)
//   s.t. Z >= 0, D >= 0, |d_i|_2 <= 1
//
// solved by ADMM over the split U = D, V = Z with multipliers Lam (U - D)
// and Pi (V - Z). alpha is the penalty on |U - D|^2, beta on |V - Z|^2.

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "moscito/tempreg.hpp"

namespace moscito::dictlearn {

/// Which penalty scales each multiplier step.
///  lagrangian: Pi += nu*beta*(V - Z), Lam += nu*alpha*(U - D)
///  swapped: Pi += nu*alpha*(V - Z), Lam += nu*beta*(U - D)
enum class MultiplierPairing { lagrangian, swapped };

enum class Preconditioner { none, jacobi, banded, spectral };

std::string_view pairing_name(MultiplierPairing p) noexcept;
MultiplierPairing parse_pairing(std::string_view name);
std::string_view preconditioner_name(Preconditioner p) noexcept;
Preconditioner parse_preconditioner(std::string_view name);

struct SolverConfig {
  int d = 60;
  double lambda1 = 0.01;
  double lambda2 = 15.0;
  double alpha = 0.1;
  double beta = 0.1;
  double nu = 1.0;
  int max_iters = 20;
  double tol = 1e-4;
  std::uint64_t seed = 0;
  double cg_tol = 1e-10;
  int cg_max_iters = 2000;
  MultiplierPairing pairing = MultiplierPairing::lagrangian;
  Preconditioner preconditioner = Preconditioner::spectral;

  double penalty_u() const noexcept { return alpha; }
  double penalty_v() const noexcept { return beta; }
  double step_u() const noexcept { return nu * (pairing == MultiplierPairing::lagrangian ? alpha : beta); }
  double step_v() const noexcept { return nu * (pairing == MultiplierPairing::lagrangian ? beta : alpha); }
  void validate() const;
};

struct AdmmState {
  Eigen::MatrixXd D;    // d_feat x d
  Eigen::MatrixXd Z;    // d x n
  Eigen::MatrixXd U;    // d_feat x d
  Eigen::MatrixXd V;    // d x n
  Eigen::MatrixXd Pi;   // d x n
  Eigen::MatrixXd Lam;  // d_feat x d
  int iter = 0;
  double primal_res_U = 0.0;
  double primal_res_V = 0.0;
  /// Column indices of X the dictionary was seeded from.
  std::vector<int> seed_columns;
};

inline constexpr double kInitialCode = 1e-3;

AdmmState init_state(const Eigen::MatrixXd& x, const SolverConfig& cfg);

struct CgReport {
  int iterations = 0;
  double relative_residual = 0.0;
};

struct CgOptions {
  double tol = 1e-10;
  int max_iters = 2000;
  Preconditioner preconditioner = Preconditioner::spectral;
};

/// M(V) = gram_shifted * V + lambda2 * V * L
Eigen::MatrixXd apply_v_operator(const Eigen::MatrixXd& v, const Eigen::MatrixXd& gram_shifted,
                                 double lambda2, const tempreg::TemporalLaplacian& lap);

/// Matrix-free preconditioned CG for M(V) = rhs, starting from `v`.
/// Throws ConvergenceError when the tolerance is not met in max_iters.
CgReport solve_v_system(const Eigen::MatrixXd& gram_shifted, double lambda2,
                        const tempreg::TemporalLaplacian& lap, const Eigen::MatrixXd& rhs,
                        Eigen::MatrixXd& v, const CgOptions& opts);

CgReport update_V(AdmmState& state, const Eigen::MatrixXd& x, const tempreg::TemporalLaplacian& lap,
                  const SolverConfig& cfg);
void update_U(AdmmState& state, const Eigen::MatrixXd& x, const SolverConfig& cfg);
void update_Z(AdmmState& state, const SolverConfig& cfg);
void update_D(AdmmState& state, const SolverConfig& cfg);
void update_multipliers(AdmmState& state, const SolverConfig& cfg);

/// Scales every column with norm > 1 back onto the unit sphere.
void project_columns_to_unit_ball(Eigen::MatrixXd& m);

double objective(const Eigen::MatrixXd& x, const Eigen::MatrixXd& d, const Eigen::MatrixXd& z,
                 double lambda1, double lambda2, const tempreg::TemporalLaplacian& lap);

struct IterationRecord {
  int iter = 0;
  double objective = 0.0;
  double primal_res_U = 0.0;
  double primal_res_V = 0.0;
  double rel_res_U = 0.0;  // |U - D| / |D|
  double rel_res_V = 0.0;  // |V - Z| / |Z|
  int cg_iterations = 0;
  double cg_residual = 0.0;
  double seconds = 0.0;
};

struct Diagnostics {
  std::vector<IterationRecord> iterations;
  bool converged = false;
  double total_seconds = 0.0;

  /// include_timing = false drops wall-clock fields (for reproducible output).
  std::string to_json(bool include_timing = true) const;
};

struct FitResult {
  Eigen::MatrixXd D;
  Eigen::MatrixXd Z;
  Diagnostics diagnostics;
  AdmmState state;
};

using IterationObserver = std::function<void(const AdmmState&, const IterationRecord&)>;

/// Runs V -> U -> Z -> D -> multipliers until max_iters or
/// max(|V-Z|, |U-D|) / max(1, |Z|, |D|) < tol.
FitResult fit(const Eigen::MatrixXd& x, const tempreg::TemporalLaplacian& lap,
              const SolverConfig& cfg, const IterationObserver& observer = {});

}  // namespace moscito::dictlearn
