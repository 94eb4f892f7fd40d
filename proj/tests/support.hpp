#pragma once

// Helpers shared by the unit tests: seeded random inputs and small
// hand-built molecules.

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "moscito/trajio.hpp"

namespace moscito::testing {

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng,
                                     double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = u(rng);
  return m;
}

inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Vector4d q(g(rng), g(rng), g(rng), g(rng));
  q.normalize();
  const double w = q(0), x = q(1), y = q(2), z = q(3);
  Eigen::Matrix3d r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

struct AtomSpec {
  std::string element;
  double radius;
  int residue;
  trajio::BackboneRole role;
};

inline trajio::Topology make_topology(const std::vector<AtomSpec>& atoms,
                                      std::vector<std::pair<int, trajio::TorsionQuad>> chis = {}) {
  trajio::Topology t;
  t.atom_count = static_cast<int>(atoms.size());
  for (const auto& a : atoms) {
    t.element.push_back(a.element);
    t.vdw_radius.push_back(a.radius);
    t.residue_index.push_back(a.residue);
    t.backbone_role.push_back(a.role);
  }
  t.chi_chain.assign(static_cast<std::size_t>(t.residue_count()), {});
  for (const auto& [res, q] : chis) t.chi_chain[static_cast<std::size_t>(res)].push_back(q);
  t.validate();
  return t;
}

/// n_res residues of N, CA, C (+ one side-chain atom when with_side_chain)
/// laid out along a wobbly chain; frames get independent random jitter.
inline trajio::Trajectory make_peptide(int n_res, int n_frames, std::uint64_t seed,
                                       bool with_side_chain = false, double jitter = 0.3) {
  using trajio::BackboneRole;
  std::vector<AtomSpec> atoms;
  for (int r = 0; r < n_res; ++r) {
    atoms.push_back({"N", 1.55, r, BackboneRole::N});
    atoms.push_back({"C", 1.7, r, BackboneRole::CA});
    atoms.push_back({"C", 1.7, r, BackboneRole::C});
    if (with_side_chain) atoms.push_back({"C", 1.7, r, BackboneRole::side_chain});
  }
  trajio::Trajectory traj;
  traj.topology = make_topology(atoms);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, jitter);
  trajio::Frame base(3, traj.topology.atom_count);
  for (int a = 0; a < traj.topology.atom_count; ++a) {
    const double t = 1.45 * a;
    base.col(a) = Eigen::Vector3d(t, 1.2 * std::sin(0.9 * a), 1.1 * std::cos(1.3 * a));
  }
  for (int f = 0; f < n_frames; ++f) {
    trajio::Frame fr = base;
    for (int a = 0; a < fr.cols(); ++a)
      for (int k = 0; k < 3; ++k) fr(k, a) += g(rng);
    traj.frames.push_back(fr);
  }
  traj.validate();
  return traj;
}

}  // namespace moscito::testing
