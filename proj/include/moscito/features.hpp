#pragma once

// Featurizers that turn a trajectory into the data matrix X
// (rows = feature dimensions, columns = time steps).

#include <Eigen/Core>
#include <array>
#include <set>
#include <string>
#include <vector>

#include "moscito/trajio.hpp"

namespace moscito::features {

enum class Scaling { raw, minmax01 };
enum class AngleEncoding { raw, cossin };

struct FeatureLabel {
  std::string featurizer;
  int index = 0;
  bool operator==(const FeatureLabel&) const = default;
};

struct FeatureMatrix {
  Eigen::MatrixXd values;  // d_feat x n
  std::vector<FeatureLabel> labels;
  Scaling scaling = Scaling::raw;

  Eigen::Index dims() const noexcept { return values.rows(); }
  Eigen::Index frames() const noexcept { return values.cols(); }
  void validate() const;
};

/// Featurizer names in canonical concatenation order.
inline const std::array<std::string, 6> kCanonicalOrder{"coords", "backbone", "distances",
                                                        "flex",   "sasa",     "shape"};

/// Indices of all CA atoms.
std::vector<int> ca_atoms(const trajio::Topology& topology);

/// Centers every frame on the centroid of `subset` and rotates frames f > 0
/// onto frame 0 with the least-squares (Kabsch) rotation of the subset.
trajio::Trajectory center_and_align(const trajio::Trajectory& traj, const std::vector<int>& subset);
trajio::Trajectory center_and_align(const trajio::Trajectory& traj);

/// Root-mean-square deviation of `subset` between two frames (no fitting).
double rmsd(const trajio::Frame& a, const trajio::Frame& b, const std::vector<int>& subset);

/// Signed torsion angle in (-pi, pi], IUPAC sign convention.
double dihedral(const Eigen::Vector3d& p1, const Eigen::Vector3d& p2, const Eigen::Vector3d& p3,
                const Eigen::Vector3d& p4);

FeatureMatrix cartesian_coordinates(const trajio::Trajectory& traj);
FeatureMatrix backbone_torsions(const trajio::Trajectory& traj,
                                AngleEncoding encoding = AngleEncoding::cossin);
FeatureMatrix flexible_torsions(const trajio::Trajectory& traj);
FeatureMatrix heavy_atom_min_distances(const trajio::Trajectory& traj);

inline constexpr double kDefaultProbeRadius = 1.4;
inline constexpr int kDefaultSpherePoints = 960;

/// Deterministic golden-spiral point set on the unit sphere.
Eigen::Matrix3Xd sphere_points(int count);

/// Principal axes of the atom cloud (columns), each signed so projections
/// have nonnegative third moment; a proper rotation.
Eigen::Matrix3d sasa_orientation(const trajio::Frame& frame);

/// Per-atom Shrake-Rupley accessible area of one frame (Angstrom^2). The
/// sphere point set is rotated by `orientation`; by default the frame's own
/// principal axes, so the result does not depend on how the molecule is
/// oriented. Pass a shared orientation to compare different atom sets.
Eigen::VectorXd atom_sasa(const trajio::Frame& frame, const std::vector<double>& radii,
                          double probe_radius, int sphere_point_count);
Eigen::VectorXd atom_sasa(const trajio::Frame& frame, const std::vector<double>& radii,
                          double probe_radius, int sphere_point_count,
                          const Eigen::Matrix3d& orientation);

FeatureMatrix sasa_per_residue(const trajio::Trajectory& traj,
                               double probe_radius = kDefaultProbeRadius,
                               int sphere_point_count = kDefaultSpherePoints);

/// Unit directions of the 12 icosahedron vertices, in sector order.
const std::array<Eigen::Vector3d, 12>& icosahedron_directions();
/// Sector of a direction: argmax of the dot product, lowest index on ties.
int shape_sector(const Eigen::Vector3d& direction);

FeatureMatrix shape_histogram(const trajio::Trajectory& traj);

struct FeatureOptions {
  AngleEncoding angles = AngleEncoding::cossin;
  double probe_radius = kDefaultProbeRadius;
  int sphere_points = kDefaultSpherePoints;
};

/// Row-wise concatenation of the selected featurizers in canonical order.
FeatureMatrix assemble_features(const trajio::Trajectory& traj, const std::set<std::string>& selection,
                                Scaling scaling, const FeatureOptions& options = {});

/// Maps each row affinely onto [0, 1]; constant rows become 0.
void minmax_scale(FeatureMatrix& fm);

}  // namespace moscito::features
