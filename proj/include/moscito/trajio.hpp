#pragma once

// Plain-text topology and trajectory files. See docs/formats.md.

#include <Eigen/Core>
#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace moscito::trajio {

enum class BackboneRole { N, CA, C, O, side_chain };

std::string_view role_name(BackboneRole role) noexcept;

using TorsionQuad = std::array<int, 4>;

struct Topology {
  int atom_count = 0;
  std::vector<std::string> element;
  std::vector<double> vdw_radius;    // Angstrom
  std::vector<int> residue_index;    // 0-based, nondecreasing
  std::vector<BackboneRole> backbone_role;
  /// One entry per residue; each holds that residue's chi torsion quadruples in order.
  std::vector<std::vector<TorsionQuad>> chi_chain;

  int residue_count() const noexcept;
  /// Index of the atom with `role` in residue `res`, or -1.
  int find_atom(int res, BackboneRole role) const noexcept;
  /// Throws ValidationError when an invariant does not hold.
  void validate() const;
};

/// One frame: 3 x atom_count, column j holds atom j.
using Frame = Eigen::Matrix3Xd;

struct Trajectory {
  Topology topology;
  std::vector<Frame> frames;
  double dt = 1.0;

  int n_frames() const noexcept { return static_cast<int>(frames.size()); }
  void validate() const;
};

Topology parse_topology(std::istream& in, const std::string& source = "<topology>");
Topology load_topology(const std::filesystem::path& path);
void write_topology(std::ostream& out, const Topology& topology);

Trajectory parse_trajectory(std::istream& in, const Topology& topology,
                            const std::string& source = "<trajectory>");
Trajectory load_trajectory(const std::filesystem::path& path, const Topology& topology);
/// Shortest round-trip decimal representation, so load(write(t)) == t exactly.
void write_trajectory(std::ostream& out, const Trajectory& traj);
void save_trajectory(const std::filesystem::path& path, const Trajectory& traj);

}  // namespace moscito::trajio
