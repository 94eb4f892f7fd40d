#include "moscito/features.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "moscito/error.hpp"
#include "moscito/simd.hpp"

namespace moscito::features {

using trajio::BackboneRole;
using trajio::Frame;
using trajio::Trajectory;

namespace {

FeatureMatrix make_matrix(const std::string& name, Eigen::Index rows, Eigen::Index cols) {
  FeatureMatrix fm;
  fm.values.setZero(rows, cols);
  fm.labels.reserve(static_cast<std::size_t>(rows));
  for (Eigen::Index r = 0; r < rows; ++r) fm.labels.push_back({name, static_cast<int>(r)});
  return fm;
}

Eigen::Vector3d subset_centroid(const Frame& frame, const std::vector<int>& subset) {
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (int a : subset) c += frame.col(a);
  return c / static_cast<double>(subset.size());
}

// Rotation R minimizing sum |R p_i - q_i|^2 over centered point sets.
Eigen::Matrix3d kabsch_rotation(const Eigen::Matrix3Xd& moving, const Eigen::Matrix3Xd& reference) {
  const Eigen::Matrix3d h = moving * reference.transpose();
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double d = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  Eigen::Matrix3d corr = Eigen::Matrix3d::Identity();
  corr(2, 2) = d;
  return svd.matrixV() * corr * svd.matrixU().transpose();
}

Eigen::Matrix3Xd gather(const Frame& frame, const std::vector<int>& subset) {
  Eigen::Matrix3Xd out(3, static_cast<Eigen::Index>(subset.size()));
  for (std::size_t i = 0; i < subset.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = frame.col(subset[i]);
  return out;
}

void emit_angle(FeatureMatrix& fm, Eigen::Index row, Eigen::Index col, double angle,
                AngleEncoding enc) {
  if (enc == AngleEncoding::cossin) {
    fm.values(2 * row, col) = std::cos(angle);
    fm.values(2 * row + 1, col) = std::sin(angle);
  } else {
    fm.values(row, col) = angle;
  }
}

}  // namespace

void FeatureMatrix::validate() const {
  if (static_cast<std::size_t>(values.rows()) != labels.size())
    throw DimensionError("feature matrix: label count does not match row count");
  if (!values.allFinite()) throw ValidationError("feature matrix: non-finite entry");
  if (scaling == Scaling::minmax01 && values.size() > 0 &&
      (values.minCoeff() < 0.0 || values.maxCoeff() > 1.0))
    throw ValidationError("feature matrix: minmax01 scaling but entries outside [0, 1]");
}

std::vector<int> ca_atoms(const trajio::Topology& topology) {
  std::vector<int> out;
  for (int i = 0; i < topology.atom_count; ++i)
    if (topology.backbone_role[i] == BackboneRole::CA) out.push_back(i);
  return out;
}

Trajectory center_and_align(const Trajectory& traj, const std::vector<int>& subset) {
  if (subset.size() < 3)
    throw ValidationError("center_and_align: subset needs at least 3 atoms, got " +
                          std::to_string(subset.size()));
  for (int a : subset)
    if (a < 0 || a >= traj.topology.atom_count)
      throw ValidationError("center_and_align: atom index " + std::to_string(a) + " out of range");

  Trajectory out = traj;
  Eigen::Matrix3Xd reference;
  for (std::size_t f = 0; f < out.frames.size(); ++f) {
    Frame& frame = out.frames[f];
    frame.colwise() -= subset_centroid(frame, subset);
    if (f == 0) {
      reference = gather(frame, subset);
      continue;
    }
    const Eigen::Matrix3d rot = kabsch_rotation(gather(frame, subset), reference);
    frame = rot * frame;
  }
  return out;
}

Trajectory center_and_align(const Trajectory& traj) { return center_and_align(traj, ca_atoms(traj.topology)); }

double rmsd(const Frame& a, const Frame& b, const std::vector<int>& subset) {
  double s = 0.0;
  for (int i : subset) s += (a.col(i) - b.col(i)).squaredNorm();
  return std::sqrt(s / static_cast<double>(subset.size()));
}

double dihedral(const Eigen::Vector3d& p1, const Eigen::Vector3d& p2, const Eigen::Vector3d& p3,
                const Eigen::Vector3d& p4) {
  const Eigen::Vector3d b1 = p2 - p1;
  const Eigen::Vector3d b2 = p3 - p2;
  const Eigen::Vector3d b3 = p4 - p3;
  const double len2 = b2.norm();
  if (len2 == 0.0 || b1.norm() == 0.0 || b3.norm() == 0.0)
    throw ValidationError("dihedral: consecutive points coincide");
  const Eigen::Vector3d n1 = b1.cross(b2);
  const Eigen::Vector3d n2 = b2.cross(b3);
  constexpr double kCollinear = 1e-12;
  if (n1.norm() <= kCollinear * b1.norm() * len2 || n2.norm() <= kCollinear * len2 * b3.norm())
    throw ValidationError("dihedral: three consecutive points are collinear");
  const double x = n1.dot(n2);
  const double y = len2 * b1.dot(n2);
  double angle = std::atan2(y, x);
  if (angle <= -std::numbers::pi) angle = std::numbers::pi;
  return angle;
}

FeatureMatrix cartesian_coordinates(const Trajectory& traj) {
  const auto cas = ca_atoms(traj.topology);
  const Trajectory aligned = center_and_align(traj, cas);
  FeatureMatrix fm = make_matrix("coords", 3 * static_cast<Eigen::Index>(cas.size()), traj.n_frames());
  for (int f = 0; f < traj.n_frames(); ++f)
    for (std::size_t i = 0; i < cas.size(); ++i)
      fm.values.block<3, 1>(3 * static_cast<Eigen::Index>(i), f) = aligned.frames[f].col(cas[i]);
  return fm;
}

FeatureMatrix backbone_torsions(const Trajectory& traj, AngleEncoding encoding) {
  const auto& top = traj.topology;
  const int n_res = top.residue_count();
  if (n_res < 2) throw ValidationError("backbone_torsions: need at least 2 residues");

  std::vector<std::array<int, 3>> bb(static_cast<std::size_t>(n_res));
  const std::array<BackboneRole, 3> roles{BackboneRole::N, BackboneRole::CA, BackboneRole::C};
  for (int r = 0; r < n_res; ++r) {
    for (int k = 0; k < 3; ++k) {
      bb[r][k] = top.find_atom(r, roles[k]);
      if (bb[r][k] < 0)
        throw ValidationError("backbone_torsions: residue " + std::to_string(r) + " has no " +
                              std::string(trajio::role_name(roles[k])) + " atom");
    }
  }

  // Per residue: phi (i >= 1) then psi (i <= last - 1).
  std::vector<std::array<int, 4>> quads;
  for (int r = 0; r < n_res; ++r) {
    if (r >= 1) quads.push_back({bb[r - 1][2], bb[r][0], bb[r][1], bb[r][2]});
    if (r + 1 < n_res) quads.push_back({bb[r][0], bb[r][1], bb[r][2], bb[r + 1][0]});
  }
  const int per_angle = encoding == AngleEncoding::cossin ? 2 : 1;
  FeatureMatrix fm = make_matrix("backbone", per_angle * static_cast<Eigen::Index>(quads.size()),
                                 traj.n_frames());
  for (int f = 0; f < traj.n_frames(); ++f) {
    const Frame& fr = traj.frames[f];
    for (std::size_t q = 0; q < quads.size(); ++q) {
      const auto& a = quads[q];
      emit_angle(fm, static_cast<Eigen::Index>(q), f,
                 dihedral(fr.col(a[0]), fr.col(a[1]), fr.col(a[2]), fr.col(a[3])), encoding);
    }
  }
  return fm;
}

FeatureMatrix flexible_torsions(const Trajectory& traj) {
  std::vector<trajio::TorsionQuad> quads;
  for (const auto& per_res : traj.topology.chi_chain) quads.insert(quads.end(), per_res.begin(), per_res.end());
  if (quads.empty()) throw ValidationError("flexible_torsions: no flexible torsions defined");
  FeatureMatrix fm = make_matrix("flex", 2 * static_cast<Eigen::Index>(quads.size()), traj.n_frames());
  for (int f = 0; f < traj.n_frames(); ++f) {
    const Frame& fr = traj.frames[f];
    for (std::size_t q = 0; q < quads.size(); ++q) {
      const auto& a = quads[q];
      emit_angle(fm, static_cast<Eigen::Index>(q), f,
                 dihedral(fr.col(a[0]), fr.col(a[1]), fr.col(a[2]), fr.col(a[3])),
                 AngleEncoding::cossin);
    }
  }
  return fm;
}

FeatureMatrix heavy_atom_min_distances(const Trajectory& traj) {
  const auto& top = traj.topology;
  const int n_res = top.residue_count();
  if (n_res < 4) throw ValidationError("heavy_atom_min_distances: need at least 4 residues");
  std::vector<std::vector<int>> heavy(static_cast<std::size_t>(n_res));
  for (int a = 0; a < top.atom_count; ++a)
    if (top.element[a] != "H") heavy[top.residue_index[a]].push_back(a);
  for (int r = 0; r < n_res; ++r)
    if (heavy[r].empty())
      throw ValidationError("heavy_atom_min_distances: residue " + std::to_string(r) +
                            " has no heavy atoms");

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n_res; ++i)
    for (int j = i + 3; j < n_res; ++j) pairs.emplace_back(i, j);

  FeatureMatrix fm = make_matrix("distances", static_cast<Eigen::Index>(pairs.size()), traj.n_frames());
  // SoA copies of each residue's heavy atoms, refreshed per frame.
  std::vector<std::array<std::vector<double>, 3>> soa(static_cast<std::size_t>(n_res));
  for (int f = 0; f < traj.n_frames(); ++f) {
    const Frame& fr = traj.frames[f];
    for (int r = 0; r < n_res; ++r) {
      for (int k = 0; k < 3; ++k) {
        soa[r][k].clear();
        for (int a : heavy[r]) soa[r][k].push_back(fr(k, a));
      }
    }
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto& A = soa[pairs[p].first];
      const auto& B = soa[pairs[p].second];
      const double d2 = simd::min_squared_distance({A[0], A[1], A[2]}, {B[0], B[1], B[2]});
      fm.values(static_cast<Eigen::Index>(p), f) = std::exp(-std::sqrt(d2));
    }
  }
  return fm;
}

Eigen::Matrix3Xd sphere_points(int count) {
  Eigen::Matrix3Xd pts(3, count);
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double y = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - y * y));
    const double phi = golden_angle * i;
    pts(0, i) = r * std::cos(phi);
    pts(1, i) = y;
    pts(2, i) = r * std::sin(phi);
  }
  return pts;
}

Eigen::Matrix3d sasa_orientation(const Frame& frame) {
  if (frame.cols() < 2) return Eigen::Matrix3d::Identity();
  const Eigen::Matrix3Xd centered = frame.colwise() - frame.rowwise().mean();
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(centered * centered.transpose());
  Eigen::Matrix3d axes = eig.eigenvectors();
  for (int k = 0; k < 2; ++k) {
    const Eigen::VectorXd proj = axes.col(k).transpose() * centered;
    double skew = proj.array().cube().sum();
    if (std::abs(skew) <= 1e-12 * proj.cwiseAbs().array().cube().sum()) {
      skew = 0.0;
      for (Eigen::Index a = 0; a < proj.size() && skew == 0.0; ++a)
        if (std::abs(proj(a)) > 1e-9) skew = proj(a);
    }
    if (skew < 0.0) axes.col(k) = -axes.col(k);
  }
  axes.col(2) = axes.col(0).cross(axes.col(1));
  return axes;
}

Eigen::VectorXd atom_sasa(const Frame& frame, const std::vector<double>& radii, double probe_radius,
                          int sphere_point_count) {
  return atom_sasa(frame, radii, probe_radius, sphere_point_count, sasa_orientation(frame));
}

Eigen::VectorXd atom_sasa(const Frame& frame, const std::vector<double>& radii, double probe_radius,
                          int sphere_point_count, const Eigen::Matrix3d& orientation) {
  if (probe_radius < 0.0) throw ValidationError("sasa: probe_radius must be >= 0");
  if (sphere_point_count < 32) throw ValidationError("sasa: need at least 32 sphere points");
  const Eigen::Index n = frame.cols();
  const Eigen::Matrix3Xd unit = orientation * sphere_points(sphere_point_count);
  Eigen::VectorXd expanded(n);
  for (Eigen::Index i = 0; i < n; ++i) expanded(i) = radii[i] + probe_radius;

  Eigen::VectorXd area(n);
  std::vector<double> px(sphere_point_count), py(sphere_point_count), pz(sphere_point_count);
  std::vector<double> cx, cy, cz, r2;
  for (Eigen::Index i = 0; i < n; ++i) {
    cx.clear();
    cy.clear();
    cz.clear();
    r2.clear();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double reach = expanded(i) + expanded(j);
      if ((frame.col(i) - frame.col(j)).squaredNorm() < reach * reach) {
        cx.push_back(frame(0, j));
        cy.push_back(frame(1, j));
        cz.push_back(frame(2, j));
        r2.push_back(expanded(j) * expanded(j));
      }
    }
    for (int p = 0; p < sphere_point_count; ++p) {
      px[p] = frame(0, i) + expanded(i) * unit(0, p);
      py[p] = frame(1, i) + expanded(i) * unit(1, p);
      pz[p] = frame(2, i) + expanded(i) * unit(2, p);
    }
    const std::size_t exposed = simd::count_exposed({px, py, pz}, {cx, cy, cz}, r2);
    area(i) = 4.0 * std::numbers::pi * expanded(i) * expanded(i) * static_cast<double>(exposed) /
              sphere_point_count;
  }
  return area;
}

FeatureMatrix sasa_per_residue(const Trajectory& traj, double probe_radius, int sphere_point_count) {
  const auto& top = traj.topology;
  FeatureMatrix fm = make_matrix("sasa", top.residue_count(), traj.n_frames());
  for (int f = 0; f < traj.n_frames(); ++f) {
    const Eigen::VectorXd per_atom =
        atom_sasa(traj.frames[f], top.vdw_radius, probe_radius, sphere_point_count);
    for (int a = 0; a < top.atom_count; ++a) fm.values(top.residue_index[a], f) += per_atom(a);
  }
  return fm;
}

const std::array<Eigen::Vector3d, 12>& icosahedron_directions() {
  static const std::array<Eigen::Vector3d, 12> dirs = [] {
    const double phi = std::numbers::phi;
    std::array<Eigen::Vector3d, 12> d{
        Eigen::Vector3d(0, 1, phi),   Eigen::Vector3d(0, 1, -phi),  Eigen::Vector3d(0, -1, phi),
        Eigen::Vector3d(0, -1, -phi), Eigen::Vector3d(1, phi, 0),   Eigen::Vector3d(1, -phi, 0),
        Eigen::Vector3d(-1, phi, 0),  Eigen::Vector3d(-1, -phi, 0), Eigen::Vector3d(phi, 0, 1),
        Eigen::Vector3d(phi, 0, -1),  Eigen::Vector3d(-phi, 0, 1),  Eigen::Vector3d(-phi, 0, -1)};
    for (auto& v : d) v.normalize();
    return d;
  }();
  return dirs;
}

int shape_sector(const Eigen::Vector3d& direction) {
  const auto& dirs = icosahedron_directions();
  int best = 0;
  double best_dot = dirs[0].dot(direction);
  for (int s = 1; s < 12; ++s) {
    const double d = dirs[s].dot(direction);
    if (d > best_dot) {
      best_dot = d;
      best = s;
    }
  }
  return best;
}

FeatureMatrix shape_histogram(const Trajectory& traj) {
  constexpr int kShells = 5;
  constexpr int kSectors = 12;
  const int n_atoms = traj.topology.atom_count;
  if (n_atoms == 0) throw ValidationError("shape_histogram: trajectory has no atoms");
  FeatureMatrix fm = make_matrix("shape", kShells * kSectors, traj.n_frames());
  for (int f = 0; f < traj.n_frames(); ++f) {
    Eigen::Matrix3Xd centered = traj.frames[f];
    centered.colwise() -= centered.rowwise().mean();
    const Eigen::VectorXd radius = centered.colwise().norm().transpose();
    const double r_max = radius.maxCoeff();
    for (int a = 0; a < n_atoms; ++a) {
      int shell = 0;
      int sector = 0;
      if (radius(a) > 0.0) {
        shell = std::min(kShells - 1, static_cast<int>(std::floor(kShells * radius(a) / r_max)));
        sector = shape_sector(centered.col(a) / radius(a));
      }
      fm.values(shell * kSectors + sector, f) += 1.0;
    }
  }
  fm.values /= static_cast<double>(n_atoms);
  return fm;
}

void minmax_scale(FeatureMatrix& fm) {
  for (Eigen::Index r = 0; r < fm.values.rows(); ++r) {
    auto row = fm.values.row(r);
    const double lo = row.minCoeff();
    const double range = row.maxCoeff() - lo;
    if (range > 0.0)
      row = ((row.array() - lo) / range).cwiseMax(0.0).cwiseMin(1.0).matrix();
    else
      row.setZero();
  }
  fm.scaling = Scaling::minmax01;
}

FeatureMatrix assemble_features(const Trajectory& traj, const std::set<std::string>& selection,
                                Scaling scaling, const FeatureOptions& options) {
  if (selection.empty()) throw ValidationError("assemble_features: empty featurizer selection");
  for (const auto& name : selection)
    if (std::find(kCanonicalOrder.begin(), kCanonicalOrder.end(), name) == kCanonicalOrder.end())
      throw ValidationError("assemble_features: unknown featurizer '" + name + "'");

  std::vector<FeatureMatrix> parts;
  for (const auto& name : kCanonicalOrder) {
    if (!selection.count(name)) continue;
    try {
      if (name == "coords") parts.push_back(cartesian_coordinates(traj));
      else if (name == "backbone") parts.push_back(backbone_torsions(traj, options.angles));
      else if (name == "distances") parts.push_back(heavy_atom_min_distances(traj));
      else if (name == "flex") parts.push_back(flexible_torsions(traj));
      else if (name == "sasa") parts.push_back(sasa_per_residue(traj, options.probe_radius, options.sphere_points));
      else parts.push_back(shape_histogram(traj));
    } catch (const ValidationError& e) {
      throw ValidationError("featurizer '" + name + "': " + e.what());
    } catch (const Error& e) {
      throw Error("featurizer '" + name + "': " + e.what());
    }
  }

  Eigen::Index rows = 0;
  for (const auto& p : parts) rows += p.values.rows();
  FeatureMatrix out;
  out.values.resize(rows, traj.n_frames());
  Eigen::Index r = 0;
  for (auto& p : parts) {
    out.values.middleRows(r, p.values.rows()) = p.values;
    r += p.values.rows();
    out.labels.insert(out.labels.end(), p.labels.begin(), p.labels.end());
  }
  if (scaling == Scaling::minmax01) minmax_scale(out);
  return out;
}

}  // namespace moscito::features
