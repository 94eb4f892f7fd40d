#include "moscito/trajio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include "moscito/error.hpp"
#include "text.hpp"

namespace moscito::trajio {
namespace {

std::optional<BackboneRole> parse_role(std::string_view token) {
  if (token == "N") return BackboneRole::N;
  if (token == "CA") return BackboneRole::CA;
  if (token == "C") return BackboneRole::C;
  if (token == "O") return BackboneRole::O;
  if (token == "SC" || token == "side_chain") return BackboneRole::side_chain;
  return std::nullopt;
}

// Reads the next line that is neither blank nor a comment.
bool next_content_line(std::istream& in, std::string& line, std::size_t& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    const auto tokens = text::split_ws(line);
    if (!tokens.empty() && tokens.front().front() != '#') return true;
  }
  return false;
}

}  // namespace

std::string_view role_name(BackboneRole role) noexcept {
  switch (role) {
    case BackboneRole::N: return "N";
    case BackboneRole::CA: return "CA";
    case BackboneRole::C: return "C";
    case BackboneRole::O: return "O";
    case BackboneRole::side_chain: return "SC";
  }
  return "?";
}

int Topology::residue_count() const noexcept {
  return residue_index.empty() ? 0 : residue_index.back() + 1;
}

int Topology::find_atom(int res, BackboneRole role) const noexcept {
  const auto lo = std::lower_bound(residue_index.begin(), residue_index.end(), res);
  for (auto it = lo; it != residue_index.end() && *it == res; ++it) {
    const auto idx = static_cast<std::size_t>(it - residue_index.begin());
    if (backbone_role[idx] == role) return static_cast<int>(idx);
  }
  return -1;
}

void Topology::validate() const {
  const auto n = static_cast<std::size_t>(atom_count);
  if (atom_count < 0 || element.size() != n || vdw_radius.size() != n ||
      residue_index.size() != n || backbone_role.size() != n)
    throw ValidationError("topology: per-atom arrays disagree with atom_count");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(vdw_radius[i] > 0.0) || !std::isfinite(vdw_radius[i]))
      throw ValidationError("topology: atom " + std::to_string(i) + " has non-positive vdw_radius");
    if (residue_index[i] < 0)
      throw ValidationError("topology: atom " + std::to_string(i) + " has negative residue_index");
    if (i > 0 && residue_index[i] < residue_index[i - 1])
      throw ValidationError("topology: residue_index decreases at atom " + std::to_string(i));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto role = backbone_role[i];
    if (role != BackboneRole::N && role != BackboneRole::CA && role != BackboneRole::C) continue;
    for (std::size_t j = i + 1; j < n && residue_index[j] == residue_index[i]; ++j) {
      if (backbone_role[j] == role)
        throw ValidationError("topology: residue " + std::to_string(residue_index[i]) +
                              " has more than one " + std::string(role_name(role)) + " atom");
    }
  }
  if (chi_chain.size() != static_cast<std::size_t>(residue_count()))
    throw ValidationError("topology: chi_chain must have one entry per residue");
  for (const auto& quads : chi_chain)
    for (const auto& q : quads)
      for (int a : q)
        if (a < 0 || a >= atom_count)
          throw ValidationError("topology: chi torsion references atom " + std::to_string(a) +
                                " out of range");
}

Topology parse_topology(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  if (!next_content_line(in, line, lineno))
    throw ParseError(source, lineno, "empty topology (expected 'atoms N')");
  auto header = text::split_ws(line);
  int n = 0;
  if (header.size() != 2 || header[0] != "atoms" || !text::parse_int(header[1], n) || n < 0)
    throw ParseError(source, lineno, "expected header 'atoms N'");

  Topology top;
  top.atom_count = n;
  top.element.reserve(n);
  for (int i = 0; i < n; ++i) {
    if (!next_content_line(in, line, lineno))
      throw ParseError(source, lineno, "expected " + std::to_string(n) + " atom lines, got " +
                                           std::to_string(i));
    const auto tok = text::split_ws(line);
    double radius = 0.0;
    int res = 0;
    std::optional<BackboneRole> role;
    if (tok.size() != 4 || !text::parse_double(tok[1], radius) || !text::parse_int(tok[2], res) ||
        !(role = parse_role(tok[3])))
      throw ParseError(source, lineno,
                       "expected 'element vdw_radius residue_index role' with role in "
                       "{N, CA, C, O, SC}");
    top.element.emplace_back(tok[0]);
    top.vdw_radius.push_back(radius);
    top.residue_index.push_back(res);
    top.backbone_role.push_back(*role);
  }

  std::vector<std::pair<int, TorsionQuad>> chis;
  while (next_content_line(in, line, lineno)) {
    const auto tok = text::split_ws(line);
    TorsionQuad q{};
    int res = 0;
    bool ok = tok.size() == 6 && tok[0] == "chi" && text::parse_int(tok[1], res);
    for (std::size_t k = 0; ok && k < 4; ++k) ok = text::parse_int(tok[k + 2], q[k]);
    if (!ok) throw ParseError(source, lineno, "expected 'chi residue a1 a2 a3 a4'");
    if (res < 0) throw ParseError(source, lineno, "negative residue in chi block");
    chis.emplace_back(res, q);
  }

  top.chi_chain.assign(static_cast<std::size_t>(top.residue_count()), {});
  for (const auto& [res, q] : chis) {
    if (res >= top.residue_count())
      throw ValidationError("topology: chi block names residue " + std::to_string(res) +
                            " which has no atoms");
    top.chi_chain[res].push_back(q);
  }
  top.validate();
  return top;
}

Topology load_topology(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open topology file '" + path.string() + "'");
  return parse_topology(in, path.string());
}

void write_topology(std::ostream& out, const Topology& top) {
  out << "atoms " << top.atom_count << '\n';
  for (int i = 0; i < top.atom_count; ++i)
    out << top.element[i] << ' ' << text::format_double(top.vdw_radius[i]) << ' '
        << top.residue_index[i] << ' ' << role_name(top.backbone_role[i]) << '\n';
  for (std::size_t r = 0; r < top.chi_chain.size(); ++r)
    for (const auto& q : top.chi_chain[r])
      out << "chi " << r << ' ' << q[0] << ' ' << q[1] << ' ' << q[2] << ' ' << q[3] << '\n';
}

void Trajectory::validate() const {
  if (frames.empty()) throw ValidationError("trajectory: no frames");
  for (std::size_t f = 0; f < frames.size(); ++f) {
    if (frames[f].cols() != topology.atom_count)
      throw ValidationError("trajectory: frame " + std::to_string(f) + " has " +
                            std::to_string(frames[f].cols()) + " atoms, topology has " +
                            std::to_string(topology.atom_count));
    if (!frames[f].allFinite())
      throw ValidationError("trajectory: frame " + std::to_string(f) + " has non-finite coordinates");
  }
}

Trajectory parse_trajectory(std::istream& in, const Topology& topology, const std::string& source) {
  Trajectory traj;
  traj.topology = topology;
  const int n_atoms = topology.atom_count;

  std::string line;
  std::size_t lineno = 0;
  bool have_line = next_content_line(in, line, lineno);
  if (have_line) {
    const auto tok = text::split_ws(line);
    if (tok.size() == 2 && tok[0] == "dt") {
      if (!text::parse_double(tok[1], traj.dt)) throw ParseError(source, lineno, "bad dt value");
      have_line = next_content_line(in, line, lineno);
    }
  }
  while (have_line) {
    const auto tok = text::split_ws(line);
    int index = 0;
    if (tok.size() != 2 || tok[0] != "frame" || !text::parse_int(tok[1], index))
      throw ParseError(source, lineno, "expected 'frame i'");
    Frame frame(3, n_atoms);
    int atoms_read = 0;
    while ((have_line = next_content_line(in, line, lineno))) {
      const auto xyz = text::split_ws(line);
      if (xyz.size() == 2 && xyz[0] == "frame") break;
      if (atoms_read == n_atoms)
        throw ParseError(source, lineno, "frame " + std::to_string(index) + " has more than " +
                                             std::to_string(n_atoms) + " coordinate lines");
      if (xyz.size() != 3) throw ParseError(source, lineno, "expected 'x y z'");
      for (int k = 0; k < 3; ++k) {
        double v = 0.0;
        if (!text::parse_double(xyz[k], v) || !std::isfinite(v))
          throw ParseError(source, lineno, "non-numeric coordinate '" + std::string(xyz[k]) + "'");
        frame(k, atoms_read) = v;
      }
      ++atoms_read;
    }
    if (atoms_read != n_atoms)
      throw ParseError(source, lineno, "frame " + std::to_string(index) + " has " +
                                           std::to_string(atoms_read) + " coordinate lines, expected " +
                                           std::to_string(n_atoms));
    traj.frames.push_back(std::move(frame));
  }
  if (traj.frames.empty()) throw ParseError(source, lineno, "trajectory has zero frames");
  traj.validate();
  return traj;
}

Trajectory load_trajectory(const std::filesystem::path& path, const Topology& topology) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trajectory file '" + path.string() + "'");
  return parse_trajectory(in, topology, path.string());
}

void write_trajectory(std::ostream& out, const Trajectory& traj) {
  out << "dt " << text::format_double(traj.dt) << '\n';
  for (std::size_t f = 0; f < traj.frames.size(); ++f) {
    out << "frame " << f << '\n';
    const auto& fr = traj.frames[f];
    for (Eigen::Index a = 0; a < fr.cols(); ++a)
      out << text::format_double(fr(0, a)) << ' ' << text::format_double(fr(1, a)) << ' '
          << text::format_double(fr(2, a)) << '\n';
  }
}

void save_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write trajectory file '" + path.string() + "'");
  write_trajectory(out, traj);
}

}  // namespace moscito::trajio
