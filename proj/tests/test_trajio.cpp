#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "moscito/error.hpp"
#include "moscito/trajio.hpp"
#include "support.hpp"

using namespace moscito;
using trajio::BackboneRole;

namespace {

trajio::Topology topo_from(const std::string& text) {
  std::istringstream in(text);
  return trajio::parse_topology(in);
}

trajio::Trajectory traj_from(const std::string& text, const trajio::Topology& t) {
  std::istringstream in(text);
  return trajio::parse_trajectory(in, t);
}

const char* kTwoCa = "atoms 2\nC 1.7 0 CA\nC 1.7 1 CA\n";

}  // namespace

TEST_CASE("minimal topology with two CA atoms") {
  const auto t = topo_from(kTwoCa);
  CHECK(t.atom_count == 2);
  CHECK(t.residue_count() == 2);
  CHECK(t.find_atom(1, BackboneRole::CA) == 1);
  CHECK(t.find_atom(1, BackboneRole::N) == -1);
}

TEST_CASE("topology comments, blank lines and chi blocks") {
  const auto t = topo_from(
      "# peptide\n\natoms 5\nN 1.55 0 N\nC 1.7 0 CA\nC 1.7 0 C\nO 1.52 0 O\nC 1.7 0 SC\n"
      "chi 0 0 1 4 2\n");
  CHECK(t.atom_count == 5);
  REQUIRE(t.chi_chain.size() == 1);
  REQUIRE(t.chi_chain[0].size() == 1);
  CHECK(t.chi_chain[0][0] == trajio::TorsionQuad{0, 1, 4, 2});
  CHECK(t.backbone_role[4] == BackboneRole::side_chain);
}

TEST_CASE("decreasing residue index is a validation error") {
  CHECK_THROWS_AS(topo_from("atoms 3\nC 1.7 0 CA\nC 1.7 1 CA\nC 1.7 0 CA\n"), ValidationError);
}

TEST_CASE("negative vdw radius is a validation error") {
  CHECK_THROWS_AS(topo_from("atoms 1\nC -1 0 CA\n"), ValidationError);
}

TEST_CASE("duplicate backbone role within a residue is a validation error") {
  CHECK_THROWS_AS(topo_from("atoms 2\nC 1.7 0 CA\nC 1.7 0 CA\n"), ValidationError);
}

TEST_CASE("malformed topology lines report the line number") {
  try {
    topo_from("atoms 2\nC 1.7 0 CA\nC abc 1 CA\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(topo_from("atom 2\n"), ParseError);
  CHECK_THROWS_AS(topo_from("atoms 2\nC 1.7 0 CA\n"), ParseError);
  CHECK_THROWS_AS(topo_from("atoms 1\nC 1.7 0 XX\n"), ParseError);
  CHECK_THROWS_AS(topo_from("atoms 1\nC 1.7 0 CA\nchi 0 0 0 0\n"), ParseError);
}

TEST_CASE("chi block referencing a missing atom is rejected") {
  CHECK_THROWS_AS(topo_from("atoms 1\nC 1.7 0 CA\nchi 0 0 0 0 7\n"), ValidationError);
}

TEST_CASE("two-frame trajectory") {
  const auto t = topo_from(kTwoCa);
  const auto traj = traj_from("frame 0\n0 0 0\n1 2 3\nframe 1\n1e-1 0 0\n-1.5E2 2 3\n", t);
  CHECK(traj.n_frames() == 2);
  CHECK(traj.frames[1](0, 1) == -150.0);
  CHECK(traj.frames[1](0, 0) == 0.1);
}

TEST_CASE("trajectory errors") {
  const auto t = topo_from(kTwoCa);
  CHECK_THROWS_AS(traj_from("frame 0\n0 0 0\n", t), ParseError);
  CHECK_THROWS_AS(traj_from("frame 0\n0 0 0\n1 2 3\n4 5 6\n", t), ParseError);
  CHECK_THROWS_AS(traj_from("frame 0\n0 x 0\n1 2 3\n", t), ParseError);
  CHECK_THROWS_AS(traj_from("", t), ParseError);
  CHECK_THROWS_AS(traj_from("# only a comment\n", t), ParseError);
  CHECK_THROWS_AS(traj_from("frame 0\n0 nan 0\n1 2 3\n", t), ParseError);
}

TEST_CASE("write then load reproduces topology and coordinates exactly") {
  const auto traj = testing::make_peptide(4, 3, 21, true);
  std::ostringstream tout, xout;
  trajio::write_topology(tout, traj.topology);
  trajio::write_trajectory(xout, traj);
  const auto t2 = topo_from(tout.str());
  const auto traj2 = traj_from(xout.str(), t2);
  CHECK(t2.element == traj.topology.element);
  CHECK(t2.vdw_radius == traj.topology.vdw_radius);
  CHECK(t2.residue_index == traj.topology.residue_index);
  CHECK(t2.backbone_role == traj.topology.backbone_role);
  REQUIRE(traj2.n_frames() == traj.n_frames());
  for (int f = 0; f < traj.n_frames(); ++f) CHECK(traj2.frames[f] == traj.frames[f]);

  // A second cycle is byte-identical.
  std::ostringstream xout2;
  trajio::write_trajectory(xout2, traj2);
  CHECK(xout2.str() == xout.str());
}

TEST_CASE("file loaders read what the writers produced") {
  const auto dir = std::filesystem::temp_directory_path() / "moscito_trajio_test";
  std::filesystem::create_directories(dir);
  const auto traj = testing::make_peptide(3, 2, 4);
  {
    std::ofstream out(dir / "top.txt");
    trajio::write_topology(out, traj.topology);
  }
  trajio::save_trajectory(dir / "traj.txt", traj);
  const auto t = trajio::load_topology(dir / "top.txt");
  const auto a = trajio::load_trajectory(dir / "traj.txt", t);
  const auto b = trajio::load_trajectory(dir / "traj.txt", t);
  for (int f = 0; f < a.n_frames(); ++f) CHECK(a.frames[f] == b.frames[f]);
  CHECK_THROWS_AS(trajio::load_topology(dir / "missing.txt"), Error);
  std::filesystem::remove_all(dir);
}
