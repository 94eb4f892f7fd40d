#include <filesystem>
#include <random>
#include <regex>
#include <sstream>

#include "doctest.h"
#include "moscito/bench.hpp"
#include "moscito/error.hpp"
#include "moscito/io.hpp"
#include "support.hpp"

using namespace moscito;

namespace {

features::FeatureMatrix sample_matrix() {
  std::mt19937_64 rng(1);
  features::FeatureMatrix fm;
  fm.values = testing::random_matrix(4, 7, rng, -1e3, 1e3);
  fm.values(0, 0) = 1e-300;
  fm.values(1, 1) = 0.1;
  fm.labels = {{"backbone", 0}, {"backbone", 1}, {"sasa", 0}, {"sasa", 1}};
  return fm;
}

int count_rects(const std::string& svg) {
  const std::regex rect("<rect ");
  return static_cast<int>(std::distance(std::sregex_iterator(svg.begin(), svg.end(), rect), std::sregex_iterator()));
}

}  // namespace

TEST_CASE("feature CSV layout and exact round trip") {
  const auto fm = sample_matrix();
  std::ostringstream out;
  io::write_features_csv(out, fm);
  const std::string text = out.str();
  CHECK(text.rfind("feature,0,1,2,3,4,5,6\r\nbackbone:0,", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
  CHECK(std::count(text.begin(), text.end(), '\r') == 5);
  std::istringstream in(text);
  const auto back = io::read_features_csv(in);
  CHECK(back.values == fm.values);
  CHECK(back.labels == fm.labels);
}

TEST_CASE("feature CSV accepts LF line endings and reports bad input") {
  std::istringstream lf("feature,0,1\nx:0,1,2\nx:1,3,4\n");
  const auto fm = io::read_features_csv(lf);
  CHECK(fm.values(1, 1) == 4.0);
  auto bad = [](const std::string& text) {
    std::istringstream in(text);
    return io::read_features_csv(in);
  };
  CHECK_THROWS_AS(bad(""), ParseError);
  CHECK_THROWS_AS(bad("label,0\nx:0,1\n"), ParseError);
  CHECK_THROWS_AS(bad("feature,0,1\nx:0,1\n"), ParseError);
  CHECK_THROWS_AS(bad("feature,0\nx:0,abc\n"), ParseError);
  CHECK_THROWS_AS(bad("feature,0\nnolabel,1\n"), ParseError);
  try {
    bad("feature,0,1\nx:0,1,2\nx:1,3\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("binary feature format round trip") {
  auto fm = sample_matrix();
  fm.scaling = features::Scaling::raw;
  std::ostringstream out(std::ios::binary);
  io::write_features_binary(out, fm);
  const std::string bytes = out.str();
  CHECK(bytes.substr(0, 4) == "MSFM");
  std::istringstream in(bytes, std::ios::binary);
  const auto back = io::read_features_binary(in);
  CHECK(back.values == fm.values);
  CHECK(back.labels == fm.labels);
  CHECK(back.scaling == fm.scaling);

  std::istringstream truncated(bytes.substr(0, bytes.size() - 3), std::ios::binary);
  CHECK_THROWS_AS(io::read_features_binary(truncated), ParseError);
  std::istringstream wrong("XXXX" + bytes.substr(4), std::ios::binary);
  CHECK_THROWS_AS(io::read_features_binary(wrong), ParseError);
}

TEST_CASE("label CSV round trip") {
  const auto d = make_dtraj({0, 2, 2, 1, 0});
  std::ostringstream out;
  io::write_labels_csv(out, d);
  CHECK(out.str() == "label\r\n0\r\n2\r\n2\r\n1\r\n0\r\n");
  std::istringstream in(out.str());
  CHECK(io::read_labels_csv(in) == d);
  std::istringstream bad("label\r\n-1\r\n");
  CHECK_THROWS_AS(io::read_labels_csv(bad), ParseError);
}

TEST_CASE("SVG strip has one rect per segment") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<int> l{0};
    for (int t = 1; t < 300; ++t) l.push_back(u(rng) < 0.9 ? l.back() : static_cast<int>(u(rng) * 5));
    const auto d = make_dtraj(l);
    std::ostringstream out;
    io::write_segmentation_svg(out, d);
    CHECK(count_rects(out.str()) == bench::segment_count(d));
  }
  std::ostringstream out;
  io::write_segmentation_svg(out, make_dtraj({1, 1, 0}));
  CHECK(out.str().find("data-label=\"1\"") != std::string::npos);
  CHECK_THROWS_AS(io::write_segmentation_svg(out, DiscreteTrajectory{}), ValidationError);
}

TEST_CASE("atomic file writes") {
  const auto dir = std::filesystem::temp_directory_path() / "moscito_io_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  io::write_file_atomic(dir / "a.txt", "first");
  io::write_file_atomic(dir / "a.txt", "second");
  CHECK(io::read_file(dir / "a.txt") == "second");
  int entries = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++entries;
  CHECK(entries == 1);
  CHECK_THROWS_AS(io::read_file(dir / "missing.txt"), Error);
  std::filesystem::remove_all(dir.parent_path());
}
