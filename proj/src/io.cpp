#include "moscito/io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "moscito/error.hpp"
#include "text.hpp"

namespace moscito::io {
namespace {

constexpr std::array<char, 4> kMagic{'M', 'S', 'F', 'M'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "binary feature format assumes a little-endian host");

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in, const std::string& source, const char* what) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T)))
    throw ParseError(source, 0, std::string("truncated binary feature file while reading ") + what);
  return v;
}

bool next_line(std::istream& in, std::string& line, int& line_no) {
  if (!std::getline(in, line)) return false;
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

features::FeatureLabel parse_label(std::string_view field, const std::string& source, int line_no) {
  const auto colon = field.rfind(':');
  int idx = 0;
  if (colon == std::string_view::npos || colon == 0 || !text::parse_int(field.substr(colon + 1), idx) || idx < 0)
    throw ParseError(source, line_no, "feature label '" + std::string(field) + "' is not of the form name:index");
  return {std::string(field.substr(0, colon)), idx};
}

}  // namespace

void write_features_csv(std::ostream& out, const features::FeatureMatrix& fm) {
  fm.validate();
  out << "feature";
  for (Eigen::Index t = 0; t < fm.frames(); ++t) out << ',' << t;
  out << "\r\n";
  for (Eigen::Index r = 0; r < fm.dims(); ++r) {
    out << fm.labels[r].featurizer << ':' << fm.labels[r].index;
    for (Eigen::Index t = 0; t < fm.frames(); ++t) out << ',' << text::format_double(fm.values(r, t));
    out << "\r\n";
  }
}

features::FeatureMatrix read_features_csv(std::istream& in, const std::string& source) {
  std::string line;
  int line_no = 0;
  if (!next_line(in, line, line_no)) throw ParseError(source, 1, "empty feature file");
  const auto header = text::split(line, ',');
  if (header.empty() || header[0] != "feature") throw ParseError(source, 1, "header must start with 'feature'");
  const auto n = static_cast<Eigen::Index>(header.size() - 1);
  if (n < 1) throw ParseError(source, 1, "header lists no time steps");

  std::vector<std::vector<double>> rows;
  features::FeatureMatrix fm;
  while (next_line(in, line, line_no)) {
    if (text::trim(line).empty()) continue;
    const auto fields = text::split(line, ',');
    if (static_cast<Eigen::Index>(fields.size()) != n + 1)
      throw ParseError(source, line_no,
                       "expected " + std::to_string(n + 1) + " fields, found " + std::to_string(fields.size()));
    fm.labels.push_back(parse_label(fields[0], source, line_no));
    auto& row = rows.emplace_back(static_cast<std::size_t>(n));
    for (Eigen::Index t = 0; t < n; ++t)
      if (!text::parse_double(text::trim(fields[t + 1]), row[t]))
        throw ParseError(source, line_no, "non-numeric value '" + std::string(fields[t + 1]) + "'");
  }
  if (rows.empty()) throw ParseError(source, line_no, "no feature rows");
  fm.values.resize(static_cast<Eigen::Index>(rows.size()), n);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (Eigen::Index t = 0; t < n; ++t) fm.values(static_cast<Eigen::Index>(r), t) = rows[r][t];
  fm.validate();
  return fm;
}

void write_features_binary(std::ostream& out, const features::FeatureMatrix& fm) {
  fm.validate();
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(fm.dims()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(fm.frames()));
  put<std::uint8_t>(out, fm.scaling == features::Scaling::minmax01 ? 1 : 0);
  for (const auto& l : fm.labels) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(l.featurizer.size()));
    out.write(l.featurizer.data(), static_cast<std::streamsize>(l.featurizer.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(l.index));
  }
  out.write(reinterpret_cast<const char*>(fm.values.data()),
            static_cast<std::streamsize>(fm.values.size() * sizeof(double)));
}

features::FeatureMatrix read_features_binary(std::istream& in, const std::string& source) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic)
    throw ParseError(source, 0, "not a binary feature file (bad magic)");
  const auto version = get<std::uint32_t>(in, source, "version");
  if (version != kVersion) throw ParseError(source, 0, "unsupported version " + std::to_string(version));
  const auto rows = get<std::uint64_t>(in, source, "rows");
  const auto cols = get<std::uint64_t>(in, source, "cols");
  const auto scaling = get<std::uint8_t>(in, source, "scaling");
  if (scaling > 1) throw ParseError(source, 0, "unknown scaling code " + std::to_string(scaling));
  constexpr std::uint64_t kLimit = std::uint64_t{1} << 32;
  if (rows >= kLimit || cols >= kLimit || rows * cols >= kLimit)
    throw ParseError(source, 0, "implausible matrix size");

  features::FeatureMatrix fm;
  fm.scaling = scaling == 1 ? features::Scaling::minmax01 : features::Scaling::raw;
  for (std::uint64_t r = 0; r < rows; ++r) {
    const auto len = get<std::uint32_t>(in, source, "label length");
    if (len > 4096) throw ParseError(source, 0, "implausible label length");
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) throw ParseError(source, 0, "truncated label");
    const auto idx = get<std::uint32_t>(in, source, "label index");
    fm.labels.push_back({std::move(name), static_cast<int>(idx)});
  }
  fm.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  if (!in.read(reinterpret_cast<char*>(fm.values.data()),
               static_cast<std::streamsize>(fm.values.size() * sizeof(double))))
    throw ParseError(source, 0, "truncated value block");
  fm.validate();
  return fm;
}

void write_labels_csv(std::ostream& out, const DiscreteTrajectory& d) {
  d.validate();
  out << "label\r\n";
  for (int l : d.labels) out << l << "\r\n";
}

DiscreteTrajectory read_labels_csv(std::istream& in, const std::string& source) {
  std::string line;
  int line_no = 0;
  if (!next_line(in, line, line_no) || text::trim(line) != "label")
    throw ParseError(source, 1, "expected header 'label'");
  std::vector<int> labels;
  while (next_line(in, line, line_no)) {
    const auto field = text::trim(line);
    if (field.empty()) continue;
    int v = 0;
    if (!text::parse_int(field, v) || v < 0)
      throw ParseError(source, line_no, "label '" + std::string(field) + "' is not a nonnegative integer");
    labels.push_back(v);
  }
  if (labels.empty()) throw ParseError(source, line_no, "no labels");
  return make_dtraj(std::move(labels));
}

void write_segmentation_svg(std::ostream& out, const DiscreteTrajectory& d, int width, int height) {
  d.validate();
  if (d.labels.empty()) throw ValidationError("svg: empty trajectory");
  const auto n = static_cast<double>(d.size());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  std::size_t start = 0;
  for (std::size_t t = 1; t <= d.size(); ++t) {
    if (t < d.size() && d.labels[t] == d.labels[start]) continue;
    const int label = d.labels[start];
    // Golden-angle hue spacing keeps neighboring labels distinguishable.
    const int hue = static_cast<int>(std::fmod(label * 137.508, 360.0));
    const int lightness = 40 + 15 * ((label / 7) % 3);
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "  <rect x=\"%.4f\" y=\"0\" width=\"%.4f\" height=\"%d\" fill=\"hsl(%d,70%%,%d%%)\" "
                  "data-label=\"%d\" data-start=\"%zu\" data-end=\"%zu\"/>\n",
                  width * static_cast<double>(start) / n, width * static_cast<double>(t - start) / n, height, hue,
                  lightness, label, start, t);
    out << buf;
    start = t;
  }
  out << "</svg>\n";
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open '" + tmp.string() + "' for writing");
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!f) throw Error("failed writing '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace moscito::io
