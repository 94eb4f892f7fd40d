#pragma once

// Serialization of feature matrices, discrete trajectories and
// segmentation strips. CSV output uses CRLF line endings.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "moscito/dtraj.hpp"
#include "moscito/features.hpp"

namespace moscito::io {

/// Header `feature,0,1,...,n-1`; one row per feature dimension whose first
/// field is the label `featurizer:index`.
void write_features_csv(std::ostream& out, const features::FeatureMatrix& fm);
features::FeatureMatrix read_features_csv(std::istream& in, const std::string& source = "<stream>");

/// Little-endian binary matrix; see docs/formats.md.
void write_features_binary(std::ostream& out, const features::FeatureMatrix& fm);
features::FeatureMatrix read_features_binary(std::istream& in, const std::string& source = "<stream>");

/// One-column CSV with header `label`.
void write_labels_csv(std::ostream& out, const DiscreteTrajectory& d);
DiscreteTrajectory read_labels_csv(std::istream& in, const std::string& source = "<stream>");

/// Horizontal strip with one colored rect per run of equal labels.
void write_segmentation_svg(std::ostream& out, const DiscreteTrajectory& d, int width = 1000, int height = 40);

/// Writes through a temporary file and renames, so readers never observe a
/// partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace moscito::io
