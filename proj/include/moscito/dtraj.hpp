#pragma once

#include <vector>

namespace moscito {

/// Per-frame state labels in [0, k).
struct DiscreteTrajectory {
  std::vector<int> labels;
  int k = 0;

  std::size_t size() const noexcept { return labels.size(); }
  /// Throws ValidationError when a label is outside [0, k).
  void validate() const;
  bool operator==(const DiscreteTrajectory&) const = default;
};

/// k = 1 + max label.
DiscreteTrajectory make_dtraj(std::vector<int> labels);

}  // namespace moscito
