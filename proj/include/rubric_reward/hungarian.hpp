#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace rubric_reward {

using ScoreMatrix = std::vector<std::vector<double>>;

struct Assignment {
  // (row, column) pairs sorted by row; size is min(rows, cols).
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double total = 0.0;
};

/// Maximum-weight assignment on a rectangular matrix (Kuhn-Munkres with
/// potentials, O(n^2 m)). Requires a non-empty rectangular matrix with
/// finite entries; throws Error{ArgumentError} otherwise.
Assignment hungarian(const ScoreMatrix& scores);

}  // namespace rubric_reward
