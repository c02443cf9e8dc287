#include "rubric_reward/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rubric_reward/error.hpp"

namespace rubric_reward {

namespace {

// Minimum-cost assignment of every row to a distinct column, rows <= cols.
// Potentials u (rows) and v (cols); 1-based with a virtual column 0.
std::vector<std::size_t> min_cost_rows_to_cols(const ScoreMatrix& cost) {
  const std::size_t n = cost.size();
  const std::size_t m = cost[0].size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      std::size_t i0 = p[j0], j1 = 0;
      double delta = kInf;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n, 0);
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

Assignment hungarian(const ScoreMatrix& scores) {
  if (scores.empty() || scores[0].empty()) {
    throw Error(ErrorCode::ArgumentError, "hungarian: empty matrix");
  }
  const std::size_t rows = scores.size();
  const std::size_t cols = scores[0].size();
  for (const auto& row : scores) {
    if (row.size() != cols) {
      throw Error(ErrorCode::ArgumentError, "hungarian: ragged matrix");
    }
    for (double x : row) {
      if (!std::isfinite(x)) {
        throw Error(ErrorCode::ArgumentError, "hungarian: non-finite entry");
      }
    }
  }
  const bool transpose = rows > cols;
  const std::size_t n = transpose ? cols : rows;
  const std::size_t m = transpose ? rows : cols;
  ScoreMatrix cost(n, std::vector<double>(m));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      cost[i][j] = -(transpose ? scores[j][i] : scores[i][j]);
    }
  }
  std::vector<std::size_t> match = min_cost_rows_to_cols(cost);
  Assignment out;
  for (std::size_t i = 0; i < n; ++i) {
    if (transpose) {
      out.pairs.emplace_back(match[i], i);
    } else {
      out.pairs.emplace_back(i, match[i]);
    }
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  for (auto [r, c] : out.pairs) out.total += scores[r][c];
  return out;
}

}  // namespace rubric_reward
