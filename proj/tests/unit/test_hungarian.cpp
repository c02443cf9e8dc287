#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "rubric_reward/error.hpp"
#include "rubric_reward/hungarian.hpp"

using namespace rubric_reward;

namespace {

// Best total over all injective maps from the smaller side into the larger.
double brute_force(const ScoreMatrix& m) {
  std::size_t rows = m.size(), cols = m[0].size();
  bool transpose = rows > cols;
  std::size_t small = std::min(rows, cols), large = std::max(rows, cols);
  std::vector<std::size_t> perm(large);
  std::iota(perm.begin(), perm.end(), 0);
  double best = -1e300;
  do {
    double total = 0;
    for (std::size_t i = 0; i < small; ++i) {
      total += transpose ? m[perm[i]][i] : m[i][perm[i]];
    }
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST_CASE("diagonal optimum") {
  auto a = hungarian({{1, 0}, {0, 1}});
  CHECK(a.total == 2.0);
  CHECK(a.pairs == std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 1}});
}

TEST_CASE("anti-diagonal optimum") {
  auto a = hungarian({{0.9, 0.8}, {0.9, 0.1}});
  CHECK(a.total == doctest::Approx(1.7));
  CHECK(a.pairs == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 0}});
}

TEST_CASE("random matrices match exhaustive search") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> dim(1, 6);
  std::uniform_real_distribution<double> val(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    ScoreMatrix m(dim(rng), std::vector<double>(dim(rng)));
    for (auto& row : m)
      for (auto& v : row) v = val(rng);
    auto a = hungarian(m);
    CHECK(a.pairs.size() == std::min(m.size(), m[0].size()));
    double recomputed = 0;
    for (auto [r, c] : a.pairs) recomputed += m[r][c];
    CHECK(recomputed == doctest::Approx(a.total).epsilon(1e-12));
    CHECK(a.total == doctest::Approx(brute_force(m)).epsilon(1e-12));
  }
}

TEST_CASE("invalid matrices") {
  CHECK_THROWS_AS(hungarian({}), Error);
  CHECK_THROWS_AS(hungarian({{1, 2}, {3}}), Error);
  CHECK_THROWS_AS(hungarian({{std::nan("")}}), Error);
}
