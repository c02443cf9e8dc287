#include <doctest.h>

#include <cmath>
#include <random>

#include "rubric_reward/aggregation.hpp"
#include "rubric_reward/error.hpp"

using namespace rubric_reward;

TEST_CASE("remap examples") {
  auto row = remap_row(std::vector<double>{0.92, 0.95, 1.0}, 0.5);
  CHECK(row[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(row[1] == doctest::Approx(0.6875).epsilon(1e-12));
  CHECK(row[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(remap_row(std::vector<double>{0.3, 0.3}, 0.5) == std::vector<double>{0.0, 0.0});
  CHECK(remap_row(std::vector<double>{0.9, 0.9}, 0.5) == std::vector<double>{1.0, 1.0});
  // A constant row exactly at tau keeps the lower bound, which is 0.5 there.
  CHECK(remap_row(std::vector<double>{0.5, 0.5}, 0.5) == std::vector<double>{0.5, 0.5});
  CHECK(remap_row(std::vector<double>{0.0, 0.4}, 0.5) == std::vector<double>{0.0, 0.5});
}

TEST_CASE("content mask") {
  CHECK(content_mask(std::vector<double>{1, 1, 0.4}) == 0);
  CHECK(content_mask(std::vector<double>{0.5, 0.5, 1}) == 0);
  CHECK(content_mask(std::vector<double>{0.5, 1, 1}) == 1);
  CHECK(content_mask(std::vector<double>{}) == 1);
}

TEST_CASE("final reward") {
  std::vector<CriterionMeta> meta{{CriterionType::Essential, 3}, {CriterionType::Additional, 1}};
  CHECK(final_reward(meta, std::vector<double>{1, 0}, 1) == doctest::Approx(0.75));
  CHECK(final_reward(meta, std::vector<double>{0.4, 1}, 1) == 0.0);
  CHECK(final_reward(meta, std::vector<double>{1, 1}, 1) == 1.0);
  CHECK(final_reward(meta, std::vector<double>{1, 1}, 0) == 0.0);
}

TEST_CASE("length gate") {
  CHECK(length_gate(0.8, 6001, 6000) == 0.0);
  CHECK(length_gate(0.8, 6000, 6000) == 0.8);
  CHECK(length_gate(0.0, 10, 6000) == 0.0);
  CHECK_THROWS_AS(length_gate(0.5, 1, 0), Error);
}

TEST_CASE("advantages") {
  // mean 0.25, population std sqrt(0.1875)
  const double sd = std::sqrt(0.1875);
  auto a = group_advantages(std::vector<double>{1, 0, 0, 0});
  CHECK(a[0] == doctest::Approx(0.75 / sd).epsilon(1e-6));
  CHECK(a[0] == doctest::Approx(1.7320).epsilon(1e-3));
  CHECK(a[1] == doctest::Approx(-0.5774).epsilon(1e-3));
  CHECK(group_advantages(std::vector<double>{0.5, 0.5}) == std::vector<double>{0, 0});
  auto b = group_advantages(std::vector<double>{1, 0});
  CHECK(b[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(b[1] == doctest::Approx(-1.0).epsilon(1e-6));
  try {
    group_advantages(std::vector<double>{1});
    FAIL("expected GroupTooSmall");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GroupTooSmall);
  }
}

TEST_CASE("advantage std equals std / (std + eps)") {
  std::vector<double> r{0.001, 0.0};
  auto a = group_advantages(r);
  double sd = 0.0005;
  double out_sd = std::sqrt((a[0] * a[0] + a[1] * a[1]) / 2);
  CHECK(out_sd == doctest::Approx(sd / (sd + kAdvantageEpsilon)).epsilon(1e-12));
}

TEST_CASE("aggregate_group gates and normalizes") {
  std::vector<CriterionMeta> meta{{CriterionType::Essential, 3}, {CriterionType::Additional, 1}};
  std::vector<Rollout> rollouts{
      {{1.0, 1.0}, "Short answer.", 10},
      {{1.0, 0.0}, "Another answer.", 10},
      {{0.0, 1.0}, "Wrong answer.", 10},
      {{1.0, 1.0}, "Too long.", 7000},
  };
  AggregationConfig cfg;
  cfg.max_length = 6000;
  auto out = aggregate_group(meta, rollouts, cfg);
  CHECK(out[0].final == 1.0);
  CHECK(out[1].final == doctest::Approx(0.75));
  CHECK(out[2].final == 0.0);
  CHECK(out[2].content_mask == 0);
  CHECK(out[3].length_exceeded);
  CHECK(out[3].final == 0.0);
  double mean = 0;
  for (auto& b : out) mean += b.advantage;
  CHECK(std::abs(mean) < 1e-9);
  CHECK(out[0].advantage > out[1].advantage);

  CHECK_THROWS_AS(aggregate_group(meta, {rollouts[0]}, cfg), Error);
}

TEST_CASE("format mask feeds the final reward") {
  std::vector<CriterionMeta> meta{{CriterionType::Essential, 1}};
  std::string loop;
  for (int i = 0; i < 40; ++i) loop += "The answer is definitely forty-two, I promise! ";
  auto out = aggregate_group(meta, {{{1.0}, loop, 10}, {{1.0}, "The answer is 42.", 10}});
  CHECK(out[0].format_mask == 0);
  CHECK(out[0].final == 0.0);
  CHECK(out[1].final == 1.0);
}

TEST_CASE("filter modes") {
  std::vector<InstanceScores> inst{
      {"saturated", {CriterionType::Essential, CriterionType::Additional}, {{1, 1}, {1, 1}}},
      {"additional-zero", {CriterionType::Essential, CriterionType::Additional}, {{1, 0}, {1, 1}}},
      {"essential-zero", {CriterionType::Essential, CriterionType::Additional}, {{0, 1}, {1, 1}}},
      {"partial", {CriterionType::Essential}, {{0.5}, {0.2}}},
  };
  CHECK(filter_instances(inst, FilterMode::Any) ==
        std::vector<std::string>{"additional-zero", "essential-zero"});
  CHECK(filter_instances(inst, FilterMode::Essential) == std::vector<std::string>{"essential-zero"});
}

TEST_CASE("group validation") {
  GroupScores g{{{0.5, 1.5}}, {{CriterionType::Essential, 1}}, 0.5};
  CHECK_THROWS_AS(remap_group(g), Error);
  g.scores = {{0.5, 1.0}};
  g.tau = 1.0;
  CHECK_THROWS_AS(remap_group(g), Error);
}
