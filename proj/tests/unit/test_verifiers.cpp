#include <doctest.h>

#include <cmath>
#include <random>

#include "rubric_reward/call.hpp"
#include "rubric_reward/error.hpp"
#include "rubric_reward/verifiers.hpp"

using namespace rubric_reward;

namespace {

// Counts unit cells covered by both boxes and by either box.
double cell_iou(const Box& a, const Box& b) {
  long inter = 0, uni = 0;
  int lx = std::min(a.x1, b.x1), hx = std::max(a.x2, b.x2);
  int ly = std::min(a.y1, b.y1), hy = std::max(a.y2, b.y2);
  for (int x = lx; x < hx; ++x) {
    for (int y = ly; y < hy; ++y) {
      bool in_a = x >= a.x1 && x < a.x2 && y >= a.y1 && y < a.y2;
      bool in_b = x >= b.x1 && x < b.x2 && y >= b.y1 && y < b.y2;
      inter += in_a && in_b;
      uni += in_a || in_b;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
}

double score(const char* target, const char* predict) {
  return run_verifier(merge_calls(parse_call(target), parse_call(predict)));
}

}  // namespace

TEST_CASE("iou examples") {
  Box a = Box::canonical(531, 118, 892, 435);
  Box b = Box::canonical(529, 119, 890, 433);
  CHECK(iou(a, b) == doctest::Approx(112726.0 / 115065.0).epsilon(1e-12));
  CHECK(iou(a, b) == doctest::Approx(0.9797).epsilon(1e-4));
  CHECK(iou(a, a) == 1.0);
  CHECK(iou(Box::canonical(0, 0, 10, 10), Box::canonical(20, 20, 30, 30)) == 0.0);
}

TEST_CASE("iou agrees with cell counting") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> c(0, 40);
  for (int t = 0; t < 300; ++t) {
    Box a = Box::canonical(c(rng), c(rng), c(rng), c(rng));
    Box b = Box::canonical(c(rng), c(rng), c(rng), c(rng));
    if (a.area() == 0 || b.area() == 0) continue;
    CHECK(iou(a, b) == doctest::Approx(cell_iou(a, b)).epsilon(1e-12));
    CHECK(iou(a, b) == iou(b, a));
  }
}

TEST_CASE("degenerate and out-of-range boxes") {
  Box flat = Box::canonical(5, 5, 5, 20);
  CHECK(iou(flat, flat) == 1.0);
  CHECK(iou(flat, Box::canonical(5, 5, 5, 21)) == 0.0);
  CHECK(Box::canonical(900, 10, -5, 1200) == Box{0, 10, 900, 1000});
}

TEST_CASE("bbox_verify") {
  CHECK(score("bbox_verify(target=[[531,118,892,435]])", "bbox_verify(predict=[[529,119,890,433]])") ==
        doctest::Approx(0.9797).epsilon(1e-4));
  CHECK(score("bbox_verify(target=[[1,1,5,5]])", "bbox_verify(predict=[])") == 0.0);
  CHECK(score("bbox_verify(target=[[0,0,10,10],[20,20,30,30]])", "bbox_verify(predict=[[0,0,10,10]])") ==
        doctest::Approx(0.5));
  CHECK(score("bbox_verify(target=[[0,0,10,10]])", "bbox_verify(predict=[[0,0,10]])") == 0.0);
  CHECK(score("bbox_verify(target=[[0,0,10,10]])", "bbox_verify(predict='[0,0,10,10]')") == 0.0);
}

TEST_CASE("point_verify") {
  double expected = 1.0 - std::hypot(2.0, 2.0) / 141.42;
  CHECK(score("point_verify(target=[[591,234]])", "point_verify(predict=[[589,236]])") ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(0.980).epsilon(1e-3));
  CHECK(score("point_verify(target=[[5,5]])", "point_verify(predict=[[5,5]])") == 1.0);
  CHECK(score("point_verify(target=[[0,0]])", "point_verify(predict=[[200,0]])") == 0.0);
  CHECK(point_verify({Point::canonical(0, 0)}, {Point::canonical(10, 0)}, 20.0) == doctest::Approx(0.5));
}

TEST_CASE("list_verify") {
  CHECK(score("list_verify(target=['M-30','M-31','M-31UK'])", "list_verify(predict=['M-30','M-31'])") ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(score("list_verify(target=['a'])", "list_verify(predict=['a'])") == 1.0);
  CHECK(score("list_verify(target=['a','b'])", "list_verify(predict=[])") == 0.0);
  CHECK(score("list_verify(candidates=[['a'],['b','c']])", "list_verify(predict=['c','b'])") == 1.0);
}

TEST_CASE("coordinate verifiers are permutation invariant and penalize extra boxes") {
  std::mt19937 rng(9);
  std::uniform_int_distribution<int> c(0, 500);
  for (int t = 0; t < 100; ++t) {
    std::vector<Box> target, predict;
    for (int i = 0; i < 3; ++i) target.push_back(Box::canonical(c(rng), c(rng), c(rng), c(rng)));
    for (int i = 0; i < 3; ++i) predict.push_back(Box::canonical(c(rng), c(rng), c(rng), c(rng)));
    double base = bbox_verify(target, predict);
    std::vector<Box> rt(target.rbegin(), target.rend()), rp(predict.rbegin(), predict.rend());
    CHECK(bbox_verify(rt, rp) == doctest::Approx(base).epsilon(1e-12));
    // A box overlapping no target can only dilute the score.
    predict.push_back(Box::canonical(600 + c(rng) / 2, 600, 1000, 1000));
    CHECK(bbox_verify(target, predict) <= base + 1e-12);
    CHECK(base >= 0.0);
    CHECK(base <= 1.0);
  }
}

TEST_CASE("rubric-side defects are argument errors") {
  try {
    score("bbox_verify(target=[])", "bbox_verify(predict=[[1,1,2,2]])");
    FAIL("expected ArgumentError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ArgumentError);
  }
}
