#include <doctest.h>

#include <cmath>

#include "vrdrelex/decoder.hpp"
#include "vrdrelex/errors.hpp"
#include "vrdrelex/rng.hpp"

using namespace vrdrelex;

namespace {

ScoreMatrix single_matrix(std::vector<double> vals, std::size_t n, std::vector<int> ids) {
  ScoreMatrix sm;
  sm.scores = Tensor::constant({n + 1, n}, std::move(vals));
  sm.entity_ids = std::move(ids);
  sm.has_root = true;
  sm.mask.assign((n + 1) * n, 0);
  for (std::size_t j = 0; j < n; ++j) sm.mask[(j + 1) * n + j] = 1;
  return sm;
}

ScoreMatrix multi_matrix(std::vector<double> vals, std::size_t n, std::vector<int> ids) {
  ScoreMatrix sm;
  sm.scores = Tensor::constant({n, n}, std::move(vals));
  sm.entity_ids = std::move(ids);
  sm.has_root = false;
  sm.mask.assign(n * n, 0);
  for (std::size_t j = 0; j < n; ++j) sm.mask[j * n + j] = 1;
  return sm;
}

}  // namespace

TEST_CASE("single-head loss: uniform columns cost ln k") {
  // n=2: each column has 2 unmasked candidates (root + the other entity).
  const ScoreMatrix sm = single_matrix(std::vector<double>(6, 0.0), 2, {1, 2});
  const Tensor loss = single_head_loss(sm, {0, 0});
  CHECK(loss.value() == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("single-head loss: a dominant gold score drives the loss to zero") {
  std::vector<double> vals(6, 0.0);
  vals[0 * 2 + 0] = 60.0;  // root column 0
  vals[1 * 2 + 1] = 60.0;  // entity 1 heads entity 2
  const ScoreMatrix sm = single_matrix(vals, 2, {1, 2});
  CHECK(single_head_loss(sm, {0, 1}).value() < 1e-12);
}

TEST_CASE("single-head loss matches a hand computation on a 3-entity fixture") {
  Rng rng(41);
  std::vector<double> vals(4 * 3);
  for (auto& v : vals) v = rng.uniform_pm(1.5);
  const ScoreMatrix sm = single_matrix(vals, 3, {1, 2, 3});
  const std::vector<int> gold = {0, 1, 2};  // ids: root, e1, e2

  double expected = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    const std::size_t gold_row = gold[j] == 0 ? 0 : static_cast<std::size_t>(gold[j]);
    double mx = -1e300, z = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      if (i == j + 1) continue;
      mx = std::max(mx, vals[i * 3 + j]);
    }
    for (std::size_t i = 0; i < 4; ++i) {
      if (i == j + 1) continue;
      z += std::exp(vals[i * 3 + j] - mx);
    }
    expected += std::log(z) + mx - vals[gold_row * 3 + j];
  }
  expected /= 3.0;
  CHECK(single_head_loss(sm, gold).value() == doctest::Approx(expected).epsilon(1e-10));

  CHECK_THROWS_AS(single_head_loss(sm, {1, 2, 3}), ArgumentError);  // gold 3 for col 2 is masked
}

TEST_CASE("single-head decode: argmax, root-favoring ties") {
  // Two entities (ids 1, 3); candidate rows are root, e1, e3.
  ScoreMatrix wide;
  wide.scores = Tensor::constant({3, 2}, {0.1, 0.1, 2.0, 2.0, -1.0, -1.0});
  wide.entity_ids = {1, 3};
  wide.has_root = true;
  wide.mask = {0, 0, 1, 0, 0, 1};
  const Prediction pred = single_head_decode(wide, "d");
  // Column 0 (entity 1): candidates root(0.1) and e3(-1.0) -> root.
  // Column 1 (entity 3): candidates root(0.1) and e1(2.0) -> e1.
  CHECK(pred.links == std::vector<RelationLink>{{0, 1}, {1, 3}});

  const ScoreMatrix tie = single_matrix({1.0, 1.0, 1.0, 1.0, 1.0, 1.0}, 2, {1, 2});
  const Prediction tied = single_head_decode(tie, "d");
  CHECK(tied.links == std::vector<RelationLink>{{0, 1}, {0, 2}});  // ties go to the root
}

TEST_CASE("single-head decode equals exhaustive search on 100 random fixtures") {
  Rng rng(1234);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(6);
    std::vector<double> vals((n + 1) * n);
    for (auto& v : vals) v = rng.uniform_pm(3.0);
    std::vector<int> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<int>(i) + 1;
    const ScoreMatrix sm = single_matrix(vals, n, ids);
    const Prediction pred = single_head_decode(sm, "d");

    REQUIRE(pred.links.size() == n);  // single-head constraint
    for (std::size_t j = 0; j < n; ++j) {
      // Exhaustive max over unmasked candidate rows, first-best wins.
      std::size_t best = 0;
      double best_val = -1e300;
      for (std::size_t i = 0; i <= n; ++i) {
        if (i == j + 1) continue;
        if (vals[i * n + j] > best_val) {
          best_val = vals[i * n + j];
          best = i;
        }
      }
      const int expected_head = best == 0 ? 0 : ids[best - 1];
      bool found = false;
      for (const auto& l : pred.links) {
        if (l.dependent == ids[j]) {
          CHECK(l.head == expected_head);
          found = true;
        }
      }
      CHECK(found);
    }
  }
}

TEST_CASE("binary loss: ln 2 at zero scores, saturated limit, hand fixture") {
  // n=2, one gold pair (1,2): cells (0,1) positive, (1,0) negative.
  const ScoreMatrix sm = multi_matrix({0, 0, 0, 0}, 2, {1, 2});
  CHECK(binary_loss(sm, {{1, 2}}).value() == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  const ScoreMatrix low = multi_matrix({0, -60, -60, 0}, 2, {1, 2});
  CHECK(binary_loss(low, {}).value() < 1e-12);

  Rng rng(43);
  std::vector<double> vals(9);
  for (auto& v : vals) v = rng.uniform_pm(2.0);
  const ScoreMatrix m3 = multi_matrix(vals, 3, {1, 2, 3});
  const std::set<std::pair<int, int>> gold = {{1, 2}, {3, 1}};
  double expected = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i == j) continue;
      const double s = vals[i * 3 + j];
      const double t = gold.count({static_cast<int>(i) + 1, static_cast<int>(j) + 1}) ? 1.0 : 0.0;
      expected += std::max(s, 0.0) - s * t + std::log1p(std::exp(-std::abs(s)));
      ++count;
    }
  }
  expected /= static_cast<double>(count);
  CHECK(binary_loss(m3, gold).value() == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("binary decode: threshold boundary, monotonicity") {
  const ScoreMatrix flat = multi_matrix({0, 0, 0, 0}, 2, {1, 2});
  CHECK(binary_decode(flat, 0.5, "d").links.empty());  // 0.5 is not > 0.5

  const ScoreMatrix one = multi_matrix({0, 3.0, -60, 0}, 2, {1, 2});
  const Prediction p = binary_decode(one, 0.5, "d");
  CHECK(p.links == std::vector<RelationLink>{{1, 2}});

  Rng rng(47);
  std::vector<double> vals(16);
  for (auto& v : vals) v = rng.uniform_pm(3.0);
  const ScoreMatrix m4 = multi_matrix(vals, 4, {1, 2, 3, 4});
  std::size_t prev = SIZE_MAX;
  for (double thr : {0.3, 0.5, 0.7, 0.9}) {
    const std::size_t count = binary_decode(m4, thr, "d").links.size();
    CHECK(count <= prev);
    prev = count;
  }
  CHECK_THROWS_AS(binary_decode(m4, 0.0, "d"), ArgumentError);
  CHECK_THROWS_AS(binary_decode(m4, 1.0, "d"), ArgumentError);
}
