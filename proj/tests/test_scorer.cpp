#include <doctest.h>

#include <cmath>

#include "vrdrelex/decoder.hpp"
#include "vrdrelex/rng.hpp"
#include "vrdrelex/scorer.hpp"

using namespace vrdrelex;

namespace {

Tensor rand_tensor(Shape shape, Rng& rng, double scale = 0.5) {
  std::vector<double> v(shape_size(shape));
  for (auto& x : v) x = rng.uniform_pm(scale);
  return Tensor::constant(std::move(shape), std::move(v));
}

}  // namespace

TEST_CASE("role projection: zero params give zero roles; fixture matches by hand") {
  Rng rng(2);
  ScorerParams zero = ScorerParams::init(3, 2, 2, rng);
  for (Tensor* t : {&zero.w_key, &zero.b_key, &zero.w_value, &zero.b_value}) {
    std::fill(t->values().begin(), t->values().end(), 0.0);
  }
  const Tensor enc = rand_tensor({2, 3}, rng);
  const RolePair roles = project_roles(enc, enc, zero, 0.1);
  for (double v : roles.keys.values()) CHECK(v == 0.0);
  for (double v : roles.values.values()) CHECK(v == 0.0);
  CHECK(roles.keys.rows() == 2);

  // Hand fixture: e = [1, -1], W = [[2, 0], [1, 1]] (in,out), b = [0.5, -3].
  ScorerParams p = ScorerParams::init(2, 2, 2, rng);
  p.w_key.values() = {2, 0, 1, 1};
  p.b_key.values() = {0.5, -3};
  const Tensor e = Tensor::constant({1, 2}, {1, -1});
  const RolePair r = project_roles(e, e, p, 0.1);
  // pre-activation = [1*2 + (-1)*1 + 0.5, 1*0 + (-1)*1 - 3] = [1.5, -4]
  CHECK(r.keys.values()[0] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(r.keys.values()[1] == doctest::Approx(-0.4).epsilon(1e-12));
}

TEST_CASE("biaffine score: printed-arithmetic fixture and key-side linearity") {
  const std::vector<double> h_key = {1, 0}, h_value = {0, 1};
  const std::vector<double> w1 = {1, 2, 3, 4}, w2 = {0.5, -0.5};
  CHECK(biaffine_score(h_key, h_value, w1, w2) == doctest::Approx(2.5));
  CHECK(biaffine_score({0, 0}, h_value, w1, w2) == doctest::Approx(0.0));
}

TEST_CASE("batched biaffine equals the per-pair loop on n<=5 fixtures") {
  Rng rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t m = 1 + rng.uniform_index(5), n = 1 + rng.uniform_index(5), d = 4;
    ScorerParams p = ScorerParams::init(3, d, 2, rng);
    for (auto& v : p.w_bilinear.values()) v = rng.uniform_pm(0.8);
    for (auto& v : p.w_key_linear.values()) v = rng.uniform_pm(0.8);
    RolePair roles;
    roles.keys = rand_tensor({m, d}, rng, 1.0);
    roles.values = rand_tensor({n, d}, rng, 1.0);
    const Tensor s = biaffine_matrix(roles, p);
    REQUIRE(s.shape() == Shape{m, n});
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<double> k(roles.keys.values().begin() + i * d,
                            roles.keys.values().begin() + (i + 1) * d);
      for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> v(roles.values.values().begin() + j * d,
                              roles.values.values().begin() + (j + 1) * d);
        const double expected =
            biaffine_score(k, v, p.w_bilinear.values(), p.w_key_linear.values());
        CHECK(s.values()[i * n + j] == doctest::Approx(expected).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("feature score: affine map, zero features give the bias, symmetry") {
  CHECK(feature_score({0.05, 0.0}, {2.0, -1.0}, 0.1) == doctest::Approx(0.2));
  CHECK(feature_score({0.0, 0.0}, {2.0, -1.0}, 0.1) == doctest::Approx(0.1));

  const BoundingBox a{0.1, 0.2, 0.3, 0.4}, b{0.5, 0.1, 0.9, 0.2};
  CHECK(feature_score(edge_features(a, b), {1.3, 0.7}, -0.2) ==
        doctest::Approx(feature_score(edge_features(b, a), {1.3, 0.7}, -0.2)));
}

TEST_CASE("score feature matrix: root rows zero, signed offsets optional") {
  const std::vector<BoundingBox> boxes = {{0.1, 0.1, 0.2, 0.2}, {0.4, 0.1, 0.5, 0.3}};
  const Tensor plain = score_feature_matrix(boxes, true, false);
  REQUIRE(plain.shape() == Shape{6, 2});
  CHECK(plain.values()[0] == 0.0);  // root-to-0 cell
  CHECK(plain.values()[3] == 0.0);
  const EdgeFeatures f01 = edge_features(boxes[0], boxes[1]);
  CHECK(plain.values()[(1 * 2 + 1) * 2 + 0] == doctest::Approx(f01.x));

  const Tensor with_signed = score_feature_matrix(boxes, false, true);
  REQUIRE(with_signed.shape() == Shape{4, 4});
  // (0,1): center deltas are dependent minus head.
  CHECK(with_signed.values()[1 * 4 + 2] == doctest::Approx(0.45 - 0.15));
  CHECK(with_signed.values()[1 * 4 + 3] == doctest::Approx(0.2 - 0.15));
  // Swapped pair flips the sign.
  CHECK(with_signed.values()[2 * 4 + 2] == doctest::Approx(0.15 - 0.45));
}

TEST_CASE("total scores: shape, mask, ablation identity, loop oracle") {
  Rng rng(31);
  const std::size_t n = 3, hidden = 4;
  EncodedDocument enc;
  enc.nodes = rand_tensor({n, hidden}, rng);
  enc.edges = rand_tensor({n * n, hidden}, rng);
  std::vector<double> rootv(hidden);
  for (auto& v : rootv) v = rng.uniform_pm(0.5);
  enc.root = Tensor::constant({hidden}, rootv);

  const std::vector<BoundingBox> boxes = {
      {0.05, 0.1, 0.25, 0.15}, {0.3, 0.1, 0.5, 0.15}, {0.05, 0.4, 0.3, 0.45}};
  const std::vector<int> ids = {1, 2, 3};

  ScorerParams p = ScorerParams::init(hidden, 5, 2, rng);
  for (auto& v : p.w_bilinear.values()) v = rng.uniform_pm(0.6);
  for (auto& v : p.w_key_linear.values()) v = rng.uniform_pm(0.6);
  for (auto& v : p.w_feat.values()) v = rng.uniform_pm(0.6);
  p.b_feat.values() = {0.3};

  const ScoreMatrix sm = total_scores(enc, boxes, ids, p, 0.1, true, false);
  REQUIRE(sm.scores.shape() == Shape{n + 1, n});
  CHECK(sm.has_root);
  for (std::size_t j = 0; j < n; ++j) CHECK(sm.mask[(j + 1) * n + j] == 1);

  // Loop oracle: recompute every unmasked cell from raw values.
  auto leaky = [](double x) { return x > 0 ? x : 0.1 * x; };
  auto role_vec = [&](const std::vector<double>& src, std::size_t row, const Tensor& w,
                      const Tensor& b) {
    std::vector<double> out(5, 0.0);
    for (std::size_t c = 0; c < 5; ++c) {
      double acc = b.values()[c];
      for (std::size_t k = 0; k < hidden; ++k) acc += src[row * hidden + k] * w.values()[k * 5 + c];
      out[c] = leaky(acc);
    }
    return out;
  };
  std::vector<double> cand = rootv;
  cand.insert(cand.end(), enc.nodes.values().begin(), enc.nodes.values().end());
  for (std::size_t i = 0; i <= n; ++i) {
    const auto key = role_vec(cand, i, p.w_key, p.b_key);
    for (std::size_t j = 0; j < n; ++j) {
      if (sm.mask[i * n + j]) continue;
      const auto value = role_vec(enc.nodes.values(), j, p.w_value, p.b_value);
      double expected = biaffine_score(key, value, p.w_bilinear.values(), p.w_key_linear.values());
      const EdgeFeatures r =
          i == 0 ? EdgeFeatures{0.0, 0.0} : edge_features(boxes[i - 1], boxes[j]);
      expected += feature_score(r, p.w_feat.values(), p.b_feat.values()[0]);
      CHECK(sm.scores.values()[i * n + j] == doctest::Approx(expected).epsilon(1e-10));
    }
  }

  // Zeroed feature scorer reduces to the pure biaffine path.
  ScorerParams ablated = p;
  ablated.w_feat = Tensor::parameter("wf0", {2, 1}, {0.0, 0.0});
  ablated.b_feat = Tensor::parameter("bf0", {1}, {0.0});
  const ScoreMatrix pure = total_scores(enc, boxes, ids, ablated, 0.1, true, false);
  std::vector<Tensor> rows = {enc.root, enc.nodes};
  const RolePair roles = project_roles(concat_rows(rows), enc.nodes, p, 0.1);
  const Tensor biaffine_only = biaffine_matrix(roles, p);
  for (std::size_t i = 0; i < pure.scores.size(); ++i) {
    CHECK(pure.scores.values()[i] == doctest::Approx(biaffine_only.values()[i]).epsilon(1e-12));
  }
}

TEST_CASE("decode is invariant to shifting a whole dependent column") {
  Rng rng(37);
  const std::size_t m = 4, n = 3;
  std::vector<double> vals(m * n);
  for (auto& v : vals) v = rng.uniform_pm(2.0);
  ScoreMatrix sm;
  sm.scores = Tensor::constant({m, n}, vals);
  sm.entity_ids = {1, 2, 3};
  sm.has_root = true;
  sm.mask.assign(m * n, 0);
  for (std::size_t j = 0; j < n; ++j) sm.mask[(j + 1) * n + j] = 1;

  const Prediction base = single_head_decode(sm, "d");
  for (std::size_t j = 0; j < n; ++j) {
    auto shifted = vals;
    for (std::size_t i = 0; i < m; ++i) shifted[i * n + j] += 123.456;
    ScoreMatrix sm2 = sm;
    sm2.scores = Tensor::constant({m, n}, shifted);
    const Prediction moved = single_head_decode(sm2, "d");
    CHECK(moved.links == base.links);
  }
}
