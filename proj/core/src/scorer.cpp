#include "vrdrelex/scorer.hpp"

#include <cmath>

#include "vrdrelex/errors.hpp"
#include "vrdrelex/featurize.hpp"

namespace vrdrelex {

namespace {

std::vector<double> xavier(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::vector<double> v(fan_in * fan_out);
  for (auto& x : v) x = rng.uniform_pm(limit);
  return v;
}

}  // namespace

ScorerParams ScorerParams::init(std::size_t hidden_dim, std::size_t role_dim,
                                std::size_t feat_dim, Rng& rng) {
  ScorerParams p;
  p.w_key = Tensor::parameter("scorer.w_key", {hidden_dim, role_dim}, xavier(hidden_dim, role_dim, rng));
  p.b_key = Tensor::parameter("scorer.b_key", {role_dim}, std::vector<double>(role_dim, 0.0));
  p.w_value =
      Tensor::parameter("scorer.w_value", {hidden_dim, role_dim}, xavier(hidden_dim, role_dim, rng));
  p.b_value = Tensor::parameter("scorer.b_value", {role_dim}, std::vector<double>(role_dim, 0.0));
  p.w_bilinear =
      Tensor::parameter("scorer.w_bilinear", {role_dim, role_dim}, xavier(role_dim, role_dim, rng));
  p.w_key_linear =
      Tensor::parameter("scorer.w_key_linear", {role_dim, 1}, xavier(role_dim, 1, rng));
  p.w_feat = Tensor::parameter("scorer.w_feat", {feat_dim, 1}, xavier(feat_dim, 1, rng));
  p.b_feat = Tensor::parameter("scorer.b_feat", {1}, {0.0});
  return p;
}

RolePair project_roles(const Tensor& head_candidates, const Tensor& dependents,
                       const ScorerParams& params, double leaky_slope) {
  RolePair out;
  out.keys = leaky_relu(add_row_broadcast(matmul(head_candidates, params.w_key), params.b_key),
                        leaky_slope);
  out.values = leaky_relu(add_row_broadcast(matmul(dependents, params.w_value), params.b_value),
                          leaky_slope);
  return out;
}

Tensor biaffine_matrix(const RolePair& roles, const ScorerParams& params) {
  const Tensor bilinear = matmul(matmul(roles.keys, params.w_bilinear), transpose(roles.values));
  const Tensor key_linear = matmul(roles.keys, params.w_key_linear);  // (m, 1)
  return add_col_broadcast(bilinear, reshape(key_linear, {key_linear.rows()}));
}

double biaffine_score(const std::vector<double>& h_key, const std::vector<double>& h_value,
                      const std::vector<double>& w_bilinear,
                      const std::vector<double>& w_key_linear) {
  const std::size_t r = h_key.size();
  if (h_value.size() != r || w_bilinear.size() != r * r || w_key_linear.size() != r) {
    throw ArgumentError("biaffine_score: inconsistent role dims");
  }
  double s = 0.0;
  for (std::size_t a = 0; a < r; ++a) {
    double row = 0.0;
    for (std::size_t b = 0; b < r; ++b) row += w_bilinear[a * r + b] * h_value[b];
    s += h_key[a] * row + h_key[a] * w_key_linear[a];
  }
  return s;
}

double feature_score(const EdgeFeatures& r, const std::vector<double>& w_feat, double b_feat) {
  if (w_feat.size() < 2) throw ArgumentError("feature_score: weight must have >= 2 entries");
  return w_feat[0] * r.x + w_feat[1] * r.y + b_feat;
}

std::size_t score_feature_dim(bool signed_offsets) { return signed_offsets ? 4 : 2; }

Tensor score_feature_matrix(const std::vector<BoundingBox>& boxes, bool with_root,
                            bool signed_offsets) {
  const std::size_t n = boxes.size();
  const std::size_t fd = score_feature_dim(signed_offsets);
  const std::size_t m = n + (with_root ? 1 : 0);
  std::vector<double> vals(m * n * fd, 0.0);
  const std::size_t root_rows = with_root ? 1 : 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t p = (i + root_rows) * n + j;
      const EdgeFeatures f = edge_features(boxes[i], boxes[j]);
      vals[p * fd] = f.x;
      vals[p * fd + 1] = f.y;
      if (signed_offsets) {
        const double cxi = 0.5 * (boxes[i].x1 + boxes[i].x2);
        const double cyi = 0.5 * (boxes[i].y1 + boxes[i].y2);
        const double cxj = 0.5 * (boxes[j].x1 + boxes[j].x2);
        const double cyj = 0.5 * (boxes[j].y1 + boxes[j].y2);
        vals[p * fd + 2] = cxj - cxi;
        vals[p * fd + 3] = cyj - cyi;
      }
    }
  }
  return Tensor::constant({m * n, fd}, std::move(vals));
}

std::size_t ScoreMatrix::row_of(int head_id) const {
  if (head_id == 0) {
    if (!has_root) throw ArgumentError("ScoreMatrix: no root row in multi-head form");
    return 0;
  }
  for (std::size_t i = 0; i < entity_ids.size(); ++i) {
    if (entity_ids[i] == head_id) return i + (has_root ? 1 : 0);
  }
  throw ArgumentError("ScoreMatrix: unknown head id " + std::to_string(head_id));
}

int ScoreMatrix::id_of_row(std::size_t row) const {
  if (has_root) {
    if (row == 0) return 0;
    return entity_ids.at(row - 1);
  }
  return entity_ids.at(row);
}

ScoreMatrix total_scores(const EncodedDocument& enc, const std::vector<BoundingBox>& boxes,
                         const std::vector<int>& entity_ids, const ScorerParams& params,
                         double leaky_slope, bool single_head_mode, bool signed_offsets) {
  const std::size_t n = enc.nodes.rows();
  if (boxes.size() != n || entity_ids.size() != n) {
    throw ArgumentError("total_scores: boxes/ids size mismatch with encoded nodes");
  }

  Tensor head_candidates;
  if (single_head_mode) {
    std::vector<Tensor> rows = {enc.root, enc.nodes};
    head_candidates = concat_rows(rows);
  } else {
    head_candidates = enc.nodes;
  }
  const RolePair roles = project_roles(head_candidates, enc.nodes, params, leaky_slope);
  const Tensor biaffine = biaffine_matrix(roles, params);

  const Tensor feats = score_feature_matrix(boxes, single_head_mode, signed_offsets);
  const std::size_t m = biaffine.rows();
  const Tensor feat_scores = reshape(matmul(feats, params.w_feat), {m, n});

  ScoreMatrix out;
  out.scores = add_scalar(add(biaffine, feat_scores), params.b_feat);
  out.entity_ids = entity_ids;
  out.has_root = single_head_mode;
  out.mask.assign(m * n, 0);
  const std::size_t root_rows = single_head_mode ? 1 : 0;
  for (std::size_t j = 0; j < n; ++j) {
    out.mask[(j + root_rows) * n + j] = 1;  // an entity never heads itself
  }
  return out;
}

}  // namespace vrdrelex
