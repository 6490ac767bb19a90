#pragma once

#include <cstdint>
#include <vector>

#include "vrdrelex/document.hpp"
#include "vrdrelex/encoder.hpp"
#include "vrdrelex/featurize.hpp"
#include "vrdrelex/ops.hpp"

namespace vrdrelex {

// Role MLPs, the bilinear+linear pair scorer and the affine layout-gap
// scorer. `w_key_linear` is the key-side linear term; there is no
// value-side term or scalar bias in the pair scorer by design.
struct ScorerParams {
  Tensor w_key, b_key;      // (hidden, role), (role)
  Tensor w_value, b_value;  // (hidden, role), (role)
  Tensor w_bilinear;        // (role, role)
  Tensor w_key_linear;      // (role, 1)
  Tensor w_feat;            // (feat_dim, 1)
  Tensor b_feat;            // (1)

  static ScorerParams init(std::size_t hidden_dim, std::size_t role_dim, std::size_t feat_dim,
                           Rng& rng);
};

struct RolePair {
  Tensor keys;    // (m, role): head candidates; row 0 is the root when present
  Tensor values;  // (n, role): dependents
};

// h_key = F(W_key e' + b_key), h_value likewise; F = LeakyReLU(slope).
// `head_candidates` is the stacked (m, hidden) matrix (root first when
// scoring under the single-head regime), `dependents` the (n, hidden) one.
RolePair project_roles(const Tensor& head_candidates, const Tensor& dependents,
                       const ScorerParams& params, double leaky_slope);

// Score^B[i][j] = key_i^T W1 value_j + key_i^T W2, all pairs at once.
Tensor biaffine_matrix(const RolePair& roles, const ScorerParams& params);

// Scalar helpers mirroring the batched path; used by tests and oracles.
double biaffine_score(const std::vector<double>& h_key, const std::vector<double>& h_value,
                      const std::vector<double>& w_bilinear, const std::vector<double>& w_key_linear);
double feature_score(const EdgeFeatures& r, const std::vector<double>& w_feat, double b_feat);

// Layout features per (head candidate, dependent) cell, flattened row
// major to ((m)*n, feat_dim). Root rows (when present) get zeros, so the
// scorer's bias acts as the root prior. With `signed_offsets`, signed
// center deltas (dependent minus head) extend the symmetric gaps.
Tensor score_feature_matrix(const std::vector<BoundingBox>& boxes, bool with_root,
                            bool signed_offsets);

std::size_t score_feature_dim(bool signed_offsets);

// Relation scores, head candidates x dependents. In single-head form the
// matrix is (n+1, n) with row 0 = pseudo root; in multi-head form (n, n).
// `mask` marks self pairs, excluded from losses and decoding.
struct ScoreMatrix {
  Tensor scores;
  std::vector<std::uint8_t> mask;
  std::vector<int> entity_ids;  // column j <-> entity_ids[j]
  bool has_root = false;

  std::size_t head_rows() const { return scores.rows(); }
  std::size_t dependents() const { return scores.cols(); }
  // Row of head candidate `id` (0 = root, only when has_root).
  std::size_t row_of(int head_id) const;
  int id_of_row(std::size_t row) const;
};

ScoreMatrix total_scores(const EncodedDocument& enc, const std::vector<BoundingBox>& boxes,
                         const std::vector<int>& entity_ids, const ScorerParams& params,
                         double leaky_slope, bool single_head_mode, bool signed_offsets);

}  // namespace vrdrelex
