#include "vrdrelex/decoder.hpp"

#include <algorithm>

#include "vrdrelex/errors.hpp"
#include "vrdrelex/ops.hpp"

namespace vrdrelex {

std::string to_string(DecoderMode mode) {
  return mode == DecoderMode::kSingleHead ? "single" : "multi";
}

DecoderMode decoder_mode_from_string(const std::string& s) {
  if (s == "single") return DecoderMode::kSingleHead;
  if (s == "multi") return DecoderMode::kMultiHead;
  throw ArgumentError("unknown decoder mode `" + s + "` (expected single|multi)");
}

Tensor single_head_loss(const ScoreMatrix& sm, const std::vector<int>& head_of) {
  if (!sm.has_root) throw ArgumentError("single_head_loss: score matrix lacks the root row");
  const std::size_t n = sm.dependents();
  if (head_of.size() != n) {
    throw ArgumentError("single_head_loss: gold size " + std::to_string(head_of.size()) +
                        " vs " + std::to_string(n) + " dependents");
  }
  std::vector<int> gold_rows(n);
  for (std::size_t j = 0; j < n; ++j) {
    gold_rows[j] = static_cast<int>(sm.row_of(head_of[j]));
  }
  return masked_softmax_ce_cols(sm.scores, sm.mask, gold_rows);
}

Prediction single_head_decode(const ScoreMatrix& sm, const std::string& doc_id) {
  if (!sm.has_root) throw ArgumentError("single_head_decode: score matrix lacks the root row");
  Prediction pred;
  pred.doc_id = doc_id;
  pred.mode = DecoderMode::kSingleHead;
  const std::size_t m = sm.head_rows(), n = sm.dependents();
  const auto& v = sm.scores.values();
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t best = m;  // sentinel
    double best_score = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (sm.mask[i * n + j]) continue;
      const double s = v[i * n + j];
      if (best == m || s > best_score) {  // ties keep the smaller row
        best = i;
        best_score = s;
      }
    }
    if (best == m) continue;  // fully masked column cannot happen with the root row
    pred.links.push_back({sm.id_of_row(best), sm.entity_ids[j]});
  }
  std::sort(pred.links.begin(), pred.links.end());
  return pred;
}

Tensor binary_loss(const ScoreMatrix& sm, const std::set<std::pair<int, int>>& gold_adjacency) {
  if (sm.has_root) throw ArgumentError("binary_loss: expected a rootless score matrix");
  const std::size_t n = sm.dependents();
  std::vector<double> targets(n * n, 0.0);
  for (const auto& [h, d] : gold_adjacency) {
    const std::size_t i = sm.row_of(h);
    std::size_t j = n;
    for (std::size_t c = 0; c < n; ++c) {
      if (sm.entity_ids[c] == d) {
        j = c;
        break;
      }
    }
    if (j == n) throw ArgumentError("binary_loss: gold dependent " + std::to_string(d) + " unknown");
    targets[i * n + j] = 1.0;
  }
  return bce_with_logits(sm.scores, targets, sm.mask);
}

Prediction binary_decode(const ScoreMatrix& sm, double threshold, const std::string& doc_id) {
  if (sm.has_root) throw ArgumentError("binary_decode: expected a rootless score matrix");
  if (threshold <= 0.0 || threshold >= 1.0) {
    throw ArgumentError("binary_decode: threshold must be in (0,1), got " + std::to_string(threshold));
  }
  Prediction pred;
  pred.doc_id = doc_id;
  pred.mode = DecoderMode::kMultiHead;
  const std::size_t m = sm.head_rows(), n = sm.dependents();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (sm.mask[i * n + j]) continue;
      if (stable_sigmoid(sm.scores.values()[i * n + j]) > threshold) {
        pred.links.push_back({sm.id_of_row(i), sm.entity_ids[j]});
      }
    }
  }
  std::sort(pred.links.begin(), pred.links.end());
  return pred;
}

}  // namespace vrdrelex
