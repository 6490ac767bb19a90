#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "vrdrelex/document.hpp"
#include "vrdrelex/scorer.hpp"

namespace vrdrelex {

enum class DecoderMode { kSingleHead, kMultiHead };

std::string to_string(DecoderMode mode);
DecoderMode decoder_mode_from_string(const std::string& s);

struct Prediction {
  std::string doc_id;
  DecoderMode mode = DecoderMode::kSingleHead;
  std::vector<RelationLink> links;  // head 0 = pseudo root, sorted
};

// Mean softmax cross entropy over dependents; the candidate axis runs
// over the unmasked rows of each column. `head_of` holds gold head
// entity ids aligned with the matrix columns (0 = pseudo root).
Tensor single_head_loss(const ScoreMatrix& sm, const std::vector<int>& head_of);

// argmax head per dependent, ties toward the smaller row (root first).
Prediction single_head_decode(const ScoreMatrix& sm, const std::string& doc_id);

// Mean sigmoid binary cross entropy over ordered real pairs i != j.
Tensor binary_loss(const ScoreMatrix& sm, const std::set<std::pair<int, int>>& gold_adjacency);

// Link (i,j) iff sigmoid(score) > threshold; multiple/zero heads allowed.
Prediction binary_decode(const ScoreMatrix& sm, double threshold, const std::string& doc_id);

}  // namespace vrdrelex
