#pragma once

#include <cstddef>
#include <string>

#include "vrdrelex/decoder.hpp"

namespace vrdrelex {

// Where the relation model takes its label embeddings from. kNone feeds
// the reserved unknown label to every entity (the no-label ablation).
enum class LabelSource { kGold, kAuto, kNone };

std::string to_string(LabelSource s);
LabelSource label_source_from_string(const std::string& s);

struct ModelConfig {
  std::size_t word_dim = 100;
  std::size_t label_dim = 100;
  std::size_t gcn_dim = 100;
  std::size_t role_dim = 300;
  std::size_t geom_dim = 10;
  double leaky_slope = 0.1;
  bool signed_offsets = false;
  bool freeze_feature_scorer = false;  // pins W_F, b_F at zero (ablation)
  double binary_threshold = 0.5;
  std::size_t external_dim = 0;  // 0 = trainable word embeddings
  DecoderMode mode = DecoderMode::kSingleHead;
  LabelSource label_source = LabelSource::kGold;

  std::size_t entity_vec_dim() const { return external_dim ? external_dim : word_dim; }
  std::size_t entity_rep_dim() const { return entity_vec_dim() + label_dim; }
};

}  // namespace vrdrelex
