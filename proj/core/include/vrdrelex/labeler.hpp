#pragma once

#include <cstdint>

#include "vrdrelex/document.hpp"
#include "vrdrelex/featurize.hpp"
#include "vrdrelex/model_config.hpp"
#include "vrdrelex/ops.hpp"
#include "vrdrelex/rng.hpp"

namespace vrdrelex {

// Per-entity label classifier: MLP over b_i (+) geometry embedding.
// Scores only real labels; the reserved unknown label is never predicted.
struct LabelerParams {
  Tensor w_hidden, b_hidden;  // (in, hidden), (hidden)
  Tensor w_out, b_out;        // (hidden, |L|), (|L|)
  Tensor width_table;         // (20, geom_dim)
  Tensor height_table;        // (20, geom_dim)
  Tensor char_table;          // (10, geom_dim)

  static LabelerParams init(std::size_t input_dim, std::size_t hidden_dim,
                            std::size_t num_labels, std::size_t geom_dim, Rng& rng);
};

// logits = W_out . LeakyReLU(W_hidden [b|g] + b_hidden) + b_out, one row
// per input row of `features` (n, b_dim + 3*geom_dim).
Tensor label_logits(const Tensor& features, const LabelerParams& params, double leaky_slope);

// argmax per row; ties toward the smaller logit index. Returned ids are
// real label ids (logit column c corresponds to label id c + 1).
std::vector<int> argmax_labels(const Tensor& logits);

// L = L_rel + lambda * L_label. lambda = 0 returns the relation loss
// unchanged (no label-path gradients).
Tensor mtl_loss(const Tensor& relation_loss, const Tensor& label_loss, double lambda);

struct AutoLabelOptions {
  std::size_t k = 5;
  std::uint64_t seed = 1;
  std::size_t epochs = 30;
  double learning_rate = 1e-2;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::size_t min_frequency = 1;
  ModelConfig model;
};

// Fills auto_label on a copy of `train` by k-fold jackknifing: each
// fold's labels come from a labeler trained on the other k-1 folds, so
// no entity is labeled by a model that saw its own document.
Corpus jackknife_autolabel(const Corpus& train, const AutoLabelOptions& opts,
                           const ExternalEmbeddings* ext = nullptr);

// Labels `target` with a labeler trained on the full `train` corpus
// (the treatment the held-out split gets).
Corpus autolabel_with_full_train(const Corpus& train, const Corpus& target,
                                 const AutoLabelOptions& opts,
                                 const ExternalEmbeddings* ext = nullptr);

}  // namespace vrdrelex
