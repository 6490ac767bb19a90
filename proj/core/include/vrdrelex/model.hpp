#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "vrdrelex/decoder.hpp"
#include "vrdrelex/document.hpp"
#include "vrdrelex/encoder.hpp"
#include "vrdrelex/featurize.hpp"
#include "vrdrelex/labeler.hpp"
#include "vrdrelex/model_config.hpp"
#include "vrdrelex/optim.hpp"
#include "vrdrelex/preprocess.hpp"
#include "vrdrelex/scorer.hpp"
#include "vrdrelex/vocab.hpp"

namespace vrdrelex {

// The full relation-extraction model: entity featurizer (trainable word
// embeddings or the frozen external hook), label embeddings, the GCN
// document encoder, the pair scorer, and the entity-labeling head that
// shares the featurizer.
class Model {
 public:
  Model(ModelConfig cfg, LabelSet labels, Vocabulary vocab, std::uint64_t seed);

  const ModelConfig& config() const { return cfg_; }
  const LabelSet& labels() const { return labels_; }
  const Vocabulary& vocab() const { return vocab_; }

  // (n, entity_rep_dim) matrix over the instance's kept entities.
  Tensor entity_reps(const Document& doc, const TrainInstance& inst,
                     const ExternalEmbeddings* ext) const;

  ScoreMatrix score(const Document& doc, const TrainInstance& inst,
                    const ExternalEmbeddings* ext) const;

  // Mode-appropriate loss; scalar zero when the document has nothing to
  // train on (no kept entities, or multi-head mode with < 2 entities).
  Tensor relation_loss(const Document& doc, const TrainInstance& inst,
                       const ExternalEmbeddings* ext) const;

  // Labeling-head loss against gold labels (rows without gold are skipped).
  Tensor label_loss(const Document& doc, const TrainInstance& inst,
                    const ExternalEmbeddings* ext) const;

  // Predicted real label ids for the kept entities, aligned with inst.kept.
  std::vector<int> predict_labels(const Document& doc, const TrainInstance& inst,
                                  const ExternalEmbeddings* ext) const;

  Prediction predict(const Document& doc, const ExternalEmbeddings* ext) const;

  // Stable-order parameter list (checkpoint layout).
  std::vector<std::pair<std::string, Tensor>> named_params() const;
  // One group per learning rate; the frozen feature scorer is excluded.
  std::vector<ParamGroup> param_groups(double lr_main) const;
  std::vector<ParamGroup> labeler_param_groups(double lr) const;

  const Tensor& word_table() const { return word_table_; }
  const Tensor& label_table() const { return label_table_; }
  const EncoderParams& encoder_params() const { return encoder_; }
  const ScorerParams& scorer_params() const { return scorer_; }
  const LabelerParams& labeler_params() const { return labeler_; }

 private:
  int label_id_for(const SemanticEntity& e) const;
  Tensor labeler_features(const Document& doc, const TrainInstance& inst,
                          const ExternalEmbeddings* ext) const;
  Tensor entity_vec(const Document& doc, const SemanticEntity& e,
                    const ExternalEmbeddings* ext) const;

  ModelConfig cfg_;
  LabelSet labels_;
  Vocabulary vocab_;
  Tensor word_table_;
  Tensor label_table_;
  EncoderParams encoder_;
  ScorerParams scorer_;
  LabelerParams labeler_;
};

}  // namespace vrdrelex
