#include "vrdrelex/model.hpp"

#include "vrdrelex/errors.hpp"

namespace vrdrelex {

std::string to_string(LabelSource s) {
  switch (s) {
    case LabelSource::kGold: return "gold";
    case LabelSource::kAuto: return "auto";
    case LabelSource::kNone: return "none";
  }
  throw ArgumentError("bad label source");
}

LabelSource label_source_from_string(const std::string& s) {
  if (s == "gold") return LabelSource::kGold;
  if (s == "auto") return LabelSource::kAuto;
  if (s == "none") return LabelSource::kNone;
  throw ArgumentError("unknown label source `" + s + "` (expected gold|auto|none)");
}

Model::Model(ModelConfig cfg, LabelSet labels, Vocabulary vocab, std::uint64_t seed)
    : cfg_(cfg), labels_(std::move(labels)), vocab_(std::move(vocab)) {
  Rng rng(mix_seed(seed, "model-init"));

  auto table = [&rng](std::size_t rows, std::size_t cols) {
    std::vector<double> v(rows * cols);
    for (auto& x : v) x = rng.uniform_pm(0.1);
    return v;
  };

  word_table_ = Tensor::parameter("word_table", {vocab_.size(), cfg_.word_dim},
                                  table(vocab_.size(), cfg_.word_dim));
  label_table_ = Tensor::parameter("label_table", {labels_.size(), cfg_.label_dim},
                                   table(labels_.size(), cfg_.label_dim));
  encoder_ = EncoderParams::init(cfg_.entity_rep_dim(), cfg_.gcn_dim, rng);
  scorer_ = ScorerParams::init(cfg_.gcn_dim, cfg_.role_dim,
                               score_feature_dim(cfg_.signed_offsets), rng);
  labeler_ = LabelerParams::init(cfg_.entity_vec_dim() + 3 * cfg_.geom_dim, 300,
                                 labels_.num_real(), cfg_.geom_dim, rng);

  if (cfg_.freeze_feature_scorer) {
    // Zeroed and kept out of the optimizer groups: scores reduce to the
    // pure biaffine path.
    std::fill(scorer_.w_feat.values().begin(), scorer_.w_feat.values().end(), 0.0);
    std::fill(scorer_.b_feat.values().begin(), scorer_.b_feat.values().end(), 0.0);
  }
}

int Model::label_id_for(const SemanticEntity& e) const {
  switch (cfg_.label_source) {
    case LabelSource::kGold:
      if (!e.gold_label) {
        throw ValidationError("entity " + std::to_string(e.id) +
                              " has no gold label but label_source=gold");
      }
      return *e.gold_label;
    case LabelSource::kAuto:
      if (!e.auto_label) {
        throw ValidationError("entity " + std::to_string(e.id) +
                              " has no auto label but label_source=auto (run autolabel first)");
      }
      return *e.auto_label;
    case LabelSource::kNone:
      return LabelSet::kUnknown;
  }
  throw ArgumentError("bad label source");
}

Tensor Model::entity_vec(const Document& doc, const SemanticEntity& e,
                         const ExternalEmbeddings* ext) const {
  if (cfg_.external_dim > 0) {
    if (ext == nullptr) {
      throw ArgumentError("model configured for external embeddings but none supplied");
    }
    const auto& v = ext->vec(doc.doc_id, e.id);
    if (v.size() != cfg_.external_dim) {
      throw ValidationError("external embedding dim " + std::to_string(v.size()) +
                            " != configured " + std::to_string(cfg_.external_dim));
    }
    return Tensor::constant({v.size()}, v);  // frozen: no gradient path
  }
  return embed_entity(e, vocab_, word_table_);
}

Tensor Model::entity_reps(const Document& doc, const TrainInstance& inst,
                          const ExternalEmbeddings* ext) const {
  std::vector<Tensor> rows;
  rows.reserve(inst.kept.size());
  for (int id : inst.kept) {
    const SemanticEntity& e = doc.entities[doc.entity_index(id)];
    const Tensor b = entity_vec(doc, e, ext);
    rows.push_back(attach_label(b, label_id_for(e), label_table_));
  }
  if (rows.empty()) throw ArgumentError("entity_reps: no kept entities in " + doc.doc_id);
  return concat_rows(rows);
}

ScoreMatrix Model::score(const Document& doc, const TrainInstance& inst,
                         const ExternalEmbeddings* ext) const {
  const Tensor reps = entity_reps(doc, inst, ext);
  std::vector<BoundingBox> boxes;
  boxes.reserve(inst.kept.size());
  for (int id : inst.kept) boxes.push_back(doc.entities[doc.entity_index(id)].box);
  const Tensor edge_feats = edge_feature_matrix(boxes);
  const EncodedDocument enc = encode_document(reps, edge_feats, encoder_, cfg_.leaky_slope);
  return total_scores(enc, boxes, inst.kept, scorer_, cfg_.leaky_slope,
                      cfg_.mode == DecoderMode::kSingleHead, cfg_.signed_offsets);
}

Tensor Model::relation_loss(const Document& doc, const TrainInstance& inst,
                            const ExternalEmbeddings* ext) const {
  if (inst.kept.empty()) return Tensor::scalar(0.0);
  if (cfg_.mode == DecoderMode::kMultiHead && inst.kept.size() < 2) return Tensor::scalar(0.0);
  const ScoreMatrix sm = score(doc, inst, ext);
  if (cfg_.mode == DecoderMode::kSingleHead) {
    return single_head_loss(sm, inst.head_of);
  }
  return binary_loss(sm, inst.adjacency);
}

Tensor Model::labeler_features(const Document& doc, const TrainInstance& inst,
                               const ExternalEmbeddings* ext) const {
  std::vector<Tensor> rows;
  rows.reserve(inst.kept.size());
  for (int id : inst.kept) {
    const SemanticEntity& e = doc.entities[doc.entity_index(id)];
    const Tensor b = entity_vec(doc, e, ext);
    const Tensor g = bucketize_embed(geometry_features(e), labeler_.width_table,
                                     labeler_.height_table, labeler_.char_table);
    std::vector<Tensor> parts = {b, g};
    rows.push_back(concat(parts));
  }
  return concat_rows(rows);
}

Tensor Model::label_loss(const Document& doc, const TrainInstance& inst,
                         const ExternalEmbeddings* ext) const {
  if (inst.kept.empty()) return Tensor::scalar(0.0);
  const Tensor feats = labeler_features(doc, inst, ext);
  const Tensor logits = label_logits(feats, labeler_, cfg_.leaky_slope);
  std::vector<int> gold(inst.kept.size(), -1);
  for (std::size_t i = 0; i < inst.kept.size(); ++i) {
    const SemanticEntity& e = doc.entities[doc.entity_index(inst.kept[i])];
    if (e.gold_label && *e.gold_label != LabelSet::kUnknown) {
      gold[i] = *e.gold_label - 1;  // logit column space
    }
  }
  return softmax_ce_rows(logits, gold);
}

std::vector<int> Model::predict_labels(const Document& doc, const TrainInstance& inst,
                                       const ExternalEmbeddings* ext) const {
  if (inst.kept.empty()) return {};
  const Tensor feats = labeler_features(doc, inst, ext);
  const Tensor logits = label_logits(feats, labeler_, cfg_.leaky_slope);
  return argmax_labels(logits);
}

Prediction Model::predict(const Document& doc, const ExternalEmbeddings* ext) const {
  const TrainInstance inst = to_multi_head(doc);
  Prediction pred;
  pred.doc_id = doc.doc_id;
  pred.mode = cfg_.mode;
  if (inst.kept.empty() || (cfg_.mode == DecoderMode::kMultiHead && inst.kept.size() < 2)) {
    return pred;
  }
  const ScoreMatrix sm = score(doc, inst, ext);
  if (cfg_.mode == DecoderMode::kSingleHead) {
    return single_head_decode(sm, doc.doc_id);
  }
  return binary_decode(sm, cfg_.binary_threshold, doc.doc_id);
}

std::vector<std::pair<std::string, Tensor>> Model::named_params() const {
  std::vector<std::pair<std::string, Tensor>> out;
  auto push = [&out](const Tensor& t) { out.emplace_back(t.name(), t); };
  push(word_table_);
  push(label_table_);
  for (const auto* layer : {&encoder_.layer1, &encoder_.layer2}) {
    push(layer->w_att);
    push(layer->w_node);
    push(layer->b_node);
    push(layer->w_edge);
    push(layer->b_edge);
  }
  push(encoder_.root);
  push(scorer_.w_key);
  push(scorer_.b_key);
  push(scorer_.w_value);
  push(scorer_.b_value);
  push(scorer_.w_bilinear);
  push(scorer_.w_key_linear);
  push(scorer_.w_feat);
  push(scorer_.b_feat);
  push(labeler_.w_hidden);
  push(labeler_.b_hidden);
  push(labeler_.w_out);
  push(labeler_.b_out);
  push(labeler_.width_table);
  push(labeler_.height_table);
  push(labeler_.char_table);
  return out;
}

std::vector<ParamGroup> Model::param_groups(double lr_main) const {
  ParamGroup main;
  main.name = "main";
  main.learning_rate = lr_main;
  for (auto& [name, t] : named_params()) {
    if (cfg_.freeze_feature_scorer && (name == "scorer.w_feat" || name == "scorer.b_feat")) {
      continue;
    }
    main.tensors.push_back(t);
  }
  return {main};
}

std::vector<ParamGroup> Model::labeler_param_groups(double lr) const {
  ParamGroup g;
  g.name = "labeler";
  g.learning_rate = lr;
  if (cfg_.external_dim == 0) g.tensors.push_back(word_table_);
  g.tensors.push_back(labeler_.w_hidden);
  g.tensors.push_back(labeler_.b_hidden);
  g.tensors.push_back(labeler_.w_out);
  g.tensors.push_back(labeler_.b_out);
  g.tensors.push_back(labeler_.width_table);
  g.tensors.push_back(labeler_.height_table);
  g.tensors.push_back(labeler_.char_table);
  return {g};
}

}  // namespace vrdrelex
