#include "vrdrelex/trainer.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include "vrdrelex/errors.hpp"
#include "vrdrelex/evaluate.hpp"
#include "vrdrelex/preprocess.hpp"

namespace vrdrelex {

void TrainConfig::validate() const {
  if (epochs == 0) throw ArgumentError("epochs must be >= 1");
  decoder_mode_from_string(decoder_mode);
  label_source_from_string(label_source);
  if (mtl_lambda < 0.0) throw ArgumentError("mtl_lambda must be >= 0");
  if (augment_ratio < 0.0 || augment_ratio >= 1.0) throw ArgumentError("augment_ratio must be in [0,1)");
  for (auto [v, name] : {std::pair<std::size_t, const char*>{word_dim, "word_dim"},
                         {label_dim, "label_dim"},
                         {gcn_dim, "gcn_dim"},
                         {role_dim, "role_dim"},
                         {geom_dim, "geom_dim"}}) {
    if (v == 0) throw ArgumentError(std::string(name) + " must be positive");
  }
  if (lr_main <= 0.0 || lr_external <= 0.0) throw ArgumentError("learning rates must be positive");
  if (binary_threshold <= 0.0 || binary_threshold >= 1.0) {
    throw ArgumentError("binary_threshold must be in (0,1)");
  }
  if (autolabel_k < 2) throw ArgumentError("autolabel_k must be >= 2");
}

nlohmann::json to_json(const TrainConfig& c) {
  return nlohmann::json{{"seed", c.seed},
                        {"epochs", c.epochs},
                        {"decoder_mode", c.decoder_mode},
                        {"label_source", c.label_source},
                        {"mtl", c.mtl},
                        {"mtl_lambda", c.mtl_lambda},
                        {"augment", c.augment},
                        {"augment_ratio", c.augment_ratio},
                        {"word_dim", c.word_dim},
                        {"label_dim", c.label_dim},
                        {"gcn_dim", c.gcn_dim},
                        {"role_dim", c.role_dim},
                        {"geom_dim", c.geom_dim},
                        {"lr_main", c.lr_main},
                        {"lr_external", c.lr_external},
                        {"adam_beta1", c.adam_beta1},
                        {"adam_beta2", c.adam_beta2},
                        {"adam_eps", c.adam_eps},
                        {"grad_clip_norm", c.grad_clip_norm},
                        {"leaky_slope", c.leaky_slope},
                        {"binary_threshold", c.binary_threshold},
                        {"signed_offsets", c.signed_offsets},
                        {"freeze_feature_scorer", c.freeze_feature_scorer},
                        {"min_frequency", c.min_frequency},
                        {"autolabel_k", c.autolabel_k},
                        {"autolabel_epochs", c.autolabel_epochs},
                        {"external_embeddings", c.external_embeddings}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "seed") c.seed = value.get<std::uint64_t>();
    else if (key == "epochs") c.epochs = value.get<std::size_t>();
    else if (key == "decoder_mode") c.decoder_mode = value.get<std::string>();
    else if (key == "label_source") c.label_source = value.get<std::string>();
    else if (key == "mtl") c.mtl = value.get<bool>();
    else if (key == "mtl_lambda") c.mtl_lambda = value.get<double>();
    else if (key == "augment") c.augment = value.get<bool>();
    else if (key == "augment_ratio") c.augment_ratio = value.get<double>();
    else if (key == "word_dim") c.word_dim = value.get<std::size_t>();
    else if (key == "label_dim") c.label_dim = value.get<std::size_t>();
    else if (key == "gcn_dim") c.gcn_dim = value.get<std::size_t>();
    else if (key == "role_dim") c.role_dim = value.get<std::size_t>();
    else if (key == "geom_dim") c.geom_dim = value.get<std::size_t>();
    else if (key == "lr_main") c.lr_main = value.get<double>();
    else if (key == "lr_external") c.lr_external = value.get<double>();
    else if (key == "adam_beta1") c.adam_beta1 = value.get<double>();
    else if (key == "adam_beta2") c.adam_beta2 = value.get<double>();
    else if (key == "adam_eps") c.adam_eps = value.get<double>();
    else if (key == "grad_clip_norm") c.grad_clip_norm = value.get<double>();
    else if (key == "leaky_slope") c.leaky_slope = value.get<double>();
    else if (key == "binary_threshold") c.binary_threshold = value.get<double>();
    else if (key == "signed_offsets") c.signed_offsets = value.get<bool>();
    else if (key == "freeze_feature_scorer") c.freeze_feature_scorer = value.get<bool>();
    else if (key == "min_frequency") c.min_frequency = value.get<std::size_t>();
    else if (key == "autolabel_k") c.autolabel_k = value.get<std::size_t>();
    else if (key == "autolabel_epochs") c.autolabel_epochs = value.get<std::size_t>();
    else if (key == "external_embeddings") c.external_embeddings = value.get<std::string>();
    else throw ArgumentError("unknown config field `" + key + "`");
  }
  c.validate();
  return c;
}

TrainConfig load_train_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("malformed config " + path.string() + ": " + e.what());
  }
  return train_config_from_json(j);
}

ModelConfig model_config_from(const TrainConfig& cfg, std::size_t external_dim) {
  ModelConfig m;
  m.word_dim = cfg.word_dim;
  m.label_dim = cfg.label_dim;
  m.gcn_dim = cfg.gcn_dim;
  m.role_dim = cfg.role_dim;
  m.geom_dim = cfg.geom_dim;
  m.leaky_slope = cfg.leaky_slope;
  m.signed_offsets = cfg.signed_offsets;
  m.freeze_feature_scorer = cfg.freeze_feature_scorer;
  m.binary_threshold = cfg.binary_threshold;
  m.external_dim = external_dim;
  m.mode = decoder_mode_from_string(cfg.decoder_mode);
  m.label_source = label_source_from_string(cfg.label_source);
  return m;
}

AutoLabelOptions autolabel_options_from(const TrainConfig& cfg, std::size_t external_dim) {
  AutoLabelOptions o;
  o.k = cfg.autolabel_k;
  o.seed = cfg.seed;
  o.epochs = cfg.autolabel_epochs;
  o.learning_rate = cfg.lr_main;
  o.adam_beta1 = cfg.adam_beta1;
  o.adam_beta2 = cfg.adam_beta2;
  o.adam_eps = cfg.adam_eps;
  o.min_frequency = cfg.min_frequency;
  o.model = model_config_from(cfg, external_dim);
  return o;
}

TrainOutput train_model(const Corpus& train, const TrainConfig& cfg,
                        const ExternalEmbeddings* ext, std::ostream* log, const Corpus* dev) {
  cfg.validate();
  const Corpus effective =
      cfg.augment ? augment_corpus(train, cfg.augment_ratio, cfg.seed) : train;
  if (ext != nullptr) ext->check_coverage(effective);

  const std::size_t external_dim = ext ? ext->dim() : 0;
  const ModelConfig mcfg = model_config_from(cfg, external_dim);
  Vocabulary vocab = Vocabulary::build(effective, cfg.min_frequency);
  TrainOutput out{Model(mcfg, effective.labels, std::move(vocab), cfg.seed), {}};
  Model& model = out.model;

  std::vector<TrainInstance> instances;
  instances.reserve(effective.docs.size());
  const bool single = mcfg.mode == DecoderMode::kSingleHead;
  for (const auto& doc : effective.docs) {
    instances.push_back(single ? to_single_head(doc, cfg.seed) : to_multi_head(doc));
  }

  Adam adam(cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
  auto groups = model.param_groups(cfg.lr_main);

  std::vector<std::size_t> order(effective.docs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng order_rng(mix_seed(cfg.seed, "epoch-order"));

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    order_rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t steps = 0;
    for (auto di : order) {
      const Document& doc = effective.docs[di];
      const TrainInstance& inst = instances[di];
      if (inst.kept.empty()) continue;
      try {
        Tensor loss = model.relation_loss(doc, inst, ext);
        if (cfg.mtl) {
          loss = mtl_loss(loss, model.label_loss(doc, inst, ext), cfg.mtl_lambda);
        }
        if (!std::isfinite(loss.value())) {
          throw NumericError("non-finite loss");
        }
        loss_sum += loss.value();
        ++steps;
        if (!loss.requires_grad()) continue;
        backward(loss);
        clip_gradients(groups, cfg.grad_clip_norm);
        adam.step(groups);
      } catch (const NumericError& e) {
        throw NumericError("epoch " + std::to_string(epoch) + ", doc " + doc.doc_id + ": " +
                           e.what());
      }
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.mean_loss = steps ? loss_sum / static_cast<double>(steps) : 0.0;
    if (dev != nullptr) {
      const auto preds = predict_corpus(model, *dev, ext);
      stats.dev_f1 = evaluate_relations(preds, *dev).f1;
    }
    if (log != nullptr) {
      (*log) << "epoch " << stats.epoch << " loss " << stats.mean_loss;
      if (stats.dev_f1) (*log) << " dev_f1 " << *stats.dev_f1;
      (*log) << '\n';
    }
    out.epochs.push_back(stats);
  }
  return out;
}

std::vector<Prediction> predict_corpus(const Model& model, const Corpus& corpus,
                                       const ExternalEmbeddings* ext) {
  // Label ids are corpus-relative; align them with the model's label set.
  const Corpus aligned = reintern_labels(corpus, model.labels());
  std::vector<Prediction> preds;
  preds.reserve(aligned.docs.size());
  for (const auto& doc : aligned.docs) preds.push_back(model.predict(doc, ext));
  return preds;
}

}  // namespace vrdrelex
