#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vrdrelex/model.hpp"

namespace vrdrelex {

// Experiment configuration. JSON config files mirror these field names
// exactly; CLI flags override individual fields.
struct TrainConfig {
  std::uint64_t seed = 1;
  std::size_t epochs = 50;
  std::string decoder_mode = "single";  // single | multi
  std::string label_source = "gold";    // gold | auto | none
  bool mtl = false;
  double mtl_lambda = 1.0;
  bool augment = false;
  double augment_ratio = 0.2;
  std::size_t word_dim = 100;
  std::size_t label_dim = 100;
  std::size_t gcn_dim = 100;
  std::size_t role_dim = 300;
  std::size_t geom_dim = 10;
  double lr_main = 1e-2;
  double lr_external = 1e-5;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double grad_clip_norm = 0.0;  // 0 disables clipping
  double leaky_slope = 0.1;
  double binary_threshold = 0.5;
  bool signed_offsets = false;
  bool freeze_feature_scorer = false;
  std::size_t min_frequency = 1;
  std::size_t autolabel_k = 5;
  std::size_t autolabel_epochs = 30;
  std::string external_embeddings;  // JSONL path; empty = trainable embeddings

  void validate() const;  // throws ArgumentError on bad values
};

nlohmann::json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j);
TrainConfig load_train_config(const std::filesystem::path& path);

ModelConfig model_config_from(const TrainConfig& cfg, std::size_t external_dim);
AutoLabelOptions autolabel_options_from(const TrainConfig& cfg, std::size_t external_dim);

struct EpochStats {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  std::optional<double> dev_f1;
};

struct TrainOutput {
  Model model;
  std::vector<EpochStats> epochs;
};

// One optimizer step per document, full seeded-shuffled traversal per
// epoch, fixed epoch count, no early stopping. Logs one line per epoch
// to `log` when given; aborts with epoch/doc context on non-finite loss.
TrainOutput train_model(const Corpus& train, const TrainConfig& cfg,
                        const ExternalEmbeddings* ext = nullptr, std::ostream* log = nullptr,
                        const Corpus* dev = nullptr);

std::vector<Prediction> predict_corpus(const Model& model, const Corpus& corpus,
                                       const ExternalEmbeddings* ext = nullptr);

}  // namespace vrdrelex
