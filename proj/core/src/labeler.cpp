#include "vrdrelex/labeler.hpp"

#include <cmath>

#include "vrdrelex/errors.hpp"
#include "vrdrelex/model.hpp"
#include "vrdrelex/optim.hpp"
#include "vrdrelex/preprocess.hpp"

namespace vrdrelex {

namespace {

std::vector<double> xavier(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::vector<double> v(fan_in * fan_out);
  for (auto& x : v) x = rng.uniform_pm(limit);
  return v;
}

}  // namespace

LabelerParams LabelerParams::init(std::size_t input_dim, std::size_t hidden_dim,
                                  std::size_t num_labels, std::size_t geom_dim, Rng& rng) {
  LabelerParams p;
  p.w_hidden = Tensor::parameter("labeler.w_hidden", {input_dim, hidden_dim},
                                 xavier(input_dim, hidden_dim, rng));
  p.b_hidden =
      Tensor::parameter("labeler.b_hidden", {hidden_dim}, std::vector<double>(hidden_dim, 0.0));
  p.w_out = Tensor::parameter("labeler.w_out", {hidden_dim, num_labels},
                              xavier(hidden_dim, num_labels, rng));
  p.b_out = Tensor::parameter("labeler.b_out", {num_labels}, std::vector<double>(num_labels, 0.0));
  auto table = [&rng](const char* name, std::size_t rows, std::size_t cols) {
    std::vector<double> v(rows * cols);
    for (auto& x : v) x = rng.uniform_pm(0.1);
    return Tensor::parameter(name, {rows, cols}, std::move(v));
  };
  p.width_table = table("labeler.width_table", kWidthBuckets, geom_dim);
  p.height_table = table("labeler.height_table", kHeightBuckets, geom_dim);
  p.char_table = table("labeler.char_table", kCharBuckets, geom_dim);
  return p;
}

Tensor label_logits(const Tensor& features, const LabelerParams& params, double leaky_slope) {
  const Tensor hidden = leaky_relu(
      add_row_broadcast(matmul(features, params.w_hidden), params.b_hidden), leaky_slope);
  return add_row_broadcast(matmul(hidden, params.w_out), params.b_out);
}

std::vector<int> argmax_labels(const Tensor& logits) {
  const std::size_t m = logits.rows(), n = logits.cols();
  std::vector<int> out(m);
  for (std::size_t r = 0; r < m; ++r) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < n; ++c) {
      if (logits.values()[r * n + c] > logits.values()[r * n + best]) best = c;
    }
    out[r] = static_cast<int>(best) + 1;  // logit column -> real label id
  }
  return out;
}

Tensor mtl_loss(const Tensor& relation_loss, const Tensor& label_loss, double lambda) {
  if (lambda < 0.0) throw ArgumentError("mtl_loss: lambda must be >= 0");
  if (lambda == 0.0) return relation_loss;
  return add(relation_loss, scale(label_loss, lambda));
}

namespace {

Model train_labeler(const Corpus& corpus, const std::vector<std::size_t>& doc_indices,
                    const AutoLabelOptions& opts, const ExternalEmbeddings* ext) {
  // The labeler ignores relation structure; only featurizer + head train.
  Corpus view;
  view.labels = corpus.labels;
  for (auto i : doc_indices) view.docs.push_back(corpus.docs[i]);

  Vocabulary vocab = Vocabulary::build(view, opts.min_frequency);
  Model model(opts.model, corpus.labels, std::move(vocab), opts.seed);
  std::vector<TrainInstance> instances;
  instances.reserve(view.docs.size());
  for (const auto& d : view.docs) instances.push_back(to_multi_head(d));

  Adam adam(opts.adam_beta1, opts.adam_beta2, opts.adam_eps);
  auto groups = model.labeler_param_groups(opts.learning_rate);
  Rng order_rng(mix_seed(opts.seed, "labeler-epochs"));
  std::vector<std::size_t> order(view.docs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
    order_rng.shuffle(order);
    for (auto di : order) {
      if (instances[di].kept.empty()) continue;
      const Tensor loss = model.label_loss(view.docs[di], instances[di], ext);
      if (!loss.requires_grad()) continue;  // nothing labeled in this doc
      backward(loss);
      adam.step(groups);
    }
  }
  return model;
}

void apply_labels(const Model& model, Document& doc, const ExternalEmbeddings* ext) {
  const TrainInstance inst = to_multi_head(doc);
  if (inst.kept.empty()) return;
  const std::vector<int> predicted = model.predict_labels(doc, inst, ext);
  for (std::size_t i = 0; i < inst.kept.size(); ++i) {
    doc.entities[doc.entity_index(inst.kept[i])].auto_label = predicted[i];
  }
}

}  // namespace

Corpus jackknife_autolabel(const Corpus& train, const AutoLabelOptions& opts,
                           const ExternalEmbeddings* ext) {
  Corpus out = train;
  const auto folds = split_kfold(train.docs.size(), opts.k, opts.seed);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<std::size_t> rest;
    for (std::size_t g = 0; g < folds.size(); ++g) {
      if (g == f) continue;
      rest.insert(rest.end(), folds[g].begin(), folds[g].end());
    }
    std::sort(rest.begin(), rest.end());
    const Model model = train_labeler(train, rest, opts, ext);
    for (auto di : folds[f]) apply_labels(model, out.docs[di], ext);
  }
  return out;
}

Corpus autolabel_with_full_train(const Corpus& train, const Corpus& target,
                                 const AutoLabelOptions& opts, const ExternalEmbeddings* ext) {
  std::vector<std::size_t> all(train.docs.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const Model model = train_labeler(train, all, opts, ext);

  Corpus out = reintern_labels(target, train.labels);
  for (auto& doc : out.docs) {
    for (auto& e : doc.entities) e.auto_label.reset();
    apply_labels(model, doc, ext);
  }
  return out;
}

}  // namespace vrdrelex
