#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "vrdrelex/checkpoint.hpp"
#include "vrdrelex/corpus_json.hpp"
#include "vrdrelex/errors.hpp"
#include "vrdrelex/evaluate.hpp"
#include "vrdrelex/funsd.hpp"
#include "vrdrelex/gradcheck_suite.hpp"
#include "vrdrelex/labeler.hpp"
#include "vrdrelex/preprocess.hpp"
#include "vrdrelex/synth.hpp"
#include "vrdrelex/trainer.hpp"
#include "vrdrelex/version.hpp"

namespace {

using namespace vrdrelex;

// Exit codes: 0 success, 1 usage, 2 data validation, 3 numerical failure.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

std::uint64_t hash_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    h = fnv1a64({buf, static_cast<std::size_t>(in.gcount())}, h);
  }
  return h;
}

std::string iso_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
  return buf;
}

// Every command that writes an artifact leaves a manifest next to it:
// resolved config, input hashes, seed, version, timings.
class ManifestWriter {
 public:
  ManifestWriter(std::string command, std::uint64_t seed)
      : start_(std::chrono::steady_clock::now()) {
    manifest_["tool_version"] = kVersion;
    manifest_["command"] = std::move(command);
    manifest_["seed"] = seed;
    manifest_["started_at"] = iso_now();
  }

  void add_input(const std::filesystem::path& path) {
    char hex[24];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(hash_file(path)));
    manifest_["inputs"][path.string()] = hex;
  }

  void set_config(const nlohmann::json& cfg) { manifest_["config"] = cfg; }

  void write(const std::filesystem::path& artifact) {
    manifest_["duration_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                                   std::chrono::steady_clock::now() - start_)
                                   .count();
    std::ofstream out(artifact.string() + ".manifest.json");
    out << manifest_.dump(2) << '\n';
  }

 private:
  nlohmann::json manifest_;
  std::chrono::steady_clock::time_point start_;
};

std::uint64_t env_seed_default() {
  if (const char* env = std::getenv("VRD_RELEX_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return 1;
}

// CLI flag > config file > VRD_RELEX_SEED env > built-in default.
struct TrainFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> epochs;
  std::optional<std::string> decoder_mode;
  std::optional<std::string> label_source;
  std::optional<bool> mtl;
  std::optional<double> mtl_lambda;
  std::optional<bool> augment;
  std::optional<double> augment_ratio;
  std::optional<double> lr_main;
  std::optional<double> lr_external;
  std::optional<double> grad_clip_norm;
  std::optional<bool> signed_offsets;
  std::optional<bool> freeze_feature_scorer;
  std::optional<std::size_t> autolabel_k;
  std::optional<std::size_t> autolabel_epochs;
  std::optional<std::string> external;

  TrainConfig resolve() const {
    TrainConfig cfg;
    cfg.seed = env_seed_default();
    if (!config_path.empty()) cfg = load_train_config(config_path);
    if (seed) cfg.seed = *seed;
    if (epochs) cfg.epochs = *epochs;
    if (decoder_mode) cfg.decoder_mode = *decoder_mode;
    if (label_source) cfg.label_source = *label_source;
    if (mtl) cfg.mtl = *mtl;
    if (mtl_lambda) cfg.mtl_lambda = *mtl_lambda;
    if (augment) cfg.augment = *augment;
    if (augment_ratio) cfg.augment_ratio = *augment_ratio;
    if (lr_main) cfg.lr_main = *lr_main;
    if (lr_external) cfg.lr_external = *lr_external;
    if (grad_clip_norm) cfg.grad_clip_norm = *grad_clip_norm;
    if (signed_offsets) cfg.signed_offsets = *signed_offsets;
    if (freeze_feature_scorer) cfg.freeze_feature_scorer = *freeze_feature_scorer;
    if (autolabel_k) cfg.autolabel_k = *autolabel_k;
    if (autolabel_epochs) cfg.autolabel_epochs = *autolabel_epochs;
    if (external) cfg.external_embeddings = *external;
    cfg.validate();
    return cfg;
  }
};

void add_train_flags(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file (TrainConfig field names)");
  cmd->add_option("--seed", f.seed, "RNG seed");
  cmd->add_option("--epochs", f.epochs, "training iterations over the corpus");
  cmd->add_option("--decoder-mode", f.decoder_mode, "single | multi");
  cmd->add_option("--label-source", f.label_source, "gold | auto | none");
  cmd->add_option("--mtl", f.mtl, "joint labeling + relation training");
  cmd->add_option("--mtl-lambda", f.mtl_lambda, "labeling loss weight");
  cmd->add_option("--augment", f.augment, "append a word-dropout copy of the corpus");
  cmd->add_option("--augment-ratio", f.augment_ratio, "word dropout probability");
  cmd->add_option("--lr", f.lr_main, "learning rate for trainable parameters");
  cmd->add_option("--lr-external", f.lr_external, "learning rate for the external-encoder group");
  cmd->add_option("--grad-clip", f.grad_clip_norm, "global grad-norm clip, 0 = off");
  cmd->add_option("--signed-offsets", f.signed_offsets, "add signed center deltas to the feature scorer");
  cmd->add_option("--freeze-feature-scorer", f.freeze_feature_scorer, "pin the feature scorer at zero");
  cmd->add_option("--autolabel-k", f.autolabel_k, "jackknife folds");
  cmd->add_option("--autolabel-epochs", f.autolabel_epochs, "labeler training epochs");
  cmd->add_option("--external", f.external, "external embedding JSONL (overrides word embeddings)");
}

Corpus read_corpus_checked(const std::filesystem::path& path) {
  Corpus corpus = corpus_json::read_file(path);
  for (const auto& doc : corpus.docs) {
    for (const auto& v : validate(doc)) {
      if (is_fatal(v)) {
        throw ValidationError(path.string() + ": " + doc.doc_id + ": " + v.code + " (" +
                              v.detail + ")");
      }
    }
  }
  return corpus;
}

std::optional<ExternalEmbeddings> maybe_external(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return ExternalEmbeddings::load(path);
}

int cmd_ingest(const std::string& funsd_dir, const std::string& out,
               std::optional<double> page_w, std::optional<double> page_h) {
  ManifestWriter manifest("ingest", 0);
  std::optional<funsd::PageDims> dims;
  if (page_w && page_h) dims = funsd::PageDims{*page_w, *page_h};
  const Corpus corpus = funsd::load_split(funsd_dir, dims);
  for (const auto& doc : corpus.docs) {
    for (const auto& v : validate(doc)) {
      if (is_fatal(v)) {
        throw ValidationError(doc.doc_id + ": " + v.code + " (" + v.detail + ")");
      }
      std::cerr << "note: " << doc.doc_id << ": " << v.code << " (" << v.detail << ")\n";
    }
  }
  corpus_json::write_file(corpus, out);
  const CorpusStats s = corpus_stats(corpus);
  std::cout << "ingested " << s.docs << " docs, " << s.entities << " entities, " << s.relations
            << " relations (" << s.link_pairs << " link pairs, " << s.multi_head_entities
            << " multi-head, " << s.zero_head_entities << " zero-head)\n";
  for (const auto& [name, count] : s.label_histogram) {
    std::cout << "  label " << name << ": " << count << "\n";
  }
  manifest.set_config({{"funsd_dir", funsd_dir}});
  manifest.write(out);
  return kExitOk;
}

int cmd_synth(const SynthSpec& spec, const std::string& out) {
  ManifestWriter manifest("synth", spec.seed);
  const Corpus corpus = generate(spec);
  corpus_json::write_file(corpus, out);
  const CorpusStats s = corpus_stats(corpus);
  std::cout << "generated " << s.docs << " docs, " << s.entities << " entities, " << s.relations
            << " relations\n";
  manifest.set_config({{"seed", spec.seed},
                       {"docs", spec.docs},
                       {"pairs_min", spec.pairs_min},
                       {"pairs_max", spec.pairs_max},
                       {"layout", spec.layout},
                       {"distractor_ratio", spec.distractor_ratio},
                       {"box_jitter", spec.box_jitter},
                       {"key_vocab", spec.key_vocab},
                       {"value_vocab", spec.value_vocab}});
  manifest.write(out);
  return kExitOk;
}

int cmd_augment(const std::string& in, const std::string& out, double ratio, std::uint64_t seed) {
  ManifestWriter manifest("augment", seed);
  manifest.add_input(in);
  const Corpus corpus = read_corpus_checked(in);
  const Corpus augmented = augment_corpus(corpus, ratio, seed);
  corpus_json::write_file(augmented, out);
  const CorpusStats s = corpus_stats(augmented);
  std::cout << "augmented corpus: " << s.docs << " docs, " << s.entities << " entities, "
            << s.relations << " relations\n";
  manifest.set_config({{"ratio", ratio}, {"seed", seed}});
  manifest.write(out);
  return kExitOk;
}

int cmd_autolabel(const TrainFlags& flags, const std::string& train_path,
                  const std::string& out_train, const std::string& test_path,
                  const std::string& out_test) {
  const TrainConfig cfg = flags.resolve();
  ManifestWriter manifest("autolabel", cfg.seed);
  manifest.add_input(train_path);
  const Corpus train = read_corpus_checked(train_path);
  const auto ext = maybe_external(cfg.external_embeddings);
  const AutoLabelOptions opts = autolabel_options_from(cfg, ext ? ext->dim() : 0);

  const Corpus labeled = jackknife_autolabel(train, opts, ext ? &*ext : nullptr);
  corpus_json::write_file(labeled, out_train);
  std::cout << "train auto-label accuracy vs gold: " << label_accuracy(labeled) << "\n";
  manifest.set_config(to_json(cfg));
  manifest.write(out_train);

  if (!test_path.empty()) {
    ManifestWriter test_manifest("autolabel", cfg.seed);
    test_manifest.add_input(train_path);
    test_manifest.add_input(test_path);
    const Corpus test = read_corpus_checked(test_path);
    const Corpus test_labeled =
        autolabel_with_full_train(train, test, opts, ext ? &*ext : nullptr);
    corpus_json::write_file(test_labeled, out_test);
    std::cout << "test auto-label accuracy vs gold: " << label_accuracy(test_labeled) << "\n";
    test_manifest.set_config(to_json(cfg));
    test_manifest.write(out_test);
  }
  return kExitOk;
}

int cmd_train(const TrainFlags& flags, const std::string& train_path, const std::string& dev_path,
              const std::string& model_out, const std::string& metrics_out) {
  const TrainConfig cfg = flags.resolve();
  ManifestWriter manifest("train", cfg.seed);
  manifest.add_input(train_path);
  const Corpus train = read_corpus_checked(train_path);
  std::optional<Corpus> dev;
  if (!dev_path.empty()) {
    manifest.add_input(dev_path);
    dev = read_corpus_checked(dev_path);
  }
  const auto ext = maybe_external(cfg.external_embeddings);

  const TrainOutput out =
      train_model(train, cfg, ext ? &*ext : nullptr, &std::cout, dev ? &*dev : nullptr);
  save_checkpoint(out.model, cfg, model_out);
  manifest.set_config(to_json(cfg));
  manifest.write(model_out);

  if (!metrics_out.empty()) {
    nlohmann::json epochs = nlohmann::json::array();
    for (const auto& e : out.epochs) {
      nlohmann::json je{{"epoch", e.epoch}, {"loss", e.mean_loss}};
      if (e.dev_f1) je["dev_f1"] = *e.dev_f1;
      epochs.push_back(std::move(je));
    }
    nlohmann::json j{{"epochs", epochs}};
    if (dev) {
      const auto preds = predict_corpus(out.model, *dev, ext ? &*ext : nullptr);
      j["dev"] = report_to_json(evaluate_relations(preds, *dev));
    }
    std::ofstream mo(metrics_out);
    mo << j.dump(2) << '\n';
  }
  std::cout << "checkpoint written to " << model_out << "\n";
  return kExitOk;
}

int cmd_predict(const std::string& model_path, const std::string& corpus_path,
                const std::string& out, const std::string& external_override) {
  const LoadedCheckpoint loaded = load_checkpoint(model_path);
  ManifestWriter manifest("predict", loaded.train_config.seed);
  manifest.add_input(model_path);
  manifest.add_input(corpus_path);
  const Corpus corpus = read_corpus_checked(corpus_path);
  const std::string ext_path = external_override.empty()
                                   ? loaded.train_config.external_embeddings
                                   : external_override;
  const auto ext = maybe_external(loaded.model.config().external_dim > 0 ? ext_path : "");
  const auto preds = predict_corpus(loaded.model, corpus, ext ? &*ext : nullptr);
  write_predictions(preds, out);
  std::size_t links = 0;
  for (const auto& p : preds) links += p.links.size();
  std::cout << "predicted " << links << " links over " << preds.size() << " docs\n";
  manifest.set_config(to_json(loaded.train_config));
  manifest.write(out);
  return kExitOk;
}

int cmd_eval(const std::string& pred_path, const std::string& gold_path, const std::string& out) {
  const auto preds = read_predictions(pred_path);
  const Corpus gold = read_corpus_checked(gold_path);
  EvalReport report = evaluate_relations(preds, gold);
  report.label_accuracy = label_accuracy(gold) > 0.0
                              ? std::optional<double>(label_accuracy(gold))
                              : std::nullopt;
  std::cout << "precision " << report.precision << " recall " << report.recall << " f1 "
            << report.f1 << " (gold " << report.gold << ", predicted " << report.predicted
            << ", correct " << report.correct << ")\n";
  if (!out.empty()) {
    ManifestWriter manifest("eval", 0);
    manifest.add_input(pred_path);
    manifest.add_input(gold_path);
    write_report(report, out);
    manifest.write(out);
  }
  return kExitOk;
}

int cmd_gradcheck(std::uint64_t seed, double eps, double tol) {
  const auto results = run_gradcheck_suite(seed, eps, tol);
  for (const auto& [name, report] : results) {
    double worst = 0.0;
    for (const auto& p : report.params) worst = std::max(worst, p.max_rel_err);
    std::cout << (report.all_pass ? "[ok]   " : "[FAIL] ") << name << " (max rel err " << worst
              << ")\n";
    if (!report.all_pass) std::cout << report.summary() << "\n";
  }
  if (!suite_all_pass(results)) {
    std::cout << "gradient check FAILED\n";
    return kExitNumeric;
  }
  std::cout << "all passed (eps " << eps << ", tol " << tol << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Layout-aware relation extraction for visually rich documents"};
  app.set_version_flag("--version", std::string(vrdrelex::kVersion));
  app.require_subcommand(1);

  // ingest
  std::string funsd_dir, out_path;
  std::optional<double> page_w, page_h;
  auto* ingest = app.add_subcommand("ingest", "FUNSD annotation directory -> canonical corpus");
  ingest->add_option("--funsd", funsd_dir, "split directory (contains annotations/)")->required();
  ingest->add_option("--out", out_path, "output corpus JSONL")->required();
  ingest->add_option("--page-width", page_w, "page width in pixels");
  ingest->add_option("--page-height", page_h, "page height in pixels");

  // synth
  SynthSpec synth_spec;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "generate a synthetic key/value corpus");
  synth->add_option("--out", synth_out, "output corpus JSONL")->required();
  synth->add_option("--seed", synth_spec.seed, "RNG seed");
  synth->add_option("--docs", synth_spec.docs, "number of documents");
  synth->add_option("--pairs-min", synth_spec.pairs_min, "min question/answer pairs per doc");
  synth->add_option("--pairs-max", synth_spec.pairs_max, "max question/answer pairs per doc");
  synth->add_option("--layout", synth_spec.layout, "rows | two-column | grid");
  synth->add_option("--distractors", synth_spec.distractor_ratio, "distractors per pair");
  synth->add_option("--jitter", synth_spec.box_jitter, "box jitter in page units");
  synth->add_option("--key-vocab", synth_spec.key_vocab, "distinct question templates");
  synth->add_option("--value-vocab", synth_spec.value_vocab, "distinct answer tokens");

  // augment
  std::string aug_in, aug_out;
  double aug_ratio = 0.2;
  std::uint64_t aug_seed = env_seed_default();
  auto* augment = app.add_subcommand("augment", "append a word-dropout copy of a corpus");
  augment->add_option("--in", aug_in, "input corpus JSONL")->required();
  augment->add_option("--out", aug_out, "output corpus JSONL")->required();
  augment->add_option("--ratio", aug_ratio, "word dropout probability");
  augment->add_option("--seed", aug_seed, "RNG seed");

  // autolabel
  TrainFlags autolabel_flags;
  std::string al_train, al_out_train, al_test, al_out_test;
  auto* autolabel = app.add_subcommand("autolabel", "fill auto labels by k-fold jackknifing");
  autolabel->add_option("--train", al_train, "training corpus JSONL")->required();
  autolabel->add_option("--out-train", al_out_train, "auto-labeled training corpus")->required();
  autolabel->add_option("--test", al_test, "held-out corpus (labeled by a full-train model)");
  autolabel->add_option("--out-test", al_out_test, "auto-labeled held-out corpus");
  add_train_flags(autolabel, autolabel_flags);

  // train
  TrainFlags train_flags;
  std::string train_in, train_dev, train_model_out, train_metrics;
  auto* train = app.add_subcommand("train", "train a relation-extraction model");
  train->add_option("--train", train_in, "training corpus JSONL")->required();
  train->add_option("--dev", train_dev, "evaluation corpus (per-epoch F1)");
  train->add_option("--out", train_model_out, "checkpoint path")->required();
  train->add_option("--metrics", train_metrics, "metrics JSON path");
  add_train_flags(train, train_flags);

  // predict
  std::string pr_model, pr_corpus, pr_out, pr_external;
  auto* predict = app.add_subcommand("predict", "decode links with a trained checkpoint");
  predict->add_option("--model", pr_model, "checkpoint path")->required();
  predict->add_option("--in", pr_corpus, "corpus JSONL")->required();
  predict->add_option("--out", pr_out, "predictions JSONL")->required();
  predict->add_option("--external", pr_external, "external embedding JSONL override");

  // eval
  std::string ev_pred, ev_gold, ev_out;
  auto* eval = app.add_subcommand("eval", "score predictions against gold links");
  eval->add_option("--pred", ev_pred, "predictions JSONL")->required();
  eval->add_option("--gold", ev_gold, "gold corpus JSONL")->required();
  eval->add_option("--out", ev_out, "report JSON path");

  // gradcheck
  std::uint64_t gc_seed = 7;
  double gc_eps = 1e-3, gc_tol = 1e-4;
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient suite");
  gradcheck->add_option("--seed", gc_seed, "fixture seed");
  gradcheck->add_option("--eps", gc_eps, "central-difference step");
  gradcheck->add_option("--tol", gc_tol, "max relative error");

  try {
    app.parse(argc, argv);
    if (*ingest) return cmd_ingest(funsd_dir, out_path, page_w, page_h);
    if (*synth) return cmd_synth(synth_spec, synth_out);
    if (*augment) return cmd_augment(aug_in, aug_out, aug_ratio, aug_seed);
    if (*autolabel) return cmd_autolabel(autolabel_flags, al_train, al_out_train, al_test, al_out_test);
    if (*train) return cmd_train(train_flags, train_in, train_dev, train_model_out, train_metrics);
    if (*predict) return cmd_predict(pr_model, pr_corpus, pr_out, pr_external);
    if (*eval) return cmd_eval(ev_pred, ev_gold, ev_out);
    if (*gradcheck) return cmd_gradcheck(gc_seed, gc_eps, gc_tol);
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
