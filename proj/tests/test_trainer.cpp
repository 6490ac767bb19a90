#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "vrdrelex/checkpoint.hpp"
#include "vrdrelex/errors.hpp"
#include "vrdrelex/evaluate.hpp"
#include "vrdrelex/synth.hpp"
#include "vrdrelex/trainer.hpp"

using namespace vrdrelex;

namespace {

Corpus synth_corpus(std::uint64_t seed, std::size_t docs) {
  SynthSpec spec;
  spec.seed = seed;
  spec.docs = docs;
  spec.pairs_min = 2;
  spec.pairs_max = 4;
  spec.distractor_ratio = 0.25;
  return generate(spec);
}

TrainConfig tiny_config() {
  TrainConfig cfg;
  cfg.seed = 5;
  cfg.epochs = 3;
  cfg.word_dim = 8;
  cfg.label_dim = 4;
  cfg.gcn_dim = 6;
  cfg.role_dim = 5;
  cfg.geom_dim = 3;
  return cfg;
}

Prediction pred_of(const std::string& doc_id, std::vector<RelationLink> links) {
  Prediction p;
  p.doc_id = doc_id;
  p.mode = DecoderMode::kSingleHead;
  std::sort(links.begin(), links.end());
  p.links = std::move(links);
  return p;
}

}  // namespace

TEST_CASE("evaluate_relations: hand fixture P=0.60 R=0.75 F1=0.666667") {
  Corpus gold;
  gold.labels = LabelSet({"answer", "question"});
  Document d;
  d.doc_id = "doc";
  for (int i = 1; i <= 9; ++i) {
    SemanticEntity e;
    e.id = i;
    e.words = {"w"};
    e.box = {0.05 * i, 0.1, 0.05 * i + 0.02, 0.12};
    d.entities.push_back(e);
  }
  d.links = {{1, 2}, {3, 4}, {5, 6}, {7, 8}};  // 4 gold links
  gold.docs.push_back(d);

  // 5 predictions, 3 correct.
  const auto preds = {pred_of("doc", {{1, 2}, {3, 4}, {5, 6}, {7, 9}, {9, 8}})};
  const EvalReport r = evaluate_relations({preds.begin(), preds.end()}, gold);
  CHECK(r.gold == 4);
  CHECK(r.predicted == 5);
  CHECK(r.correct == 3);
  CHECK(r.precision == doctest::Approx(0.60).epsilon(1e-9));
  CHECK(r.recall == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(r.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-9));

  // Pseudo-root links never change the metrics.
  const auto with_root =
      pred_of("doc", {{1, 2}, {3, 4}, {5, 6}, {7, 9}, {9, 8}, {0, 1}, {0, 3}, {0, 9}});
  const EvalReport r2 = evaluate_relations({with_root}, gold);
  CHECK(r2.precision == r.precision);
  CHECK(r2.recall == r.recall);
  CHECK(r2.f1 == r.f1);

  // All-root predictions: empty precision convention.
  const EvalReport r3 = evaluate_relations({pred_of("doc", {{0, 1}, {0, 2}})}, gold);
  CHECK(r3.precision == 0.0);
  CHECK(r3.recall == 0.0);
  CHECK(r3.f1 == 0.0);

  // Predictions identical to gold.
  const EvalReport r4 = evaluate_relations({pred_of("doc", {{1, 2}, {3, 4}, {5, 6}, {7, 8}})}, gold);
  CHECK(r4.precision == 1.0);
  CHECK(r4.recall == 1.0);
  CHECK(r4.f1 == 1.0);

  CHECK_THROWS_WITH_AS(evaluate_relations({}, gold), doctest::Contains("doc"), ValidationError);
}

TEST_CASE("metric identities hold on real predictions") {
  const Corpus corpus = synth_corpus(41, 6);
  const TrainOutput out = train_model(corpus, tiny_config());
  const auto preds = predict_corpus(out.model, corpus, nullptr);
  const EvalReport r = evaluate_relations(preds, corpus);
  CHECK(r.correct <= std::min(r.gold, r.predicted));
  if (r.precision + r.recall > 0) {
    CHECK(r.f1 ==
          doctest::Approx(2 * r.precision * r.recall / (r.precision + r.recall)).epsilon(1e-12));
  }
  std::size_t gold_sum = 0;
  for (const auto& d : r.per_doc) gold_sum += d.gold;
  CHECK(gold_sum == r.gold);
}

TEST_CASE("training is deterministic given config + seed") {
  const Corpus corpus = synth_corpus(43, 5);
  const TrainConfig cfg = tiny_config();
  const TrainOutput a = train_model(corpus, cfg);
  const TrainOutput b = train_model(corpus, cfg);
  REQUIRE(a.epochs.size() == b.epochs.size());
  for (std::size_t i = 0; i < a.epochs.size(); ++i) {
    CHECK(a.epochs[i].mean_loss == b.epochs[i].mean_loss);
  }
  const auto ra = report_to_json(evaluate_relations(predict_corpus(a.model, corpus, nullptr), corpus));
  const auto rb = report_to_json(evaluate_relations(predict_corpus(b.model, corpus, nullptr), corpus));
  CHECK(ra.dump() == rb.dump());
}

TEST_CASE("checkpoint round-trip: bit-identical predictions, tamper detection") {
  const Corpus corpus = synth_corpus(47, 5);
  const TrainConfig cfg = tiny_config();
  const TrainOutput out = train_model(corpus, cfg);
  const auto before = predict_corpus(out.model, corpus, nullptr);

  const auto path = std::filesystem::temp_directory_path() / "ckpt_test.bin";
  save_checkpoint(out.model, cfg, path);
  const LoadedCheckpoint loaded = load_checkpoint(path);
  CHECK(loaded.train_config.epochs == cfg.epochs);
  CHECK(loaded.model.labels().names() == out.model.labels().names());
  CHECK(loaded.model.vocab().tokens() == out.model.vocab().tokens());

  const auto after = predict_corpus(loaded.model, corpus, nullptr);
  REQUIRE(after.size() == before.size());
  for (std::size_t i = 0; i < after.size(); ++i) {
    CHECK(after[i].links == before[i].links);
  }

  // Flip one payload byte: checksum failure.
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(-64, std::ios::end);
    char b;
    f.read(&b, 1);
    f.seekp(-64, std::ios::end);
    b = static_cast<char>(b ^ 0x40);
    f.write(&b, 1);
  }
  CHECK_THROWS_WITH_AS(load_checkpoint(path), doctest::Contains("checksum"), ParseError);

  // Version mismatch names both versions.
  {
    save_checkpoint(out.model, cfg, path);
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(8);  // right after the magic
    const std::uint32_t bad = 99;
    f.write(reinterpret_cast<const char*>(&bad), sizeof(bad));
  }
  CHECK_THROWS_WITH_AS(load_checkpoint(path), doctest::Contains("99"), ParseError);
  std::filesystem::remove(path);
}

TEST_CASE("config JSON mirrors field names and rejects unknown keys") {
  TrainConfig cfg = tiny_config();
  cfg.mtl = true;
  cfg.grad_clip_norm = 2.5;
  const auto j = to_json(cfg);
  CHECK(j.at("mtl").get<bool>());
  CHECK(j.at("grad_clip_norm").get<double>() == 2.5);
  const TrainConfig back = train_config_from_json(j);
  CHECK(back.mtl == cfg.mtl);
  CHECK(back.grad_clip_norm == cfg.grad_clip_norm);
  CHECK(back.word_dim == cfg.word_dim);

  CHECK_THROWS_WITH_AS(train_config_from_json(nlohmann::json{{"nope", 1}}),
                       doctest::Contains("nope"), ArgumentError);
  CHECK_THROWS_AS(train_config_from_json(nlohmann::json{{"decoder_mode", "bogus"}}),
                  ArgumentError);
}

TEST_CASE("label accuracy compares auto against gold") {
  Corpus corpus = synth_corpus(53, 2);
  for (auto& doc : corpus.docs) {
    for (auto& e : doc.entities) e.auto_label = e.gold_label;
  }
  CHECK(label_accuracy(corpus) == 1.0);
  corpus.docs[0].entities[0].auto_label =
      *corpus.docs[0].entities[0].gold_label == 1 ? 2 : 1;
  CHECK(label_accuracy(corpus) < 1.0);
}

TEST_CASE("predictions JSON round-trips") {
  const auto path = std::filesystem::temp_directory_path() / "preds_test.jsonl";
  const std::vector<Prediction> preds = {pred_of("a", {{0, 1}, {1, 2}}), pred_of("b", {})};
  write_predictions(preds, path);
  const auto back = read_predictions(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].doc_id == "a");
  CHECK(back[0].links == preds[0].links);
  CHECK(back[1].links.empty());
  std::filesystem::remove(path);
}
