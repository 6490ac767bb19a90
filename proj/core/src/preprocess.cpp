#include "vrdrelex/preprocess.hpp"

#include <algorithm>
#include <map>

#include "vrdrelex/errors.hpp"
#include "vrdrelex/rng.hpp"

namespace vrdrelex {

std::size_t TrainInstance::kept_index(int id) const {
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (kept[i] == id) return i;
  }
  throw ArgumentError("entity id " + std::to_string(id) + " is not a kept entity");
}

namespace {

TrainInstance base_instance(const Document& doc) {
  TrainInstance inst;
  inst.doc = &doc;
  for (const auto& e : doc.entities) {
    if (e.has_text()) inst.kept.push_back(e.id);
  }
  inst.reading_order = reading_order(doc);
  return inst;
}

}  // namespace

TrainInstance to_single_head(const Document& doc, std::uint64_t seed) {
  TrainInstance inst = base_instance(doc);
  std::set<int> kept_set(inst.kept.begin(), inst.kept.end());

  // Gold heads per dependent, restricted to usable (kept, non-self) heads.
  std::map<int, std::vector<int>> heads;
  for (const auto& l : doc.links) {
    if (l.head == l.dependent) continue;
    if (!kept_set.count(l.head) || !kept_set.count(l.dependent)) continue;
    heads[l.dependent].push_back(l.head);
  }

  Rng rng(mix_seed(seed, doc.doc_id));
  inst.head_of.reserve(inst.kept.size());
  for (int id : inst.kept) {
    auto it = heads.find(id);
    if (it == heads.end()) {
      inst.head_of.push_back(0);
      continue;
    }
    auto& cands = it->second;
    std::sort(cands.begin(), cands.end());
    inst.head_of.push_back(cands[cands.size() == 1 ? 0 : rng.uniform_index(cands.size())]);
  }
  return inst;
}

TrainInstance to_multi_head(const Document& doc) {
  TrainInstance inst = base_instance(doc);
  inst.has_pseudo_root = false;
  std::set<int> kept_set(inst.kept.begin(), inst.kept.end());
  for (const auto& l : doc.links) {
    if (l.head == l.dependent) continue;
    if (!kept_set.count(l.head) || !kept_set.count(l.dependent)) continue;
    inst.adjacency.insert({l.head, l.dependent});
  }
  return inst;
}

std::vector<int> reading_order(const Document& doc) {
  std::vector<const SemanticEntity*> order;
  order.reserve(doc.entities.size());
  for (const auto& e : doc.entities) order.push_back(&e);
  std::sort(order.begin(), order.end(), [](const SemanticEntity* a, const SemanticEntity* b) {
    if (a->box.y1 != b->box.y1) return a->box.y1 < b->box.y1;
    if (a->box.x1 != b->box.x1) return a->box.x1 < b->box.x1;
    return a->id < b->id;
  });
  std::vector<int> ids;
  ids.reserve(order.size());
  for (const auto* e : order) ids.push_back(e->id);
  return ids;
}

Document augment_word_dropout(const Document& doc, double ratio, std::uint64_t seed) {
  if (ratio < 0.0 || ratio >= 1.0) {
    throw ArgumentError("word-dropout ratio must be in [0,1), got " + std::to_string(ratio));
  }
  Document out = doc;
  out.doc_id = doc.doc_id + "+aug" + std::to_string(seed);
  Rng rng(mix_seed(seed, doc.doc_id));
  for (auto& e : out.entities) {
    if (e.words.empty()) continue;
    std::vector<std::string> kept;
    for (auto& w : e.words) {
      if (!rng.bernoulli(ratio)) kept.push_back(std::move(w));
    }
    if (kept.empty()) {
      // Retention floor: an entity that had words keeps one survivor.
      kept.push_back(e.words[rng.uniform_index(e.words.size())]);
    }
    e.words = std::move(kept);
  }
  return out;
}

Corpus augment_corpus(const Corpus& corpus, double ratio, std::uint64_t seed) {
  Corpus out;
  out.labels = corpus.labels;
  out.docs.reserve(corpus.docs.size() * 2);
  for (const auto& d : corpus.docs) out.docs.push_back(d);
  for (const auto& d : corpus.docs) out.docs.push_back(augment_word_dropout(d, ratio, seed));
  return out;
}

std::vector<std::vector<std::size_t>> split_kfold(std::size_t num_docs, std::size_t k,
                                                  std::uint64_t seed) {
  if (k < 2 || k > num_docs) {
    throw ArgumentError("k must be in [2, num_docs], got k=" + std::to_string(k) +
                        " with " + std::to_string(num_docs) + " docs");
  }
  std::vector<std::size_t> idx(num_docs);
  for (std::size_t i = 0; i < num_docs; ++i) idx[i] = i;
  Rng rng(seed);
  rng.shuffle(idx);
  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t i = 0; i < num_docs; ++i) folds[i % k].push_back(idx[i]);
  return folds;
}

}  // namespace vrdrelex
