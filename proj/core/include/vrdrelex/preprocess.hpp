#pragma once

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "vrdrelex/document.hpp"

namespace vrdrelex {

// A document prepared for training/prediction. Only entities with text
// can be featurized (Eq.1 averages word vectors), so `kept` lists the
// modelable entity ids in document order; the pseudo root is virtual id 0.
struct TrainInstance {
  const Document* doc = nullptr;
  std::vector<int> kept;  // entity ids, document order
  // Single-head mode: gold head id per kept entity (parallel to `kept`);
  // 0 means pseudo root. Multi-head dependents already resolved.
  std::vector<int> head_of;
  // Multi-head mode: gold adjacency among kept entities, self-links excluded.
  std::set<std::pair<int, int>> adjacency;
  std::vector<int> reading_order;  // all entity ids, top-left to bottom-right
  bool has_pseudo_root = true;

  std::size_t kept_index(int id) const;  // position in `kept`; throws if absent
};

// Resolves the single-head constraint: multi-head dependents keep one
// uniformly chosen gold head (seeded via the doc id, so per-document
// streams are independent of traversal order), zero-head entities attach
// to the pseudo root. Self-links never count as a usable head.
TrainInstance to_single_head(const Document& doc, std::uint64_t seed);

// Same view without head resolution; fills `adjacency` instead.
TrainInstance to_multi_head(const Document& doc);

// Entity ids sorted by (y1, x1, id): top-left to bottom-right, stable.
std::vector<int> reading_order(const Document& doc);

// One augmented copy: each word independently dropped with probability
// `ratio`, but an entity that had words always keeps at least one.
// Boxes, labels and links are untouched; doc_id gains "+aug<seed>".
Document augment_word_dropout(const Document& doc, double ratio, std::uint64_t seed);

// Originals followed by one augmented copy of each document.
Corpus augment_corpus(const Corpus& corpus, double ratio, std::uint64_t seed);

// Seeded partition into k folds of near-equal size (difference <= 1).
// Returns document indices per fold.
std::vector<std::vector<std::size_t>> split_kfold(std::size_t num_docs, std::size_t k,
                                                  std::uint64_t seed);

}  // namespace vrdrelex
