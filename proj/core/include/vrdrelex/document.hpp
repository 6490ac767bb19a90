#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vrdrelex {

// Normalized page coordinates: x grows rightward, y grows downward,
// all four values in [0,1] with x1 <= x2 and y1 <= y2.
struct BoundingBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }

  bool operator==(const BoundingBox&) const = default;
};

// A word group plus its box. Entities with no words survive ingestion
// (the corpus statistics count them) but are excluded from model input.
struct SemanticEntity {
  int id = 0;  // document-unique, 1-based; 0 is reserved for the pseudo root
  std::vector<std::string> words;
  BoundingBox box;
  std::optional<int> gold_label;
  std::optional<int> auto_label;

  bool has_text() const { return !words.empty(); }

  // Space-joined word group, the string whose length is the c feature.
  std::string joined_text() const;
};

// Directed link: head is the key entity, dependent the value entity.
struct RelationLink {
  int head = 0;
  int dependent = 0;

  bool operator==(const RelationLink&) const = default;
  auto operator<=>(const RelationLink&) const = default;
};

// Ordered label names. Index 0 is the reserved "unknown" label; real
// labels occupy 1..num_real(). The id<->name mapping is persisted with
// any checkpoint, so it must be stable for a given corpus.
class LabelSet {
 public:
  LabelSet();
  explicit LabelSet(std::vector<std::string> real_names);

  int id_of(const std::string& name) const;  // -1 when unknown name
  const std::string& name_of(int id) const;
  bool contains(const std::string& name) const { return id_of(name) >= 0; }

  std::size_t size() const { return names_.size(); }  // includes "unknown"
  std::size_t num_real() const { return names_.size() - 1; }
  const std::vector<std::string>& names() const { return names_; }

  bool operator==(const LabelSet& other) const { return names_ == other.names_; }

  static constexpr int kUnknown = 0;

 private:
  std::vector<std::string> names_;
  std::map<std::string, int> index_;
};

struct Document {
  std::string doc_id;
  std::vector<SemanticEntity> entities;
  std::vector<RelationLink> links;  // deduplicated, sorted (head, dependent)
  double page_width = 0.0;   // pixels used for normalization
  double page_height = 0.0;
  bool has_pseudo_root = false;  // set on training-instance views only

  const SemanticEntity* find_entity(int id) const;
  std::size_t entity_index(int id) const;  // position in `entities`; throws if absent
};

// Documents plus the label set their label ids refer to.
struct Corpus {
  std::vector<Document> docs;
  LabelSet labels;
};

struct Violation {
  std::string code;  // e.g. "dangling-link", "inverted-box"
  std::string detail;
};

// Machine-readable invariant check; empty result iff the document is
// well formed. Self-links are reported (code "self-link") but treated as
// advisory: FUNSD ships one genuine self-link that the reference
// statistics count.
std::vector<Violation> validate(const Document& doc);

bool is_fatal(const Violation& v);

struct CorpusStats {
  std::size_t docs = 0;
  std::size_t entities = 0;
  // Entities that are the dependent of at least one link. This is the
  // relation count the FUNSD reference tables use (equivalently: links
  // remaining after single-head resolution).
  std::size_t relations = 0;
  std::size_t link_pairs = 0;  // unique (head, dependent) pairs
  std::size_t multi_head_entities = 0;  // dependent in >= 2 links
  std::size_t zero_head_entities = 0;   // dependent in no link
  std::map<std::string, std::size_t> label_histogram;  // gold labels
};

CorpusStats corpus_stats(const Corpus& corpus);

// Re-interns every label id into `target` by name; names absent from
// `target` fall back to the unknown label.
Corpus reintern_labels(const Corpus& corpus, const LabelSet& target);

}  // namespace vrdrelex
