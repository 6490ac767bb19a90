#include "vrdrelex/document.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "vrdrelex/errors.hpp"

namespace vrdrelex {

std::string SemanticEntity::joined_text() const {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

LabelSet::LabelSet() : names_{"unknown"} { index_["unknown"] = 0; }

LabelSet::LabelSet(std::vector<std::string> real_names) : LabelSet() {
  for (auto& name : real_names) {
    if (index_.count(name)) throw ArgumentError("duplicate label name: " + name);
    index_[name] = static_cast<int>(names_.size());
    names_.push_back(std::move(name));
  }
}

int LabelSet::id_of(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

const std::string& LabelSet::name_of(int id) const {
  if (id < 0 || id >= static_cast<int>(names_.size())) {
    throw ArgumentError("label id out of range: " + std::to_string(id));
  }
  return names_[static_cast<std::size_t>(id)];
}

const SemanticEntity* Document::find_entity(int id) const {
  for (const auto& e : entities) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

std::size_t Document::entity_index(int id) const {
  for (std::size_t i = 0; i < entities.size(); ++i) {
    if (entities[i].id == id) return i;
  }
  throw ArgumentError("no entity with id " + std::to_string(id) + " in document " + doc_id);
}

namespace {

bool box_ok(const BoundingBox& b) {
  const double eps = 1e-9;
  return std::isfinite(b.x1) && std::isfinite(b.x2) && std::isfinite(b.y1) &&
         std::isfinite(b.y2) && b.x1 <= b.x2 && b.y1 <= b.y2 &&
         b.x1 >= -eps && b.y1 >= -eps && b.x2 <= 1.0 + eps && b.y2 <= 1.0 + eps;
}

}  // namespace

std::vector<Violation> validate(const Document& doc) {
  std::vector<Violation> out;
  std::set<int> ids;
  for (const auto& e : doc.entities) {
    if (!ids.insert(e.id).second) {
      out.push_back({"duplicate-id", "entity id " + std::to_string(e.id)});
    }
    if (e.id == 0) {
      out.push_back({"reserved-id", "entity uses id 0 (pseudo root)"});
    }
    const auto& b = e.box;
    if (b.x1 > b.x2 || b.y1 > b.y2) {
      out.push_back({"inverted-box", "entity " + std::to_string(e.id)});
    } else if (!box_ok(b)) {
      out.push_back({"box-out-of-range", "entity " + std::to_string(e.id)});
    }
  }
  std::set<std::pair<int, int>> seen;
  for (const auto& l : doc.links) {
    if (!ids.count(l.head)) {
      out.push_back({"dangling-link", "head " + std::to_string(l.head)});
    }
    if (!ids.count(l.dependent)) {
      out.push_back({"dangling-link", "dependent " + std::to_string(l.dependent)});
    }
    if (!seen.insert({l.head, l.dependent}).second) {
      out.push_back({"duplicate-link", std::to_string(l.head) + "->" + std::to_string(l.dependent)});
    }
    if (l.head == l.dependent) {
      out.push_back({"self-link", "entity " + std::to_string(l.head)});
    }
  }
  return out;
}

bool is_fatal(const Violation& v) { return v.code != "self-link"; }

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats s;
  s.docs = corpus.docs.size();
  for (const auto& doc : corpus.docs) {
    s.entities += doc.entities.size();
    s.link_pairs += doc.links.size();
    std::map<int, std::size_t> head_count;
    for (const auto& l : doc.links) ++head_count[l.dependent];
    for (const auto& e : doc.entities) {
      auto it = head_count.find(e.id);
      const std::size_t heads = it == head_count.end() ? 0 : it->second;
      if (heads == 0) ++s.zero_head_entities;
      if (heads >= 1) ++s.relations;
      if (heads >= 2) ++s.multi_head_entities;
      if (e.gold_label) {
        ++s.label_histogram[corpus.labels.name_of(*e.gold_label)];
      }
    }
  }
  return s;
}

Corpus reintern_labels(const Corpus& corpus, const LabelSet& target) {
  if (corpus.labels == target) return corpus;
  Corpus out = corpus;
  out.labels = target;
  auto remap = [&](std::optional<int>& label) {
    if (!label) return;
    const int id = target.id_of(corpus.labels.name_of(*label));
    label = id < 0 ? LabelSet::kUnknown : id;
  };
  for (auto& doc : out.docs) {
    for (auto& e : doc.entities) {
      remap(e.gold_label);
      remap(e.auto_label);
    }
  }
  return out;
}

}  // namespace vrdrelex
