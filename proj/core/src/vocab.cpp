#include "vrdrelex/vocab.hpp"

#include <algorithm>
#include <cctype>

#include "vrdrelex/errors.hpp"

namespace vrdrelex {

std::vector<std::string> tokenize(const SemanticEntity& entity) {
  std::vector<std::string> out;
  for (const auto& word : entity.words) {
    std::string cur;
    for (char ch : word) {
      if (std::isspace(static_cast<unsigned char>(ch))) {
        if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
      } else {
        cur += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
  }
  return out;
}

Vocabulary::Vocabulary() : tokens_{"<pad>", "<unk>"} {
  index_["<pad>"] = kPad;
  index_["<unk>"] = kUnk;
}

Vocabulary Vocabulary::build(const Corpus& corpus, std::size_t min_frequency) {
  std::map<std::string, std::size_t> freq;
  for (const auto& doc : corpus.docs) {
    for (const auto& e : doc.entities) {
      for (auto& tok : tokenize(e)) ++freq[tok];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> items;
  for (auto& [tok, f] : freq) {
    if (f >= min_frequency) items.emplace_back(tok, f);
  }
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocabulary v;
  for (auto& [tok, f] : items) {
    v.index_[tok] = v.tokens_.size();
    v.tokens_.push_back(tok);
  }
  return v;
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens_in_index_order) {
  if (tokens_in_index_order.size() < 2 || tokens_in_index_order[0] != "<pad>" ||
      tokens_in_index_order[1] != "<unk>") {
    throw ArgumentError("Vocabulary::from_tokens: list must start with <pad>, <unk>");
  }
  Vocabulary v;
  v.tokens_.clear();
  v.index_.clear();
  for (const auto& tok : tokens_in_index_order) {
    if (v.index_.count(tok)) throw ArgumentError("Vocabulary::from_tokens: duplicate token " + tok);
    v.index_[tok] = v.tokens_.size();
    v.tokens_.push_back(tok);
  }
  return v;
}

std::size_t Vocabulary::id_of(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

std::vector<std::size_t> Vocabulary::encode(const SemanticEntity& entity) const {
  std::vector<std::size_t> ids;
  for (const auto& tok : tokenize(entity)) ids.push_back(id_of(tok));
  return ids;
}

}  // namespace vrdrelex
