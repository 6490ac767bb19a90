#pragma once

#include <map>
#include <string>
#include <vector>

#include "vrdrelex/document.hpp"

namespace vrdrelex {

// Lowercased whitespace tokens of an entity's word group; punctuation
// stays attached to its word.
std::vector<std::string> tokenize(const SemanticEntity& entity);

// Token -> index map. Index 0 is padding, 1 the unknown token; every
// out-of-vocabulary token maps to 1. Tokens are ordered by descending
// corpus frequency (ties lexicographic), so builds are deterministic.
class Vocabulary {
 public:
  Vocabulary();

  static Vocabulary build(const Corpus& corpus, std::size_t min_frequency = 1);
  static Vocabulary from_tokens(const std::vector<std::string>& tokens_in_index_order);

  std::size_t id_of(const std::string& token) const;  // kUnk when absent
  std::size_t size() const { return tokens_.size(); }  // includes pad + unk
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::vector<std::size_t> encode(const SemanticEntity& entity) const;

  static constexpr std::size_t kPad = 0;
  static constexpr std::size_t kUnk = 1;

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace vrdrelex
