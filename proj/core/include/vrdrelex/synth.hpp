#pragma once

#include <cstdint>
#include <string>

#include "vrdrelex/document.hpp"

namespace vrdrelex {

// Deterministic question/answer form generator. Each question entity is
// geometrically adjacent (right-of or below, by layout) to its answer;
// gold links point question -> answer. Distractors share the answer
// vocabulary but link to nothing, so layout is the disambiguating
// signal. Output always passes validate().
struct SynthSpec {
  std::uint64_t seed = 7;
  std::size_t docs = 100;
  std::size_t pairs_min = 4;
  std::size_t pairs_max = 10;
  std::string layout = "rows";  // rows | two-column | grid
  double distractor_ratio = 0.2;  // distractors per pair, rounded
  double box_jitter = 0.0;        // must stay below half the pair gap (0.005)
  std::size_t key_vocab = 50;     // <= the built-in template bank
  std::size_t value_vocab = 200;

  void validate() const;
};

Corpus generate(const SynthSpec& spec);

}  // namespace vrdrelex
