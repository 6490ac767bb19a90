#pragma once

#include <filesystem>
#include <iosfwd>

#include "vrdrelex/document.hpp"

namespace vrdrelex::corpus_json {

inline constexpr int kFormatVersion = 1;

// Canonical corpus serialization: JSON lines, one document per record:
//   {"doc_id":..., "page":{"w":..,"h":..},
//    "entities":[{"id":..,"words":[..],"box":[x1,y1,x2,y2],
//                 "gold_label":..|null,"auto_label":..|null}, ...],
//    "links":[[head,dependent],...], "format_version":1}
// Labels are written as names so records stay self-describing; ids are
// re-interned against the corpus label set on read.
void write(const Corpus& corpus, std::ostream& out);
void write_file(const Corpus& corpus, const std::filesystem::path& path);

Corpus read(std::istream& in, const std::string& origin = "<stream>");
Corpus read_file(const std::filesystem::path& path);

}  // namespace vrdrelex::corpus_json
