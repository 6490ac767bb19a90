#pragma once

#include <filesystem>
#include <optional>
#include <utility>

#include "vrdrelex/document.hpp"

namespace vrdrelex::funsd {

using PageDims = std::pair<double, double>;  // width, height in pixels

// Parses one FUNSD annotation file. Entities are renumbered 1..n in file
// order (id 0 stays free for the pseudo root), `linking` pairs [from,to]
// become {head: from, dependent: to} and are deduplicated, boxes are
// normalized by `page_dims` when given, else by the per-axis maxima.
// Empty-text entities are kept; they carry no words.
Document parse_file(const std::filesystem::path& path, const LabelSet& labels,
                    std::optional<PageDims> page_dims = std::nullopt);

// Loads a split directory (either .../annotations or a directory that
// contains an annotations/ subdirectory), in sorted file order. Builds
// the label set from the observed labels.
Corpus load_split(const std::filesystem::path& dir,
                  std::optional<PageDims> page_dims = std::nullopt);

// Rescales boxes so each axis spans [0,1] (divides by per-axis maxima).
// Idempotent: a second pass divides by 1.
void normalize_boxes(Document& doc);

}  // namespace vrdrelex::funsd
