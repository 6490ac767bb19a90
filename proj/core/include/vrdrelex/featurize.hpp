#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "vrdrelex/document.hpp"
#include "vrdrelex/ops.hpp"
#include "vrdrelex/vocab.hpp"

namespace vrdrelex {

// Symmetric box-gap features: per axis, the smaller of the two
// range-to-range absolute gaps. For i = j this degenerates to the box
// width/height, which is kept as-is.
struct EdgeFeatures {
  double x = 0.0;
  double y = 0.0;
};

EdgeFeatures edge_features(const BoundingBox& a, const BoundingBox& b);

// Dense (n*n, 2) feature matrix over ordered box pairs, row p = i*n + j.
Tensor edge_feature_matrix(const std::vector<BoundingBox>& boxes);

struct GeometryFeatures {
  double width = 0.0;
  double height = 0.0;
  std::size_t char_count = 0;  // length of the space-joined word group
};

GeometryFeatures geometry_features(const SemanticEntity& entity);

inline constexpr std::size_t kWidthBuckets = 20;   // uniform on [0,1]
inline constexpr std::size_t kHeightBuckets = 20;  // uniform on [0,1]
inline constexpr std::size_t kCharBuckets = 10;    // {1,2,3,4,5,6-10,11-20,21-50,51-100,>100}

std::size_t width_bucket(double w);
std::size_t height_bucket(double h);
std::size_t char_bucket(std::size_t count);

// 30-dim geometry embedding: bucket lookups into the three 10-dim tables.
Tensor bucketize_embed(const GeometryFeatures& g, const Tensor& width_table,
                       const Tensor& height_table, const Tensor& char_table);

// Mean of the word vectors of the entity's tokens (Eq.1's b_i when no
// pretrained encoder is plugged in). OOV tokens use the unknown row.
Tensor embed_entity(const SemanticEntity& entity, const Vocabulary& vocab,
                    const Tensor& word_table);

// e_i = b_i (+) l_i.
Tensor attach_label(const Tensor& entity_vec, int label_id, const Tensor& label_table);

// Frozen vectors produced offline by a pretrained encoder, keyed by
// (doc_id, entity_id). JSON lines: {"doc_id":.., "entity_id":.., "vec":[..]}.
class ExternalEmbeddings {
 public:
  static ExternalEmbeddings load(const std::filesystem::path& path);

  // Throws listing (up to 10) missing keys unless every kept entity of
  // every document is covered.
  void check_coverage(const Corpus& corpus) const;

  bool contains(const std::string& doc_id, int entity_id) const;
  const std::vector<double>& vec(const std::string& doc_id, int entity_id) const;
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }

 private:
  std::map<std::pair<std::string, int>, std::vector<double>> vectors_;
  std::size_t dim_ = 0;
};

}  // namespace vrdrelex
