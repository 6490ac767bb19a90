#include "vrdrelex/featurize.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "vrdrelex/errors.hpp"

namespace vrdrelex {

EdgeFeatures edge_features(const BoundingBox& a, const BoundingBox& b) {
  EdgeFeatures f;
  f.x = std::min(std::abs(a.x1 - b.x2), std::abs(b.x1 - a.x2));
  f.y = std::min(std::abs(a.y1 - b.y2), std::abs(b.y1 - a.y2));
  return f;
}

Tensor edge_feature_matrix(const std::vector<BoundingBox>& boxes) {
  const std::size_t n = boxes.size();
  std::vector<double> vals(n * n * 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const EdgeFeatures f = edge_features(boxes[i], boxes[j]);
      vals[(i * n + j) * 2] = f.x;
      vals[(i * n + j) * 2 + 1] = f.y;
    }
  }
  return Tensor::constant({n * n, 2}, std::move(vals));
}

GeometryFeatures geometry_features(const SemanticEntity& entity) {
  GeometryFeatures g;
  g.width = entity.box.width();
  g.height = entity.box.height();
  g.char_count = entity.joined_text().size();
  return g;
}

namespace {

std::size_t uniform_bucket(double v, std::size_t buckets) {
  if (v <= 0.0) return 0;
  if (v >= 1.0) return buckets - 1;
  return std::min(buckets - 1, static_cast<std::size_t>(v * static_cast<double>(buckets)));
}

}  // namespace

std::size_t width_bucket(double w) { return uniform_bucket(w, kWidthBuckets); }
std::size_t height_bucket(double h) { return uniform_bucket(h, kHeightBuckets); }

std::size_t char_bucket(std::size_t count) {
  if (count <= 1) return 0;
  if (count <= 5) return count - 1;  // 2,3,4,5 -> 1..4
  if (count <= 10) return 5;
  if (count <= 20) return 6;
  if (count <= 50) return 7;
  if (count <= 100) return 8;
  return 9;
}

Tensor bucketize_embed(const GeometryFeatures& g, const Tensor& width_table,
                       const Tensor& height_table, const Tensor& char_table) {
  std::vector<Tensor> parts = {
      embedding_row(width_table, width_bucket(g.width)),
      embedding_row(height_table, height_bucket(g.height)),
      embedding_row(char_table, char_bucket(g.char_count)),
  };
  return concat(parts);
}

Tensor embed_entity(const SemanticEntity& entity, const Vocabulary& vocab,
                    const Tensor& word_table) {
  const auto ids = vocab.encode(entity);
  if (ids.empty()) {
    throw ArgumentError("embed_entity: entity " + std::to_string(entity.id) + " has no words");
  }
  return rows_mean(word_table, ids);
}

Tensor attach_label(const Tensor& entity_vec, int label_id, const Tensor& label_table) {
  if (label_id < 0 || static_cast<std::size_t>(label_id) >= label_table.rows()) {
    throw ArgumentError("attach_label: label id " + std::to_string(label_id) +
                        " outside the label table " + shape_str(label_table.shape()));
  }
  std::vector<Tensor> parts = {entity_vec, embedding_row(label_table, static_cast<std::size_t>(label_id))};
  return concat(parts);
}

ExternalEmbeddings ExternalEmbeddings::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open external embeddings " + path.string());
  ExternalEmbeddings ext;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    const std::string doc_id = j.at("doc_id").get<std::string>();
    const int entity_id = j.at("entity_id").get<int>();
    std::vector<double> vec = j.at("vec").get<std::vector<double>>();
    if (vec.empty()) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": empty vector");
    }
    if (ext.dim_ == 0) ext.dim_ = vec.size();
    if (vec.size() != ext.dim_) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": dimension " +
                       std::to_string(vec.size()) + " != " + std::to_string(ext.dim_));
    }
    ext.vectors_[{doc_id, entity_id}] = std::move(vec);
  }
  if (ext.vectors_.empty()) throw ParseError(path.string() + ": no embedding records");
  return ext;
}

void ExternalEmbeddings::check_coverage(const Corpus& corpus) const {
  std::vector<std::string> missing;
  for (const auto& doc : corpus.docs) {
    for (const auto& e : doc.entities) {
      if (!e.has_text()) continue;
      if (!contains(doc.doc_id, e.id)) {
        missing.push_back(doc.doc_id + "#" + std::to_string(e.id));
        if (missing.size() >= 10) break;
      }
    }
    if (missing.size() >= 10) break;
  }
  if (!missing.empty()) {
    std::string msg = "external embeddings missing " + std::to_string(missing.size()) +
                      "+ entity keys, first:";
    for (const auto& k : missing) msg += " " + k;
    throw ValidationError(msg);
  }
}

bool ExternalEmbeddings::contains(const std::string& doc_id, int entity_id) const {
  return vectors_.count({doc_id, entity_id}) > 0;
}

const std::vector<double>& ExternalEmbeddings::vec(const std::string& doc_id, int entity_id) const {
  auto it = vectors_.find({doc_id, entity_id});
  if (it == vectors_.end()) {
    throw ValidationError("no external embedding for " + doc_id + "#" + std::to_string(entity_id));
  }
  return it->second;
}

}  // namespace vrdrelex
