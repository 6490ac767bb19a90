#include "vrdrelex/funsd.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vrdrelex/errors.hpp"

namespace vrdrelex::funsd {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

struct RawEntity {
  int raw_id = 0;
  std::vector<std::string> words;
  double x1, y1, x2, y2;
  std::string label;
  std::vector<std::pair<int, int>> linking;
};

}  // namespace

void normalize_boxes(Document& doc) {
  double mx = 0.0, my = 0.0;
  for (const auto& e : doc.entities) {
    mx = std::max(mx, e.box.x2);
    my = std::max(my, e.box.y2);
  }
  if (mx <= 0.0) mx = 1.0;
  if (my <= 0.0) my = 1.0;
  for (auto& e : doc.entities) {
    e.box.x1 /= mx;
    e.box.x2 /= mx;
    e.box.y1 /= my;
    e.box.y2 /= my;
  }
  doc.page_width = mx;
  doc.page_height = my;
}

Document parse_file(const std::filesystem::path& path, const LabelSet& labels,
                    std::optional<PageDims> page_dims) {
  const json root = read_json(path);
  if (!root.contains("form") || !root["form"].is_array()) {
    throw ParseError(path.string() + ": missing `form` array");
  }

  std::vector<RawEntity> raw;
  raw.reserve(root["form"].size());
  for (const auto& je : root["form"]) {
    try {
      RawEntity r;
      r.raw_id = je.at("id").get<int>();
      const auto& bx = je.at("box");
      r.x1 = bx.at(0).get<double>();
      r.y1 = bx.at(1).get<double>();
      r.x2 = bx.at(2).get<double>();
      r.y2 = bx.at(3).get<double>();
      r.label = je.value("label", "");
      if (je.contains("words")) {
        for (const auto& jw : je["words"]) {
          std::string w = trim(jw.value("text", ""));
          if (!w.empty()) r.words.push_back(std::move(w));
        }
      } else if (!trim(je.value("text", "")).empty()) {
        std::istringstream ss(je.value("text", ""));
        std::string w;
        while (ss >> w) r.words.push_back(w);
      }
      if (je.contains("linking")) {
        for (const auto& jp : je["linking"]) {
          r.linking.emplace_back(jp.at(0).get<int>(), jp.at(1).get<int>());
        }
      }
      raw.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw ParseError(path.string() + ": bad entity record: " + e.what());
    }
  }

  // Renumber 1..n in file order; raw FUNSD ids start at 0, which would
  // collide with the pseudo root.
  std::map<int, int> remap;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!remap.emplace(raw[i].raw_id, static_cast<int>(i) + 1).second) {
      throw ValidationError(path.string() + ": duplicate entity id " +
                            std::to_string(raw[i].raw_id));
    }
  }

  Document doc;
  doc.doc_id = path.stem().string();
  std::set<std::pair<int, int>> pairs;
  for (const auto& r : raw) {
    SemanticEntity e;
    e.id = remap.at(r.raw_id);
    e.words = r.words;
    e.box = {r.x1, r.y1, r.x2, r.y2};
    if (!r.label.empty()) {
      const int id = labels.id_of(r.label);
      if (id < 0) {
        throw ValidationError(path.string() + ": label `" + r.label +
                              "` not in the corpus label set");
      }
      e.gold_label = id;
    }
    doc.entities.push_back(std::move(e));
    for (const auto& [from, to] : r.linking) {
      auto fi = remap.find(from);
      auto ti = remap.find(to);
      if (fi == remap.end() || ti == remap.end()) {
        throw ValidationError(path.string() + ": linking pair [" + std::to_string(from) +
                              "," + std::to_string(to) + "] references a missing entity id");
      }
      pairs.insert({fi->second, ti->second});
    }
  }
  for (const auto& [h, t] : pairs) doc.links.push_back({h, t});
  std::sort(doc.links.begin(), doc.links.end());

  if (page_dims) {
    const auto [w, h] = *page_dims;
    if (w <= 0.0 || h <= 0.0) throw ArgumentError("page dims must be positive");
    for (auto& e : doc.entities) {
      e.box.x1 /= w;
      e.box.x2 /= w;
      e.box.y1 /= h;
      e.box.y2 /= h;
    }
    doc.page_width = w;
    doc.page_height = h;
  } else {
    normalize_boxes(doc);
  }
  return doc;
}

Corpus load_split(const std::filesystem::path& dir, std::optional<PageDims> page_dims) {
  namespace fs = std::filesystem;
  fs::path ann = dir;
  if (fs::is_directory(dir / "annotations")) ann = dir / "annotations";
  if (!fs::is_directory(ann)) throw ParseError("not a directory: " + ann.string());

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(ann)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  if (files.empty()) throw ParseError("no annotation JSON files in " + ann.string());
  std::sort(files.begin(), files.end());

  // First pass: the label set observed across the split.
  std::set<std::string> names;
  for (const auto& f : files) {
    const json root = read_json(f);
    if (!root.contains("form")) continue;
    for (const auto& je : root["form"]) {
      const std::string label = je.value("label", "");
      if (!label.empty()) names.insert(label);
    }
  }

  Corpus corpus;
  corpus.labels = LabelSet(std::vector<std::string>(names.begin(), names.end()));
  corpus.docs.reserve(files.size());
  for (const auto& f : files) {
    corpus.docs.push_back(parse_file(f, corpus.labels, page_dims));
  }
  return corpus;
}

}  // namespace vrdrelex::funsd
