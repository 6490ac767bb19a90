#include "vrdrelex/corpus_json.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vrdrelex/errors.hpp"

namespace vrdrelex::corpus_json {

using nlohmann::json;

void write(const Corpus& corpus, std::ostream& out) {
  for (const auto& doc : corpus.docs) {
    json jd;
    jd["doc_id"] = doc.doc_id;
    jd["page"] = {{"w", doc.page_width}, {"h", doc.page_height}};
    json ents = json::array();
    for (const auto& e : doc.entities) {
      json je;
      je["id"] = e.id;
      je["words"] = e.words;
      je["box"] = {e.box.x1, e.box.y1, e.box.x2, e.box.y2};
      je["gold_label"] = e.gold_label ? json(corpus.labels.name_of(*e.gold_label)) : json(nullptr);
      je["auto_label"] = e.auto_label ? json(corpus.labels.name_of(*e.auto_label)) : json(nullptr);
      ents.push_back(std::move(je));
    }
    jd["entities"] = std::move(ents);
    json links = json::array();
    for (const auto& l : doc.links) links.push_back({l.head, l.dependent});
    jd["links"] = std::move(links);
    jd["format_version"] = kFormatVersion;
    out << jd.dump() << '\n';
  }
}

void write_file(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  write(corpus, out);
}

Corpus read(std::istream& in, const std::string& origin) {
  std::vector<json> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw ParseError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }

  std::set<std::string> names;
  for (const auto& jd : records) {
    for (const auto& je : jd.value("entities", json::array())) {
      for (const char* key : {"gold_label", "auto_label"}) {
        if (je.contains(key) && je[key].is_string()) names.insert(je[key].get<std::string>());
      }
    }
  }

  Corpus corpus;
  corpus.labels = LabelSet(std::vector<std::string>(names.begin(), names.end()));
  for (const auto& jd : records) {
    try {
      if (jd.value("format_version", 0) != kFormatVersion) {
        throw ParseError(origin + ": unsupported corpus format_version " +
                         std::to_string(jd.value("format_version", 0)) + ", expected " +
                         std::to_string(kFormatVersion));
      }
      Document doc;
      doc.doc_id = jd.at("doc_id").get<std::string>();
      doc.page_width = jd.at("page").at("w").get<double>();
      doc.page_height = jd.at("page").at("h").get<double>();
      for (const auto& je : jd.value("entities", json::array())) {
        SemanticEntity e;
        e.id = je.at("id").get<int>();
        e.words = je.at("words").get<std::vector<std::string>>();
        const auto& bx = je.at("box");
        e.box = {bx.at(0).get<double>(), bx.at(1).get<double>(), bx.at(2).get<double>(),
                 bx.at(3).get<double>()};
        if (je.contains("gold_label") && je["gold_label"].is_string()) {
          e.gold_label = corpus.labels.id_of(je["gold_label"].get<std::string>());
        }
        if (je.contains("auto_label") && je["auto_label"].is_string()) {
          e.auto_label = corpus.labels.id_of(je["auto_label"].get<std::string>());
        }
        doc.entities.push_back(std::move(e));
      }
      for (const auto& jl : jd.value("links", json::array())) {
        doc.links.push_back({jl.at(0).get<int>(), jl.at(1).get<int>()});
      }
      std::sort(doc.links.begin(), doc.links.end());
      doc.links.erase(std::unique(doc.links.begin(), doc.links.end()), doc.links.end());
      corpus.docs.push_back(std::move(doc));
    } catch (const json::exception& e) {
      throw ParseError(origin + ": bad document record: " + e.what());
    }
  }
  return corpus;
}

Corpus read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return read(in, path.string());
}

}  // namespace vrdrelex::corpus_json
