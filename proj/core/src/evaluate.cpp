#include "vrdrelex/evaluate.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "vrdrelex/errors.hpp"

namespace vrdrelex {

EvalReport evaluate_relations(const std::vector<Prediction>& preds, const Corpus& gold) {
  std::map<std::string, const Prediction*> by_id;
  for (const auto& p : preds) {
    if (!by_id.emplace(p.doc_id, &p).second) {
      throw ValidationError("duplicate predictions for document " + p.doc_id);
    }
  }

  EvalReport report;
  std::set<std::string> gold_ids;
  for (const auto& doc : gold.docs) {
    gold_ids.insert(doc.doc_id);
    auto it = by_id.find(doc.doc_id);
    if (it == by_id.end()) {
      throw ValidationError("missing predictions for document " + doc.doc_id);
    }
    std::set<RelationLink> gold_links(doc.links.begin(), doc.links.end());
    std::set<RelationLink> pred_links;
    for (const auto& l : it->second->links) {
      if (l.head == 0) continue;  // pseudo-root links never count
      pred_links.insert(l);
    }
    DocEval d;
    d.doc_id = doc.doc_id;
    d.gold = gold_links.size();
    d.predicted = pred_links.size();
    for (const auto& l : pred_links) d.correct += gold_links.count(l);
    report.gold += d.gold;
    report.predicted += d.predicted;
    report.correct += d.correct;
    report.per_doc.push_back(std::move(d));
  }
  for (const auto& p : preds) {
    if (!gold_ids.count(p.doc_id)) {
      throw ValidationError("predictions for unknown document " + p.doc_id);
    }
  }

  report.precision =
      report.predicted ? static_cast<double>(report.correct) / static_cast<double>(report.predicted) : 0.0;
  report.recall =
      report.gold ? static_cast<double>(report.correct) / static_cast<double>(report.gold) : 0.0;
  report.f1 = (report.precision + report.recall) > 0.0
                  ? 2.0 * report.precision * report.recall / (report.precision + report.recall)
                  : 0.0;
  return report;
}

double label_accuracy(const Corpus& corpus) {
  std::size_t both = 0, agree = 0;
  for (const auto& doc : corpus.docs) {
    for (const auto& e : doc.entities) {
      if (e.gold_label && e.auto_label) {
        ++both;
        if (*e.gold_label == *e.auto_label) ++agree;
      }
    }
  }
  return both ? static_cast<double>(agree) / static_cast<double>(both) : 0.0;
}

nlohmann::json report_to_json(const EvalReport& r) {
  nlohmann::json per_doc = nlohmann::json::array();
  for (const auto& d : r.per_doc) {
    per_doc.push_back({{"doc_id", d.doc_id},
                       {"gold", d.gold},
                       {"predicted", d.predicted},
                       {"correct", d.correct}});
  }
  nlohmann::json j{{"precision", r.precision}, {"recall", r.recall},     {"f1", r.f1},
                   {"gold", r.gold},           {"predicted", r.predicted}, {"correct", r.correct},
                   {"per_doc", per_doc}};
  if (r.label_accuracy) j["label_accuracy"] = *r.label_accuracy;
  return j;
}

void write_report(const EvalReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  out << report_to_json(report).dump(2) << '\n';
}

void write_predictions(const std::vector<Prediction>& preds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  for (const auto& p : preds) {
    nlohmann::json links = nlohmann::json::array();
    for (const auto& l : p.links) links.push_back({l.head, l.dependent});
    out << nlohmann::json{{"doc_id", p.doc_id}, {"mode", to_string(p.mode)}, {"links", links}}.dump()
        << '\n';
  }
}

std::vector<Prediction> read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::vector<Prediction> preds;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Prediction p;
      p.doc_id = j.at("doc_id").get<std::string>();
      p.mode = decoder_mode_from_string(j.at("mode").get<std::string>());
      for (const auto& jl : j.at("links")) {
        p.links.push_back({jl.at(0).get<int>(), jl.at(1).get<int>()});
      }
      std::sort(p.links.begin(), p.links.end());
      preds.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return preds;
}

}  // namespace vrdrelex
