#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vrdrelex/decoder.hpp"
#include "vrdrelex/document.hpp"

namespace vrdrelex {

struct DocEval {
  std::string doc_id;
  std::size_t gold = 0;
  std::size_t predicted = 0;
  std::size_t correct = 0;
};

struct EvalReport {
  double precision = 0.0;  // 0 when nothing predicted
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t gold = 0;
  std::size_t predicted = 0;
  std::size_t correct = 0;
  std::optional<double> label_accuracy;
  std::vector<DocEval> per_doc;
};

// Micro-averaged over the corpus. A predicted (head, dependent) is
// correct iff it appears in the document's gold link set, direction
// sensitive. Pseudo-root links (head 0) are stripped from predictions;
// the gold side is the original multi-head link set, untouched by any
// single-head preprocessing. Missing predictions for a gold document
// are an error.
EvalReport evaluate_relations(const std::vector<Prediction>& preds, const Corpus& gold);

// Fraction of entities whose auto label equals their gold label, over
// entities carrying both.
double label_accuracy(const Corpus& corpus);

nlohmann::json report_to_json(const EvalReport& report);
void write_report(const EvalReport& report, const std::filesystem::path& path);

void write_predictions(const std::vector<Prediction>& preds, const std::filesystem::path& path);
std::vector<Prediction> read_predictions(const std::filesystem::path& path);

}  // namespace vrdrelex
