#include "vrdrelex/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "vrdrelex/errors.hpp"
#include "vrdrelex/rng.hpp"

namespace vrdrelex {

namespace {

constexpr std::array<const char*, 50> kKeyBank = {
    "Date:",         "Name:",         "Total:",        "Amount:",        "Phone:",
    "Fax:",          "Address:",      "City:",         "State:",         "Zip:",
    "Country:",      "Company:",      "Title:",        "Department:",    "Subject:",
    "Reference:",    "Registration No.:", "Invoice No.:", "Order No.:",  "Account No.:",
    "Customer ID:",  "Email:",        "Website:",      "Manager:",       "Contact:",
    "Division:",     "Brand:",        "Product:",      "Quantity:",      "Unit Price:",
    "Tax:",          "Discount:",     "Shipping:",     "Payment:",       "Due Date:",
    "Start Date:",   "End Date:",     "Period:",       "Status:",        "Category:",
    "Type:",         "Region:",       "Market:",       "Code:",          "Batch:",
    "Serial No.:",   "Model:",        "Version:",      "License:",       "Branch:"};

constexpr double kMinGap = 0.01;
constexpr double kMaxGap = 0.04;

std::vector<std::string> split_words(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == ' ') {
      if (!cur.empty()) out.push_back(cur), cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double text_width(const std::string& text, double cap) {
  return std::min(cap, 0.012 + 0.007 * static_cast<double>(text.size()));
}

BoundingBox make_box(double x1, double y1, double w, double h) {
  BoundingBox b;
  b.x1 = std::clamp(x1, 0.0, 0.99);
  b.y1 = std::clamp(y1, 0.0, 0.99);
  b.x2 = std::clamp(x1 + w, b.x1 + 1e-4, 1.0);
  b.y2 = std::clamp(y1 + h, b.y1 + 1e-4, 1.0);
  return b;
}

void jitter_box(BoundingBox& b, double jitter, Rng& rng) {
  if (jitter <= 0.0) return;
  const double dx = rng.uniform_pm(jitter);
  const double dy = rng.uniform_pm(jitter);
  const double w = b.width(), h = b.height();
  b.x1 = std::clamp(b.x1 + dx, 0.0, 1.0 - w);
  b.y1 = std::clamp(b.y1 + dy, 0.0, 1.0 - h);
  b.x2 = b.x1 + w;
  b.y2 = b.y1 + h;
}

}  // namespace

void SynthSpec::validate() const {
  if (docs == 0) throw ArgumentError("synth: docs must be >= 1");
  if (pairs_min == 0 || pairs_min > pairs_max) {
    throw ArgumentError("synth: need 1 <= pairs_min <= pairs_max");
  }
  if (layout != "rows" && layout != "two-column" && layout != "grid") {
    throw ArgumentError("synth: layout must be rows|two-column|grid, got " + layout);
  }
  if (distractor_ratio < 0.0 || distractor_ratio > 1.0) {
    throw ArgumentError("synth: distractor_ratio must be in [0,1]");
  }
  if (box_jitter < 0.0 || box_jitter >= kMinGap / 2.0) {
    throw ArgumentError("synth: box_jitter must be in [0, 0.005) to preserve pair gaps");
  }
  if (key_vocab == 0 || key_vocab > kKeyBank.size()) {
    throw ArgumentError("synth: key_vocab must be in [1, " + std::to_string(kKeyBank.size()) + "]");
  }
  if (value_vocab == 0) throw ArgumentError("synth: value_vocab must be >= 1");
}

Corpus generate(const SynthSpec& spec) {
  spec.validate();
  Corpus corpus;
  corpus.labels = LabelSet({"answer", "other", "question"});
  const int label_answer = corpus.labels.id_of("answer");
  const int label_other = corpus.labels.id_of("other");
  const int label_question = corpus.labels.id_of("question");

  for (std::size_t d = 0; d < spec.docs; ++d) {
    Rng rng(mix_seed(spec.seed, "synth-doc-" + std::to_string(d)));
    const std::size_t pairs =
        spec.pairs_min + (spec.pairs_max > spec.pairs_min
                              ? rng.uniform_index(spec.pairs_max - spec.pairs_min + 1)
                              : 0);
    const std::size_t distractors =
        static_cast<std::size_t>(std::lround(spec.distractor_ratio * static_cast<double>(pairs)));
    const std::size_t slots = pairs + distractors;

    std::vector<std::size_t> slot_order(slots);
    for (std::size_t i = 0; i < slots; ++i) slot_order[i] = i;
    rng.shuffle(slot_order);

    auto value_text = [&rng, &spec]() {
      const std::size_t words = 1 + rng.uniform_index(2);
      std::string text;
      for (std::size_t w = 0; w < words; ++w) {
        if (w) text += ' ';
        text += "v" + std::to_string(rng.uniform_index(spec.value_vocab));
      }
      return text;
    };

    Document doc;
    doc.doc_id = "synth-" + std::to_string(spec.seed) + "-" + std::to_string(d);
    doc.page_width = 1.0;
    doc.page_height = 1.0;
    int next_id = 1;

    // Cell origin per slot, by layout.
    const bool grid = spec.layout == "grid";
    std::size_t cols, per_col;
    double cell_w, cell_h;
    if (spec.layout == "rows") {
      cols = 1, per_col = slots;
      cell_w = 0.94;
      cell_h = 0.94 / static_cast<double>(per_col);
    } else if (spec.layout == "two-column") {
      cols = 2, per_col = (slots + 1) / 2;
      cell_w = 0.47;
      cell_h = 0.94 / static_cast<double>(per_col);
    } else {
      cols = static_cast<std::size_t>(std::max(1.0, std::ceil(std::sqrt(static_cast<double>(slots)))));
      per_col = (slots + cols - 1) / cols;
      cell_w = 0.94 / static_cast<double>(cols);
      cell_h = 0.94 / static_cast<double>(per_col);
    }
    const double box_h = std::min(0.03, cell_h * (grid ? 0.3 : 0.6));

    for (std::size_t s = 0; s < slots; ++s) {
      const std::size_t col = grid ? s % cols : s / per_col;
      const std::size_t row = grid ? s / cols : s % per_col;
      const double cx = 0.03 + static_cast<double>(col) * cell_w;
      const double cy = 0.03 + static_cast<double>(row) * cell_h;
      const double gap = rng.uniform(kMinGap, std::min(kMaxGap, std::max(kMinGap + 1e-6, cell_h * 0.3)));
      const bool is_pair = slot_order[s] < pairs;

      if (is_pair) {
        SemanticEntity q;
        q.id = next_id++;
        q.words = split_words(kKeyBank[rng.uniform_index(spec.key_vocab)]);
        q.gold_label = label_question;

        SemanticEntity a;
        a.id = next_id++;
        a.words = split_words(value_text());
        a.gold_label = label_answer;

        const double qw = text_width(q.joined_text(), grid ? cell_w * 0.8 : cell_w * 0.45);
        const double aw = text_width(a.joined_text(), grid ? cell_w * 0.8 : cell_w * 0.45);
        q.box = make_box(cx, cy, qw, box_h);
        if (grid) {
          a.box = make_box(cx, q.box.y2 + gap, aw, box_h);  // answer below its question
        } else {
          a.box = make_box(q.box.x2 + gap, cy, aw, box_h);  // answer right of its question
        }
        jitter_box(q.box, spec.box_jitter, rng);
        jitter_box(a.box, spec.box_jitter, rng);

        doc.links.push_back({q.id, a.id});
        doc.entities.push_back(std::move(q));
        doc.entities.push_back(std::move(a));
      } else {
        SemanticEntity o;
        o.id = next_id++;
        o.words = split_words(value_text());
        o.gold_label = label_other;
        o.box = make_box(cx + (grid ? 0.0 : cell_w * 0.55), cy + (grid ? cell_h * 0.55 : 0.0),
                         text_width(o.joined_text(), cell_w * 0.4), box_h);
        jitter_box(o.box, spec.box_jitter, rng);
        doc.entities.push_back(std::move(o));
      }
    }
    std::sort(doc.links.begin(), doc.links.end());
    corpus.docs.push_back(std::move(doc));
  }
  return corpus;
}

}  // namespace vrdrelex
