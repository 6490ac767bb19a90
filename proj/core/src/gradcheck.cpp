#include "vrdrelex/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "vrdrelex/errors.hpp"
#include "vrdrelex/rng.hpp"

namespace vrdrelex {

std::string GradCheckReport::summary() const {
  std::string out;
  for (const auto& p : params) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-28s coords=%-4zu max_rel_err=%.3e  %s\n", p.name.c_str(),
                  p.coords_checked, p.max_rel_err, p.pass ? "ok" : "FAIL");
    out += buf;
  }
  out += all_pass ? "all gradients pass" : "GRADIENT CHECK FAILED";
  return out;
}

GradCheckReport check_gradients(const std::function<Tensor()>& build_loss,
                                std::vector<Tensor> params, double epsilon, double tolerance,
                                std::uint64_t seed, std::size_t coords_per_tensor) {
  if (epsilon <= 0.0 || tolerance <= 0.0) {
    throw ArgumentError("check_gradients: epsilon and tolerance must be positive");
  }

  for (auto& p : params) p.zero_grad();
  backward(build_loss());
  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (auto& p : params) analytic.push_back(p.grad());

  GradCheckReport report;
  report.epsilon = epsilon;
  report.tolerance = tolerance;
  Rng rng(mix_seed(seed, "gradcheck"));

  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    auto& p = params[pi];
    GradCheckParamReport pr;
    pr.name = p.name().empty() ? ("param" + std::to_string(pi)) : p.name();

    std::vector<std::size_t> coords(p.size());
    for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = i;
    if (coords.size() > coords_per_tensor) {
      rng.shuffle(coords);
      coords.resize(coords_per_tensor);
      std::sort(coords.begin(), coords.end());
    }

    for (std::size_t ci : coords) {
      const double original = p.values()[ci];
      p.values()[ci] = original + epsilon;
      const double fp = build_loss().value();
      p.values()[ci] = original - epsilon;
      const double fm = build_loss().value();
      p.values()[ci] = original;

      const double numeric = (fp - fm) / (2.0 * epsilon);
      const double a = analytic[pi][ci];
      const double rel = std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)});
      pr.max_rel_err = std::max(pr.max_rel_err, rel);
      ++pr.coords_checked;
    }
    pr.pass = pr.max_rel_err <= tolerance;
    report.all_pass = report.all_pass && pr.pass;
    report.params.push_back(std::move(pr));
  }
  return report;
}

}  // namespace vrdrelex
