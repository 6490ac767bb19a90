#pragma once

#include <string>
#include <utility>
#include <vector>

#include "vrdrelex/gradcheck.hpp"

namespace vrdrelex {

// Finite-difference checks over one fixture per differentiable stage:
// embedding lookups, the two-layer GCN, role MLPs, the bilinear pair
// scorer, the layout-feature scorer, both losses, the labeling head,
// and the full pipeline end to end.
std::vector<std::pair<std::string, GradCheckReport>> run_gradcheck_suite(
    std::uint64_t seed, double epsilon = 1e-3, double tolerance = 1e-4);

bool suite_all_pass(const std::vector<std::pair<std::string, GradCheckReport>>& results);

}  // namespace vrdrelex
