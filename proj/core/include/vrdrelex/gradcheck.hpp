#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vrdrelex/tensor.hpp"

namespace vrdrelex {

struct GradCheckParamReport {
  std::string name;
  std::size_t coords_checked = 0;
  double max_rel_err = 0.0;
  bool pass = true;
};

struct GradCheckReport {
  std::vector<GradCheckParamReport> params;
  double epsilon = 0.0;
  double tolerance = 0.0;
  bool all_pass = true;

  std::string summary() const;
};

// Central finite differences against the analytic gradient.
//
// `build_loss` must rebuild the scalar loss from the *current* parameter
// values (it is re-evaluated after each perturbation). Per parameter, up
// to `coords_per_tensor` coordinates are sampled (all of them when the
// tensor is small); the discrepancy measure is
//   |analytic - numeric| / max(1, |analytic|, |numeric|).
GradCheckReport check_gradients(const std::function<Tensor()>& build_loss,
                                std::vector<Tensor> params, double epsilon = 1e-3,
                                double tolerance = 1e-4, std::uint64_t seed = 0,
                                std::size_t coords_per_tensor = 32);

}  // namespace vrdrelex
