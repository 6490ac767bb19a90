#pragma once

#include <map>
#include <string>
#include <vector>

#include "vrdrelex/tensor.hpp"

namespace vrdrelex {

// Parameters sharing one learning rate. The two-rate scheme (pretrained
// encoder vs everything else) maps onto two groups.
struct ParamGroup {
  std::string name;
  std::vector<Tensor> tensors;
  double learning_rate = 1e-2;
};

// L2 norm over every grad coordinate in the groups.
double global_grad_norm(const std::vector<ParamGroup>& groups);

// Scales all grads so the global norm is at most max_norm. Off when
// max_norm <= 0.
void clip_gradients(std::vector<ParamGroup>& groups, double max_norm);

// Adam with bias correction. Moment state persists across steps and is
// keyed by parameter node, so groups can be rebuilt freely.
class Adam {
 public:
  Adam(double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  // Applies one update from the accumulated grads, then zeroes them.
  void step(std::vector<ParamGroup>& groups);

  std::size_t steps_taken() const { return steps_; }

 private:
  struct Moments {
    std::vector<double> m;
    std::vector<double> v;
  };
  double beta1_, beta2_, eps_;
  std::size_t steps_ = 0;
  std::map<const detail::Node*, Moments> state_;
};

}  // namespace vrdrelex
