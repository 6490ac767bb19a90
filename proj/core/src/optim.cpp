#include "vrdrelex/optim.hpp"

#include <cmath>

#include "vrdrelex/errors.hpp"

namespace vrdrelex {

double global_grad_norm(const std::vector<ParamGroup>& groups) {
  double sq = 0.0;
  for (const auto& g : groups) {
    for (const auto& t : g.tensors) {
      for (double x : t.grad()) sq += x * x;
    }
  }
  return std::sqrt(sq);
}

void clip_gradients(std::vector<ParamGroup>& groups, double max_norm) {
  if (max_norm <= 0.0) return;
  const double norm = global_grad_norm(groups);
  if (norm <= max_norm) return;
  const double scale = max_norm / norm;
  for (auto& g : groups) {
    for (auto& t : g.tensors) {
      for (double& x : t.grad()) x *= scale;
    }
  }
}

Adam::Adam(double beta1, double beta2, double eps) : beta1_(beta1), beta2_(beta2), eps_(eps) {
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0 || eps <= 0.0) {
    throw ArgumentError("Adam: betas must be in [0,1) and eps positive");
  }
}

void Adam::step(std::vector<ParamGroup>& groups) {
  ++steps_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  for (auto& group : groups) {
    if (group.learning_rate <= 0.0) {
      throw ArgumentError("Adam: learning rate must be positive in group `" + group.name + "`");
    }
    for (auto& t : group.tensors) {
      if (!t.is_param()) throw ArgumentError("Adam: non-parameter tensor in group `" + group.name + "`");
      auto& mom = state_[t.node()];
      if (mom.m.size() != t.size()) {
        mom.m.assign(t.size(), 0.0);
        mom.v.assign(t.size(), 0.0);
      }
      if (t.grad().size() != t.size()) t.zero_grad();
      auto& vals = t.values();
      auto& grads = t.grad();
      for (std::size_t i = 0; i < vals.size(); ++i) {
        const double g = grads[i];
        mom.m[i] = beta1_ * mom.m[i] + (1.0 - beta1_) * g;
        mom.v[i] = beta2_ * mom.v[i] + (1.0 - beta2_) * g * g;
        const double mhat = mom.m[i] / bc1;
        const double vhat = mom.v[i] / bc2;
        vals[i] -= group.learning_rate * mhat / (std::sqrt(vhat) + eps_);
        if (!std::isfinite(vals[i])) {
          throw NumericError("Adam produced a non-finite value in `" + t.name() + "`");
        }
      }
      t.zero_grad();
    }
  }
}

}  // namespace vrdrelex
