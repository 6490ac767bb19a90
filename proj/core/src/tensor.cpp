#include "vrdrelex/tensor.hpp"

#include <cmath>
#include <unordered_set>

#include "vrdrelex/errors.hpp"

namespace vrdrelex {

std::string shape_str(const Shape& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + ")";
}

std::size_t shape_size(const Shape& s) {
  std::size_t n = 1;
  for (auto d : s) n *= d;
  return n;
}

namespace {

void check_finite(const char* op_name, const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw NumericError(std::string("non-finite value produced by op `") + op_name + "`");
    }
  }
}

}  // namespace

Tensor Tensor::constant(Shape shape, std::vector<double> values) {
  if (shape_size(shape) != values.size()) {
    throw ArgumentError("constant: shape " + shape_str(shape) + " does not match " +
                        std::to_string(values.size()) + " values");
  }
  check_finite("constant", values);
  auto n = std::make_shared<detail::Node>();
  n->shape = std::move(shape);
  n->values = std::move(values);
  return Tensor(std::move(n));
}

Tensor Tensor::zeros(Shape shape) {
  std::vector<double> v(shape_size(shape), 0.0);
  return constant(std::move(shape), std::move(v));
}

Tensor Tensor::scalar(double v) { return constant({1}, {v}); }

Tensor Tensor::parameter(std::string name, Shape shape, std::vector<double> init) {
  Tensor t = constant(std::move(shape), std::move(init));
  t.node_->requires_grad = true;
  t.node_->is_param = true;
  t.node_->name = std::move(name);
  t.node_->ensure_grad();
  return t;
}

Tensor Tensor::from_op(const char* op_name, Shape shape, std::vector<double> values,
                       std::vector<Tensor> parents,
                       std::function<void(detail::Node&)> backprop) {
  if (shape_size(shape) != values.size()) {
    throw ArgumentError(std::string(op_name) + ": shape " + shape_str(shape) +
                        " does not match value count " + std::to_string(values.size()));
  }
  check_finite(op_name, values);
  auto n = std::make_shared<detail::Node>();
  n->shape = std::move(shape);
  n->values = std::move(values);
  n->name = op_name;
  bool needs = false;
  for (const auto& p : parents) {
    n->parents.push_back(p.node_ptr());
    needs = needs || p.requires_grad();
  }
  if (needs) {
    n->requires_grad = true;
    n->backprop = std::move(backprop);
  } else {
    n->parents.clear();  // forward-only subgraphs are freed eagerly
  }
  return Tensor(std::move(n));
}

std::size_t Tensor::rows() const {
  if (shape().size() != 2) throw ArgumentError("rows(): tensor is not 2-D, shape " + shape_str(shape()));
  return shape()[0];
}

std::size_t Tensor::cols() const {
  if (shape().size() != 2) throw ArgumentError("cols(): tensor is not 2-D, shape " + shape_str(shape()));
  return shape()[1];
}

double Tensor::value() const {
  if (size() != 1) {
    throw ArgumentError("value(): tensor is not scalar, shape " + shape_str(shape()));
  }
  return node_->values[0];
}

void backward(const Tensor& loss) {
  if (!loss.defined() || loss.size() != 1) {
    throw ArgumentError("backward: loss must be a defined scalar tensor");
  }
  if (!loss.requires_grad()) return;

  // Post-order DFS gives a topological order of the subgraph.
  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> visited;
  struct Frame {
    detail::Node* node;
    std::size_t next_parent;
  };
  std::vector<Frame> stack{{loss.node(), 0}};
  visited.insert(loss.node());
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next_parent < f.node->parents.size()) {
      detail::Node* p = f.node->parents[f.next_parent++].get();
      if (p->requires_grad && visited.insert(p).second) {
        stack.push_back({p, 0});
      }
    } else {
      order.push_back(f.node);
      stack.pop_back();
    }
  }

  // Fresh pass for intermediates; parameters keep accumulating.
  for (detail::Node* n : order) {
    if (n->is_param) {
      n->ensure_grad();
    } else {
      n->grad.assign(n->values.size(), 0.0);
    }
  }
  loss.node()->grad[0] += 1.0;

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node* n = *it;
    if (n->backprop) n->backprop(*n);
  }
}

}  // namespace vrdrelex
