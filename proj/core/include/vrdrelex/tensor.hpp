#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace vrdrelex {

using Shape = std::vector<std::size_t>;

std::string shape_str(const Shape& s);
std::size_t shape_size(const Shape& s);

namespace detail {

struct Node {
  Shape shape;
  std::vector<double> values;
  std::vector<double> grad;  // allocated lazily; persists on parameters
  bool requires_grad = false;
  bool is_param = false;
  std::string name;  // parameters and debugging
  std::vector<std::shared_ptr<Node>> parents;
  // Accumulates this node's grad into the parents' grads.
  std::function<void(Node&)> backprop;

  std::size_t size() const { return values.size(); }
  void ensure_grad() {
    if (grad.size() != values.size()) grad.assign(values.size(), 0.0);
  }
};

}  // namespace detail

// Handle to a node of the computation graph. Copies share the node.
// All math is double precision; every forward op validates shapes and
// rejects non-finite outputs.
class Tensor {
 public:
  Tensor() = default;

  static Tensor constant(Shape shape, std::vector<double> values);
  static Tensor zeros(Shape shape);
  static Tensor scalar(double v);
  static Tensor parameter(std::string name, Shape shape, std::vector<double> init);

  // Low-level op constructor, also the extension point for fused ops.
  // `backprop` may be empty when no parent needs gradients.
  static Tensor from_op(const char* op_name, Shape shape, std::vector<double> values,
                        std::vector<Tensor> parents,
                        std::function<void(detail::Node&)> backprop);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t size() const { return node_->values.size(); }
  std::size_t rows() const;
  std::size_t cols() const;

  const std::vector<double>& values() const { return node_->values; }
  std::vector<double>& values() { return node_->values; }
  double value() const;  // scalar tensors only

  const std::vector<double>& grad() const { return node_->grad; }
  std::vector<double>& grad() { return node_->grad; }
  void zero_grad() { node_->grad.assign(node_->values.size(), 0.0); }

  bool requires_grad() const { return node_->requires_grad; }
  bool is_param() const { return node_->is_param; }
  const std::string& name() const { return node_->name; }

  detail::Node* node() const { return node_.get(); }
  const std::shared_ptr<detail::Node>& node_ptr() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<detail::Node> n) : node_(std::move(n)) {}
  std::shared_ptr<detail::Node> node_;
};

// Reverse-mode sweep from a scalar loss. Parameter grads accumulate
// across calls until zeroed; intermediate grads are reset per call.
void backward(const Tensor& loss);

}  // namespace vrdrelex
