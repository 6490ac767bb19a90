#include "vrdrelex/encoder.hpp"

#include <cmath>

#include "vrdrelex/errors.hpp"

namespace vrdrelex {

namespace {

std::vector<double> xavier(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::vector<double> v(fan_in * fan_out);
  for (auto& x : v) x = rng.uniform_pm(limit);
  return v;
}

}  // namespace

GcnLayerParams GcnLayerParams::init(const std::string& prefix, std::size_t din,
                                    std::size_t node_out, std::size_t edge_out, Rng& rng) {
  GcnLayerParams p;
  p.w_att = Tensor::parameter(prefix + ".w_att", {din, 1}, xavier(din, 1, rng));
  p.w_node = Tensor::parameter(prefix + ".w_node", {din, node_out}, xavier(din, node_out, rng));
  p.b_node = Tensor::parameter(prefix + ".b_node", {node_out}, std::vector<double>(node_out, 0.0));
  p.w_edge = Tensor::parameter(prefix + ".w_edge", {din, edge_out}, xavier(din, edge_out, rng));
  p.b_edge = Tensor::parameter(prefix + ".b_edge", {edge_out}, std::vector<double>(edge_out, 0.0));
  return p;
}

EncoderParams EncoderParams::init(std::size_t entity_dim, std::size_t hidden_dim, Rng& rng) {
  EncoderParams p;
  p.layer1 = GcnLayerParams::init("gcn1", 2 * entity_dim + 2, hidden_dim, hidden_dim, rng);
  p.layer2 = GcnLayerParams::init("gcn2", 3 * hidden_dim, hidden_dim, hidden_dim, rng);
  std::vector<double> root(hidden_dim);
  for (auto& x : root) x = rng.uniform_pm(0.1);
  p.root = Tensor::parameter("root", {hidden_dim}, std::move(root));
  return p;
}

Tensor neighbor_features(const Tensor& e_i, const Tensor& r_ij, const Tensor& e_j) {
  std::vector<Tensor> parts = {e_i, r_ij, e_j};
  return concat(parts);
}

GcnLayerOut gcn_layer(const Tensor& nodes, const Tensor& edges, const GcnLayerParams& params,
                      double leaky_slope) {
  const std::size_t n = nodes.rows();
  if (edges.rows() != n * n) {
    throw ArgumentError("gcn_layer: edges shape " + shape_str(edges.shape()) +
                        " does not match " + std::to_string(n) + " nodes");
  }
  const Tensor h = pairwise_concat(nodes, edges);  // (n*n, 2*dn + de)
  if (h.cols() != params.input_dim()) {
    throw ArgumentError("gcn_layer: pair features dim " + std::to_string(h.cols()) +
                        " vs layer input dim " + std::to_string(params.input_dim()));
  }
  const Tensor logits = reshape(leaky_relu(matmul(h, params.w_att), leaky_slope), {n, n});
  const Tensor attention = softmax(logits, 1);
  const Tensor messages = add_row_broadcast(matmul(h, params.w_node), params.b_node);
  GcnLayerOut out;
  out.attention = attention;
  out.nodes = attention_aggregate(attention, messages);
  out.edges = add_row_broadcast(matmul(h, params.w_edge), params.b_edge);
  return out;
}

EncodedDocument encode_document(const Tensor& reps, const Tensor& edge_feats,
                                const EncoderParams& params, double leaky_slope) {
  const GcnLayerOut l1 = gcn_layer(reps, edge_feats, params.layer1, leaky_slope);
  const GcnLayerOut l2 = gcn_layer(l1.nodes, l1.edges, params.layer2, leaky_slope);
  EncodedDocument out;
  out.nodes = l2.nodes;
  out.edges = l2.edges;
  out.root = params.root;
  return out;
}

}  // namespace vrdrelex
