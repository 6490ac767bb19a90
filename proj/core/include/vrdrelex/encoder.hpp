#pragma once

#include <cstdint>
#include <vector>

#include "vrdrelex/ops.hpp"
#include "vrdrelex/rng.hpp"

namespace vrdrelex {

// One graph-convolution layer over pair features h_ij = e_i | r_ij | e_j:
// attention logits from w_att, attended node update through the w_node
// projection, edge update through w_edge.
struct GcnLayerParams {
  Tensor w_att;   // (din, 1)
  Tensor w_node;  // (din, node_out)
  Tensor b_node;  // (node_out)
  Tensor w_edge;  // (din, edge_out)
  Tensor b_edge;  // (edge_out)

  static GcnLayerParams init(const std::string& prefix, std::size_t din, std::size_t node_out,
                             std::size_t edge_out, Rng& rng);
  std::size_t input_dim() const { return w_att.rows(); }
};

struct EncoderParams {
  GcnLayerParams layer1;
  GcnLayerParams layer2;
  Tensor root;  // learned pseudo-root vector, bypasses the GCN

  static EncoderParams init(std::size_t entity_dim, std::size_t hidden_dim, Rng& rng);
};

struct EncodedDocument {
  Tensor nodes;  // (n, hidden)
  Tensor edges;  // (n*n, hidden)
  Tensor root;   // (hidden)
};

// h_ij for a single pair (the batched path uses pairwise_concat).
Tensor neighbor_features(const Tensor& e_i, const Tensor& r_ij, const Tensor& e_j);

struct GcnLayerOut {
  Tensor nodes;
  Tensor edges;
  Tensor attention;  // (n, n), rows sum to 1
};

GcnLayerOut gcn_layer(const Tensor& nodes, const Tensor& edges, const GcnLayerParams& params,
                      double leaky_slope);

// Two stacked layers; `edge_feats` is the (n*n, 2) Eq.-style gap matrix.
EncodedDocument encode_document(const Tensor& reps, const Tensor& edge_feats,
                                const EncoderParams& params, double leaky_slope);

}  // namespace vrdrelex
