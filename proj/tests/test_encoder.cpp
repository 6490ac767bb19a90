#include <doctest.h>

#include <cmath>

#include "vrdrelex/encoder.hpp"
#include "vrdrelex/featurize.hpp"
#include "vrdrelex/rng.hpp"

using namespace vrdrelex;

namespace {

Tensor rand_tensor(Shape shape, Rng& rng, double scale = 0.5) {
  std::vector<double> v(shape_size(shape));
  for (auto& x : v) x = rng.uniform_pm(scale);
  return Tensor::constant(std::move(shape), std::move(v));
}

// Plain-loop recomputation of one GCN layer from raw values.
struct LoopGcn {
  std::vector<double> nodes, edges, attention;
};

LoopGcn loop_gcn(const Tensor& nodes, const Tensor& edges, const GcnLayerParams& p, double slope) {
  const std::size_t n = nodes.rows(), dn = nodes.cols(), de = edges.cols();
  const std::size_t din = 2 * dn + de;
  const std::size_t node_out = p.w_node.cols(), edge_out = p.w_edge.cols();
  auto h_of = [&](std::size_t i, std::size_t j) {
    std::vector<double> h;
    for (std::size_t c = 0; c < dn; ++c) h.push_back(nodes.values()[i * dn + c]);
    for (std::size_t c = 0; c < de; ++c) h.push_back(edges.values()[(i * n + j) * de + c]);
    for (std::size_t c = 0; c < dn; ++c) h.push_back(nodes.values()[j * dn + c]);
    return h;
  };
  LoopGcn out;
  out.attention.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> logits(n);
    for (std::size_t j = 0; j < n; ++j) {
      const auto h = h_of(i, j);
      double a = 0.0;
      for (std::size_t c = 0; c < din; ++c) a += h[c] * p.w_att.values()[c];
      logits[j] = a > 0 ? a : slope * a;
    }
    double mx = logits[0];
    for (double l : logits) mx = std::max(mx, l);
    double z = 0.0;
    for (double l : logits) z += std::exp(l - mx);
    for (std::size_t j = 0; j < n; ++j) out.attention[i * n + j] = std::exp(logits[j] - mx) / z;
  }
  out.nodes.assign(n * node_out, 0.0);
  out.edges.assign(n * n * edge_out, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto h = h_of(i, j);
      for (std::size_t c = 0; c < node_out; ++c) {
        double msg = p.b_node.values()[c];
        for (std::size_t k = 0; k < din; ++k) msg += h[k] * p.w_node.values()[k * node_out + c];
        out.nodes[i * node_out + c] += out.attention[i * n + j] * msg;
      }
      for (std::size_t c = 0; c < edge_out; ++c) {
        double msg = p.b_edge.values()[c];
        for (std::size_t k = 0; k < din; ++k) msg += h[k] * p.w_edge.values()[k * edge_out + c];
        out.edges[(i * n + j) * edge_out + c] = msg;
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("neighbor features: dims, zeros, asymmetry") {
  const Tensor a = Tensor::constant({3}, {1, 2, 3});
  const Tensor b = Tensor::constant({3}, {4, 5, 6});
  const Tensor r = Tensor::constant({2}, {0.1, 0.2});
  const Tensor h = neighbor_features(a, r, b);
  CHECK(h.size() == 8);  // 2 * d_e + 2
  CHECK(h.values() == std::vector<double>{1, 2, 3, 0.1, 0.2, 4, 5, 6});

  const Tensor z = neighbor_features(Tensor::zeros({3}), Tensor::zeros({2}), Tensor::zeros({3}));
  for (double v : z.values()) CHECK(v == 0.0);

  const Tensor hr = neighbor_features(b, r, a);
  CHECK(h.values() != hr.values());
}

TEST_CASE("gcn layer: single node gets attention 1") {
  Rng rng(3);
  const Tensor nodes = rand_tensor({1, 4}, rng);
  const Tensor edges = rand_tensor({1, 2}, rng);
  GcnLayerParams p = GcnLayerParams::init("g", 10, 5, 5, rng);
  const GcnLayerOut out = gcn_layer(nodes, edges, p, 0.1);
  CHECK(out.attention.values()[0] == doctest::Approx(1.0));
}

TEST_CASE("gcn layer: symmetric neighbours split attention evenly") {
  Rng rng(5);
  // Two identical nodes with identical pair features everywhere.
  const Tensor nodes = Tensor::constant({2, 3}, {0.4, -0.2, 0.7, 0.4, -0.2, 0.7});
  const Tensor edges = Tensor::constant({4, 2}, {0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1});
  GcnLayerParams p = GcnLayerParams::init("g", 8, 4, 4, rng);
  const GcnLayerOut out = gcn_layer(nodes, edges, p, 0.1);
  for (std::size_t i = 0; i < 4; ++i) CHECK(out.attention.values()[i] == doctest::Approx(0.5));
  // All-equal inputs give all-equal node outputs.
  for (std::size_t c = 0; c < 4; ++c) {
    CHECK(out.nodes.values()[c] == doctest::Approx(out.nodes.values()[4 + c]));
  }
}

TEST_CASE("gcn layer matches the explicit-loop oracle to 1e-10") {
  Rng rng(11);
  const Tensor nodes = rand_tensor({3, 4}, rng);
  const Tensor edges = rand_tensor({9, 2}, rng, 0.3);
  GcnLayerParams p = GcnLayerParams::init("g", 10, 6, 5, rng);
  const GcnLayerOut fast = gcn_layer(nodes, edges, p, 0.1);
  const LoopGcn slow = loop_gcn(nodes, edges, p, 0.1);
  REQUIRE(fast.nodes.size() == slow.nodes.size());
  for (std::size_t i = 0; i < slow.nodes.size(); ++i) {
    CHECK(fast.nodes.values()[i] == doctest::Approx(slow.nodes[i]).epsilon(1e-10));
  }
  for (std::size_t i = 0; i < slow.edges.size(); ++i) {
    CHECK(fast.edges.values()[i] == doctest::Approx(slow.edges[i]).epsilon(1e-10));
  }
  for (std::size_t i = 0; i < slow.attention.size(); ++i) {
    CHECK(fast.attention.values()[i] == doctest::Approx(slow.attention[i]).epsilon(1e-10));
  }
}

TEST_CASE("attention rows sum to one") {
  Rng rng(13);
  const Tensor nodes = rand_tensor({5, 3}, rng, 2.0);
  const Tensor edges = rand_tensor({25, 2}, rng, 1.0);
  GcnLayerParams p = GcnLayerParams::init("g", 8, 4, 4, rng);
  const GcnLayerOut out = gcn_layer(nodes, edges, p, 0.1);
  for (std::size_t i = 0; i < 5; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < 5; ++j) sum += out.attention.values()[i * 5 + j];
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("encode_document: shapes and permutation equivariance") {
  Rng rng(17);
  const std::size_t n = 4, d_rep = 6, hidden = 5;
  EncoderParams params = EncoderParams::init(d_rep, hidden, rng);

  std::vector<BoundingBox> boxes;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = 0.1 + 0.2 * static_cast<double>(i);
    boxes.push_back({x, 0.1 + 0.05 * static_cast<double>(i), x + 0.1, 0.3});
  }
  const Tensor reps = rand_tensor({n, d_rep}, rng);
  const Tensor feats = edge_feature_matrix(boxes);
  const EncodedDocument enc = encode_document(reps, feats, params, 0.1);
  CHECK(enc.nodes.shape() == Shape{n, hidden});
  CHECK(enc.edges.shape() == Shape{n * n, hidden});
  CHECK(enc.root.shape() == Shape{hidden});

  // Permute entities, encode, un-permute: identical outputs.
  const std::vector<std::size_t> perm = {2, 0, 3, 1};
  std::vector<double> perm_rep(n * d_rep);
  std::vector<BoundingBox> perm_boxes(n);
  for (std::size_t i = 0; i < n; ++i) {
    perm_boxes[i] = boxes[perm[i]];
    for (std::size_t c = 0; c < d_rep; ++c) {
      perm_rep[i * d_rep + c] = reps.values()[perm[i] * d_rep + c];
    }
  }
  const EncodedDocument enc_p = encode_document(Tensor::constant({n, d_rep}, perm_rep),
                                                edge_feature_matrix(perm_boxes), params, 0.1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < hidden; ++c) {
      CHECK(enc_p.nodes.values()[i * hidden + c] ==
            doctest::Approx(enc.nodes.values()[perm[i] * hidden + c]).epsilon(1e-12));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t c = 0; c < hidden; ++c) {
        CHECK(enc_p.edges.values()[(i * n + j) * hidden + c] ==
              doctest::Approx(enc.edges.values()[(perm[i] * n + perm[j]) * hidden + c])
                  .epsilon(1e-12));
      }
    }
  }
}
