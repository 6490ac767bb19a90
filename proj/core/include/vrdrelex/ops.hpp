#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vrdrelex/tensor.hpp"

namespace vrdrelex {

// Elementwise / linear algebra ------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b);            // same shape
Tensor add_scalar(const Tensor& a, const Tensor& s);      // s is scalar, broadcast
Tensor scale(const Tensor& a, double c);
Tensor matmul(const Tensor& a, const Tensor& b);          // (m,k) x (k,n)
Tensor transpose(const Tensor& a);                        // 2-D
Tensor reshape(const Tensor& a, Shape shape);             // same element count

// Shape assembly --------------------------------------------------------------

Tensor concat(std::span<const Tensor> parts);             // 1-D vectors
Tensor concat_rows(std::span<const Tensor> parts);        // 1-D = one row; 2-D stacked
Tensor concat_cols(std::span<const Tensor> parts);        // 2-D, equal row counts

// Activations -----------------------------------------------------------------

Tensor leaky_relu(const Tensor& a, double negative_slope);
Tensor sigmoid(const Tensor& a);
// axis 1: each row sums to 1; axis 0: each column sums to 1. 1-D uses axis 0.
Tensor softmax(const Tensor& a, int axis);

// Reductions ------------------------------------------------------------------

Tensor sum_all(const Tensor& a);
Tensor mean_all(const Tensor& a);

// Embedding lookups -----------------------------------------------------------

Tensor embedding_row(const Tensor& table, std::size_t row);
// Mean of the selected rows; duplicate indices accumulate, per mean-pooling.
Tensor rows_mean(const Tensor& table, const std::vector<std::size_t>& rows);

// Broadcast adds over a matrix ------------------------------------------------

Tensor add_row_broadcast(const Tensor& m, const Tensor& v);  // v has cols entries
Tensor add_col_broadcast(const Tensor& m, const Tensor& v);  // v has rows entries

// Graph-encoder kernels ---------------------------------------------------

// H[i*n+j] = [E_i | R_{i*n+j} | E_j]: the neighbour-pair feature rows.
Tensor pairwise_concat(const Tensor& entities, const Tensor& edges);
// out_i = sum_j A[i][j] * M[i*n+j]: attention-weighted aggregation.
Tensor attention_aggregate(const Tensor& attention, const Tensor& messages);

// Losses ------------------------------------------------------------------

// Cross entropy per column of `scores` (m candidates x n decisions),
// softmax over the unmasked rows of each column, averaged over columns.
// mask[i*n + j] true means candidate i is excluded for decision j.
// gold[j] must be a valid unmasked row.
Tensor masked_softmax_ce_cols(const Tensor& scores, const std::vector<std::uint8_t>& mask,
                              const std::vector<int>& gold);

// Cross entropy per row, averaged over rows with gold >= 0.
Tensor softmax_ce_rows(const Tensor& logits, const std::vector<int>& gold);

// Mean sigmoid binary cross entropy over unmasked cells; targets in {0,1}.
Tensor bce_with_logits(const Tensor& scores, const std::vector<double>& targets,
                       const std::vector<std::uint8_t>& mask);

// Numerically stable helpers used by the losses and the decoders.
double stable_sigmoid(double x);

}  // namespace vrdrelex
