#include "vrdrelex/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Core>

#include "vrdrelex/errors.hpp"

namespace vrdrelex {

namespace {

using EMat = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using EMatMut = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

void require(bool cond, const std::string& msg) {
  if (!cond) throw ArgumentError(msg);
}

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  require(a.shape() == b.shape(), std::string(op) + ": shape mismatch " + shape_str(a.shape()) +
                                      " vs " + shape_str(b.shape()));
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape("add", a, b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] + b.values()[i];
  return Tensor::from_op("add", a.shape(), std::move(out), {a, b}, [](detail::Node& n) {
    for (int p = 0; p < 2; ++p) {
      auto& par = *n.parents[p];
      if (!par.requires_grad) continue;
      par.ensure_grad();
      for (std::size_t i = 0; i < n.size(); ++i) par.grad[i] += n.grad[i];
    }
  });
}

Tensor add_scalar(const Tensor& a, const Tensor& s) {
  require(s.size() == 1, "add_scalar: second operand must be scalar, got " + shape_str(s.shape()));
  std::vector<double> out(a.size());
  const double sv = s.values()[0];
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] + sv;
  return Tensor::from_op("add_scalar", a.shape(), std::move(out), {a, s}, [](detail::Node& n) {
    auto& pa = *n.parents[0];
    auto& ps = *n.parents[1];
    if (pa.requires_grad) {
      pa.ensure_grad();
      for (std::size_t i = 0; i < n.size(); ++i) pa.grad[i] += n.grad[i];
    }
    if (ps.requires_grad) {
      ps.ensure_grad();
      double acc = 0.0;
      for (std::size_t i = 0; i < n.size(); ++i) acc += n.grad[i];
      ps.grad[0] += acc;
    }
  });
}

Tensor scale(const Tensor& a, double c) {
  require(std::isfinite(c), "scale: factor must be finite");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * a.values()[i];
  return Tensor::from_op("scale", a.shape(), std::move(out), {a}, [c](detail::Node& n) {
    auto& p = *n.parents[0];
    p.ensure_grad();
    for (std::size_t i = 0; i < n.size(); ++i) p.grad[i] += c * n.grad[i];
  });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require(a.shape().size() == 2 && b.shape().size() == 2,
          "matmul: operands must be 2-D, got " + shape_str(a.shape()) + " and " + shape_str(b.shape()));
  const std::size_t m = a.shape()[0], k = a.shape()[1], k2 = b.shape()[0], n = b.shape()[1];
  require(k == k2, "matmul: inner dims differ, " + shape_str(a.shape()) + " x " + shape_str(b.shape()));

  std::vector<double> out(m * n);
  {
    EMat ma(a.values().data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
    EMat mb(b.values().data(), static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n));
    EMatMut mo(out.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    mo.noalias() = ma * mb;
  }
  return Tensor::from_op("matmul", {m, n}, std::move(out), {a, b}, [m, k, n](detail::Node& node) {
    auto& pa = *node.parents[0];
    auto& pb = *node.parents[1];
    EMat g(node.grad.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    if (pa.requires_grad) {
      pa.ensure_grad();
      EMat vb(pb.values.data(), static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n));
      EMatMut ga(pa.grad.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
      ga.noalias() += g * vb.transpose();
    }
    if (pb.requires_grad) {
      pb.ensure_grad();
      EMat va(pa.values.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
      EMatMut gb(pb.grad.data(), static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n));
      gb.noalias() += va.transpose() * g;
    }
  });
}

Tensor transpose(const Tensor& a) {
  require(a.shape().size() == 2, "transpose: tensor must be 2-D, got " + shape_str(a.shape()));
  const std::size_t m = a.shape()[0], n = a.shape()[1];
  std::vector<double> out(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = a.values()[i * n + j];
  }
  return Tensor::from_op("transpose", {n, m}, std::move(out), {a}, [m, n](detail::Node& node) {
    auto& p = *node.parents[0];
    p.ensure_grad();
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) p.grad[i * n + j] += node.grad[j * m + i];
    }
  });
}

Tensor reshape(const Tensor& a, Shape shape) {
  require(shape_size(shape) == a.size(), "reshape: element count mismatch, " +
                                             shape_str(a.shape()) + " -> " + shape_str(shape));
  std::vector<double> out = a.values();
  return Tensor::from_op("reshape", std::move(shape), std::move(out), {a}, [](detail::Node& node) {
    auto& p = *node.parents[0];
    p.ensure_grad();
    for (std::size_t i = 0; i < node.size(); ++i) p.grad[i] += node.grad[i];
  });
}

Tensor concat(std::span<const Tensor> parts) {
  require(!parts.empty(), "concat: no inputs");
  std::vector<double> out;
  std::vector<Tensor> parents;
  for (const auto& t : parts) {
    require(t.shape().size() == 1, "concat: inputs must be 1-D, got " + shape_str(t.shape()));
    out.insert(out.end(), t.values().begin(), t.values().end());
    parents.push_back(t);
  }
  const std::size_t total = out.size();
  return Tensor::from_op("concat", {total}, std::move(out), std::move(parents),
                         [](detail::Node& node) {
                           std::size_t off = 0;
                           for (auto& pp : node.parents) {
                             auto& p = *pp;
                             if (p.requires_grad) {
                               p.ensure_grad();
                               for (std::size_t i = 0; i < p.size(); ++i) p.grad[i] += node.grad[off + i];
                             }
                             off += p.size();
                           }
                         });
}

Tensor concat_rows(std::span<const Tensor> parts) {
  require(!parts.empty(), "concat_rows: no inputs");
  std::size_t cols = 0, rows = 0;
  for (const auto& t : parts) {
    const auto& s = t.shape();
    require(s.size() == 1 || s.size() == 2,
            "concat_rows: inputs must be 1-D or 2-D, got " + shape_str(s));
    const std::size_t c = s.size() == 1 ? s[0] : s[1];
    const std::size_t r = s.size() == 1 ? 1 : s[0];
    if (cols == 0) cols = c;
    require(c == cols, "concat_rows: column mismatch, " + std::to_string(c) + " vs " +
                           std::to_string(cols));
    rows += r;
  }
  std::vector<double> out;
  out.reserve(rows * cols);
  std::vector<Tensor> parents;
  for (const auto& t : parts) {
    out.insert(out.end(), t.values().begin(), t.values().end());
    parents.push_back(t);
  }
  return Tensor::from_op("concat_rows", {rows, cols}, std::move(out), std::move(parents),
                         [](detail::Node& node) {
                           std::size_t off = 0;
                           for (auto& pp : node.parents) {
                             auto& p = *pp;
                             if (p.requires_grad) {
                               p.ensure_grad();
                               for (std::size_t i = 0; i < p.size(); ++i) p.grad[i] += node.grad[off + i];
                             }
                             off += p.size();
                           }
                         });
}

Tensor concat_cols(std::span<const Tensor> parts) {
  require(!parts.empty(), "concat_cols: no inputs");
  const std::size_t rows = parts.front().rows();
  std::size_t cols = 0;
  for (const auto& t : parts) {
    require(t.shape().size() == 2 && t.rows() == rows,
            "concat_cols: row mismatch, " + shape_str(t.shape()));
    cols += t.cols();
  }
  std::vector<double> out(rows * cols);
  std::vector<Tensor> parents(parts.begin(), parts.end());
  std::size_t col_off = 0;
  for (const auto& t : parts) {
    const std::size_t c = t.cols();
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy_n(t.values().data() + r * c, c, out.data() + r * cols + col_off);
    }
    col_off += c;
  }
  return Tensor::from_op(
      "concat_cols", {rows, cols}, std::move(out), std::move(parents),
      [rows, cols](detail::Node& node) {
        std::size_t col_off = 0;
        for (auto& pp : node.parents) {
          auto& p = *pp;
          const std::size_t c = p.shape[1];
          if (p.requires_grad) {
            p.ensure_grad();
            for (std::size_t r = 0; r < rows; ++r) {
              for (std::size_t j = 0; j < c; ++j) {
                p.grad[r * c + j] += node.grad[r * cols + col_off + j];
              }
            }
          }
          col_off += c;
        }
      });
}

Tensor leaky_relu(const Tensor& a, double negative_slope) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double x = a.values()[i];
    out[i] = x > 0.0 ? x : negative_slope * x;
  }
  return Tensor::from_op("leaky_relu", a.shape(), std::move(out), {a},
                         [negative_slope](detail::Node& node) {
                           auto& p = *node.parents[0];
                           p.ensure_grad();
                           for (std::size_t i = 0; i < node.size(); ++i) {
                             const double d = p.values[i] > 0.0 ? 1.0 : negative_slope;
                             p.grad[i] += d * node.grad[i];
                           }
                         });
}

double stable_sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Tensor sigmoid(const Tensor& a) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = stable_sigmoid(a.values()[i]);
  return Tensor::from_op("sigmoid", a.shape(), std::move(out), {a}, [](detail::Node& node) {
    auto& p = *node.parents[0];
    p.ensure_grad();
    for (std::size_t i = 0; i < node.size(); ++i) {
      const double s = node.values[i];
      p.grad[i] += s * (1.0 - s) * node.grad[i];
    }
  });
}

namespace {

// Softmax over contiguous groups addressed as base + t*stride, t < len.
void softmax_group(const std::vector<double>& in, std::vector<double>& out, std::size_t base,
                   std::size_t stride, std::size_t len) {
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < len; ++t) mx = std::max(mx, in[base + t * stride]);
  double z = 0.0;
  for (std::size_t t = 0; t < len; ++t) z += std::exp(in[base + t * stride] - mx);
  for (std::size_t t = 0; t < len; ++t) out[base + t * stride] = std::exp(in[base + t * stride] - mx) / z;
}

}  // namespace

Tensor softmax(const Tensor& a, int axis) {
  const auto& s = a.shape();
  require(s.size() == 1 || s.size() == 2, "softmax: tensor must be 1-D or 2-D, got " + shape_str(s));
  require(axis == 0 || axis == 1, "softmax: axis must be 0 or 1");
  if (s.size() == 1) require(axis == 0, "softmax: 1-D tensors use axis 0");

  std::vector<double> out(a.size());
  std::size_t groups, stride, len, group_step;
  if (s.size() == 1) {
    groups = 1, stride = 1, len = s[0], group_step = 0;
  } else if (axis == 1) {  // each row sums to 1
    groups = s[0], stride = 1, len = s[1], group_step = s[1];
  } else {  // each column sums to 1
    groups = s[1], stride = s[1], len = s[0], group_step = 1;
  }
  for (std::size_t g = 0; g < groups; ++g) {
    softmax_group(a.values(), out, g * group_step, stride, len);
  }
  return Tensor::from_op(
      "softmax", s, std::move(out), {a},
      [groups, stride, len, group_step](detail::Node& node) {
        auto& p = *node.parents[0];
        p.ensure_grad();
        for (std::size_t g = 0; g < groups; ++g) {
          const std::size_t base = g * group_step;
          double dot = 0.0;
          for (std::size_t t = 0; t < len; ++t) {
            const std::size_t i = base + t * stride;
            dot += node.grad[i] * node.values[i];
          }
          for (std::size_t t = 0; t < len; ++t) {
            const std::size_t i = base + t * stride;
            p.grad[i] += node.values[i] * (node.grad[i] - dot);
          }
        }
      });
}

Tensor sum_all(const Tensor& a) {
  double acc = 0.0;
  for (double v : a.values()) acc += v;
  return Tensor::from_op("sum_all", {1}, {acc}, {a}, [](detail::Node& node) {
    auto& p = *node.parents[0];
    p.ensure_grad();
    for (std::size_t i = 0; i < p.size(); ++i) p.grad[i] += node.grad[0];
  });
}

Tensor mean_all(const Tensor& a) {
  require(a.size() > 0, "mean_all: empty tensor");
  double acc = 0.0;
  for (double v : a.values()) acc += v;
  const double inv = 1.0 / static_cast<double>(a.size());
  return Tensor::from_op("mean_all", {1}, {acc * inv}, {a}, [inv](detail::Node& node) {
    auto& p = *node.parents[0];
    p.ensure_grad();
    for (std::size_t i = 0; i < p.size(); ++i) p.grad[i] += inv * node.grad[0];
  });
}

Tensor embedding_row(const Tensor& table, std::size_t row) {
  require(table.shape().size() == 2, "embedding_row: table must be 2-D");
  const std::size_t d = table.cols();
  require(row < table.rows(), "embedding_row: row " + std::to_string(row) + " out of range " +
                                  shape_str(table.shape()));
  std::vector<double> out(table.values().begin() + row * d, table.values().begin() + (row + 1) * d);
  return Tensor::from_op("embedding_row", {d}, std::move(out), {table}, [row, d](detail::Node& node) {
    auto& p = *node.parents[0];
    p.ensure_grad();
    for (std::size_t j = 0; j < d; ++j) p.grad[row * d + j] += node.grad[j];
  });
}

Tensor rows_mean(const Tensor& table, const std::vector<std::size_t>& rows) {
  require(table.shape().size() == 2, "rows_mean: table must be 2-D");
  require(!rows.empty(), "rows_mean: empty row list");
  const std::size_t d = table.cols();
  for (auto r : rows) {
    require(r < table.rows(), "rows_mean: row " + std::to_string(r) + " out of range " +
                                  shape_str(table.shape()));
  }
  std::vector<double> out(d, 0.0);
  for (auto r : rows) {
    for (std::size_t j = 0; j < d; ++j) out[j] += table.values()[r * d + j];
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  for (auto& v : out) v *= inv;
  return Tensor::from_op("rows_mean", {d}, std::move(out), {table},
                         [rows, d, inv](detail::Node& node) {
                           auto& p = *node.parents[0];
                           p.ensure_grad();
                           for (auto r : rows) {
                             for (std::size_t j = 0; j < d; ++j) p.grad[r * d + j] += inv * node.grad[j];
                           }
                         });
}

Tensor add_row_broadcast(const Tensor& m, const Tensor& v) {
  require(m.shape().size() == 2 && v.shape().size() == 1,
          "add_row_broadcast: expected 2-D + 1-D, got " + shape_str(m.shape()) + " and " +
              shape_str(v.shape()));
  const std::size_t rows = m.rows(), cols = m.cols();
  require(v.size() == cols, "add_row_broadcast: vector length " + std::to_string(v.size()) +
                                " vs cols " + std::to_string(cols));
  std::vector<double> out(m.size());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] = m.values()[r * cols + c] + v.values()[c];
  }
  return Tensor::from_op("add_row_broadcast", m.shape(), std::move(out), {m, v},
                         [rows, cols](detail::Node& node) {
                           auto& pm = *node.parents[0];
                           auto& pv = *node.parents[1];
                           if (pm.requires_grad) {
                             pm.ensure_grad();
                             for (std::size_t i = 0; i < node.size(); ++i) pm.grad[i] += node.grad[i];
                           }
                           if (pv.requires_grad) {
                             pv.ensure_grad();
                             for (std::size_t r = 0; r < rows; ++r) {
                               for (std::size_t c = 0; c < cols; ++c) pv.grad[c] += node.grad[r * cols + c];
                             }
                           }
                         });
}

Tensor add_col_broadcast(const Tensor& m, const Tensor& v) {
  require(m.shape().size() == 2 && v.shape().size() == 1,
          "add_col_broadcast: expected 2-D + 1-D, got " + shape_str(m.shape()) + " and " +
              shape_str(v.shape()));
  const std::size_t rows = m.rows(), cols = m.cols();
  require(v.size() == rows, "add_col_broadcast: vector length " + std::to_string(v.size()) +
                                " vs rows " + std::to_string(rows));
  std::vector<double> out(m.size());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] = m.values()[r * cols + c] + v.values()[r];
  }
  return Tensor::from_op("add_col_broadcast", m.shape(), std::move(out), {m, v},
                         [rows, cols](detail::Node& node) {
                           auto& pm = *node.parents[0];
                           auto& pv = *node.parents[1];
                           if (pm.requires_grad) {
                             pm.ensure_grad();
                             for (std::size_t i = 0; i < node.size(); ++i) pm.grad[i] += node.grad[i];
                           }
                           if (pv.requires_grad) {
                             pv.ensure_grad();
                             for (std::size_t r = 0; r < rows; ++r) {
                               for (std::size_t c = 0; c < cols; ++c) pv.grad[r] += node.grad[r * cols + c];
                             }
                           }
                         });
}

Tensor pairwise_concat(const Tensor& entities, const Tensor& edges) {
  require(entities.shape().size() == 2, "pairwise_concat: entities must be 2-D");
  require(edges.shape().size() == 2, "pairwise_concat: edges must be 2-D");
  const std::size_t n = entities.rows(), de = entities.cols();
  require(edges.rows() == n * n, "pairwise_concat: edges rows " + std::to_string(edges.rows()) +
                                     " != n*n = " + std::to_string(n * n));
  const std::size_t dr = edges.cols();
  const std::size_t dout = 2 * de + dr;
  std::vector<double> out(n * n * dout);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t p = i * n + j;
      double* row = out.data() + p * dout;
      std::copy_n(entities.values().data() + i * de, de, row);
      std::copy_n(edges.values().data() + p * dr, dr, row + de);
      std::copy_n(entities.values().data() + j * de, de, row + de + dr);
    }
  }
  return Tensor::from_op(
      "pairwise_concat", {n * n, dout}, std::move(out), {entities, edges},
      [n, de, dr, dout](detail::Node& node) {
        auto& pe = *node.parents[0];
        auto& pr = *node.parents[1];
        if (pe.requires_grad) {
          pe.ensure_grad();
          for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
              const double* row = node.grad.data() + (i * n + j) * dout;
              for (std::size_t c = 0; c < de; ++c) {
                pe.grad[i * de + c] += row[c];
                pe.grad[j * de + c] += row[de + dr + c];
              }
            }
          }
        }
        if (pr.requires_grad) {
          pr.ensure_grad();
          for (std::size_t p = 0; p < n * n; ++p) {
            const double* row = node.grad.data() + p * dout;
            for (std::size_t c = 0; c < dr; ++c) pr.grad[p * dr + c] += row[de + c];
          }
        }
      });
}

Tensor attention_aggregate(const Tensor& attention, const Tensor& messages) {
  require(attention.shape().size() == 2 && attention.rows() == attention.cols(),
          "attention_aggregate: attention must be square, got " + shape_str(attention.shape()));
  const std::size_t n = attention.rows();
  require(messages.shape().size() == 2 && messages.rows() == n * n,
          "attention_aggregate: messages rows must be n*n, got " + shape_str(messages.shape()));
  const std::size_t d = messages.cols();
  std::vector<double> out(n * d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double a = attention.values()[i * n + j];
      const double* msg = messages.values().data() + (i * n + j) * d;
      double* dst = out.data() + i * d;
      for (std::size_t c = 0; c < d; ++c) dst[c] += a * msg[c];
    }
  }
  return Tensor::from_op(
      "attention_aggregate", {n, d}, std::move(out), {attention, messages},
      [n, d](detail::Node& node) {
        auto& pa = *node.parents[0];
        auto& pm = *node.parents[1];
        if (pa.requires_grad) pa.ensure_grad();
        if (pm.requires_grad) pm.ensure_grad();
        for (std::size_t i = 0; i < n; ++i) {
          const double* gout = node.grad.data() + i * d;
          for (std::size_t j = 0; j < n; ++j) {
            const std::size_t p = i * n + j;
            if (pa.requires_grad) {
              const double* msg = pm.values.data() + p * d;
              double acc = 0.0;
              for (std::size_t c = 0; c < d; ++c) acc += gout[c] * msg[c];
              pa.grad[p] += acc;
            }
            if (pm.requires_grad) {
              const double a = pa.values[p];
              double* gm = pm.grad.data() + p * d;
              for (std::size_t c = 0; c < d; ++c) gm[c] += a * gout[c];
            }
          }
        }
      });
}

Tensor masked_softmax_ce_cols(const Tensor& scores, const std::vector<std::uint8_t>& mask,
                              const std::vector<int>& gold) {
  require(scores.shape().size() == 2, "masked_softmax_ce_cols: scores must be 2-D");
  const std::size_t m = scores.rows(), n = scores.cols();
  require(mask.size() == m * n, "masked_softmax_ce_cols: mask size mismatch");
  require(gold.size() == n, "masked_softmax_ce_cols: gold size " + std::to_string(gold.size()) +
                                " vs columns " + std::to_string(n));

  // Per-column: -log softmax(gold | unmasked rows), averaged over columns.
  double total = 0.0;
  std::vector<double> probs(m * n, 0.0);  // masked entries stay 0
  for (std::size_t j = 0; j < n; ++j) {
    const int g = gold[j];
    require(g >= 0 && static_cast<std::size_t>(g) < m,
            "masked_softmax_ce_cols: gold row " + std::to_string(g) + " out of range");
    require(!mask[static_cast<std::size_t>(g) * n + j],
            "masked_softmax_ce_cols: gold row " + std::to_string(g) + " is masked in column " +
                std::to_string(j));
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (!mask[i * n + j]) mx = std::max(mx, scores.values()[i * n + j]);
    }
    double z = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (!mask[i * n + j]) z += std::exp(scores.values()[i * n + j] - mx);
    }
    const double logz = std::log(z) + mx;
    total += logz - scores.values()[static_cast<std::size_t>(g) * n + j];
    for (std::size_t i = 0; i < m; ++i) {
      if (!mask[i * n + j]) probs[i * n + j] = std::exp(scores.values()[i * n + j] - logz);
    }
  }
  const double inv = 1.0 / static_cast<double>(n);
  return Tensor::from_op(
      "masked_softmax_ce_cols", {1}, {total * inv}, {scores},
      [m, n, inv, mask, gold, probs = std::move(probs)](detail::Node& node) {
        auto& p = *node.parents[0];
        p.ensure_grad();
        const double g0 = node.grad[0] * inv;
        for (std::size_t j = 0; j < n; ++j) {
          for (std::size_t i = 0; i < m; ++i) {
            if (mask[i * n + j]) continue;
            double d = probs[i * n + j];
            if (static_cast<std::size_t>(gold[j]) == i) d -= 1.0;
            p.grad[i * n + j] += g0 * d;
          }
        }
      });
}

Tensor softmax_ce_rows(const Tensor& logits, const std::vector<int>& gold) {
  require(logits.shape().size() == 2, "softmax_ce_rows: logits must be 2-D");
  const std::size_t m = logits.rows(), n = logits.cols();
  require(gold.size() == m, "softmax_ce_rows: gold size " + std::to_string(gold.size()) +
                                " vs rows " + std::to_string(m));
  std::size_t counted = 0;
  double total = 0.0;
  std::vector<double> probs(m * n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    if (gold[r] < 0) continue;  // unlabeled rows are skipped
    require(static_cast<std::size_t>(gold[r]) < n,
            "softmax_ce_rows: gold class " + std::to_string(gold[r]) + " out of range");
    ++counted;
    const double* row = logits.values().data() + r * n;
    double mx = row[0];
    for (std::size_t c = 1; c < n; ++c) mx = std::max(mx, row[c]);
    double z = 0.0;
    for (std::size_t c = 0; c < n; ++c) z += std::exp(row[c] - mx);
    const double logz = std::log(z) + mx;
    total += logz - row[static_cast<std::size_t>(gold[r])];
    for (std::size_t c = 0; c < n; ++c) probs[r * n + c] = std::exp(row[c] - logz);
  }
  if (counted == 0) return Tensor::scalar(0.0);
  const double inv = 1.0 / static_cast<double>(counted);
  return Tensor::from_op("softmax_ce_rows", {1}, {total * inv}, {logits},
                         [m, n, inv, gold, probs = std::move(probs)](detail::Node& node) {
                           auto& p = *node.parents[0];
                           p.ensure_grad();
                           const double g0 = node.grad[0] * inv;
                           for (std::size_t r = 0; r < m; ++r) {
                             if (gold[r] < 0) continue;
                             for (std::size_t c = 0; c < n; ++c) {
                               double d = probs[r * n + c];
                               if (static_cast<std::size_t>(gold[r]) == c) d -= 1.0;
                               p.grad[r * n + c] += g0 * d;
                             }
                           }
                         });
}

Tensor bce_with_logits(const Tensor& scores, const std::vector<double>& targets,
                       const std::vector<std::uint8_t>& mask) {
  require(targets.size() == scores.size(), "bce_with_logits: target size mismatch");
  require(mask.size() == scores.size(), "bce_with_logits: mask size mismatch");
  std::size_t counted = 0;
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (mask[i]) continue;
    const double s = scores.values()[i], t = targets[i];
    require(t == 0.0 || t == 1.0, "bce_with_logits: targets must be 0 or 1");
    // max(s,0) - s*t + log(1 + exp(-|s|))
    total += std::max(s, 0.0) - s * t + std::log1p(std::exp(-std::abs(s)));
    ++counted;
  }
  require(counted > 0, "bce_with_logits: all cells masked");
  const double inv = 1.0 / static_cast<double>(counted);
  return Tensor::from_op("bce_with_logits", {1}, {total * inv}, {scores},
                         [inv, targets, mask](detail::Node& node) {
                           auto& p = *node.parents[0];
                           p.ensure_grad();
                           const double g0 = node.grad[0] * inv;
                           for (std::size_t i = 0; i < p.size(); ++i) {
                             if (mask[i]) continue;
                             p.grad[i] += g0 * (stable_sigmoid(p.values[i]) - targets[i]);
                           }
                         });
}

}  // namespace vrdrelex
