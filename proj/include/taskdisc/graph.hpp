#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "taskdisc/tensor.hpp"

namespace taskdisc::nn {

using NodeId = uint32_t;

// Define-by-run reverse-mode tape. Nodes are recorded in topological order;
// backward() walks them in exact reverse order and accumulates gradients
// additively at fan-out. One Graph per example per thread.
class Graph {
public:
  // owning leaf
  NodeId leaf(Tensor value, bool needs_grad = false);
  // non-owning leaf; `value` must outlive the graph (parameters, features)
  NodeId external(const Tensor* value, bool needs_grad);

  const Tensor& value(NodeId id) const {
    const Node& n = nodes_[id];
    return n.external_value ? *n.external_value : n.owned_value;
  }
  bool needs_grad(NodeId id) const { return nodes_[id].needs_grad; }
  const Tensor& grad(NodeId id) const;  // zero tensor if untouched

  // elementwise
  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId scale(NodeId a, float c);
  NodeId tanh_(NodeId a);
  NodeId sigmoid_(NodeId a);
  NodeId relu_(NodeId a);

  // shape
  NodeId concat(NodeId a, NodeId b);        // vectors
  NodeId row(NodeId matrix, size_t r);      // matrix row as vector

  // linear algebra
  NodeId linear(NodeId x, NodeId w);                // [out] = W[out,in] · x[in]
  NodeId affine(NodeId x, NodeId w, NodeId b);      // W·x + b
  NodeId matvec(NodeId m, NodeId v);                // [n] = M[n,d] · v[d]
  NodeId rows_weighted_sum(NodeId m, NodeId w);     // [d] = Σ_i w_i · M_i
  NodeId dot(NodeId a, NodeId b);                   // scalar

  // table lookup; rows of `table` indexed by ids
  NodeId embed(const std::vector<int>& ids, NodeId table);

  // softmax over a vector; strictly positive, sums to 1
  NodeId softmax(NodeId logits);
  // −Σ target_i · log softmax(logits)_i against a constant target distribution
  NodeId softmax_xent(NodeId logits, const Tensor& target);

  void backward(NodeId loss_node);

  size_t size() const { return nodes_.size(); }
  void clear();

private:
  struct Node {
    Tensor owned_value;
    const Tensor* external_value = nullptr;
    bool needs_grad = false;
    std::function<void(Graph&)> back;
  };

  NodeId push(Tensor value, bool needs_grad, std::function<void(Graph&)> back);
  // gradient accumulator; nullptr when the node does not need gradients
  Tensor* grad_acc(NodeId id);

  std::vector<Node> nodes_;
  std::vector<Tensor> grads_;
};

struct Attention {
  NodeId output;
  NodeId weights;
};

// scores = values · query, weights = softmax(scores), output = Σ w_i values_i
Attention dot_attention(Graph& g, NodeId query, NodeId values);

struct GruParams {
  NodeId w_update, u_update, b_update;
  NodeId w_reset, u_reset, b_reset;
  NodeId w_cand, u_cand, b_cand;
};

// update/reset-gate recurrence over embedded token rows; returns final hidden
NodeId gru_encode(Graph& g, const std::vector<int>& token_ids, NodeId embedding_table,
                  const GruParams& params, size_t hidden_dim);

}  // namespace taskdisc::nn
