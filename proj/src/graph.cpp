#include "taskdisc/graph.hpp"

#include <cmath>
#include <string>

#include "taskdisc/errors.hpp"

namespace taskdisc::nn {

namespace {

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) {
    throw ShapeMismatch(std::string(op) + ": " + a.shape_string() + " vs " + b.shape_string());
  }
}

void check_vector(const Tensor& t, const char* op) {
  if (t.rank() != 1) throw ShapeMismatch(std::string(op) + ": expected vector, got " + t.shape_string());
}

void check_matrix(const Tensor& t, const char* op) {
  if (t.rank() != 2) throw ShapeMismatch(std::string(op) + ": expected matrix, got " + t.shape_string());
}

}  // namespace

NodeId Graph::push(Tensor value, bool needs_grad, std::function<void(Graph&)> back) {
  Node node;
  node.owned_value = std::move(value);
  node.needs_grad = needs_grad;
  node.back = std::move(back);
  nodes_.push_back(std::move(node));
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Graph::leaf(Tensor value, bool needs_grad) {
  return push(std::move(value), needs_grad, nullptr);
}

NodeId Graph::external(const Tensor* value, bool needs_grad) {
  Node node;
  node.external_value = value;
  node.needs_grad = needs_grad;
  nodes_.push_back(std::move(node));
  return static_cast<NodeId>(nodes_.size() - 1);
}

const Tensor& Graph::grad(NodeId id) const {
  static const Tensor empty;
  if (id >= grads_.size() || grads_[id].empty()) {
    if (nodes_[id].needs_grad) {
      // touched nothing during backward; report a zero of the right shape
      static thread_local Tensor zero;
      zero = Tensor(value(id).shape());
      return zero;
    }
    return empty;
  }
  return grads_[id];
}

Tensor* Graph::grad_acc(NodeId id) {
  if (!nodes_[id].needs_grad) return nullptr;
  if (grads_.size() <= id) grads_.resize(nodes_.size());
  if (grads_[id].empty()) grads_[id] = Tensor(value(id).shape());
  return &grads_[id];
}

NodeId Graph::add(NodeId a, NodeId b) {
  const Tensor& va = value(a);
  check_same_shape(va, value(b), "add");
  Tensor out = va;
  const Tensor& vb = value(b);
  for (size_t i = 0; i < out.size(); ++i) out[i] += vb[i];
  const bool ng = needs_grad(a) || needs_grad(b);
  NodeId out_id = push(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[out_id].back = [a, b, out_id](Graph& g) {
      const Tensor& go = g.grads_[out_id];
      if (Tensor* ga = g.grad_acc(a)) {
        for (size_t i = 0; i < go.size(); ++i) (*ga)[i] += go[i];
      }
      if (Tensor* gb = g.grad_acc(b)) {
        for (size_t i = 0; i < go.size(); ++i) (*gb)[i] += go[i];
      }
    };
  }
  return out_id;
}

NodeId Graph::sub(NodeId a, NodeId b) {
  const Tensor& va = value(a);
  check_same_shape(va, value(b), "sub");
  Tensor out = va;
  const Tensor& vb = value(b);
  for (size_t i = 0; i < out.size(); ++i) out[i] -= vb[i];
  const bool ng = needs_grad(a) || needs_grad(b);
  NodeId out_id = push(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[out_id].back = [a, b, out_id](Graph& g) {
      const Tensor& go = g.grads_[out_id];
      if (Tensor* ga = g.grad_acc(a)) {
        for (size_t i = 0; i < go.size(); ++i) (*ga)[i] += go[i];
      }
      if (Tensor* gb = g.grad_acc(b)) {
        for (size_t i = 0; i < go.size(); ++i) (*gb)[i] -= go[i];
      }
    };
  }
  return out_id;
}

NodeId Graph::mul(NodeId a, NodeId b) {
  const Tensor& va = value(a);
  check_same_shape(va, value(b), "mul");
  Tensor out = va;
  const Tensor& vb = value(b);
  for (size_t i = 0; i < out.size(); ++i) out[i] *= vb[i];
  const bool ng = needs_grad(a) || needs_grad(b);
  NodeId out_id = push(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[out_id].back = [a, b, out_id](Graph& g) {
      const Tensor& go = g.grads_[out_id];
      const Tensor& va2 = g.value(a);
      const Tensor& vb2 = g.value(b);
      if (Tensor* ga = g.grad_acc(a)) {
        for (size_t i = 0; i < go.size(); ++i) (*ga)[i] += go[i] * vb2[i];
      }
      if (Tensor* gb = g.grad_acc(b)) {
        for (size_t i = 0; i < go.size(); ++i) (*gb)[i] += go[i] * va2[i];
      }
    };
  }
  return out_id;
}

NodeId Graph::scale(NodeId a, float c) {
  Tensor out = value(a);
  for (size_t i = 0; i < out.size(); ++i) out[i] *= c;
  const bool ng = needs_grad(a);
  NodeId out_id = push(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[out_id].back = [a, c, out_id](Graph& g) {
      const Tensor& go = g.grads_[out_id];
      if (Tensor* ga = g.grad_acc(a)) {
        for (size_t i = 0; i < go.size(); ++i) (*ga)[i] += go[i] * c;
      }
    };
  }
  return out_id;
}

NodeId Graph::tanh_(NodeId a) {
  Tensor out = value(a);
  for (size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(out[i]);
  const bool ng = needs_grad(a);
  NodeId out_id = push(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[out_id].back = [a, out_id](Graph& g) {
      const Tensor& go = g.grads_[out_id];
      const Tensor& y = g.value(out_id);
      if (Tensor* ga = g.grad_acc(a)) {
        for (size_t i = 0; i < go.size(); ++i) (*ga)[i] += go[i] * (1.0f - y[i] * y[i]);
      }
    };
  }
  return out_id;
}

NodeId Graph::sigmoid_(NodeId a) {
  Tensor out = value(a);
  for (size_t i = 0; i < out.size(); ++i) out[i] = 1.0f / (1.0f + std::exp(-out[i]));
  const bool ng = needs_grad(a);
  NodeId out_id = push(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[out_id].back = [a, out_id](Graph& g) {
      const Tensor& go = g.grads_[out_id];
      const Tensor& y = g.value(out_id);
      if (Tensor* ga = g.grad_acc(a)) {
        for (size_t i = 0; i < go.size(); ++i) (*ga)[i] += go[i] * y[i] * (1.0f - y[i]);
      }
    };
  }
  return out_id;
}

NodeId Graph::relu_(NodeId a) {
  Tensor out = value(a);
  for (size_t i = 0; i < out.size(); ++i) out[i] = out[i] > 0.0f ? out[i] : 0.0f;
  const bool ng = needs_grad(a);
  NodeId out_id = push(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[out_id].back = [a, out_id](Graph& g) {
      const Tensor& go = g.grads_[out_id];
      const Tensor& y = g.value(out_id);
      if (Tensor* ga = g.grad_acc(a)) {
        for (size_t i = 0; i < go.size(); ++i) (*ga)[i] += y[i] > 0.0f ? go[i] : 0.0f;
      }
    };
  }
  return out_id;
}

NodeId Graph::concat(NodeId a, NodeId b) {
  const Tensor& va = value(a);
  const Tensor& vb = value(b);
  check_vector(va, "concat");
  check_vector(vb, "concat");
  Tensor out({va.size() + vb.size()});
  for (size_t i = 0; i < va.size(); ++i) out[i] = va[i];
  for (size_t i = 0; i < vb.size(); ++i) out[va.size() + i] = vb[i];
  const size_t split = va.size();
  const bool ng = needs_grad(a) || needs_grad(b);
  NodeId out_id = push(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[out_id].back = [a, b, split, out_id](Graph& g) {
      const Tensor& go = g.grads_[out_id];
      if (Tensor* ga = g.grad_acc(a)) {
        for (size_t i = 0; i < split; ++i) (*ga)[i] += go[i];
      }
      if (Tensor* gb = g.grad_acc(b)) {
        for (size_t i = 0; i < gb->size(); ++i) (*gb)[i] += go[split + i];
      }
    };
  }
  return out_id;
}

NodeId Graph::row(NodeId matrix, size_t r) {
  const Tensor& m = value(matrix);
  check_matrix(m, "row");
  if (r >= m.rows()) throw ShapeMismatch("row index out of range");
  const size_t d = m.cols();
  Tensor out({d});
  for (size_t j = 0; j < d; ++j) out[j] = m.at(r, j);
  const bool ng = needs_grad(matrix);
  NodeId out_id = push(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[out_id].back = [matrix, r, d, out_id](Graph& g) {
      const Tensor& go = g.grads_[out_id];
      if (Tensor* gm = g.grad_acc(matrix)) {
        for (size_t j = 0; j < d; ++j) gm->at(r, j) += go[j];
      }
    };
  }
  return out_id;
}

NodeId Graph::linear(NodeId x, NodeId w) {
  const Tensor& vx = value(x);
  const Tensor& vw = value(w);
  check_vector(vx, "linear");
  check_matrix(vw, "linear");
  if (vw.cols() != vx.size()) {
    throw ShapeMismatch("linear: " + vw.shape_string() + " · " + vx.shape_string());
  }
  const size_t out_dim = vw.rows();
  const size_t in_dim = vx.size();
  Tensor out({out_dim});
  for (size_t i = 0; i < out_dim; ++i) {
    const float* wrow = vw.data() + i * in_dim;
    float acc = 0.0f;
    for (size_t j = 0; j < in_dim; ++j) acc += wrow[j] * vx[j];
    out[i] = acc;
  }
  const bool ng = needs_grad(x) || needs_grad(w);
  NodeId out_id = push(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[out_id].back = [x, w, out_dim, in_dim, out_id](Graph& g) {
      const Tensor& go = g.grads_[out_id];
      const Tensor& vw2 = g.value(w);
      const Tensor& vx2 = g.value(x);
      if (Tensor* gx = g.grad_acc(x)) {
        for (size_t i = 0; i < out_dim; ++i) {
          const float gi = go[i];
          const float* wrow = vw2.data() + i * in_dim;
          for (size_t j = 0; j < in_dim; ++j) (*gx)[j] += gi * wrow[j];
        }
      }
      if (Tensor* gw = g.grad_acc(w)) {
        for (size_t i = 0; i < out_dim; ++i) {
          const float gi = go[i];
          float* grow = gw->data() + i * in_dim;
          for (size_t j = 0; j < in_dim; ++j) grow[j] += gi * vx2[j];
        }
      }
    };
  }
  return out_id;
}

NodeId Graph::affine(NodeId x, NodeId w, NodeId b) {
  const Tensor& vb = value(b);
  check_vector(vb, "affine");
  if (vb.size() != value(w).rows()) {
    throw ShapeMismatch("affine: bias " + vb.shape_string() + " vs weight " +
                        value(w).shape_string());
  }
  return add(linear(x, w), b);
}

NodeId Graph::matvec(NodeId m, NodeId v) {
  const Tensor& vm = value(m);
  const Tensor& vv = value(v);
  check_matrix(vm, "matvec");
  check_vector(vv, "matvec");
  if (vm.cols() != vv.size()) {
    throw ShapeMismatch("matvec: " + vm.shape_string() + " · " + vv.shape_string());
  }
  const size_t n = vm.rows();
  const size_t d = vm.cols();
  Tensor out({n});
  for (size_t i = 0; i < n; ++i) {
    const float* mrow = vm.data() + i * d;
    float acc = 0.0f;
    for (size_t j = 0; j < d; ++j) acc += mrow[j] * vv[j];
    out[i] = acc;
  }
  const bool ng = needs_grad(m) || needs_grad(v);
  NodeId out_id = push(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[out_id].back = [m, v, n, d, out_id](Graph& g) {
      const Tensor& go = g.grads_[out_id];
      const Tensor& vm2 = g.value(m);
      const Tensor& vv2 = g.value(v);
      if (Tensor* gm = g.grad_acc(m)) {
        for (size_t i = 0; i < n; ++i) {
          const float gi = go[i];
          float* grow = gm->data() + i * d;
          for (size_t j = 0; j < d; ++j) grow[j] += gi * vv2[j];
        }
      }
      if (Tensor* gv = g.grad_acc(v)) {
        for (size_t i = 0; i < n; ++i) {
          const float gi = go[i];
          const float* mrow = vm2.data() + i * d;
          for (size_t j = 0; j < d; ++j) (*gv)[j] += gi * mrow[j];
        }
      }
    };
  }
  return out_id;
}

NodeId Graph::rows_weighted_sum(NodeId m, NodeId w) {
  const Tensor& vm = value(m);
  const Tensor& vw = value(w);
  check_matrix(vm, "rows_weighted_sum");
  check_vector(vw, "rows_weighted_sum");
  if (vm.rows() != vw.size()) {
    throw ShapeMismatch("rows_weighted_sum: " + vm.shape_string() + " vs " + vw.shape_string());
  }
  const size_t n = vm.rows();
  const size_t d = vm.cols();
  Tensor out({d});
  for (size_t i = 0; i < n; ++i) {
    const float wi = vw[i];
    const float* mrow = vm.data() + i * d;
    for (size_t j = 0; j < d; ++j) out[j] += wi * mrow[j];
  }
  const bool ng = needs_grad(m) || needs_grad(w);
  NodeId out_id = push(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[out_id].back = [m, w, n, d, out_id](Graph& g) {
      const Tensor& go = g.grads_[out_id];
      const Tensor& vm2 = g.value(m);
      const Tensor& vw2 = g.value(w);
      if (Tensor* gm = g.grad_acc(m)) {
        for (size_t i = 0; i < n; ++i) {
          const float wi = vw2[i];
          float* grow = gm->data() + i * d;
          for (size_t j = 0; j < d; ++j) grow[j] += wi * go[j];
        }
      }
      if (Tensor* gw = g.grad_acc(w)) {
        for (size_t i = 0; i < n; ++i) {
          const float* mrow = vm2.data() + i * d;
          float acc = 0.0f;
          for (size_t j = 0; j < d; ++j) acc += mrow[j] * go[j];
          (*gw)[i] += acc;
        }
      }
    };
  }
  return out_id;
}

NodeId Graph::dot(NodeId a, NodeId b) {
  const Tensor& va = value(a);
  const Tensor& vb = value(b);
  check_vector(va, "dot");
  check_same_shape(va, vb, "dot");
  double acc = 0.0;
  for (size_t i = 0; i < va.size(); ++i) acc += static_cast<double>(va[i]) * vb[i];
  Tensor out({1});
  out[0] = static_cast<float>(acc);
  const bool ng = needs_grad(a) || needs_grad(b);
  NodeId out_id = push(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[out_id].back = [a, b, out_id](Graph& g) {
      const float go = g.grads_[out_id][0];
      const Tensor& va2 = g.value(a);
      const Tensor& vb2 = g.value(b);
      if (Tensor* ga = g.grad_acc(a)) {
        for (size_t i = 0; i < va2.size(); ++i) (*ga)[i] += go * vb2[i];
      }
      if (Tensor* gb = g.grad_acc(b)) {
        for (size_t i = 0; i < vb2.size(); ++i) (*gb)[i] += go * va2[i];
      }
    };
  }
  return out_id;
}

NodeId Graph::embed(const std::vector<int>& ids, NodeId table) {
  if (ids.empty()) throw EmptySequence("embed: empty id sequence");
  const Tensor& vt = value(table);
  check_matrix(vt, "embed");
  const size_t e = vt.cols();
  for (int id : ids) {
    if (id < 0 || static_cast<size_t>(id) >= vt.rows()) {
      throw UnknownTokenId("token id " + std::to_string(id) + " outside table of " +
                           std::to_string(vt.rows()) + " rows");
    }
  }
  Tensor out({ids.size(), e});
  for (size_t t = 0; t < ids.size(); ++t) {
    const float* src = vt.data() + static_cast<size_t>(ids[t]) * e;
    float* dst = out.data() + t * e;
    for (size_t j = 0; j < e; ++j) dst[j] = src[j];
  }
  const bool ng = needs_grad(table);
  NodeId out_id = push(std::move(out), ng, nullptr);
  if (ng) {
    std::vector<int> ids_copy = ids;
    nodes_[out_id].back = [table, ids_copy, e, out_id](Graph& g) {
      const Tensor& go = g.grads_[out_id];
      if (Tensor* gt = g.grad_acc(table)) {
        for (size_t t = 0; t < ids_copy.size(); ++t) {
          float* dst = gt->data() + static_cast<size_t>(ids_copy[t]) * e;
          const float* src = go.data() + t * e;
          for (size_t j = 0; j < e; ++j) dst[j] += src[j];
        }
      }
    };
  }
  return out_id;
}

NodeId Graph::softmax(NodeId logits) {
  const Tensor& vl = value(logits);
  check_vector(vl, "softmax");
  float max_logit = vl[0];
  for (size_t i = 1; i < vl.size(); ++i) max_logit = std::max(max_logit, vl[i]);
  Tensor out({vl.size()});
  double norm = 0.0;
  for (size_t i = 0; i < vl.size(); ++i) {
    out[i] = std::exp(vl[i] - max_logit);
    norm += out[i];
  }
  const auto inv = static_cast<float>(1.0 / norm);
  for (size_t i = 0; i < out.size(); ++i) out[i] *= inv;
  const bool ng = needs_grad(logits);
  NodeId out_id = push(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[out_id].back = [logits, out_id](Graph& g) {
      const Tensor& go = g.grads_[out_id];
      const Tensor& p = g.value(out_id);
      if (Tensor* gl = g.grad_acc(logits)) {
        double weighted = 0.0;
        for (size_t i = 0; i < p.size(); ++i) weighted += static_cast<double>(go[i]) * p[i];
        for (size_t i = 0; i < p.size(); ++i) {
          (*gl)[i] += p[i] * (go[i] - static_cast<float>(weighted));
        }
      }
    };
  }
  return out_id;
}

NodeId Graph::softmax_xent(NodeId logits, const Tensor& target) {
  const Tensor& vl = value(logits);
  check_vector(vl, "softmax_xent");
  check_same_shape(vl, target, "softmax_xent");

  float max_logit = vl[0];
  for (size_t i = 1; i < vl.size(); ++i) max_logit = std::max(max_logit, vl[i]);
  double norm = 0.0;
  for (size_t i = 0; i < vl.size(); ++i) norm += std::exp(static_cast<double>(vl[i]) - max_logit);
  const double log_norm = std::log(norm) + max_logit;

  double loss = 0.0;
  for (size_t i = 0; i < vl.size(); ++i) {
    if (target[i] != 0.0f) loss += static_cast<double>(target[i]) * (log_norm - vl[i]);
  }
  Tensor out({1});
  out[0] = static_cast<float>(loss);

  const bool ng = needs_grad(logits);
  NodeId out_id = push(std::move(out), ng, nullptr);
  if (ng) {
    Tensor target_copy = target;
    nodes_[out_id].back = [logits, target_copy, log_norm, out_id](Graph& g) {
      const float go = g.grads_[out_id][0];
      const Tensor& vl2 = g.value(logits);
      if (Tensor* gl = g.grad_acc(logits)) {
        for (size_t i = 0; i < vl2.size(); ++i) {
          const auto p = static_cast<float>(std::exp(static_cast<double>(vl2[i]) - log_norm));
          (*gl)[i] += go * (p - target_copy[i]);
        }
      }
    };
  }
  return out_id;
}

void Graph::backward(NodeId loss_node) {
  const Tensor& loss = value(loss_node);
  if (loss.size() != 1) throw ShapeMismatch("backward: loss must be a scalar");
  if (!nodes_[loss_node].needs_grad) return;
  grads_.clear();
  grads_.resize(nodes_.size());
  grads_[loss_node] = Tensor({1}, 1.0f);
  for (size_t i = loss_node + 1; i-- > 0;) {
    if (grads_[i].empty()) continue;  // nothing downstream touched this node
    if (nodes_[i].back) nodes_[i].back(*this);
  }
}

void Graph::clear() {
  nodes_.clear();
  grads_.clear();
}

Attention dot_attention(Graph& g, NodeId query, NodeId values) {
  NodeId scores = g.matvec(values, query);
  NodeId weights = g.softmax(scores);
  NodeId output = g.rows_weighted_sum(values, weights);
  return Attention{output, weights};
}

NodeId gru_encode(Graph& g, const std::vector<int>& token_ids, NodeId embedding_table,
                  const GruParams& params, size_t hidden_dim) {
  if (token_ids.empty()) throw EmptySequence("gru_encode: empty token sequence");
  NodeId embedded = g.embed(token_ids, embedding_table);
  NodeId ones = g.leaf(Tensor({hidden_dim}, 1.0f));
  NodeId hidden = g.leaf(Tensor({hidden_dim}, 0.0f));
  for (size_t t = 0; t < token_ids.size(); ++t) {
    NodeId x = g.row(embedded, t);
    NodeId update = g.sigmoid_(g.add(g.affine(x, params.w_update, params.b_update),
                                     g.linear(hidden, params.u_update)));
    NodeId reset = g.sigmoid_(g.add(g.affine(x, params.w_reset, params.b_reset),
                                    g.linear(hidden, params.u_reset)));
    NodeId candidate = g.tanh_(g.add(g.affine(x, params.w_cand, params.b_cand),
                                     g.linear(g.mul(reset, hidden), params.u_cand)));
    hidden = g.add(g.mul(g.sub(ones, update), hidden), g.mul(update, candidate));
  }
  return hidden;
}

}  // namespace taskdisc::nn
