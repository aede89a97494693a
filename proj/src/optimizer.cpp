#include "taskdisc/optimizer.hpp"

#include <cmath>

#include "taskdisc/errors.hpp"

namespace taskdisc::nn {

void GradMap::accumulate(const std::string& name, const Tensor& grad) {
  auto it = grads_.find(name);
  if (it == grads_.end()) {
    grads_.emplace(name, grad);
    return;
  }
  if (!it->second.same_shape(grad)) {
    throw ShapeMismatch("gradient shape changed for " + name);
  }
  for (size_t i = 0; i < grad.size(); ++i) it->second[i] += grad[i];
}

void GradMap::scale(float factor) {
  for (auto& [name, g] : grads_) {
    for (size_t i = 0; i < g.size(); ++i) g[i] *= factor;
  }
}

void Optimizer::step(ParamBundle& bundle, const GradMap& grads) {
  for (const auto& [name, g] : grads.grads()) {
    if (!bundle.has(name)) throw NameMismatch("gradient for unknown parameter: " + name);
    if (!bundle.tensor(name).same_shape(g)) {
      throw ShapeMismatch("gradient shape mismatch for " + name);
    }
  }

  // global-norm clip over the gradients that will actually be applied
  float clip_factor = 1.0f;
  if (config_.clip_norm > 0.0f) {
    double sq = 0.0;
    for (const auto& [name, g] : grads.grads()) {
      if (bundle.frozen(name)) continue;
      for (size_t i = 0; i < g.size(); ++i) sq += static_cast<double>(g[i]) * g[i];
    }
    const double norm = std::sqrt(sq);
    if (norm > config_.clip_norm) {
      clip_factor = static_cast<float>(config_.clip_norm / norm);
    }
  }

  ++step_count_;
  const auto t = static_cast<float>(step_count_);

  for (const auto& [name, g] : grads.grads()) {
    if (bundle.frozen(name)) continue;
    Tensor& w = bundle.tensor(name);

    if (config_.rule == OptimizerConfig::Rule::sgd) {
      for (size_t i = 0; i < w.size(); ++i) w[i] -= config_.lr * clip_factor * g[i];
      continue;
    }

    auto m_it = first_moment_.find(name);
    if (m_it == first_moment_.end()) {
      m_it = first_moment_.emplace(name, Tensor(g.shape())).first;
      second_moment_.emplace(name, Tensor(g.shape()));
    }
    Tensor& m = m_it->second;
    Tensor& v = second_moment_.at(name);
    const float bias1 = 1.0f - std::pow(config_.beta1, t);
    const float bias2 = 1.0f - std::pow(config_.beta2, t);
    for (size_t i = 0; i < w.size(); ++i) {
      const float gi = clip_factor * g[i];
      m[i] = config_.beta1 * m[i] + (1.0f - config_.beta1) * gi;
      v[i] = config_.beta2 * v[i] + (1.0f - config_.beta2) * gi * gi;
      const float m_hat = m[i] / bias1;
      const float v_hat = v[i] / bias2;
      w[i] -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }
}

}  // namespace taskdisc::nn
