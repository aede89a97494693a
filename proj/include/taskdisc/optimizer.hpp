#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "taskdisc/param_bundle.hpp"
#include "taskdisc/tensor.hpp"

namespace taskdisc::nn {

// Per-parameter gradient accumulator for one optimizer step.
class GradMap {
public:
  void accumulate(const std::string& name, const Tensor& grad);
  void scale(float factor);
  bool empty() const { return grads_.empty(); }
  const std::map<std::string, Tensor>& grads() const { return grads_; }
  void clear() { grads_.clear(); }

private:
  std::map<std::string, Tensor> grads_;
};

struct OptimizerConfig {
  enum class Rule { sgd, adam };
  Rule rule = Rule::adam;
  float lr = 1e-3f;
  float clip_norm = 5.0f;  // global norm over all updated gradients; 0 disables
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float epsilon = 1e-8f;
};

// First-order updates. Frozen groups are never touched, not even read.
class Optimizer {
public:
  explicit Optimizer(OptimizerConfig config) : config_(config) {}

  void step(ParamBundle& bundle, const GradMap& grads);
  int64_t steps_taken() const { return step_count_; }

private:
  OptimizerConfig config_;
  std::map<std::string, Tensor> first_moment_;
  std::map<std::string, Tensor> second_moment_;
  int64_t step_count_ = 0;
};

}  // namespace taskdisc::nn
