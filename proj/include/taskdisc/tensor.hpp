#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace taskdisc::nn {

// Dense row-major float32 tensor. Rank 1 and 2 cover everything the models
// need; shape is kept general anyway.
class Tensor {
public:
  Tensor() = default;
  explicit Tensor(std::vector<size_t> shape, float fill = 0.0f);
  static Tensor row_vector(std::vector<float> values);
  static Tensor from(std::vector<size_t> shape, std::vector<float> values);

  const std::vector<size_t>& shape() const { return shape_; }
  size_t rank() const { return shape_.size(); }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  size_t rows() const;  // rank-2 accessors
  size_t cols() const;

  float* data() { return data_.data(); }
  const float* data() const { return data_.data(); }
  float& operator[](size_t i) { return data_[i]; }
  float operator[](size_t i) const { return data_[i]; }
  float& at(size_t r, size_t c) { return data_[r * cols() + c]; }
  float at(size_t r, size_t c) const { return data_[r * cols() + c]; }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  std::string shape_string() const;

  void fill(float value);
  bool all_finite() const;
  float l2_norm() const;

private:
  std::vector<size_t> shape_;
  std::vector<float> data_;
};

}  // namespace taskdisc::nn
