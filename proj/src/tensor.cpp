#include "taskdisc/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "taskdisc/errors.hpp"

namespace taskdisc::nn {

Tensor::Tensor(std::vector<size_t> shape, float fill) : shape_(std::move(shape)) {
  size_t n = 1;
  for (size_t d : shape_) {
    if (d == 0) throw ShapeMismatch("zero dimension in tensor shape");
    n *= d;
  }
  data_.assign(n, fill);
}

Tensor Tensor::row_vector(std::vector<float> values) {
  Tensor t;
  t.shape_ = {values.size()};
  t.data_ = std::move(values);
  return t;
}

Tensor Tensor::from(std::vector<size_t> shape, std::vector<float> values) {
  Tensor t(std::move(shape));
  if (t.size() != values.size()) {
    throw ShapeMismatch("value count " + std::to_string(values.size()) +
                        " does not match shape " + t.shape_string());
  }
  t.data_ = std::move(values);
  return t;
}

size_t Tensor::rows() const {
  if (rank() != 2) throw ShapeMismatch("rows() on tensor of rank " + std::to_string(rank()));
  return shape_[0];
}

size_t Tensor::cols() const {
  if (rank() == 2) return shape_[1];
  if (rank() == 1) return shape_[0];
  throw ShapeMismatch("cols() on tensor of rank " + std::to_string(rank()));
}

std::string Tensor::shape_string() const {
  std::ostringstream out;
  out << "[";
  for (size_t i = 0; i < shape_.size(); ++i) out << (i ? "x" : "") << shape_[i];
  out << "]";
  return out.str();
}

void Tensor::fill(float value) { std::fill(data_.begin(), data_.end(), value); }

bool Tensor::all_finite() const {
  for (float v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

float Tensor::l2_norm() const {
  double acc = 0.0;
  for (float v : data_) acc += static_cast<double>(v) * v;
  return static_cast<float>(std::sqrt(acc));
}

}  // namespace taskdisc::nn
