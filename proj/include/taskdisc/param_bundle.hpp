#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "taskdisc/rng.hpp"
#include "taskdisc/tensor.hpp"

namespace taskdisc::nn {

// Named parameter tensors. Names are "group/param"; freezing is per group and
// absolute: frozen groups never receive updates.
class ParamBundle {
public:
  static std::string group_of(const std::string& name);

  void add(const std::string& name, Tensor tensor);
  bool has(const std::string& name) const { return tensors_.count(name) != 0; }
  Tensor& tensor(const std::string& name);
  const Tensor& tensor(const std::string& name) const;

  std::vector<std::string> names() const;          // sorted
  std::vector<std::string> group_names() const;    // sorted, unique

  void set_frozen(const std::string& group, bool frozen);
  bool group_frozen(const std::string& group) const { return frozen_.count(group) != 0; }
  bool frozen(const std::string& name) const { return group_frozen(group_of(name)); }

  // copy every tensor of `group` from `source` under the same names
  void adopt_group(const ParamBundle& source, const std::string& group);

  uint64_t content_hash() const;
  uint64_t group_hash(const std::string& group) const;

private:
  std::map<std::string, Tensor> tensors_;
  std::set<std::string> frozen_;
};

Tensor xavier_uniform(Rng& rng, size_t rows, size_t cols);

}  // namespace taskdisc::nn
