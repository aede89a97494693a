#include "taskdisc/param_bundle.hpp"

#include <cmath>

#include "taskdisc/errors.hpp"
#include "taskdisc/hash.hpp"

namespace taskdisc::nn {

std::string ParamBundle::group_of(const std::string& name) {
  const size_t slash = name.find('/');
  return slash == std::string::npos ? name : name.substr(0, slash);
}

void ParamBundle::add(const std::string& name, Tensor tensor) {
  if (tensors_.count(name)) throw NameMismatch("duplicate parameter name: " + name);
  tensors_.emplace(name, std::move(tensor));
}

Tensor& ParamBundle::tensor(const std::string& name) {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw NameMismatch("no such parameter: " + name);
  return it->second;
}

const Tensor& ParamBundle::tensor(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw NameMismatch("no such parameter: " + name);
  return it->second;
}

std::vector<std::string> ParamBundle::names() const {
  std::vector<std::string> out;
  out.reserve(tensors_.size());
  for (const auto& [name, t] : tensors_) out.push_back(name);
  return out;
}

std::vector<std::string> ParamBundle::group_names() const {
  std::set<std::string> groups;
  for (const auto& [name, t] : tensors_) groups.insert(group_of(name));
  return {groups.begin(), groups.end()};
}

void ParamBundle::set_frozen(const std::string& group, bool frozen) {
  if (frozen) {
    frozen_.insert(group);
  } else {
    frozen_.erase(group);
  }
}

void ParamBundle::adopt_group(const ParamBundle& source, const std::string& group) {
  for (const auto& name : source.names()) {
    if (group_of(name) != group) continue;
    tensors_[name] = source.tensor(name);
  }
}

uint64_t ParamBundle::content_hash() const {
  uint64_t h = 1469598103934665603ull;
  for (const auto& [name, t] : tensors_) {  // std::map: name-sorted
    h = fnv1a64(name, h);
    h = fnv1a64(t.data(), t.size() * sizeof(float), h);
  }
  return h;
}

uint64_t ParamBundle::group_hash(const std::string& group) const {
  uint64_t h = 1469598103934665603ull;
  for (const auto& [name, t] : tensors_) {
    if (group_of(name) != group) continue;
    h = fnv1a64(name, h);
    h = fnv1a64(t.data(), t.size() * sizeof(float), h);
  }
  return h;
}

Tensor xavier_uniform(Rng& rng, size_t rows, size_t cols) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Tensor t({rows, cols});
  for (size_t i = 0; i < t.size(); ++i) {
    t[i] = static_cast<float>(rng.uniform(-limit, limit));
  }
  return t;
}

}  // namespace taskdisc::nn
