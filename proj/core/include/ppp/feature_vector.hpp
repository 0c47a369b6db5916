#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ppp {

// Named, ordered features for one sentence. Blocks are concatenated in a
// fixed order, so names line up across sentences of the same run.
struct FeatureVector {
  std::vector<std::string> names;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }

  void add(std::string name, double value) {
    names.push_back(std::move(name));
    values.push_back(value);
  }

  void append(const FeatureVector& other) {
    names.insert(names.end(), other.names.begin(), other.names.end());
    values.insert(values.end(), other.values.begin(), other.values.end());
  }

  // Linear lookup; returns nullptr when absent.
  const double* find(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return &values[i];
    }
    return nullptr;
  }
};

}  // namespace ppp
