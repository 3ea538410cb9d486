#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mzi {

/// Per-mirror which-path weights, in mirror (tag) order.
struct WeightTable {
  std::vector<std::pair<std::string, double>> entries;
  /// Squared norm removed by blocks and discards (quantum engine only).
  double lost_norm = 0.0;
  /// False when two mirrors' spectral windows overlap.
  bool separable = true;
  std::vector<std::string> warnings;

  double at(std::string_view label) const {
    for (const auto& [name, w] : entries)
      if (name == label) return w;
    throw std::out_of_range("WeightTable: no mirror '" + std::string(label) + "'");
  }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.first);
    return out;
  }

  double total() const {
    double s = 0.0;
    for (const auto& e : entries) s += e.second;
    return s;
  }
};

}  // namespace mzi
