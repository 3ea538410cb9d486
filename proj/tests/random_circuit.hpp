#pragma once

// Generator of random valid circuits for property tests.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mzi/circuit.hpp"

namespace mzi::testing {

inline Circuit random_circuit(std::mt19937& rng, int max_elements = 14) {
  const std::vector<std::string> pool = {"a", "b", "c", "d", "up", "low"};
  auto pick = [&](const auto& v) {
    std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
    auto it = v.begin();
    std::advance(it, d(rng));
    return *it;
  };
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> n_elements(0, max_elements);
  std::uniform_int_distribution<int> kind(0, 9);

  Circuit c;
  c.source = pick(pool);
  std::set<std::string> declared{c.source}, live{c.source};
  std::set<double> freqs;
  int splitters = 0, mirrors = 0;

  const int n = n_elements(rng);
  for (int i = 0; i < n; ++i) {
    const int k = kind(rng);
    if (k <= 3) {
      BeamSplitter bs;
      bs.name = "S" + std::to_string(splitters++);
      std::vector<std::string> declared_v(declared.begin(), declared.end());
      bs.in_first = pick(declared_v);
      if (unit(rng) < 0.5) {
        std::string other = pick(declared_v);
        if (other != *bs.in_first) bs.in_second = other;
      }
      if (unit(rng) < 0.3) std::swap(bs.in_first, bs.in_second);
      if (!bs.in_first && !bs.in_second) bs.in_first = c.source;
      // Outputs must be free: an input of this splitter or a label not live.
      std::vector<std::string> free;
      for (const auto& l : pool)
        if (!live.count(l) || l == bs.in_first.value_or("") || l == bs.in_second.value_or("")) free.push_back(l);
      if (free.size() < 2) {
        --splitters;
        continue;
      }
      std::shuffle(free.begin(), free.end(), rng);
      bs.out_first = free[0];
      bs.out_second = free[1];
      double t = unit(rng);
      bs.transmission = t < 0.2 ? RealExpr{std::sqrt(0.5), "sqrt(1/2)"} : RealExpr{std::max(t, 1e-3)};
      for (const auto& in : {bs.in_first, bs.in_second})
        if (in) live.erase(*in);
      live.insert(bs.out_first);
      live.insert(bs.out_second);
      declared.insert(bs.out_first);
      declared.insert(bs.out_second);
      c.elements.emplace_back(std::move(bs));
    } else if (live.empty()) {
      continue;
    } else if (k <= 6) {
      if (mirrors >= 8) continue;
      Mirror m;
      m.name = "M" + std::to_string(mirrors++);
      m.path = pick(live);
      double f;
      do {
        f = std::floor(unit(rng) * 1000.0) + 1.0;
      } while (!freqs.insert(f).second);
      m.frequency = RealExpr{f};
      m.amplitude = RealExpr{unit(rng) * 1e-2};
      if (unit(rng) < 0.3) m.phase = RealExpr{unit(rng) * 6.0};
      c.elements.emplace_back(std::move(m));
    } else if (k <= 8) {
      double phi = unit(rng) * 6.0 - 3.0;
      c.elements.emplace_back(PhaseShift{pick(live), unit(rng) < 0.2 ? RealExpr{std::numbers::pi, "pi"} : RealExpr{phi}});
    } else if (live.size() > 1) {
      std::string path = pick(live);
      live.erase(path);
      if (unit(rng) < 0.5)
        c.elements.emplace_back(Block{path});
      else
        c.elements.emplace_back(Discard{path});
    }
  }
  c.detector = pick(live);

  for (const auto& el : c.elements)
    if (const auto* m = std::get_if<Mirror>(&el)) c.tag_order.push_back(m->name);
  if (unit(rng) < 0.5) std::shuffle(c.tag_order.begin(), c.tag_order.end(), rng);
  for (auto& el : c.elements) {
    if (auto* m = std::get_if<Mirror>(&el))
      m->index = static_cast<std::size_t>(std::find(c.tag_order.begin(), c.tag_order.end(), m->name) -
                                          c.tag_order.begin());
  }
  return c;
}

}  // namespace mzi::testing
