#pragma once

#include <optional>
#include <string>

#include "mzi/circuit.hpp"
#include "mzi/mode_algebra.hpp"
#include "mzi/weights.hpp"

namespace mzi {

struct QuantumResult {
  /// Detector-port state after every element and the terminal discard.
  PhotonState state;
  double lost_norm = 0.0;
};

/// Runs a single photon from the source through every element. Any mode
/// other than the detector left at the end is discarded and counted as lost.
inline QuantumResult propagate(const Circuit& circuit, std::optional<double> phi = std::nullopt) {
  for (const auto& d : validate(circuit))
    if (d.severity == Severity::error) throw StructuralError("invalid circuit: " + d.to_string());
  const Circuit c = phi ? with_phi(circuit, *phi) : circuit;

  const ModeSpace space = c.mode_space();
  QuantumResult out{PhotonState(space.tag_width), 0.0};
  out.state.add({c.source, TagVector(space.tag_width)}, 1.0);
  for (const auto& el : c.elements) {
    StepResult step = apply_element(out.state, el, space);
    out.state = std::move(step.state);
    out.lost_norm += step.lost_norm;
  }
  PhotonState kept(space.tag_width);
  for (const auto& [ket, amp] : out.state.terms()) {
    if (ket.spatial == c.detector)
      kept.add(ket, amp);
    else
      out.lost_norm += std::norm(amp);
  }
  out.state = std::move(kept);
  return out;
}

/// Post-selection weight for every declared mirror, in tag order.
inline WeightTable mirror_weights(const PhotonState& state, const Circuit& circuit) {
  WeightTable table;
  for (const auto& m : circuit.mirrors()) table.entries.emplace_back(m.name, postselect(state, m.index).weight);
  return table;
}

inline WeightTable mirror_weights(const QuantumResult& result, const Circuit& circuit) {
  WeightTable table = mirror_weights(result.state, circuit);
  table.lost_norm = result.lost_norm;
  return table;
}

}  // namespace mzi
