#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mzi/mode_algebra.hpp"

namespace mzi {

enum class Severity { error, warning };

/// A positioned message. Line and column are 1-based; 0 means the item was
/// built in code and has no source position.
struct Diagnostic {
  Severity severity = Severity::error;
  int line = 0;
  int column = 0;
  std::string message;

  std::string to_string() const {
    std::string s = std::to_string(line) + ":" + std::to_string(column) + ": ";
    s += severity == Severity::error ? "error: " : "warning: ";
    return s + message;
  }
};

inline bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.severity == Severity::error; });
}

struct SourceLoc {
  int line = 0;
  int column = 0;
};

/// Feed-forward optical circuit: one source, one detector and an ordered list
/// of elements. `tag_order` names the mirrors in TagVector bit order.
///
/// Equality is structural; source positions are not compared.
struct Circuit {
  std::string source;
  std::string detector;
  std::vector<Element> elements;
  std::vector<std::string> tag_order;

  // Parse positions, parallel to `elements` when present.
  std::vector<SourceLoc> element_locs;
  SourceLoc source_loc;
  SourceLoc detector_loc;
  SourceLoc tags_loc;

  bool operator==(const Circuit& other) const {
    return source == other.source && detector == other.detector && elements == other.elements &&
           tag_order == other.tag_order;
  }

  /// Mirrors in tag order.
  std::vector<Mirror> mirrors() const {
    std::vector<Mirror> out;
    for (const auto& el : elements)
      if (const auto* m = std::get_if<Mirror>(&el)) out.push_back(*m);
    std::stable_sort(out.begin(), out.end(), [](const Mirror& a, const Mirror& b) { return a.index < b.index; });
    return out;
  }

  std::size_t mirror_count() const {
    return static_cast<std::size_t>(
        std::count_if(elements.begin(), elements.end(), [](const Element& e) { return std::holds_alternative<Mirror>(e); }));
  }

  /// Spatial labels in order of first appearance.
  ModeSpace mode_space() const {
    ModeSpace space;
    space.tag_width = mirror_count();
    auto note = [&](const std::string& label) {
      if (!label.empty() && !space.contains(label)) space.labels.push_back(label);
    };
    note(source);
    for (const auto& el : elements) {
      std::visit(
          [&](const auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, BeamSplitter>) {
              if (e.in_first) note(*e.in_first);
              if (e.in_second) note(*e.in_second);
              note(e.out_first);
              note(e.out_second);
            } else {
              note(e.path);
            }
          },
          el);
    }
    note(detector);
    return space;
  }

  SourceLoc loc_of(std::size_t element) const {
    return element < element_locs.size() ? element_locs[element] : SourceLoc{};
  }
};

/// Returns a copy whose single PhaseShift carries `phi`. Throws ConfigError
/// unless the circuit has exactly one phase element.
inline Circuit with_phi(const Circuit& circuit, double phi) {
  Circuit out = circuit;
  PhaseShift* target = nullptr;
  for (auto& el : out.elements) {
    if (auto* p = std::get_if<PhaseShift>(&el)) {
      if (target) throw ConfigError("phi override is ambiguous: circuit has more than one phase element");
      target = p;
    }
  }
  if (!target) throw ConfigError("phi override given but circuit has no phase element");
  target->phi = RealExpr{phi};
  return out;
}

/// Sets every mirror's deflection amplitude to `eps`.
inline Circuit with_deflection(const Circuit& circuit, double eps) {
  if (!std::isfinite(eps) || eps < 0.0) throw ConfigError("deflection amplitude must be finite and >= 0");
  Circuit out = circuit;
  for (auto& el : out.elements)
    if (auto* m = std::get_if<Mirror>(&el)) m->amplitude = RealExpr{eps};
  return out;
}

/// Checks every Circuit invariant. Returns an empty list iff all hold.
inline std::vector<Diagnostic> validate(const Circuit& circuit) {
  std::vector<Diagnostic> diags;
  auto error = [&](SourceLoc loc, std::string msg) {
    diags.push_back({Severity::error, loc.line, loc.column, std::move(msg)});
  };
  auto warning = [&](SourceLoc loc, std::string msg) {
    diags.push_back({Severity::warning, loc.line, loc.column, std::move(msg)});
  };

  if (circuit.source.empty()) error({1, 1}, "missing 'source' statement");
  if (circuit.detector.empty()) error({1, 1}, "missing 'detect' statement");

  // Mirror bookkeeping.
  std::map<std::string, std::size_t> mirror_at;
  std::map<double, std::string> freq_owner;
  std::set<std::string> splitter_names;
  const std::size_t n_mirrors = circuit.mirror_count();
  if (n_mirrors > kMaxMirrors)
    error({1, 1}, "too many mirrors (" + std::to_string(n_mirrors) + "), at most " + std::to_string(kMaxMirrors));

  for (std::size_t i = 0; i < circuit.elements.size(); ++i) {
    const SourceLoc loc = circuit.loc_of(i);
    if (const auto* m = std::get_if<Mirror>(&circuit.elements[i])) {
      if (!mirror_at.emplace(m->name, i).second) error(loc, "duplicate mirror label '" + m->name + "'");
      const double f = m->frequency.value;
      if (!std::isfinite(f) || f <= 0.0) error(loc, "mirror '" + m->name + "' frequency must be positive");
      if (!std::isfinite(m->amplitude.value) || m->amplitude.value < 0.0)
        error(loc, "mirror '" + m->name + "' amplitude must be finite and >= 0");
      if (!std::isfinite(m->phase.value)) error(loc, "mirror '" + m->name + "' phase must be finite");
      auto [it, fresh] = freq_owner.emplace(f, m->name);
      if (!fresh)
        warning(loc, "mirrors '" + it->second + "' and '" + m->name + "' share frequency " + format_real(f) +
                         " Hz: indistinguishable spectral peaks");
    } else if (const auto* bs = std::get_if<BeamSplitter>(&circuit.elements[i])) {
      if (!splitter_names.insert(bs->name).second) error(loc, "duplicate beam splitter name '" + bs->name + "'");
      const double t = bs->transmission.value;
      if (!(t > 0.0 && t <= 1.0)) error(loc, "beam splitter '" + bs->name + "' needs 0 < t <= 1");
      if (!bs->in_first && !bs->in_second) error(loc, "beam splitter '" + bs->name + "' has no input");
      if (bs->in_first && bs->in_second && *bs->in_first == *bs->in_second)
        error(loc, "beam splitter '" + bs->name + "' uses '" + *bs->in_first + "' for both inputs");
      if (bs->out_first == bs->out_second)
        error(loc, "beam splitter '" + bs->name + "' uses '" + bs->out_first + "' for both outputs");
    } else if (const auto* p = std::get_if<PhaseShift>(&circuit.elements[i])) {
      if (!std::isfinite(p->phi.value)) error(loc, "phase must be finite");
    }
  }

  // Tag order must name each mirror once.
  {
    std::set<std::string> seen;
    for (const auto& name : circuit.tag_order) {
      if (!seen.insert(name).second) error(circuit.tags_loc, "mirror '" + name + "' listed twice in tag order");
      if (!mirror_at.count(name)) error(circuit.tags_loc, "tag order names unknown mirror '" + name + "'");
    }
    for (const auto& [name, at] : mirror_at) {
      auto pos = std::find(circuit.tag_order.begin(), circuit.tag_order.end(), name);
      if (pos == circuit.tag_order.end()) {
        error(circuit.loc_of(at), "mirror '" + name + "' missing from tag order");
        continue;
      }
      const auto& m = std::get<Mirror>(circuit.elements[at]);
      if (m.index != static_cast<std::size_t>(pos - circuit.tag_order.begin()))
        error(circuit.loc_of(at), "mirror '" + name + "' index disagrees with tag order");
    }
  }

  // Forward pass: which labels currently carry light.
  std::set<std::string> declared;
  std::set<std::string> live;
  if (!circuit.source.empty()) {
    declared.insert(circuit.source);
    live.insert(circuit.source);
  }
  auto use_path = [&](SourceLoc loc, const std::string& path, const char* what) {
    if (!declared.count(path)) {
      error(loc, std::string(what) + " on undeclared label '" + path + "'");
      return false;
    }
    if (!live.count(path)) {
      error(loc, std::string(what) + " on path '" + path + "' after it was removed");
      return false;
    }
    return true;
  };
  for (std::size_t i = 0; i < circuit.elements.size(); ++i) {
    const SourceLoc loc = circuit.loc_of(i);
    std::visit(
        [&](const auto& e) {
          using T = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<T, BeamSplitter>) {
            // A removed input acts as a vacuum port.
            std::set<std::string> inputs;
            for (const auto& in : {e.in_first, e.in_second}) {
              if (!in) continue;
              if (!declared.count(*in)) error(loc, "beam splitter '" + e.name + "' input '" + *in + "' is undeclared");
              inputs.insert(*in);
            }
            for (const auto& out : {e.out_first, e.out_second})
              if (live.count(out) && !inputs.count(out))
                error(loc, "beam splitter '" + e.name + "' output '" + out + "' is already occupied");
            for (const auto& in : inputs) live.erase(in);
            for (const auto& out : {e.out_first, e.out_second}) {
              declared.insert(out);
              live.insert(out);
            }
          } else if constexpr (std::is_same_v<T, Mirror>) {
            use_path(loc, e.path, "mirror");
          } else if constexpr (std::is_same_v<T, PhaseShift>) {
            use_path(loc, e.path, "phase");
          } else if constexpr (std::is_same_v<T, Block>) {
            if (use_path(loc, e.path, "block")) live.erase(e.path);
          } else {
            if (use_path(loc, e.path, "discard")) live.erase(e.path);
          }
        },
        circuit.elements[i]);
  }
  if (!circuit.detector.empty()) {
    if (!declared.count(circuit.detector))
      error(circuit.detector_loc, "detector on never-populated label '" + circuit.detector + "'");
    else if (!live.count(circuit.detector))
      error(circuit.detector_loc, "detector on path '" + circuit.detector + "' which was removed");
  }
  return diags;
}

}  // namespace mzi
