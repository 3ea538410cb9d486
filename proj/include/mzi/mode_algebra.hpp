#pragma once

// Single-photon amplitudes over (spatial mode x frequency tag) kets and the
// linear optical elements that act on them.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "mzi/expression.hpp"

namespace mzi {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};

/// Amplitudes with modulus below this are dropped from a PhotonState.
inline constexpr double kPruneThreshold = 1e-15;

/// Upper bound on mirrors per circuit; a TagVector is one machine word.
inline constexpr std::size_t kMaxMirrors = 64;

/// Circuit shape is inconsistent with the state or element being applied.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid run/grid configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One bit per declared mirror; bit i is set once the light on this ket has
/// been modulated by mirror i. Bits are only ever set, never cleared.
class TagVector {
 public:
  TagVector() = default;
  explicit TagVector(std::size_t width) : width_(static_cast<std::uint8_t>(width)) {
    if (width > kMaxMirrors) throw StructuralError("tag width exceeds " + std::to_string(kMaxMirrors));
  }

  /// Parses "10011"-style text; character i is bit i.
  static TagVector from_string(std::string_view bits) {
    TagVector tag(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i] == '1')
        tag.bits_ |= std::uint64_t{1} << i;
      else if (bits[i] != '0')
        throw std::invalid_argument("TagVector::from_string: expected '0' or '1'");
    }
    return tag;
  }

  std::size_t size() const { return width_; }

  bool test(std::size_t i) const {
    check(i);
    return (bits_ >> i) & 1U;
  }

  TagVector with(std::size_t i) const {
    check(i);
    TagVector out = *this;
    out.bits_ |= std::uint64_t{1} << i;
    return out;
  }

  int popcount() const { return std::popcount(bits_); }

  std::uint64_t raw() const { return bits_; }

  std::string to_string() const {
    std::string s(width_, '0');
    for (std::size_t i = 0; i < width_; ++i)
      if ((bits_ >> i) & 1U) s[i] = '1';
    return s;
  }

  auto operator<=>(const TagVector&) const = default;
  bool operator==(const TagVector&) const = default;

 private:
  void check(std::size_t i) const {
    if (i >= width_)
      throw StructuralError("mirror index " + std::to_string(i) + " out of range for tag width " +
                            std::to_string(width_));
  }

  std::uint8_t width_ = 0;
  std::uint64_t bits_ = 0;
};

struct BasisKet {
  std::string spatial;
  TagVector tag;

  auto operator<=>(const BasisKet&) const = default;
  bool operator==(const BasisKet&) const = default;
};

/// Sparse single-photon state vector. Terms are kept in ket order so every
/// reduction over them is deterministic.
class PhotonState {
 public:
  using Terms = std::map<BasisKet, Complex>;

  PhotonState() = default;
  explicit PhotonState(std::size_t tag_width) : tag_width_(tag_width) {}

  /// Accumulates `amp` onto `ket`, dropping the term if it cancels to zero.
  void add(const BasisKet& ket, Complex amp) {
    if (ket.tag.size() != tag_width_)
      throw StructuralError("ket tag width " + std::to_string(ket.tag.size()) +
                            " does not match state tag width " + std::to_string(tag_width_));
    if (!std::isfinite(amp.real()) || !std::isfinite(amp.imag()))
      throw std::domain_error("PhotonState::add: non-finite amplitude");
    auto [it, inserted] = terms_.try_emplace(ket, amp);
    if (!inserted) it->second += amp;
    if (std::abs(it->second) < kPruneThreshold) terms_.erase(it);
  }

  Complex amplitude(const BasisKet& ket) const {
    auto it = terms_.find(ket);
    return it == terms_.end() ? Complex{} : it->second;
  }

  Complex amplitude(std::string_view spatial, std::string_view tag) const {
    return amplitude(BasisKet{std::string(spatial), TagVector::from_string(tag)});
  }

  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  std::size_t tag_width() const { return tag_width_; }

  PhotonState scaled(Complex factor) const {
    PhotonState out(tag_width_);
    for (const auto& [ket, amp] : terms_) out.add(ket, factor * amp);
    return out;
  }

  friend PhotonState operator+(const PhotonState& lhs, const PhotonState& rhs) {
    if (lhs.tag_width_ != rhs.tag_width_) throw StructuralError("adding states of different tag width");
    PhotonState out = lhs;
    for (const auto& [ket, amp] : rhs.terms_) out.add(ket, amp);
    return out;
  }

 private:
  std::size_t tag_width_ = 0;
  Terms terms_;
};

/// Sum of squared moduli.
inline double state_norm(const PhotonState& state) {
  double sum = 0.0;
  for (const auto& [ket, amp] : state.terms()) sum += std::norm(amp);
  return sum;
}

// ---------------------------------------------------------------------------
// Elements

/// Inputs may be empty (vacuum port). The first input transmits into the
/// first output, the second into the second; reflection crosses sides.
/// `transmission` is the amplitude t, so t = sqrt(1/3) is a 1:2 intensity split.
struct BeamSplitter {
  std::string name;
  std::optional<std::string> in_first;
  std::optional<std::string> in_second;
  std::string out_first;
  std::string out_second;
  RealExpr transmission;

  double reflection() const {
    double t = transmission.value;
    return std::sqrt(std::max(0.0, 1.0 - t * t));
  }

  bool operator==(const BeamSplitter&) const = default;
};

/// A vibrating mirror. `index` is the mirror's position in the TagVector;
/// `amplitude` is the transverse deflection in beam-waist units.
struct Mirror {
  std::string name;
  std::string path;
  std::size_t index = 0;
  RealExpr frequency;
  RealExpr amplitude;
  RealExpr phase;

  bool operator==(const Mirror&) const = default;
};

struct PhaseShift {
  std::string path;
  RealExpr phi;

  bool operator==(const PhaseShift&) const = default;
};

/// Physically blocked path (an arm closed off inside the interferometer).
struct Block {
  std::string path;
  bool operator==(const Block&) const = default;
};

/// Output port that never reaches the detector.
struct Discard {
  std::string path;
  bool operator==(const Discard&) const = default;
};

using Element = std::variant<BeamSplitter, Mirror, PhaseShift, Block, Discard>;

/// Spatial labels and tag width an element sequence lives in.
struct ModeSpace {
  std::vector<std::string> labels;
  std::size_t tag_width = 0;

  bool contains(std::string_view label) const {
    return std::find(labels.begin(), labels.end(), label) != labels.end();
  }
};

struct StepResult {
  PhotonState state;
  double lost_norm = 0.0;
};

namespace detail {

inline void require_label(const ModeSpace& space, const std::string& label) {
  if (!space.contains(label)) throw StructuralError("unknown spatial label '" + label + "'");
}

inline void check_state(const PhotonState& state, const ModeSpace& space) {
  if (state.tag_width() != space.tag_width)
    throw StructuralError("state tag width " + std::to_string(state.tag_width()) +
                          " does not match circuit mirror count " + std::to_string(space.tag_width));
  for (const auto& [ket, amp] : state.terms()) require_label(space, ket.spatial);
}

inline StepResult remove_path(const PhotonState& state, const std::string& path) {
  StepResult out{PhotonState(state.tag_width()), 0.0};
  for (const auto& [ket, amp] : state.terms()) {
    if (ket.spatial == path)
      out.lost_norm += std::norm(amp);
    else
      out.state.add(ket, amp);
  }
  return out;
}

}  // namespace detail

/// Applies one element. Block and Discard report the removed squared norm
/// instead of renormalizing.
inline StepResult apply_element(const PhotonState& state, const Element& element, const ModeSpace& space) {
  detail::check_state(state, space);
  return std::visit(
      [&](const auto& el) -> StepResult {
        using T = std::decay_t<decltype(el)>;
        const std::size_t width = state.tag_width();
        if constexpr (std::is_same_v<T, BeamSplitter>) {
          if (el.in_first) detail::require_label(space, *el.in_first);
          if (el.in_second) detail::require_label(space, *el.in_second);
          detail::require_label(space, el.out_first);
          detail::require_label(space, el.out_second);
          const double t = el.transmission.value;
          const Complex ir = kI * el.reflection();
          StepResult out{PhotonState(width), 0.0};
          for (const auto& [ket, amp] : state.terms()) {
            if (el.in_first && ket.spatial == *el.in_first) {
              out.state.add({el.out_first, ket.tag}, t * amp);
              out.state.add({el.out_second, ket.tag}, ir * amp);
            } else if (el.in_second && ket.spatial == *el.in_second) {
              out.state.add({el.out_second, ket.tag}, t * amp);
              out.state.add({el.out_first, ket.tag}, ir * amp);
            } else {
              out.state.add(ket, amp);
            }
          }
          return out;
        } else if constexpr (std::is_same_v<T, Mirror>) {
          detail::require_label(space, el.path);
          if (el.index >= width)
            throw StructuralError("mirror '" + el.name + "' index " + std::to_string(el.index) +
                                  " out of range for tag width " + std::to_string(width));
          StepResult out{PhotonState(width), 0.0};
          for (const auto& [ket, amp] : state.terms()) {
            if (ket.spatial == el.path)
              out.state.add({ket.spatial, ket.tag.with(el.index)}, amp);
            else
              out.state.add(ket, amp);
          }
          return out;
        } else if constexpr (std::is_same_v<T, PhaseShift>) {
          detail::require_label(space, el.path);
          const Complex factor = std::polar(1.0, el.phi.value);
          StepResult out{PhotonState(width), 0.0};
          for (const auto& [ket, amp] : state.terms())
            out.state.add(ket, ket.spatial == el.path ? factor * amp : amp);
          return out;
        } else {
          detail::require_label(space, el.path);
          return detail::remove_path(state, el.path);
        }
      },
      element);
}

struct Postselection {
  Complex amplitude;
  double weight = 0.0;
};

/// Projects onto every ket whose tag bit `mirror_index` is set. The projector
/// is the unnormalized sum of those kets, so `weight` is a detection weight
/// rather than a normalized probability.
inline Postselection postselect(const PhotonState& state, std::size_t mirror_index) {
  if (mirror_index >= state.tag_width())
    throw StructuralError("mirror index " + std::to_string(mirror_index) + " out of range for tag width " +
                          std::to_string(state.tag_width()));
  Complex sum{};
  for (const auto& [ket, amp] : state.terms())
    if (ket.tag.test(mirror_index)) sum += amp;
  return {sum, std::norm(sum)};
}

}  // namespace mzi
