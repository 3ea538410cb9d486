#pragma once

// Test-only reference propagator. Builds each element as a dense matrix over
// the full (spatial label x 2^mirrors) space and multiplies through. Shares
// only the Circuit data types with the library, none of its propagation code.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "mzi/circuit.hpp"

namespace mzi::testing {

class DenseOracle {
 public:
  using C = std::complex<double>;

  explicit DenseOracle(const Circuit& circuit) : circuit_(circuit) {
    for (const auto& label : circuit.mode_space().labels) labels_.push_back(label);
    width_ = circuit.mirror_count();
    tags_ = std::size_t{1} << width_;
    dim_ = labels_.size() * tags_;
  }

  std::size_t dimension() const { return dim_; }

  /// Amplitude vector at the detector after all elements (other ports zeroed).
  std::vector<C> run() const {
    std::vector<C> psi(dim_, 0.0);
    psi[index(circuit_.source, 0)] = 1.0;
    for (const auto& el : circuit_.elements) psi = multiply(matrix(el), psi);
    for (std::size_t l = 0; l < labels_.size(); ++l)
      if (labels_[l] != circuit_.detector)
        for (std::size_t tag = 0; tag < tags_; ++tag) psi[l * tags_ + tag] = 0.0;
    return psi;
  }

  C amplitude(const std::vector<C>& psi, const std::string& label, const std::string& bits) const {
    std::uint64_t tag = 0;
    for (std::size_t i = 0; i < bits.size(); ++i)
      if (bits[i] == '1') tag |= std::uint64_t{1} << i;
    return psi[index(label, tag)];
  }

  /// |sum of amplitudes with bit `mirror` set|^2.
  double weight(const std::vector<C>& psi, std::size_t mirror) const {
    C sum = 0.0;
    for (std::size_t i = 0; i < dim_; ++i)
      if (((i % tags_) >> mirror) & 1U) sum += psi[i];
    return std::norm(sum);
  }

 private:
  using Matrix = std::vector<std::vector<C>>;

  std::size_t label_index(const std::string& label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] == label) return i;
    throw std::out_of_range("oracle: unknown label " + label);
  }

  std::size_t index(const std::string& label, std::uint64_t tag) const { return label_index(label) * tags_ + tag; }

  Matrix identity() const {
    Matrix m(dim_, std::vector<C>(dim_, 0.0));
    for (std::size_t i = 0; i < dim_; ++i) m[i][i] = 1.0;
    return m;
  }

  static std::vector<C> multiply(const Matrix& m, const std::vector<C>& v) {
    std::vector<C> out(v.size(), 0.0);
    for (std::size_t r = 0; r < m.size(); ++r)
      for (std::size_t c = 0; c < v.size(); ++c) out[r] += m[r][c] * v[c];
    return out;
  }

  Matrix matrix(const Element& el) const {
    Matrix m = identity();
    if (const auto* bs = std::get_if<BeamSplitter>(&el)) {
      const double t = bs->transmission.value;
      const C ir{0.0, std::sqrt(1.0 - t * t)};
      for (std::uint64_t tag = 0; tag < tags_; ++tag) {
        // Clear the input columns, then write the 2x2 block.
        for (const auto& in : {bs->in_first, bs->in_second}) {
          if (!in) continue;
          std::size_t col = index(*in, tag);
          for (std::size_t r = 0; r < dim_; ++r) m[r][col] = 0.0;
        }
        if (bs->in_first) {
          std::size_t col = index(*bs->in_first, tag);
          m[index(bs->out_first, tag)][col] += t;
          m[index(bs->out_second, tag)][col] += ir;
        }
        if (bs->in_second) {
          std::size_t col = index(*bs->in_second, tag);
          m[index(bs->out_second, tag)][col] += t;
          m[index(bs->out_first, tag)][col] += ir;
        }
      }
    } else if (const auto* mirror = std::get_if<Mirror>(&el)) {
      for (std::uint64_t tag = 0; tag < tags_; ++tag) {
        std::size_t col = index(mirror->path, tag);
        m[col][col] = 0.0;
        m[index(mirror->path, tag | (std::uint64_t{1} << mirror->index))][col] += 1.0;
      }
    } else if (const auto* phase = std::get_if<PhaseShift>(&el)) {
      for (std::uint64_t tag = 0; tag < tags_; ++tag) {
        std::size_t i = index(phase->path, tag);
        m[i][i] = std::polar(1.0, phase->phi.value);
      }
    } else {
      const std::string& path = std::holds_alternative<Block>(el) ? std::get<Block>(el).path : std::get<Discard>(el).path;
      for (std::uint64_t tag = 0; tag < tags_; ++tag) {
        std::size_t i = index(path, tag);
        m[i][i] = 0.0;
      }
    }
    return m;
  }

  Circuit circuit_;
  std::vector<std::string> labels_;
  std::size_t width_ = 0;
  std::size_t tags_ = 1;
  std::size_t dim_ = 0;
};

}  // namespace mzi::testing
