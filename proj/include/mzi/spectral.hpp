#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mzi/fft.hpp"
#include "mzi/mode_algebra.hpp"
#include "mzi/weights.hpp"

namespace mzi {

/// Uniformly sampled real signal.
struct TimeSeries {
  std::vector<double> samples;
  double sample_rate = 1.0;

  double dt() const { return 1.0 / sample_rate; }
  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
};

/// One-sided spectrum on bins k * resolution, k = 0 .. N/2.
struct Spectrum {
  std::vector<double> frequencies;
  std::vector<double> values;
  double resolution = 0.0;

  std::size_t size() const { return values.size(); }
  double nyquist() const { return frequencies.empty() ? 0.0 : frequencies.back(); }

  /// Nearest bin index for `f`.
  std::size_t bin_of(double f) const { return static_cast<std::size_t>(std::llround(f / resolution)); }

  double at(double f) const { return values.at(bin_of(f)); }

  /// Sum of value * resolution over all bins.
  double integral() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * resolution;
  }
};

/// Power spectral density of a real series, one-sided and scaled so that
/// integral() equals the sum of x^2 dt (Parseval). A bin-aligned sinusoid of
/// amplitude a over duration T lands in one bin with value a^2 T / 2.
inline Spectrum power_spectrum(const TimeSeries& series) {
  const std::size_t n = series.samples.size();
  if (n == 0) throw std::invalid_argument("power_spectrum: empty series");
  if (!(series.sample_rate > 0.0)) throw std::invalid_argument("power_spectrum: sample rate must be positive");
  const double dt = series.dt();
  const double df = series.sample_rate / static_cast<double>(n);
  auto bins = fft::forward_real(series.samples);
  Spectrum out;
  out.resolution = df;
  out.frequencies.resize(bins.size());
  out.values.resize(bins.size());
  for (std::size_t k = 0; k < bins.size(); ++k) {
    out.frequencies[k] = static_cast<double>(k) * df;
    double p = std::norm(bins[k]) * dt * dt;
    // Interior bins carry their negative-frequency twin.
    const bool self_paired = k == 0 || (n % 2 == 0 && k == n / 2);
    out.values[k] = self_paired ? p : 2.0 * p;
  }
  return out;
}

/// Weight per mirror: spectrum summed over +/- `window` bins around the
/// mirror frequency, times the bin width. The 0 Hz bin is never included.
inline WeightTable extract_peak_weights(const Spectrum& spectrum,
                                        const std::vector<std::pair<std::string, double>>& mirror_freqs,
                                        std::size_t window) {
  if (spectrum.size() < 2 || !(spectrum.resolution > 0.0))
    throw ConfigError("extract_peak_weights: spectrum has no interior bins");
  WeightTable table;
  std::map<std::size_t, std::string> claimed;
  const std::size_t last = spectrum.size() - 1;
  for (const auto& [label, f] : mirror_freqs) {
    if (!(f > 0.0) || f >= spectrum.nyquist())
      throw ConfigError("mirror '" + label + "' frequency " + format_real(f) + " Hz is not below Nyquist (" +
                        format_real(spectrum.nyquist()) + " Hz)");
    const double exact_bin = f / spectrum.resolution;
    const std::size_t k = spectrum.bin_of(f);
    if (std::abs(exact_bin - static_cast<double>(k)) > 1e-9)
      table.warnings.push_back("mirror '" + label + "' frequency " + format_real(f) +
                               " Hz is off-bin; spectral leakage expected");
    const std::size_t lo = std::max<std::size_t>(1, k > window ? k - window : 1);
    const std::size_t hi = std::min(last, k + window);
    double sum = 0.0;
    for (std::size_t b = lo; b <= hi; ++b) {
      sum += spectrum.values[b];
      auto [it, fresh] = claimed.emplace(b, label);
      if (!fresh && it->second != label && table.separable) {
        table.separable = false;
        table.warnings.push_back("mirrors '" + it->second + "' and '" + label +
                                 "' share spectral bins; weights are not separable");
      }
    }
    table.entries.emplace_back(label, sum * spectrum.resolution);
  }
  return table;
}

struct ComparisonRow {
  std::string label;
  double quantum = 0.0;
  double classical = 0.0;
  double quantum_normalized = 0.0;
  double classical_normalized = 0.0;
  double deviation = 0.0;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  double max_deviation = 0.0;
};

/// Compares two weight tables after scaling each to unit sum. A table whose
/// weights sum to zero compares as all zeros.
inline ComparisonReport compare_weights(const WeightTable& quantum, const WeightTable& classical) {
  auto q_labels = quantum.labels();
  auto c_labels = classical.labels();
  if (std::set<std::string>(q_labels.begin(), q_labels.end()) != std::set<std::string>(c_labels.begin(), c_labels.end()) ||
      q_labels.size() != c_labels.size())
    throw std::invalid_argument("compare_weights: tables cover different mirrors");
  const double q_sum = quantum.total();
  const double c_sum = classical.total();
  ComparisonReport report;
  for (const auto& [label, qw] : quantum.entries) {
    ComparisonRow row;
    row.label = label;
    row.quantum = qw;
    row.classical = classical.at(label);
    row.quantum_normalized = q_sum > 0.0 ? qw / q_sum : 0.0;
    row.classical_normalized = c_sum > 0.0 ? row.classical / c_sum : 0.0;
    row.deviation = std::abs(row.quantum_normalized - row.classical_normalized);
    report.max_deviation = std::max(report.max_deviation, row.deviation);
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace mzi
