#pragma once

// Classical transverse-field model of the detector port.
//
// Each source-to-detector route contributes a Gaussian e^{-(y - D)^2} whose
// centre D(t) is the sum of the deflections d_X(t) = eps_X sin(2 pi f_X t +
// theta_X) of the mirrors on that route. The paraxial variant keeps the
// first-order term, e^{-y^2}(1 + 2 y D).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mzi/circuit.hpp"
#include "mzi/fft.hpp"
#include "mzi/mode_algebra.hpp"
#include "mzi/spectral.hpp"

namespace mzi {

/// One route through the circuit. `mirrors` lists mirror labels in the order
/// the route meets them.
struct ClassicalPath {
  Complex amplitude;
  std::vector<std::string> mirrors;
};

/// Enumerates every route from source to detector. Routes are not merged,
/// so two routes over the same mirrors stay separate entries. A Block or
/// Discard ends every route on its path.
inline std::vector<ClassicalPath> expand_paths(const Circuit& circuit, std::optional<double> phi = std::nullopt) {
  for (const auto& d : validate(circuit))
    if (d.severity == Severity::error) throw StructuralError("invalid circuit: " + d.to_string());
  const Circuit c = phi ? with_phi(circuit, *phi) : circuit;

  struct Route {
    std::string at;
    ClassicalPath path;
  };
  std::vector<Route> routes{{c.source, {Complex{1.0, 0.0}, {}}}};
  for (const auto& el : c.elements) {
    std::vector<Route> next;
    next.reserve(routes.size() * 2);
    std::visit(
        [&](const auto& e) {
          using T = std::decay_t<decltype(e)>;
          for (auto& r : routes) {
            if constexpr (std::is_same_v<T, BeamSplitter>) {
              const double t = e.transmission.value;
              const Complex ir = kI * e.reflection();
              const bool first = e.in_first && r.at == *e.in_first;
              const bool second = e.in_second && r.at == *e.in_second;
              if (!first && !second) {
                next.push_back(std::move(r));
                continue;
              }
              Route trans = r;
              Route refl = std::move(r);
              trans.at = first ? e.out_first : e.out_second;
              trans.path.amplitude *= t;
              refl.at = first ? e.out_second : e.out_first;
              refl.path.amplitude *= ir;
              for (Route* out : {&trans, &refl})
                if (std::abs(out->path.amplitude) >= kPruneThreshold) next.push_back(std::move(*out));
            } else if constexpr (std::is_same_v<T, Mirror>) {
              if (r.at == e.path) r.path.mirrors.push_back(e.name);
              next.push_back(std::move(r));
            } else if constexpr (std::is_same_v<T, PhaseShift>) {
              if (r.at == e.path) r.path.amplitude *= std::polar(1.0, e.phi.value);
              next.push_back(std::move(r));
            } else {
              if (r.at != e.path) next.push_back(std::move(r));
            }
          }
        },
        el);
    routes = std::move(next);
  }
  std::vector<ClassicalPath> out;
  for (auto& r : routes)
    if (r.at == c.detector) out.push_back(std::move(r.path));
  return out;
}

/// Sampling of the transverse coordinate y (beam-waist units) and time.
struct SimGrid {
  double half_width = 6.0;  // y in [-L, L]
  std::size_t ny = 513;
  double duration = 1.0;  // s
  double sample_rate = 4096.0;  // Hz

  std::size_t nt() const { return static_cast<std::size_t>(std::llround(duration * sample_rate)); }
  double dy() const { return 2.0 * half_width / static_cast<double>(ny - 1); }
  double dt() const { return 1.0 / sample_rate; }
  double df() const { return 1.0 / (static_cast<double>(nt()) * dt()); }

  /// Symmetric about zero: y(ny - 1 - j) == -y(j) exactly.
  double y(std::size_t j) const {
    const auto centre = static_cast<std::ptrdiff_t>(ny / 2);
    return static_cast<double>(static_cast<std::ptrdiff_t>(j) - centre) * dy();
  }
  double t(std::size_t n) const { return static_cast<double>(n) * dt(); }

  /// Trapezoid weights over the y grid.
  std::vector<double> y_weights() const {
    std::vector<double> w(ny, dy());
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
  }

  /// Throws ConfigError if the grid cannot resolve these mirrors.
  void check(const std::vector<Mirror>& mirrors) const {
    if (!(half_width > 0.0) || !std::isfinite(half_width)) throw ConfigError("y half-width must be positive");
    if (ny < 3 || ny % 2 == 0) throw ConfigError("N_y must be odd and at least 3, got " + std::to_string(ny));
    if (!(duration > 0.0) || !(sample_rate > 0.0) || !std::isfinite(duration) || !std::isfinite(sample_rate))
      throw ConfigError("duration and sample rate must be positive");
    const double samples = duration * sample_rate;
    if (std::abs(samples - std::round(samples)) > 1e-9 * samples || nt() < 4)
      throw ConfigError("duration x sample rate must be an integer number of samples (>= 4)");
    for (const auto& m : mirrors) {
      const double f = m.frequency.value;
      if (sample_rate < 4.0 * f)
        throw ConfigError("sample rate " + format_real(sample_rate) + " Hz is below 4x mirror '" + m.name +
                          "' frequency " + format_real(f) + " Hz");
      const double cycles = f * duration;
      if (std::abs(cycles - std::round(cycles)) > 1e-9)
        throw ConfigError("mirror '" + m.name + "' frequency " + format_real(f) +
                          " Hz is not a multiple of 1/T = " + format_real(1.0 / duration) + " Hz");
    }
  }
};

enum class FieldVariant { exact, paraxial };

inline const char* to_string(FieldVariant v) { return v == FieldVariant::exact ? "exact" : "paraxial"; }

/// Complex field samples, row-major [t][y].
struct FieldFrames {
  SimGrid grid;
  FieldVariant variant = FieldVariant::exact;
  std::vector<Complex> values;

  const Complex& at(std::size_t n, std::size_t j) const { return values[n * grid.ny + j]; }
};

/// Deflection of every path's beam centre at every time sample.
inline std::vector<std::vector<double>> path_displacements(const std::vector<ClassicalPath>& paths,
                                                            const SimGrid& grid,
                                                            const std::vector<Mirror>& mirrors) {
  const std::size_t nt = grid.nt();
  std::vector<std::vector<double>> out;
  out.reserve(paths.size());
  for (const auto& p : paths) {
    std::vector<double> disp(nt, 0.0);
    for (const auto& label : p.mirrors) {
      auto it = std::find_if(mirrors.begin(), mirrors.end(), [&](const Mirror& m) { return m.name == label; });
      if (it == mirrors.end()) throw StructuralError("path references unknown mirror '" + label + "'");
      const double eps = it->amplitude.value;
      const double omega = 2.0 * std::numbers::pi * it->frequency.value;
      const double theta = it->phase.value;
      for (std::size_t n = 0; n < nt; ++n) disp[n] += eps * std::sin(omega * grid.t(n) + theta);
    }
    out.push_back(std::move(disp));
  }
  return out;
}

/// Samples Psi(y, t) on the grid.
inline FieldFrames synthesize_field(const std::vector<ClassicalPath>& paths, const SimGrid& grid,
                                    const std::vector<Mirror>& mirrors, FieldVariant variant) {
  grid.check(mirrors);
  const std::size_t nt = grid.nt();
  const std::size_t ny = grid.ny;
  const auto disp = path_displacements(paths, grid, mirrors);

  std::vector<double> ys(ny), carrier(ny);
  for (std::size_t j = 0; j < ny; ++j) {
    ys[j] = grid.y(j);
    carrier[j] = std::exp(-ys[j] * ys[j]);
  }

  FieldFrames frames{grid, variant, std::vector<Complex>(nt * ny)};
  for (std::size_t n = 0; n < nt; ++n) {
    Complex* row = frames.values.data() + n * ny;
    for (std::size_t p = 0; p < paths.size(); ++p) {
      const Complex amp = paths[p].amplitude;
      const double d = disp[p][n];
      if (variant == FieldVariant::exact) {
        for (std::size_t j = 0; j < ny; ++j) {
          const double u = ys[j] - d;
          row[j] += amp * std::exp(-u * u);
        }
      } else {
        for (std::size_t j = 0; j < ny; ++j) row[j] += amp * (carrier[j] * (1.0 + 2.0 * ys[j] * d));
      }
    }
  }
  return frames;
}

/// Upper-minus-lower half intensity, trapezoid rule in y. The y = 0 sample
/// is split evenly between the halves and therefore cancels.
inline TimeSeries quad_cell_signal(const FieldFrames& frames) {
  const auto& grid = frames.grid;
  const std::size_t ny = grid.ny;
  const std::size_t centre = ny / 2;
  const auto w = grid.y_weights();
  TimeSeries out{std::vector<double>(grid.nt(), 0.0), grid.sample_rate};
  for (std::size_t n = 0; n < grid.nt(); ++n) {
    const Complex* row = frames.values.data() + n * ny;
    double sum = 0.0;
    for (std::size_t k = 1; k <= centre; ++k)
      sum += w[centre + k] * (std::norm(row[centre + k]) - std::norm(row[centre - k]));
    out.samples[n] = sum;
  }
  return out;
}

/// Total detector intensity I(t) = integral of |Psi|^2 dy.
inline TimeSeries total_intensity_signal(const FieldFrames& frames) {
  const auto& grid = frames.grid;
  const auto w = grid.y_weights();
  TimeSeries out{std::vector<double>(grid.nt(), 0.0), grid.sample_rate};
  for (std::size_t n = 0; n < grid.nt(); ++n) {
    const Complex* row = frames.values.data() + n * grid.ny;
    double sum = 0.0;
    for (std::size_t j = 0; j < grid.ny; ++j) sum += w[j] * std::norm(row[j]);
    out.samples[n] = sum;
  }
  return out;
}

/// Sum over the grid of |Psi|^2 dy dt (trapezoid in y).
inline double field_energy(const FieldFrames& frames) {
  double s = 0.0;
  for (double v : total_intensity_signal(frames).samples) s += v;
  return s * frames.grid.dt();
}

/// L2 distance between two fields on the same grid: sqrt of the sum of
/// |a - b|^2 dy dt, trapezoid rule in y.
inline double l2_distance(const FieldFrames& a, const FieldFrames& b) {
  if (a.values.size() != b.values.size() || a.grid.ny != b.grid.ny)
    throw std::invalid_argument("l2_distance: frames on different grids");
  const auto w = a.grid.y_weights();
  const std::size_t ny = a.grid.ny;
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += w[i % ny] * std::norm(a.values[i] - b.values[i]);
  return std::sqrt(s * a.grid.dt());
}

/// I_T(f): the field is Fourier transformed over t at each y, and |Psi(y,f)|^2
/// is integrated over y. Positive and negative frequencies are folded onto
/// one side; scaling satisfies integral() == field_energy().
inline Spectrum total_intensity_spectrum(const FieldFrames& frames) {
  const auto& grid = frames.grid;
  const std::size_t nt = grid.nt();
  const std::size_t ny = grid.ny;
  const double dt = grid.dt();
  const auto w = grid.y_weights();
  const auto bins = fft::forward_columns(frames.values, nt, ny);

  std::vector<double> two_sided(nt, 0.0);
  for (std::size_t k = 0; k < nt; ++k) {
    const Complex* row = bins.data() + k * ny;
    double sum = 0.0;
    for (std::size_t j = 0; j < ny; ++j) sum += w[j] * std::norm(row[j]);
    two_sided[k] = sum * dt * dt;
  }

  Spectrum out;
  out.resolution = grid.df();
  const std::size_t half = nt / 2;
  out.frequencies.resize(half + 1);
  out.values.resize(half + 1);
  for (std::size_t k = 0; k <= half; ++k) {
    out.frequencies[k] = static_cast<double>(k) * out.resolution;
    const bool self_paired = k == 0 || (nt % 2 == 0 && k == half);
    out.values[k] = self_paired ? two_sided[k] : two_sided[k] + two_sided[nt - k];
  }
  return out;
}

}  // namespace mzi
