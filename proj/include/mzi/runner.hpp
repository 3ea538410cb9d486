#pragma once

// End-to-end scenario runs: load a circuit, run the requested engines and
// write spectra, weight tables and comparison reports.
//
// Output files (in RunConfig::out_dir):
//   csv : spectrum_delta_i.csv, spectrum_i_total.csv  (frequency_hz,value)
//         weights.csv  (mirror,weight_quantum,weight_classical,deviation)
//   json: report.json  (config, weights, spectra, comparison, peaks, warnings)
//   svg : spectrum_delta_i.svg, spectrum_i_total.svg

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mzi/builtin.hpp"
#include "mzi/classical_field.hpp"
#include "mzi/parser.hpp"
#include "mzi/quantum_engine.hpp"
#include "mzi/spectral.hpp"

namespace mzi {

enum class Engine { quantum, classical, both };
enum class Witness { delta_i, i_total, both };
enum class OutputFormat { csv, json, svg };

inline const char* to_string(Engine e) {
  switch (e) {
    case Engine::quantum: return "quantum";
    case Engine::classical: return "classical";
    default: return "both";
  }
}

inline const char* to_string(Witness w) {
  switch (w) {
    case Witness::delta_i: return "delta-i";
    case Witness::i_total: return "i-total";
    default: return "both";
  }
}

/// Exit codes of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitCircuit = 1;
inline constexpr int kExitConfig = 2;

/// A mirror peak counts as present when its weight exceeds this fraction of
/// the strongest I_T mirror weight of the same run.
inline constexpr double kPeakThreshold = 1e-6;

struct RunConfig {
  std::optional<Scenario> scenario;
  std::optional<std::filesystem::path> circuit_path;
  std::optional<RealExpr> phi;
  Engine engine = Engine::both;
  Witness witness = Witness::both;
  FieldVariant field = FieldVariant::exact;
  SimGrid grid;
  std::optional<double> eps;
  std::size_t window = 1;
  std::filesystem::path out_dir = ".";
  std::vector<OutputFormat> formats;
  bool log_scale = false;
};

struct ClassicalOutcome {
  std::vector<ClassicalPath> paths;
  Spectrum delta_i;
  Spectrum i_total;
  WeightTable delta_i_weights;
  WeightTable i_total_weights;
  std::vector<std::string> delta_i_peaks;
  std::vector<std::string> i_total_peaks;
};

struct RunResult {
  std::string circuit_name;
  Circuit circuit;
  std::optional<double> phi;
  std::optional<WeightTable> quantum;
  std::optional<ClassicalOutcome> classical;
  std::optional<ComparisonReport> compare_i_total;
  std::optional<ComparisonReport> compare_delta_i;
  std::vector<std::string> warnings;
};

/// Circuit diagnostics, kept separate from configuration errors so the
/// front end can map them to distinct exit codes.
class CircuitError : public std::runtime_error {
 public:
  explicit CircuitError(std::vector<Diagnostic> diags)
      : std::runtime_error("circuit has errors"), diagnostics(std::move(diags)) {}
  std::vector<Diagnostic> diagnostics;
};

inline bool wants(Witness w, Witness which) { return w == Witness::both || w == which; }

inline std::vector<std::pair<std::string, double>> mirror_frequencies(const Circuit& circuit) {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& m : circuit.mirrors()) out.emplace_back(m.name, m.frequency.value);
  return out;
}

inline std::vector<std::string> present_peaks(const WeightTable& weights, double reference) {
  std::vector<std::string> out;
  if (!(reference > 0.0)) return out;
  for (const auto& [label, w] : weights.entries)
    if (w > kPeakThreshold * reference) out.push_back(label);
  return out;
}

/// Classical pipeline: paths, field, both witnesses and their weights.
inline ClassicalOutcome run_classical(const Circuit& circuit, std::optional<double> phi, const SimGrid& grid,
                                      FieldVariant variant, std::size_t window) {
  ClassicalOutcome out;
  out.paths = expand_paths(circuit, phi);
  const auto mirrors = circuit.mirrors();
  const FieldFrames frames = synthesize_field(out.paths, grid, mirrors, variant);
  const auto freqs = mirror_frequencies(circuit);
  out.delta_i = power_spectrum(quad_cell_signal(frames));
  out.i_total = total_intensity_spectrum(frames);
  out.delta_i_weights = extract_peak_weights(out.delta_i, freqs, window);
  out.i_total_weights = extract_peak_weights(out.i_total, freqs, window);
  double reference = 0.0;
  for (const auto& e : out.i_total_weights.entries) reference = std::max(reference, e.second);
  out.delta_i_peaks = present_peaks(out.delta_i_weights, reference);
  out.i_total_peaks = present_peaks(out.i_total_weights, reference);
  return out;
}

inline Circuit load_circuit(const RunConfig& config, std::string& name, std::vector<std::string>& warnings) {
  if (config.scenario && config.circuit_path) throw ConfigError("give either --scenario or --circuit, not both");
  if (config.circuit_path) {
    std::ifstream in(*config.circuit_path, std::ios::binary);
    if (!in) throw ConfigError("cannot read circuit file '" + config.circuit_path->string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    auto parsed = parse(buf.str());
    if (!parsed.ok()) throw CircuitError(parsed.diagnostics);
    for (const auto& d : parsed.diagnostics) warnings.push_back(config.circuit_path->string() + ":" + d.to_string());
    name = config.circuit_path->string();
    return *parsed.circuit;
  }
  const Scenario s = config.scenario.value_or(Scenario::a);
  name = std::string("builtin scenario ") + (s == Scenario::a ? "a" : s == Scenario::b ? "b" : "c");
  return builtin_scenario(s);
}

/// Runs the configured engines without writing anything.
inline RunResult simulate(const RunConfig& config) {
  RunResult result;
  result.circuit = load_circuit(config, result.circuit_name, result.warnings);
  if (config.eps) result.circuit = with_deflection(result.circuit, *config.eps);
  if (config.phi) {
    result.circuit = with_phi(result.circuit, config.phi->value);
    result.phi = config.phi->value;
  }
  if (config.window > 64) throw ConfigError("peak window must be at most 64 bins");

  if (config.engine != Engine::classical) {
    result.quantum = mirror_weights(propagate(result.circuit), result.circuit);
  }
  if (config.engine != Engine::quantum) {
    result.classical = run_classical(result.circuit, std::nullopt, config.grid, config.field, config.window);
    auto& c = *result.classical;
    for (const auto* table : {&c.delta_i_weights, &c.i_total_weights})
      for (const auto& w : table->warnings)
        if (std::find(result.warnings.begin(), result.warnings.end(), w) == result.warnings.end())
          result.warnings.push_back(w);
  }
  if (result.quantum && result.classical) {
    if (wants(config.witness, Witness::i_total))
      result.compare_i_total = compare_weights(*result.quantum, result.classical->i_total_weights);
    if (wants(config.witness, Witness::delta_i))
      result.compare_delta_i = compare_weights(*result.quantum, result.classical->delta_i_weights);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Writers

inline std::string spectrum_csv(const Spectrum& s) {
  std::string out = "frequency_hz,value\n";
  for (std::size_t k = 0; k < s.size(); ++k) out += format_real(s.frequencies[k]) + "," + format_real(s.values[k]) + "\n";
  return out;
}

/// The classical column uses the I_T weights when available, else delta-I.
inline std::string weights_csv(const RunResult& r) {
  std::string out = "mirror,weight_quantum,weight_classical,deviation\n";
  const ComparisonReport* cmp = r.compare_i_total ? &*r.compare_i_total : r.compare_delta_i ? &*r.compare_delta_i : nullptr;
  const WeightTable* classical = nullptr;
  if (r.classical)
    classical = (r.compare_i_total || !r.compare_delta_i) ? &r.classical->i_total_weights : &r.classical->delta_i_weights;
  for (const auto& m : r.circuit.mirrors()) {
    out += m.name + ",";
    if (r.quantum) out += format_real(r.quantum->at(m.name));
    out += ",";
    if (classical) out += format_real(classical->at(m.name));
    out += ",";
    if (cmp)
      for (const auto& row : cmp->rows)
        if (row.label == m.name) out += format_real(row.deviation);
    out += "\n";
  }
  return out;
}

inline nlohmann::ordered_json weights_json(const WeightTable& t) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [label, w] : t.entries) j[label] = w;
  return j;
}

inline nlohmann::ordered_json comparison_json(const ComparisonReport& c) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : c.rows)
    rows.push_back({{"mirror", row.label},
                    {"weight_quantum", row.quantum},
                    {"weight_classical", row.classical},
                    {"normalized_quantum", row.quantum_normalized},
                    {"normalized_classical", row.classical_normalized},
                    {"deviation", row.deviation}});
  return {{"rows", rows}, {"max_deviation", c.max_deviation}};
}

inline nlohmann::ordered_json spectrum_json(const Spectrum& s) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < s.size(); ++k) arr.push_back({s.frequencies[k], s.values[k]});
  return arr;
}

inline std::string report_json(const RunConfig& config, const RunResult& r) {
  using nlohmann::ordered_json;
  ordered_json cfg;
  cfg["circuit"] = r.circuit_name;
  cfg["phi"] = r.phi ? ordered_json(*r.phi) : ordered_json(nullptr);
  cfg["engine"] = to_string(config.engine);
  cfg["witness"] = to_string(config.witness);
  cfg["field"] = to_string(config.field);
  cfg["grid"] = {{"duration_s", config.grid.duration},
                 {"sample_rate_hz", config.grid.sample_rate},
                 {"ny", config.grid.ny},
                 {"ylim", config.grid.half_width}};
  cfg["eps"] = config.eps ? ordered_json(*config.eps) : ordered_json(nullptr);
  cfg["window_bins"] = config.window;

  ordered_json weights = ordered_json::object();
  if (r.quantum) {
    weights["quantum"] = weights_json(*r.quantum);
    weights["lost_norm"] = r.quantum->lost_norm;
  }
  ordered_json spectra = ordered_json::object();
  ordered_json peaks = ordered_json::object();
  if (r.classical) {
    if (wants(config.witness, Witness::delta_i)) {
      weights["classical_delta_i"] = weights_json(r.classical->delta_i_weights);
      spectra["delta_i"] = spectrum_json(r.classical->delta_i);
      peaks["delta_i"] = r.classical->delta_i_peaks;
    }
    if (wants(config.witness, Witness::i_total)) {
      weights["classical_i_total"] = weights_json(r.classical->i_total_weights);
      spectra["i_total"] = spectrum_json(r.classical->i_total);
      peaks["i_total"] = r.classical->i_total_peaks;
    }
    weights["separable"] = r.classical->i_total_weights.separable && r.classical->delta_i_weights.separable;
  }
  ordered_json comparison = ordered_json::object();
  if (r.compare_i_total) comparison["i_total"] = comparison_json(*r.compare_i_total);
  if (r.compare_delta_i) comparison["delta_i"] = comparison_json(*r.compare_delta_i);

  ordered_json root;
  root["config"] = cfg;
  root["weights"] = weights;
  root["spectra"] = spectra;
  root["comparison"] = comparison.empty() ? ordered_json(nullptr) : comparison;
  root["peaks"] = peaks;
  root["warnings"] = r.warnings;
  return root.dump(2) + "\n";
}

/// Stem plot of a spectrum with mirror frequencies marked.
inline std::string spectrum_svg(const Spectrum& s, const std::vector<std::pair<std::string, double>>& mirrors,
                                const std::string& title, bool log_scale) {
  const double width = 720, height = 360, left = 70, right = 20, top = 40, bottom = 50;
  const double plot_w = width - left - right, plot_h = height - top - bottom;
  double f_max = 0.0;
  for (const auto& m : mirrors) f_max = std::max(f_max, m.second);
  f_max = f_max > 0.0 ? std::min(s.nyquist(), 1.5 * f_max) : s.nyquist();
  const std::size_t k_max = std::min(s.size() - 1, s.bin_of(f_max));

  double v_max = 0.0;
  for (std::size_t k = 1; k <= k_max; ++k) v_max = std::max(v_max, s.values[k]);
  const double floor_ratio = 1e-12;
  auto scale = [&](double v) {
    if (!(v_max > 0.0)) return 0.0;
    if (!log_scale) return v / v_max;
    double r = std::max(v / v_max, floor_ratio);
    return 1.0 + std::log10(r) / 12.0;
  };
  auto fx = [&](double f) { return left + plot_w * f / (f_max > 0 ? f_max : 1.0); };
  auto fy = [&](double u) { return top + plot_h * (1.0 - u); };

  std::ostringstream o;
  o << std::setprecision(6);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
    << title << "</text>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << fy(0) << "\" x2=\"" << left + plot_w << "\" y2=\"" << fy(0)
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << fy(0) << "\" x2=\"" << left << "\" y2=\"" << fy(1)
    << "\" stroke=\"black\"/>\n";
  o << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 10
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">frequency (Hz)</text>\n";
  o << "<text x=\"16\" y=\"" << top + plot_h / 2 << "\" transform=\"rotate(-90 16 " << top + plot_h / 2
    << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
    << (log_scale ? "log10 relative power" : "relative power") << "</text>\n";
  for (const auto& [label, f] : mirrors) {
    o << "<line x1=\"" << fx(f) << "\" y1=\"" << fy(0) << "\" x2=\"" << fx(f) << "\" y2=\"" << fy(1)
      << "\" stroke=\"#cccccc\" stroke-dasharray=\"3,3\"/>\n";
    o << "<text x=\"" << fx(f) << "\" y=\"" << fy(0) + 16
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << label << "</text>\n";
  }
  // Carrier bin is left out; the plot shows the modulation only.
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double u = scale(s.values[k]);
    if (u <= 0.0) continue;
    o << "<line x1=\"" << fx(s.frequencies[k]) << "\" y1=\"" << fy(0) << "\" x2=\"" << fx(s.frequencies[k])
      << "\" y2=\"" << fy(u) << "\" stroke=\"#1f5fa8\" stroke-width=\"1.5\"/>\n";
  }
  if (!(v_max > 0.0))
    o << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << top + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">flat spectrum</text>\n";
  o << "</svg>\n";
  return o.str();
}

inline std::string format_weights(const WeightTable& t) {
  std::ostringstream o;
  o << std::setprecision(6);
  for (const auto& [label, w] : t.entries) o << "  " << std::left << std::setw(6) << label << w << "\n";
  return o.str();
}

inline std::string format_peaks(const std::vector<std::string>& peaks) {
  if (peaks.empty()) return "none (flat spectrum)";
  std::string s;
  for (const auto& p : peaks) s += (s.empty() ? "" : " ") + p;
  return s;
}

inline std::string summary_text(const RunConfig& config, const RunResult& r) {
  std::ostringstream o;
  o << "circuit: " << r.circuit_name;
  if (r.phi) o << " (phi = " << *r.phi << ")";
  o << "\n";
  if (r.quantum) {
    o << "quantum post-selection weights:\n" << format_weights(*r.quantum);
    o << "  lost norm " << r.quantum->lost_norm << "\n";
  }
  if (r.classical) {
    o << "classical field: " << to_string(config.field) << "\n";
    if (wants(config.witness, Witness::delta_i)) {
      o << "delta-I peak weights:\n" << format_weights(r.classical->delta_i_weights);
      o << "delta-I peaks: " << format_peaks(r.classical->delta_i_peaks) << "\n";
    }
    if (wants(config.witness, Witness::i_total)) {
      o << "I_T peak weights:\n" << format_weights(r.classical->i_total_weights);
      o << "I_T peaks: " << format_peaks(r.classical->i_total_peaks) << "\n";
    }
  }
  if (r.compare_i_total) o << "I_T vs quantum, max normalized deviation: " << r.compare_i_total->max_deviation << "\n";
  if (r.compare_delta_i) o << "delta-I vs quantum, max normalized deviation: " << r.compare_delta_i->max_deviation << "\n";
  return o.str();
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content,
                       std::vector<std::filesystem::path>& written) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  written.push_back(path);
  out << content;
  out.close();
  if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

}  // namespace detail

/// Writes every requested artifact; returns the paths written.
inline std::vector<std::filesystem::path> write_outputs(const RunConfig& config, const RunResult& r) {
  std::vector<std::filesystem::path> written;
  try {
    std::error_code ec;
    std::filesystem::create_directories(config.out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + config.out_dir.string() + "': " + ec.message());
    auto formats = config.formats;
    std::sort(formats.begin(), formats.end());
    formats.erase(std::unique(formats.begin(), formats.end()), formats.end());
    const auto freqs = mirror_frequencies(r.circuit);
    for (auto fmt : formats) {
      switch (fmt) {
        case OutputFormat::csv:
          if (r.classical && wants(config.witness, Witness::delta_i))
            detail::write_file(config.out_dir / "spectrum_delta_i.csv", spectrum_csv(r.classical->delta_i), written);
          if (r.classical && wants(config.witness, Witness::i_total))
            detail::write_file(config.out_dir / "spectrum_i_total.csv", spectrum_csv(r.classical->i_total), written);
          detail::write_file(config.out_dir / "weights.csv", weights_csv(r), written);
          break;
        case OutputFormat::json:
          detail::write_file(config.out_dir / "report.json", report_json(config, r), written);
          break;
        case OutputFormat::svg:
          if (r.classical && wants(config.witness, Witness::delta_i))
            detail::write_file(config.out_dir / "spectrum_delta_i.svg",
                               spectrum_svg(r.classical->delta_i, freqs, "Quad-cell difference power spectrum",
                                            config.log_scale),
                               written);
          if (r.classical && wants(config.witness, Witness::i_total))
            detail::write_file(config.out_dir / "spectrum_i_total.svg",
                               spectrum_svg(r.classical->i_total, freqs, "Total field-spectrum intensity",
                                            config.log_scale),
                               written);
          break;
      }
    }
  } catch (...) {
    for (const auto& p : written) {
      std::error_code ignore;
      std::filesystem::remove(p, ignore);
    }
    throw;
  }
  return written;
}

/// Full run with exit-code mapping: 0 success, 1 circuit diagnostics,
/// 2 configuration errors.
inline int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    RunResult result = simulate(config);
    write_outputs(config, result);
    for (const auto& w : result.warnings) err << "warning: " << w << "\n";
    out << summary_text(config, result);
    return kExitOk;
  } catch (const CircuitError& e) {
    const std::string file = config.circuit_path ? config.circuit_path->string() + ":" : "";
    for (const auto& d : e.diagnostics) err << file << d.to_string() << "\n";
    return kExitCircuit;
  } catch (const StructuralError& e) {
    err << "error: " << e.what() << "\n";
    return kExitCircuit;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace mzi
