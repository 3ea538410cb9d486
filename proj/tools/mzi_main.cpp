#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mzi/mzi.hpp"

namespace {

int check_file(const std::string& path, bool print_canonical) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read '" << path << "'\n";
    return mzi::kExitConfig;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  auto parsed = mzi::parse(buf.str());
  for (const auto& d : parsed.diagnostics) std::cerr << path << ":" << d.to_string() << "\n";
  if (!parsed.ok()) return mzi::kExitCircuit;
  if (print_canonical)
    std::cout << mzi::serialize(*parsed.circuit);
  else
    std::cout << path << ": ok (" << parsed.circuit->elements.size() << " elements, "
              << parsed.circuit->mirror_count() << " mirrors)\n";
  return mzi::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nested Mach-Zehnder interferometer simulator with frequency-tagging mirrors"};
  app.require_subcommand(1);

  mzi::RunConfig config;
  std::string scenario, circuit, phi, engine = "both", witness = "both", field = "exact";
  std::vector<std::string> formats;
  double eps = 0.0;

  auto* run = app.add_subcommand("run", "Simulate a circuit and write spectra and weight tables");
  run->add_option("--scenario", scenario, "Built-in scenario: a (phi=pi), b (phi=0), c (phi=0, path c blocked)")
      ->check(CLI::IsMember({"a", "b", "c"}));
  run->add_option("--circuit", circuit, "Path to a .mzi circuit file");
  run->add_option("--phi", phi, "Override the phase element, e.g. 'pi/2'");
  run->add_option("--engine", engine, "quantum | classical | both")
      ->check(CLI::IsMember({"quantum", "classical", "both"}));
  run->add_option("--witness", witness, "delta-i | i-total | both")
      ->check(CLI::IsMember({"delta-i", "i-total", "both"}));
  run->add_option("--field", field, "Classical field model: exact | paraxial")
      ->check(CLI::IsMember({"exact", "paraxial"}));
  run->add_option("--duration", config.grid.duration, "Simulated time window T in seconds");
  run->add_option("--rate", config.grid.sample_rate, "Sample rate in Hz");
  run->add_option("--ny", config.grid.ny, "Number of transverse samples (odd)");
  run->add_option("--ylim", config.grid.half_width, "Transverse half-range L in waist units");
  auto* eps_opt = run->add_option("--eps", eps, "Deflection amplitude for every mirror, in waist units");
  run->add_option("--window", config.window, "Peak window half-width in bins");
  run->add_option("--out", config.out_dir, "Output directory");
  run->add_option("--format", formats, "csv | json | svg (repeatable; default csv and json)")
      ->check(CLI::IsMember({"csv", "json", "svg"}))
      ->expected(1)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  run->add_flag("--log", config.log_scale, "Logarithmic ordinate in SVG plots");

  std::string check_path;
  auto* check = app.add_subcommand("check", "Parse and validate a .mzi file");
  check->add_option("file", check_path, "Circuit file")->required();

  std::string fmt_path;
  auto* fmt = app.add_subcommand("fmt", "Print the canonical form of a .mzi file");
  fmt->add_option("file", fmt_path, "Circuit file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : mzi::kExitConfig;
  }

  if (*check) return check_file(check_path, false);
  if (*fmt) return check_file(fmt_path, true);

  try {
    if (!scenario.empty()) config.scenario = mzi::scenario_from_string(scenario);
    if (!circuit.empty()) config.circuit_path = circuit;
    if (!phi.empty()) {
      try {
        config.phi = mzi::evaluate_expression(phi);
      } catch (const mzi::ExpressionError& e) {
        throw mzi::ConfigError("--phi '" + phi + "': " + e.what());
      }
    }
    if (*eps_opt) config.eps = eps;
    config.engine = engine == "quantum" ? mzi::Engine::quantum
                    : engine == "classical" ? mzi::Engine::classical
                                            : mzi::Engine::both;
    config.witness = witness == "delta-i" ? mzi::Witness::delta_i
                     : witness == "i-total" ? mzi::Witness::i_total
                                            : mzi::Witness::both;
    config.field = field == "paraxial" ? mzi::FieldVariant::paraxial : mzi::FieldVariant::exact;
    if (formats.empty()) formats = {"csv", "json"};
    for (const auto& f : formats)
      config.formats.push_back(f == "csv" ? mzi::OutputFormat::csv
                               : f == "json" ? mzi::OutputFormat::json
                                             : mzi::OutputFormat::svg);
  } catch (const mzi::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return mzi::kExitConfig;
  }
  return mzi::run(config, std::cout, std::cerr);
}
