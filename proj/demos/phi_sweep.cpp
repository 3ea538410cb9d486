// Sweeps the inner-loop phase of the nested interferometer and prints the
// quantum post-selection weights next to the classical I_T peak weights.

#include <cstdio>
#include <numbers>

#include "mzi/mzi.hpp"

int main() {
  using namespace mzi;
  const Circuit base = builtin_scenario(Scenario::a);
  SimGrid grid;
  grid.ny = 257;

  std::printf("normalized E and F weights (A, B and C share the remainder equally)\n");
  std::printf("%8s  %-30s  %-30s  %s\n", "phi", "quantum E     F", "classical E   F", "max dev");
  for (int k = 0; k <= 12; ++k) {
    const double phi = k * std::numbers::pi / 12;
    const Circuit c = with_phi(base, phi);
    const WeightTable q = mirror_weights(propagate(c), c);
    const ClassicalOutcome cl = run_classical(c, std::nullopt, grid, FieldVariant::exact, 1);
    const ComparisonReport report = compare_weights(q, cl.i_total_weights);
    double qe = 0, qf = 0, ce = 0, cf = 0;
    for (const auto& row : report.rows) {
      if (row.label == "E") qe = row.quantum_normalized, ce = row.classical_normalized;
      if (row.label == "F") qf = row.quantum_normalized, cf = row.classical_normalized;
    }
    std::printf("%8.4f  %-14.6f%-16.6f  %-14.6f%-16.6f  %.2e\n", phi, qe, qf, ce, cf, report.max_deviation);
  }
}
