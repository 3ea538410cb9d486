#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mzi/builtin.hpp"
#include "mzi/classical_field.hpp"
#include "mzi/parser.hpp"
#include "mzi/quantum_engine.hpp"
#include "mzi/runner.hpp"
#include "random_circuit.hpp"

namespace mzi {
namespace {

constexpr double kPi = std::numbers::pi;

const ClassicalPath* find_path(const std::vector<ClassicalPath>& paths, std::vector<std::string> mirrors) {
  for (const auto& p : paths)
    if (p.mirrors == mirrors) return &p;
  return nullptr;
}

TEST(ExpandPaths, ScenarioARoutes) {
  auto paths = expand_paths(builtin_scenario(Scenario::a));
  ASSERT_EQ(paths.size(), 3u);
  const auto* c = find_path(paths, {"C"});
  const auto* b = find_path(paths, {"E", "B", "F"});
  const auto* a = find_path(paths, {"E", "A", "F"});
  ASSERT_TRUE(c && b && a);
  EXPECT_NEAR(std::abs(c->amplitude - Complex(1.0 / 3)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(b->amplitude - Complex(-1.0 / 3)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(a->amplitude - Complex(-1.0 / 3)), 0.0, 1e-12);
}

TEST(ExpandPaths, ScenarioCLosesTheLowerRoute) {
  auto paths = expand_paths(builtin_scenario(Scenario::c));
  ASSERT_EQ(paths.size(), 2u);
  EXPECT_EQ(find_path(paths, {"C"}), nullptr);
  EXPECT_NE(find_path(paths, {"E", "A", "F"}), nullptr);
}

TEST(ExpandPaths, PhiOverride) {
  const double phi = 1.1;
  auto paths = expand_paths(builtin_scenario(Scenario::a), phi);
  const auto* a = find_path(paths, {"E", "A", "F"});
  ASSERT_NE(a, nullptr);
  EXPECT_NEAR(std::abs(a->amplitude - std::polar(1.0 / 3, phi)), 0.0, 1e-12);
}

// Summing route amplitudes per set of mirrors must give the quantum amplitude
// of the matching tag ket.
TEST(ExpandPaths, AgreesWithQuantumAmplitudes) {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const Circuit c = testing::random_circuit(rng, 10);
    const auto paths = expand_paths(c);
    const auto q = propagate(c);
    const auto mirrors = c.mirrors();
    std::map<std::string, Complex> summed;
    for (const auto& p : paths) {
      TagVector tag(mirrors.size());
      for (const auto& label : p.mirrors)
        for (const auto& m : mirrors)
          if (m.name == label) tag = tag.with(m.index);
      summed[tag.to_string()] += p.amplitude;
    }
    for (const auto& [bits, amp] : summed)
      EXPECT_NEAR(std::abs(q.state.amplitude(c.detector, bits) - amp), 0.0, 1e-12) << serialize(c);
    for (const auto& [ket, amp] : q.state.terms())
      EXPECT_TRUE(summed.count(ket.tag.to_string())) << serialize(c);
  }
}

TEST(SimGrid, SymmetricAxis) {
  SimGrid g;
  for (std::size_t j = 0; j < g.ny; ++j) EXPECT_EQ(g.y(g.ny - 1 - j), -g.y(j));
  EXPECT_EQ(g.y(g.ny / 2), 0.0);
  EXPECT_EQ(g.nt(), 4096u);
  EXPECT_DOUBLE_EQ(g.df(), 1.0);
}

TEST(SimGrid, RejectsUnresolvableSettings) {
  const auto mirrors = builtin_scenario(Scenario::a).mirrors();
  SimGrid even;
  even.ny = 512;
  EXPECT_THROW(even.check(mirrors), ConfigError);
  SimGrid slow;
  slow.sample_rate = 1000;
  EXPECT_THROW(slow.check(mirrors), ConfigError);
  SimGrid off_bin;
  off_bin.duration = 0.15;
  off_bin.sample_rate = 4000;
  EXPECT_THROW(off_bin.check(mirrors), ConfigError);
  SimGrid ok;
  EXPECT_NO_THROW(ok.check(mirrors));
}

TEST(SynthesizeField, ParaxialMatchesClosedForms) {
  SimGrid g;
  g.duration = 0.1;
  g.sample_rate = 4000;
  g.ny = 65;
  const double eps = 1e-3;
  const Circuit base = with_deflection(builtin_scenario(Scenario::a), eps);
  const auto mirrors = base.mirrors();
  auto d = [&](const std::string& label, double t) {
    for (const auto& m : mirrors)
      if (m.name == label) return eps * std::sin(2 * kPi * m.frequency.value * t);
    return 0.0;
  };
  // Scenario a: -(1/3) e^{-y^2} [1 + 2y (dA + dB - dC + 2dE + 2dF)]
  // Scenario c: (2/3) y e^{-y^2} (dA - dB)
  auto fa = synthesize_field(expand_paths(base), g, mirrors, FieldVariant::paraxial);
  const Circuit c = with_deflection(builtin_scenario(Scenario::c), eps);
  auto fc = synthesize_field(expand_paths(c), g, mirrors, FieldVariant::paraxial);
  for (std::size_t n = 0; n < g.nt(); n += 7) {
    const double t = g.t(n);
    const double Da = d("A", t) + d("B", t) - d("C", t) + 2 * d("E", t) + 2 * d("F", t);
    for (std::size_t j = 0; j < g.ny; ++j) {
      const double y = g.y(j);
      const Complex ea = -(1.0 / 3) * std::exp(-y * y) * (1 + 2 * y * Da);
      EXPECT_NEAR(std::abs(fa.at(n, j) - ea), 0.0, 1e-15);
      const Complex ec = (2.0 / 3) * y * std::exp(-y * y) * (d("A", t) - d("B", t));
      EXPECT_NEAR(std::abs(fc.at(n, j) - ec), 0.0, 1e-15);
    }
  }
}

TEST(SynthesizeField, VariantsCoincideWithoutDeflection) {
  SimGrid g;
  g.duration = 0.1;
  g.sample_rate = 2000;
  g.ny = 33;
  for (Scenario s : {Scenario::a, Scenario::b, Scenario::c}) {
    const Circuit c = with_deflection(builtin_scenario(s), 0.0);
    const auto paths = expand_paths(c);
    auto ex = synthesize_field(paths, g, c.mirrors(), FieldVariant::exact);
    auto px = synthesize_field(paths, g, c.mirrors(), FieldVariant::paraxial);
    EXPECT_LT(l2_distance(ex, px), 1e-15);
    for (std::size_t j = 0; j < g.ny; ++j) EXPECT_EQ(ex.at(0, j), ex.at(g.nt() - 1, j));
  }
}

// First-order quad-cell response: dI(t) = (4/9) G D(t), G = sum_j |y_j| w_j
// e^{-2 y_j^2}, so a unit-coefficient mirror puts ((4/9) G eps)^2 / 2 into
// its bin.
TEST(QuadCell, ScenarioAPeaksFollowFirstOrderResponse) {
  const SimGrid g;
  const double eps = 1e-3;
  const Circuit c = with_deflection(builtin_scenario(Scenario::a), eps);
  auto frames = synthesize_field(expand_paths(c), g, c.mirrors(), FieldVariant::paraxial);
  auto spec = power_spectrum(quad_cell_signal(frames));
  const auto w = g.y_weights();
  double G = 0.0;
  for (std::size_t j = 0; j < g.ny; ++j) G += w[j] * std::abs(g.y(j)) * std::exp(-2 * g.y(j) * g.y(j));
  const double unit = std::pow(4.0 / 9 * G * eps, 2) / 2;
  EXPECT_NEAR(spec.at(230) / unit, 1.0, 1e-9);
  EXPECT_NEAR(spec.at(250) / unit, 1.0, 1e-9);
  EXPECT_NEAR(spec.at(270) / unit, 1.0, 1e-9);
  EXPECT_NEAR(spec.at(290) / unit, 4.0, 1e-9);
  EXPECT_NEAR(spec.at(310) / unit, 4.0, 1e-9);
}

TEST(QuadCell, ExactFieldRatios) {
  const SimGrid g;
  const Circuit c = with_deflection(builtin_scenario(Scenario::a), 1e-3);
  auto spec = power_spectrum(quad_cell_signal(synthesize_field(expand_paths(c), g, c.mirrors(), FieldVariant::exact)));
  for (double f : {250.0, 270.0}) EXPECT_NEAR(spec.at(f) / spec.at(230), 1.0, 1e-4);
  for (double f : {290.0, 310.0}) EXPECT_NEAR(spec.at(f) / spec.at(230), 4.0, 1e-4);
}

TEST(QuadCell, EvenFieldGivesNoSignal) {
  const SimGrid g;
  for (FieldVariant v : {FieldVariant::exact, FieldVariant::paraxial}) {
    const Circuit a = with_deflection(builtin_scenario(Scenario::a), 1e-3);
    const Circuit c = with_deflection(builtin_scenario(Scenario::c), 1e-3);
    auto sa = quad_cell_signal(synthesize_field(expand_paths(a), g, a.mirrors(), v));
    auto sc = quad_cell_signal(synthesize_field(expand_paths(c), g, c.mirrors(), v));
    double peak_a = 0.0, peak_c = 0.0;
    for (double x : sa.samples) peak_a = std::max(peak_a, std::abs(x));
    for (double x : sc.samples) peak_c = std::max(peak_c, std::abs(x));
    EXPECT_GT(peak_a, 0.0);
    EXPECT_LE(peak_c, 1e-6 * peak_a) << to_string(v);
  }
}

// Paraxial I_T: a mirror whose summed route coefficient is c contributes
// |c|^2 eps^2 sqrt(pi/2) / 2 to its peak weight.
TEST(TotalIntensity, PeakWeightsFollowRouteCoefficients) {
  const SimGrid g;
  const double eps = 1e-3;
  const double unit = eps * eps * std::sqrt(kPi / 2) / 2;
  const Circuit c = with_deflection(builtin_scenario(Scenario::a), eps);
  for (double phi : {0.0, kPi / 3, kPi}) {
    auto frames = synthesize_field(expand_paths(c, phi), g, c.mirrors(), FieldVariant::paraxial);
    auto w = extract_peak_weights(total_intensity_spectrum(frames), mirror_frequencies(c), 1);
    for (const char* m : {"A", "B", "C"}) EXPECT_NEAR(w.at(m) / unit, 1.0 / 9, 1e-9) << m;
    const double s = std::sin(phi / 2);
    for (const char* m : {"E", "F"}) EXPECT_NEAR(w.at(m) / unit, 4.0 / 9 * s * s, 1e-9) << m << " " << phi;
  }
}

TEST(TotalIntensity, ScenarioCKeepsWhichPathPeaks) {
  const SimGrid g;
  const Circuit c = with_deflection(builtin_scenario(Scenario::c), 1e-3);
  auto frames = synthesize_field(expand_paths(c), g, c.mirrors(), FieldVariant::exact);
  auto w = extract_peak_weights(total_intensity_spectrum(frames), mirror_frequencies(c), 1);
  EXPECT_NEAR(w.at("A") / w.at("B"), 1.0, 1e-4);
  for (const char* m : {"C", "E", "F"}) EXPECT_LE(w.at(m), 1e-6 * w.at("A")) << m;
}

TEST(TotalIntensity, Parseval) {
  std::mt19937 rng(5);
  SimGrid g;
  g.duration = 0.25;
  g.sample_rate = 4096;
  g.ny = 101;
  int checked = 0;
  for (int trial = 0; trial < 40 && checked < 8; ++trial) {
    Circuit c = testing::random_circuit(rng, 10);
    bool on_grid = true;
    for (auto& el : c.elements)
      if (auto* m = std::get_if<Mirror>(&el)) {
        m->frequency = RealExpr{4.0 * std::round(m->frequency.value / 4.0) + 4.0};
        on_grid = on_grid && m->frequency.value * 4 <= g.sample_rate;
      }
    if (!on_grid || has_errors(validate(c))) continue;
    for (FieldVariant v : {FieldVariant::exact, FieldVariant::paraxial}) {
      auto frames = synthesize_field(expand_paths(c), g, c.mirrors(), v);
      const double energy = field_energy(frames);
      if (energy == 0.0) continue;
      EXPECT_NEAR(total_intensity_spectrum(frames).integral() / energy, 1.0, 1e-9);
    }
    ++checked;
  }
  EXPECT_GT(checked, 3);
}

// ||exact - paraxial|| relative to the first-order modulation shrinks
// linearly with eps.
TEST(ParaxialConvergence, LinearInDeflection) {
  SimGrid g;
  g.sample_rate = 2048;
  g.ny = 257;
  for (Scenario s : {Scenario::a, Scenario::b, Scenario::c}) {
    std::vector<double> rel;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      const Circuit c = with_deflection(builtin_scenario(s), eps);
      const auto paths = expand_paths(c);
      auto ex = synthesize_field(paths, g, c.mirrors(), FieldVariant::exact);
      auto px = synthesize_field(paths, g, c.mirrors(), FieldVariant::paraxial);
      const Circuit still = with_deflection(c, 0.0);
      auto carrier = synthesize_field(expand_paths(still), g, still.mirrors(), FieldVariant::paraxial);
      rel.push_back(l2_distance(ex, px) / l2_distance(px, carrier));
      EXPECT_LE(rel.back(), 10 * eps);
    }
    EXPECT_NEAR(rel[0] / rel[1], 10.0, 2.0);
    EXPECT_NEAR(rel[1] / rel[2], 10.0, 2.0);
  }
}

}  // namespace
}  // namespace mzi
