#pragma once

// The nested interferometer with five vibrating mirrors, in three
// configurations:
//   a: inner phase pi, all arms open
//   b: inner phase 0, all arms open
//   c: inner phase 0, outer lower arm c blocked after mirror C
//
// Outer splitters BS1/BS4 have t = sqrt(1/3) (1:2 intensity split); inner
// splitters BS2/BS3 are balanced. Mirror frequencies are simulation defaults
// chosen to sit on exact bins of a 1 s window.

#include <stdexcept>
#include <string>

#include "mzi/parser.hpp"

namespace mzi {

enum class Scenario { a, b, c };

inline Scenario scenario_from_string(std::string_view s) {
  if (s == "a") return Scenario::a;
  if (s == "b") return Scenario::b;
  if (s == "c") return Scenario::c;
  throw ConfigError("unknown scenario '" + std::string(s) + "' (expected a, b or c)");
}

inline constexpr double kDefaultDeflection = 1e-3;

inline std::string builtin_text(Scenario which) {
  const char* phi = which == Scenario::a ? "pi" : "0";
  std::string text;
  text += "# Nested Mach-Zehnder interferometer, scenario ";
  text += which == Scenario::a ? "a" : which == Scenario::b ? "b" : "c";
  text +=
      "\n"
      "source c\n"
      "tags A B C E F\n"
      "bs BS1 in=(c,) out=(c,b) t=sqrt(1/3)\n"
      "mirror C path=c freq=270 amp=0.001\n";
  if (which == Scenario::c) text += "block path=c\n";
  text +=
      "mirror E path=b freq=290 amp=0.001\n"
      "bs BS2 in=(b,) out=(b,a) t=sqrt(1/2)\n"
      "mirror A path=a freq=230 amp=0.001\n"
      "mirror B path=b freq=250 amp=0.001\n";
  text += std::string("phase path=a phi=") + phi + "\n";
  text +=
      "bs BS3 in=(b,a) out=(b,a) t=sqrt(1/2)\n"
      "discard a\n"
      "mirror F path=b freq=310 amp=0.001\n"
      "bs BS4 in=(c,b) out=(c,b) t=sqrt(1/3)\n"
      "discard b\n"
      "detect c\n";
  return text;
}

inline Circuit builtin_scenario(Scenario which) {
  auto parsed = parse(builtin_text(which));
  if (!parsed.ok()) throw std::logic_error("built-in circuit failed to parse: " + parsed.diagnostics.front().to_string());
  return *parsed.circuit;
}

}  // namespace mzi
