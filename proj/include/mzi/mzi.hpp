#pragma once

#include "mzi/builtin.hpp"
#include "mzi/circuit.hpp"
#include "mzi/classical_field.hpp"
#include "mzi/expression.hpp"
#include "mzi/fft.hpp"
#include "mzi/mode_algebra.hpp"
#include "mzi/parser.hpp"
#include "mzi/quantum_engine.hpp"
#include "mzi/runner.hpp"
#include "mzi/spectral.hpp"
#include "mzi/weights.hpp"
