#pragma once

#include <string>

#include "pooling/milp_model.hpp"

namespace pooling {

// Free-format MPS. Binaries travel inside MARKER INTORG/INTEND ranges with an
// explicit upper bound of 1; maximization is declared through OBJSENSE so the
// writer never sign-flips coefficients. Variable tags ride along as
// "* TAG <var> <tag>" comment lines. Output is byte-deterministic.
std::string write_mps(const MilpModel& m);

// Parses writer-produced files back to an equal model; also accepts the usual
// free-format dialect. Throws with a line number on malformed input.
MilpModel read_mps(const std::string& text);

// CPLEX-style LP format, write-only.
std::string write_lp(const MilpModel& m);

std::string format_number(double v);  // shortest representation that round-trips

}  // namespace pooling
