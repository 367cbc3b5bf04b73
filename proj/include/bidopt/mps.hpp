#pragma once

#include <string>

#include "bidopt/lp_model.hpp"

namespace bidopt {

// Fixed-column MPS with an SOS section. Fields start at the classic columns
// 2, 5, 15, 25, 40 and 50; a name longer than its field pushes the rest of
// the line right by one space. Numbers use the shortest text that reads back
// to the same double. The objective sense is carried by a leading
// "* OBJSENSE MAX" or "* OBJSENSE MIN" comment; without it MAX is assumed.
std::string write_mps(const LpModel& model);

// Reads the subset written by write_mps: whitespace-separated fields, the
// sections NAME, ROWS, COLUMNS, RHS, BOUNDS, SOS and ENDATA, and an optional
// OBJSENSE section. Errors are InputError with "line L, column C" prefixes.
LpModel read_mps(const std::string& text);

LpModel read_mps_file(const std::string& path);
void write_mps_file(const LpModel& model, const std::string& path);

}  // namespace bidopt
