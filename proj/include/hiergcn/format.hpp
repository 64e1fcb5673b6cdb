#pragma once

#include <fstream>
#include <string>

#include "hiergcn/types.hpp"

namespace hiergcn {

// Shortest decimal string that parses back to the same double (for CSVs).
std::string fmt_double(double v);

// Fixed 17 significant digits (checkpoint format, always round-trip exact).
std::string fmt_double17(double v);

// Open for writing/reading, throwing DataError with the path on failure.
std::ofstream open_out(const std::string& path);
std::ifstream open_in(const std::string& path);

}  // namespace hiergcn
