#pragma once

#include <string>

#include "stiff/grid.hpp"

namespace stiff {

inline constexpr long long kFieldFormatVersion = 1;

// Binary layout: five little-endian int64 (nx, ny, bits of Lx, bits of Ly, version),
// then float64 samples row-major: upper rows j = 0..ny, then lower rows j = 0..ny.
void write_field_binary(const SplitField& f, const std::string& path);
SplitField read_field_binary(const std::string& path);

// CSV with header x1,x2,side,value (one line per node).
void write_field_csv(const SplitField& f, const std::string& path);

}  // namespace stiff
