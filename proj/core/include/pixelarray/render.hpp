#pragma once

#include <string>

#include "pixelarray/array.hpp"

namespace pixelarray {

// Plain PBM (magic P1) for 2-D arrays: height = first port's resolution,
// width = second's, row i / column j = entry (i, j), 1 = on (black).
std::string render_pbm(const BoolArray& array);

// Terminal preview of a 2-D array, same orientation: '#' on, '.' off.
std::string render_ascii(const BoolArray& array);

// Any dimension: {"pack": [port specs], "on_entries": [[coords], ...]} with
// entries sorted lexicographically. parse_json_array inverts it exactly.
std::string render_json(const BoolArray& array);
BoolArray parse_json_array(const std::string& text);

}  // namespace pixelarray
