#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "atlift/fields.hpp"

namespace atlift {

// CSV snapshot: header "index,<name>", one row per entry, full double
// precision. Works for node and cell arrays alike.
void write_values_csv(const std::string& path, const std::string& name,
                      const std::vector<double>& values);
std::vector<double> read_values_csv(const std::string& path);

// Binary snapshot: magic "ATLF", u32 dim, u32 resolution per axis, payload
// of little-endian 64-bit reals.
void write_field_bin(const std::string& path, const GridSpec& grid,
                     const std::vector<double>& values);

struct BinField {
  int dim = 0;
  std::array<std::size_t, 2> res{0, 0};
  std::vector<double> values;
};
BinField read_field_bin(const std::string& path);

// Full-precision, locale-independent double formatting shared by all
// writers (byte-stable output).
std::string format_double(double x);

} // namespace atlift
