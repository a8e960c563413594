#include "atlift/field_io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

#include "atlift/errors.hpp"

namespace atlift {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_values_csv(const std::string& path, const std::string& name,
                      const std::vector<double>& values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << "index," << name << "\n";
  for (std::size_t i = 0; i < values.size(); ++i)
    out << i << "," << format_double(values[i]) << "\n";
}

std::vector<double> read_values_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty CSV: " + path);
  std::vector<double> values;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ConfigError("malformed CSV row in " + path);
    values.push_back(std::stod(line.substr(comma + 1)));
  }
  return values;
}

namespace {

void put_u32_le(std::ofstream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32_le(std::ifstream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f64_le(std::ofstream& out, double x) {
  std::uint64_t v;
  std::memcpy(&v, &x, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64_le(std::ifstream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double x;
  std::memcpy(&x, &v, 8);
  return x;
}

} // namespace

void write_field_bin(const std::string& path, const GridSpec& grid,
                     const std::vector<double>& values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out.write("ATLF", 4);
  put_u32_le(out, static_cast<std::uint32_t>(grid.dim));
  for (int a = 0; a < grid.dim; ++a)
    put_u32_le(out, static_cast<std::uint32_t>(grid.res[a]));
  for (const double x : values) put_f64_le(out, x);
}

BinField read_field_bin(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open for reading: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "ATLF", 4) != 0)
    throw ConfigError("bad field snapshot magic in " + path);
  BinField f;
  f.dim = static_cast<int>(get_u32_le(in));
  if (f.dim != 1 && f.dim != 2)
    throw ConfigError("bad field snapshot dim in " + path);
  std::size_t count = 1;
  for (int a = 0; a < f.dim; ++a) {
    f.res[a] = get_u32_le(in);
    count *= f.res[a];
  }
  f.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) f.values[i] = get_f64_le(in);
  if (!in) throw ConfigError("truncated field snapshot: " + path);
  return f;
}

} // namespace atlift
