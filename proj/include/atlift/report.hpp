#pragma once

#include <string>
#include <vector>

namespace atlift {

// Hex SHA-1 of a byte string / file (content hashes for the run manifest).
std::string sha1_hex(const std::string& bytes);
std::string sha1_file(const std::string& path);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Minimal static SVG line plot (log-x optional); presentation-only output.
void write_svg_lineplot(const std::string& path, const std::string& title,
                        const std::string& x_label,
                        const std::string& y_label,
                        const std::vector<PlotSeries>& series,
                        bool log_x = false);

} // namespace atlift
