#include "atlift/report.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "atlift/errors.hpp"

namespace atlift {

namespace {

struct Sha1 {
  std::uint32_t h[5] = {0x67452301u, 0xEFCDAB89u, 0x98BADCFEu, 0x10325476u,
                        0xC3D2E1F0u};
  unsigned char block[64];
  std::size_t block_len = 0;
  std::uint64_t total = 0;

  static std::uint32_t rol(std::uint32_t x, int n) {
    return (x << n) | (x >> (32 - n));
  }

  void process() {
    std::uint32_t w[80];
    for (int i = 0; i < 16; ++i)
      w[i] = (static_cast<std::uint32_t>(block[4 * i]) << 24) |
             (static_cast<std::uint32_t>(block[4 * i + 1]) << 16) |
             (static_cast<std::uint32_t>(block[4 * i + 2]) << 8) |
             static_cast<std::uint32_t>(block[4 * i + 3]);
    for (int i = 16; i < 80; ++i)
      w[i] = rol(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);
    std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
    for (int i = 0; i < 80; ++i) {
      std::uint32_t f, k;
      if (i < 20) {
        f = (b & c) | ((~b) & d);
        k = 0x5A827999u;
      } else if (i < 40) {
        f = b ^ c ^ d;
        k = 0x6ED9EBA1u;
      } else if (i < 60) {
        f = (b & c) | (b & d) | (c & d);
        k = 0x8F1BBCDCu;
      } else {
        f = b ^ c ^ d;
        k = 0xCA62C1D6u;
      }
      const std::uint32_t tmp = rol(a, 5) + f + e + k + w[i];
      e = d;
      d = c;
      c = rol(b, 30);
      b = a;
      a = tmp;
    }
    h[0] += a;
    h[1] += b;
    h[2] += c;
    h[3] += d;
    h[4] += e;
  }

  void update(const unsigned char* data, std::size_t len) {
    total += len;
    while (len > 0) {
      const std::size_t take = std::min(len, 64 - block_len);
      for (std::size_t i = 0; i < take; ++i) block[block_len + i] = data[i];
      block_len += take;
      data += take;
      len -= take;
      if (block_len == 64) {
        process();
        block_len = 0;
      }
    }
  }

  std::string finish() {
    const std::uint64_t bits = total * 8;
    const unsigned char one = 0x80;
    update(&one, 1);
    const unsigned char zero = 0x00;
    while (block_len != 56) update(&zero, 1);
    unsigned char lenb[8];
    for (int i = 0; i < 8; ++i)
      lenb[i] = static_cast<unsigned char>(bits >> (56 - 8 * i));
    update(lenb, 8);
    char out[41];
    for (int i = 0; i < 5; ++i)
      std::snprintf(out + 8 * i, 9, "%08x", h[i]);
    return std::string(out, 40);
  }
};

} // namespace

std::string sha1_hex(const std::string& bytes) {
  Sha1 s;
  s.update(reinterpret_cast<const unsigned char*>(bytes.data()),
           bytes.size());
  return s.finish();
}

std::string sha1_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot hash missing file: " + path);
  Sha1 s;
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
    s.update(reinterpret_cast<const unsigned char*>(buf),
             static_cast<std::size_t>(in.gcount()));
  return s.finish();
}

void write_svg_lineplot(const std::string& path, const std::string& title,
                        const std::string& x_label,
                        const std::string& y_label,
                        const std::vector<PlotSeries>& series, bool log_x) {
  const int width = 640, height = 420;
  const int ml = 70, mr = 20, mt = 40, mb = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const PlotSeries& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double xv = log_x ? std::log10(s.x[i]) : s.x[i];
      xmin = std::min(xmin, xv);
      xmax = std::max(xmax, xv);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (!(xmax > xmin)) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (!(ymax > ymin)) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;
  const auto px = [&](double x) {
    const double xv = log_x ? std::log10(x) : x;
    return ml + (xv - xmin) / (xmax - xmin) * (width - ml - mr);
  };
  const auto py = [&](double y) {
    return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb);
  };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                 "#9467bd", "#ff7f0e", "#8c564b"};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-size=\"16\">"
      << title << "</text>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\""
      << width - mr << "\" y2=\"" << height - mb
      << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label
      << (log_x ? " (log scale)" : "") << "</text>\n";
  svg << "<text x=\"16\" y=\"" << (mt + height - mb) / 2
      << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 "
         "16 "
      << (mt + height - mb) / 2 << ")\">" << y_label << "</text>\n";
  // axis extremes
  char lbl[64];
  std::snprintf(lbl, sizeof(lbl), "%.4g", log_x ? std::pow(10, xmin) : xmin);
  svg << "<text x=\"" << ml << "\" y=\"" << height - mb + 16
      << "\" font-size=\"10\" text-anchor=\"middle\">" << lbl << "</text>\n";
  std::snprintf(lbl, sizeof(lbl), "%.4g", log_x ? std::pow(10, xmax) : xmax);
  svg << "<text x=\"" << width - mr << "\" y=\"" << height - mb + 16
      << "\" font-size=\"10\" text-anchor=\"middle\">" << lbl << "</text>\n";
  std::snprintf(lbl, sizeof(lbl), "%.5g", ymin + ypad);
  svg << "<text x=\"" << ml - 6 << "\" y=\"" << py(ymin + ypad) + 4
      << "\" font-size=\"10\" text-anchor=\"end\">" << lbl << "</text>\n";
  std::snprintf(lbl, sizeof(lbl), "%.5g", ymax - ypad);
  svg << "<text x=\"" << ml - 6 << "\" y=\"" << py(ymax - ypad) + 4
      << "\" font-size=\"10\" text-anchor=\"end\">" << lbl << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const PlotSeries& s = series[si];
    const char* color = colors[si % 6];
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      char pt[64];
      std::snprintf(pt, sizeof(pt), "%.2f,%.2f ", px(s.x[i]), py(s.y[i]));
      svg << pt;
    }
    svg << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      char pt[96];
      std::snprintf(pt, sizeof(pt),
                    "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2.5\" fill=\"%s\"/>",
                    px(s.x[i]), py(s.y[i]), color);
      svg << pt << "\n";
    }
    svg << "<text x=\"" << width - mr - 8 << "\" y=\"" << mt + 16 * (si + 1)
        << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << color << "\">"
        << s.label << "</text>\n";
  }
  svg << "</svg>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << svg.str();
}

} // namespace atlift
