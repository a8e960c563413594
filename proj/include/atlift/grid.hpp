#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "atlift/errors.hpp"

namespace atlift {

// A box domain sampled on a regular node grid. Nodes are row-major
// (x fastest); cells sit between nodes, so an axis with n nodes has n-1
// cells of size h = extent/(n-1).
struct GridSpec {
  int dim = 1;
  std::array<double, 2> extent{1.0, 1.0};
  std::array<std::size_t, 2> res{2, 2}; // nodes per axis

  static GridSpec line(double length, std::size_t nodes) {
    GridSpec g;
    g.dim = 1;
    g.extent = {length, 0.0};
    g.res = {nodes, 1};
    g.validate();
    return g;
  }

  static GridSpec box(double lx, double ly, std::size_t nx, std::size_t ny) {
    GridSpec g;
    g.dim = 2;
    g.extent = {lx, ly};
    g.res = {nx, ny};
    g.validate();
    return g;
  }

  void validate() const {
    if (dim != 1 && dim != 2) throw DimensionError("grid dim must be 1 or 2");
    for (int a = 0; a < dim; ++a) {
      if (res[a] < 2) throw DimensionError("grid needs >= 2 nodes per axis");
      if (!(extent[a] > 0.0)) throw DimensionError("grid extent must be > 0");
    }
  }

  double h(int axis) const {
    return extent[axis] / static_cast<double>(res[axis] - 1);
  }

  std::size_t nodes() const { return dim == 1 ? res[0] : res[0] * res[1]; }
  std::size_t cells_x() const { return res[0] - 1; }
  std::size_t cells_y() const { return dim == 1 ? 1 : res[1] - 1; }
  std::size_t cells() const { return cells_x() * cells_y(); }
  double cell_measure() const { return dim == 1 ? h(0) : h(0) * h(1); }

  double node_x(std::size_t i) const {
    return h(0) * static_cast<double>(i);
  }
  double node_y(std::size_t j) const {
    return dim == 1 ? 0.0 : h(1) * static_cast<double>(j);
  }
  std::size_t node_index(std::size_t i, std::size_t j) const {
    return j * res[0] + i;
  }
  std::size_t cell_index(std::size_t i, std::size_t j) const {
    return j * cells_x() + i;
  }

  double diameter() const;

  bool same_shape(const GridSpec& o) const {
    return dim == o.dim && res[0] == o.res[0] &&
           (dim == 1 || res[1] == o.res[1]);
  }
};

inline double GridSpec::diameter() const {
  if (dim == 1) return extent[0];
  return std::sqrt(extent[0] * extent[0] + extent[1] * extent[1]);
}

} // namespace atlift
