#pragma once

// Flat structured meshes: tori and cylinders [0,L]×T^{d−1}.

#include <algorithm>
#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "gaugeforms/errors.hpp"

namespace gaugeforms {

enum class Topology { periodic, interval };

inline const char* to_string(Topology t) { return t == Topology::periodic ? "periodic" : "interval"; }

inline constexpr int kMaxDim = 4;

/// A periodic axis with `count` cells has `count` nodes at x = i·h. An
/// interval axis has `count` cells and `count + 1` nodes including both ends.
/// Nodes are numbered row-major with the last axis fastest.
class Mesh {
 public:
  /// Upper bound on the node count, checked by the constructor and refine().
  static std::size_t& max_nodes() {
    static std::size_t limit = std::size_t{1} << 26;
    return limit;
  }

  Mesh() = default;

  /// `stencil_order` (2 or 4) selects the centered difference used on
  /// periodic axes. Interval axes always use the summation-by-parts operator
  /// described in forms.hpp.
  Mesh(std::vector<int> counts, std::vector<double> extents, std::vector<Topology> topology,
       int stencil_order = 2)
      : counts_(std::move(counts)),
        extents_(std::move(extents)),
        topology_(std::move(topology)),
        stencil_order_(stencil_order) {
    const int d = static_cast<int>(counts_.size());
    if (d < 1 || d > kMaxDim) throw Error("mesh dimension must be between 1 and 4");
    if (extents_.empty()) extents_.assign(d, 1.0);
    if (topology_.empty()) topology_.assign(d, Topology::periodic);
    if (static_cast<int>(extents_.size()) != d || static_cast<int>(topology_.size()) != d)
      throw Error("mesh counts, extents and topology must have equal length");
    if (stencil_order_ != 2 && stencil_order_ != 4) throw Error("stencil order must be 2 or 4");
    int intervals = 0;
    for (int i = 0; i < d; ++i) {
      if (counts_[i] < 4) throw Error("mesh counts must be at least 4 per axis");
      if (!(extents_[i] > 0.0)) throw Error("mesh extents must be positive");
      if (topology_[i] == Topology::interval) {
        ++intervals;
        interval_axis_ = i;
      }
    }
    if (intervals > 1) throw Error("at most one interval axis is supported");
    std::size_t total = 1;
    for (int i = d - 1; i >= 0; --i) {
      strides_[i] = total;
      total *= static_cast<std::size_t>(nodes_along(i));
      if (total > max_nodes()) throw Error("mesh exceeds the configured maximum node count");
    }
    nodes_ = total;
  }

  static Mesh torus(int dim, int count, int stencil_order = 2) {
    return Mesh(std::vector<int>(dim, count), {}, {}, stencil_order);
  }

  /// [0,1]×T^{dim−1} with the interval on axis 0.
  static Mesh cylinder(int dim, int count, int stencil_order = 2) {
    std::vector<Topology> topo(dim, Topology::periodic);
    topo[0] = Topology::interval;
    return Mesh(std::vector<int>(dim, count), {}, topo, stencil_order);
  }

  int dim() const { return static_cast<int>(counts_.size()); }
  int count(int axis) const { return counts_[axis]; }
  double extent(int axis) const { return extents_[axis]; }
  Topology topology(int axis) const { return topology_[axis]; }
  const std::vector<int>& counts() const { return counts_; }
  const std::vector<double>& extents() const { return extents_; }
  const std::vector<Topology>& topologies() const { return topology_; }
  int stencil_order() const { return stencil_order_; }

  double spacing(int axis) const { return extents_[axis] / counts_[axis]; }
  double max_spacing() const {
    double h = 0.0;
    for (int i = 0; i < dim(); ++i) h = std::max(h, spacing(i));
    return h;
  }
  int nodes_along(int axis) const {
    return counts_[axis] + (topology_[axis] == Topology::interval ? 1 : 0);
  }
  std::size_t stride(int axis) const { return strides_[axis]; }
  std::size_t node_count() const { return nodes_; }

  /// Index of the interval axis, or −1 for a closed mesh.
  int interval_axis() const { return interval_axis_; }
  bool closed() const { return interval_axis_ < 0; }

  int index_along(std::size_t node, int axis) const {
    return static_cast<int>((node / strides_[axis]) % static_cast<std::size_t>(nodes_along(axis)));
  }

  std::array<int, kMaxDim> multi_index(std::size_t node) const {
    std::array<int, kMaxDim> idx{};
    for (int i = 0; i < dim(); ++i) idx[i] = index_along(node, i);
    return idx;
  }

  std::size_t node_at(const std::array<int, kMaxDim>& idx) const {
    std::size_t n = 0;
    for (int i = 0; i < dim(); ++i) n += static_cast<std::size_t>(idx[i]) * strides_[i];
    return n;
  }

  std::array<double, kMaxDim> coords(std::size_t node) const {
    std::array<double, kMaxDim> x{};
    for (int i = 0; i < dim(); ++i) x[i] = index_along(node, i) * spacing(i);
    return x;
  }

  /// Node neighbor along a periodic axis, `shift` steps away (wraps).
  std::size_t shifted(std::size_t node, int axis, int shift) const {
    const int len = nodes_along(axis);
    const int i = index_along(node, axis);
    const int j = ((i + shift) % len + len) % len;
    return node + (static_cast<std::ptrdiff_t>(j) - i) * static_cast<std::ptrdiff_t>(strides_[axis]);
  }

  double cell_volume() const {
    double v = 1.0;
    for (int i = 0; i < dim(); ++i) v *= spacing(i);
    return v;
  }

  /// Quadrature weight: cell volume, halved at the ends of the interval axis.
  double weight(std::size_t node) const {
    double w = cell_volume();
    if (interval_axis_ >= 0) {
      const int t = index_along(node, interval_axis_);
      if (t == 0 || t == counts_[interval_axis_]) w *= 0.5;
    }
    return w;
  }

  bool on_boundary(std::size_t node) const {
    if (interval_axis_ < 0) return false;
    const int t = index_along(node, interval_axis_);
    return t == 0 || t == counts_[interval_axis_];
  }

  /// The mesh with one axis removed (a boundary slice of a cylinder).
  Mesh without_axis(int axis) const {
    std::vector<int> c;
    std::vector<double> e;
    std::vector<Topology> t;
    for (int i = 0; i < dim(); ++i) {
      if (i == axis) continue;
      c.push_back(counts_[i]);
      e.push_back(extents_[i]);
      t.push_back(topology_[i]);
    }
    return Mesh(c, e, t, stencil_order_);
  }

  bool operator==(const Mesh& o) const {
    return counts_ == o.counts_ && extents_ == o.extents_ && topology_ == o.topology_ &&
           stencil_order_ == o.stencil_order_;
  }
  bool operator!=(const Mesh& o) const { return !(*this == o); }

  std::string describe() const {
    std::string s;
    for (int i = 0; i < dim(); ++i) {
      if (i) s += "x";
      s += std::to_string(counts_[i]);
      if (topology_[i] == Topology::interval) s += "i";
    }
    return s;
  }

 private:
  std::vector<int> counts_;
  std::vector<double> extents_;
  std::vector<Topology> topology_;
  int stencil_order_ = 2;
  int interval_axis_ = -1;
  std::array<std::size_t, kMaxDim> strides_{};
  std::size_t nodes_ = 0;
};

/// Multiplies every per-axis count by `factor`.
inline Mesh refine(const Mesh& mesh, int factor) {
  if (factor < 2) throw Error("refinement factor must be at least 2");
  std::vector<int> c = mesh.counts();
  for (int& k : c) k *= factor;
  return Mesh(c, mesh.extents(), mesh.topologies(), mesh.stencil_order());
}

/// Same topology and extents with a different per-axis count.
inline Mesh with_count(const Mesh& mesh, int count) {
  return Mesh(std::vector<int>(mesh.dim(), count), mesh.extents(), mesh.topologies(),
              mesh.stencil_order());
}

}  // namespace gaugeforms
