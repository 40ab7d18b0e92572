// Finite-window geometry of the hypercubic lattice Z^d.
//
// Vertices and macroscopic sites are both integer points; they get distinct
// types so a box index can never be passed where a vertex is expected.
// Coordinates beyond the active dimension are always zero, which keeps the
// defaulted lexicographic ordering correct for every d <= kMaxDim.

#ifndef PERCREG_LATTICE_HPP
#define PERCREG_LATTICE_HPP

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "percreg/errors.hpp"

namespace percreg {

inline constexpr int kMaxDim = 4;

using Coord = std::array<int, kMaxDim>;

template <class Tag>
struct LatticePoint {
  Coord c{};

  int& operator[](int k) { return c[static_cast<std::size_t>(k)]; }
  int operator[](int k) const { return c[static_cast<std::size_t>(k)]; }

  friend auto operator<=>(const LatticePoint&, const LatticePoint&) = default;
  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
};

using Vertex = LatticePoint<struct VertexTag>;
using MacroSite = LatticePoint<struct MacroSiteTag>;

template <class P>
P make_point(std::initializer_list<int> xs) {
  if (xs.size() > static_cast<std::size_t>(kMaxDim)) {
    throw DomainError("point has more than kMaxDim coordinates");
  }
  P p;
  int k = 0;
  for (int x : xs) p[k++] = x;
  return p;
}

inline Vertex vertex(std::initializer_list<int> xs) { return make_point<Vertex>(xs); }
inline MacroSite site(std::initializer_list<int> xs) { return make_point<MacroSite>(xs); }

template <class P>
long norm1(const P& x, int d) {
  long s = 0;
  for (int k = 0; k < d; ++k) s += x[k] < 0 ? -x[k] : x[k];
  return s;
}

template <class P>
long norm_inf(const P& x, int d) {
  long m = 0;
  for (int k = 0; k < d; ++k) {
    long a = x[k] < 0 ? -x[k] : x[k];
    if (a > m) m = a;
  }
  return m;
}

template <class P>
P difference(const P& a, const P& b, int d) {
  P r;
  for (int k = 0; k < d; ++k) r[k] = a[k] - b[k];
  return r;
}

template <class P>
long dist1(const P& a, const P& b, int d) { return norm1(difference(a, b, d), d); }

template <class P>
long dist_inf(const P& a, const P& b, int d) { return norm_inf(difference(a, b, d), d); }

template <class P>
std::string to_string(const P& x, int d, char sep = ',') {
  std::string s;
  for (int k = 0; k < d; ++k) {
    if (k) s += sep;
    s += std::to_string(x[k]);
  }
  return s;
}

// Axis-aligned box of integer points [lo, hi] (inclusive on every axis).
// Linear indices put axis 0 in the most significant position, so index order
// coincides with lexicographic order of the points.
class Region {
 public:
  Region() = default;
  Region(int d, Coord lo, Coord hi);

  static Region cube(int d, Coord center, int radius);

  int dim() const { return d_; }
  const Coord& lo() const { return lo_; }
  const Coord& hi() const { return hi_; }
  int side(int k) const { return hi_[k] - lo_[k] + 1; }
  std::int64_t stride(int k) const { return stride_[k]; }
  std::int64_t volume() const { return volume_; }
  bool empty() const { return volume_ == 0; }

  bool contains(const Coord& x) const;
  bool contains(const Region& other) const;
  std::int64_t index(const Coord& x) const;
  Coord point(std::int64_t index) const;

  // Intersection with another region of the same dimension (possibly empty).
  Region intersect(const Region& other) const;
  Region grow(int margin) const;

  // Whether x lies on the face x_k == lo_k (side 0) or x_k == hi_k (side 1).
  bool on_face(const Coord& x, int axis, int side) const {
    return x[axis] == (side == 0 ? lo_[axis] : hi_[axis]);
  }

  friend bool operator==(const Region& a, const Region& b) {
    return a.d_ == b.d_ && a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

 private:
  int d_ = 0;
  Coord lo_{};
  Coord hi_{};
  std::array<std::int64_t, kMaxDim> stride_{};
  std::int64_t volume_ = 0;
};

// The centered window [-L, L]^d, exactly partitioned into N-boxes
// B_N(i) = i(2N+1) + [-N, N]^d. The enlarged box B'_N(i) is the union of
// the 3^d N-boxes around i, i(2N+1) + [-3N-1, 3N+1]^d.
class LatticeWindow {
 public:
  static LatticeWindow make(int d, int L, int N);
  // Window made of (2m+1)^d whole N-boxes.
  static LatticeWindow from_macro_radius(int d, int N, int macro_radius);

  int dim() const { return d_; }
  int half_side() const { return L_; }
  int box_scale() const { return N_; }
  int box_period() const { return 2 * N_ + 1; }
  // Macro sites i with ||i||_inf <= macro_radius() tile the window.
  int macro_radius() const { return macro_radius_; }

  Region region() const { return Region::cube(d_, Coord{}, L_); }
  Region macro_region() const { return Region::cube(d_, Coord{}, macro_radius_); }
  // Sites whose enlarged box B'_N(i) lies inside the window.
  Region interior_macro_region() const;

  bool contains(const Vertex& v) const;
  std::int64_t vertex_count() const;

  friend bool operator==(const LatticeWindow&, const LatticeWindow&) = default;

 private:
  LatticeWindow(int d, int L, int N);

  int d_ = 2;
  int L_ = 0;
  int N_ = 1;
  int macro_radius_ = 0;
};

MacroSite box_of(const Vertex& v, int N, int d);
Vertex box_center(const MacroSite& i, int N, int d);
Region box_region(const MacroSite& i, int N, int d);
Region big_box_region(const MacroSite& i, int N, int d);

// B'_N(i) intersected with the window, in lexicographic order.
std::vector<Vertex> big_box_vertices(const MacroSite& i, const LatticeWindow& window);

// The 3^d - 1 sites at L-infinity distance one, restricted to `sites`.
std::vector<MacroSite> star_neighbors(const MacroSite& i, const Region& sites);
// The 2d nearest neighbours, restricted to `sites`.
std::vector<MacroSite> l1_neighbors(const MacroSite& i, const Region& sites);

// All offsets in {-1,0,1}^d, in lexicographic order (includes the zero offset).
std::vector<Coord> unit_offsets(int d);

}  // namespace percreg

#endif  // PERCREG_LATTICE_HPP
