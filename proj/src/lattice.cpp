#include "percreg/lattice.hpp"

#include <algorithm>
#include <limits>

namespace percreg {

namespace {

int floor_div(int a, int b) {
  int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

Region::Region(int d, Coord lo, Coord hi) : d_(d), lo_(lo), hi_(hi) {
  if (d < 1 || d > kMaxDim) throw DomainError("region dimension out of range");
  for (int k = d; k < kMaxDim; ++k) lo_[k] = hi_[k] = 0;
  for (int k = 0; k < d; ++k) {
    if (hi_[k] < lo_[k]) return;  // empty: volume and strides stay zero
  }
  volume_ = 1;
  for (int k = d - 1; k >= 0; --k) {
    stride_[k] = volume_;
    if (volume_ > std::numeric_limits<std::int64_t>::max() / side(k)) {
      throw CapacityError("region volume overflows 64-bit indexing");
    }
    volume_ *= side(k);
  }
}

Region Region::cube(int d, Coord center, int radius) {
  Coord lo{}, hi{};
  for (int k = 0; k < d; ++k) {
    lo[k] = center[k] - radius;
    hi[k] = center[k] + radius;
  }
  return Region(d, lo, hi);
}

bool Region::contains(const Coord& x) const {
  if (volume_ == 0) return false;
  for (int k = 0; k < d_; ++k) {
    if (x[k] < lo_[k] || x[k] > hi_[k]) return false;
  }
  return true;
}

bool Region::contains(const Region& other) const {
  if (other.empty()) return true;
  return contains(other.lo_) && contains(other.hi_);
}

std::int64_t Region::index(const Coord& x) const {
  std::int64_t idx = 0;
  for (int k = 0; k < d_; ++k) idx += static_cast<std::int64_t>(x[k] - lo_[k]) * stride_[k];
  return idx;
}

Coord Region::point(std::int64_t index) const {
  Coord x{};
  for (int k = 0; k < d_; ++k) {
    x[k] = lo_[k] + static_cast<int>(index / stride_[k]);
    index %= stride_[k];
  }
  return x;
}

Region Region::intersect(const Region& other) const {
  Coord lo{}, hi{};
  for (int k = 0; k < d_; ++k) {
    lo[k] = std::max(lo_[k], other.lo_[k]);
    hi[k] = std::min(hi_[k], other.hi_[k]);
  }
  return Region(d_, lo, hi);
}

Region Region::grow(int margin) const {
  Coord lo = lo_, hi = hi_;
  for (int k = 0; k < d_; ++k) {
    lo[k] -= margin;
    hi[k] += margin;
  }
  return Region(d_, lo, hi);
}

LatticeWindow::LatticeWindow(int d, int L, int N) : d_(d), L_(L), N_(N) {
  macro_radius_ = (2 * L + 1) / (2 * N + 1) / 2;
}

LatticeWindow LatticeWindow::make(int d, int L, int N) {
  if (d < 2 || d > kMaxDim) {
    throw DomainError("dimension must lie in [2, " + std::to_string(kMaxDim) + "]");
  }
  if (N < 1) throw DomainError("box scale N must be >= 1");
  if (L < 0) throw DomainError("window half-side must be >= 0");
  if ((2 * L + 1) % (2 * N + 1) != 0) {
    throw DomainError("window side 2L+1 = " + std::to_string(2 * L + 1) +
                      " is not a multiple of the box side 2N+1 = " + std::to_string(2 * N + 1));
  }
  return LatticeWindow(d, L, N);
}

LatticeWindow LatticeWindow::from_macro_radius(int d, int N, int macro_radius) {
  if (macro_radius < 0) throw DomainError("macro radius must be >= 0");
  const int side = (2 * macro_radius + 1) * (2 * N + 1);
  return make(d, (side - 1) / 2, N);
}

Region LatticeWindow::interior_macro_region() const {
  return Region::cube(d_, Coord{}, macro_radius_ - 1);
}

bool LatticeWindow::contains(const Vertex& v) const { return norm_inf(v, d_) <= L_; }

std::int64_t LatticeWindow::vertex_count() const { return region().volume(); }

MacroSite box_of(const Vertex& v, int N, int d) {
  MacroSite i;
  for (int k = 0; k < d; ++k) i[k] = floor_div(v[k] + N, 2 * N + 1);
  return i;
}

Vertex box_center(const MacroSite& i, int N, int d) {
  Vertex c;
  for (int k = 0; k < d; ++k) c[k] = i[k] * (2 * N + 1);
  return c;
}

Region box_region(const MacroSite& i, int N, int d) {
  return Region::cube(d, box_center(i, N, d).c, N);
}

Region big_box_region(const MacroSite& i, int N, int d) {
  return Region::cube(d, box_center(i, N, d).c, 3 * N + 1);
}

std::vector<Vertex> big_box_vertices(const MacroSite& i, const LatticeWindow& window) {
  const int d = window.dim();
  const Region r = big_box_region(i, window.box_scale(), d).intersect(window.region());
  std::vector<Vertex> out;
  out.reserve(static_cast<std::size_t>(r.volume()));
  for (std::int64_t idx = 0; idx < r.volume(); ++idx) out.push_back(Vertex{r.point(idx)});
  return out;
}

std::vector<Coord> unit_offsets(int d) {
  std::vector<Coord> out;
  const Region r = Region::cube(d, Coord{}, 1);
  out.reserve(static_cast<std::size_t>(r.volume()));
  for (std::int64_t idx = 0; idx < r.volume(); ++idx) out.push_back(r.point(idx));
  return out;
}

std::vector<MacroSite> star_neighbors(const MacroSite& i, const Region& sites) {
  const int d = sites.dim();
  std::vector<MacroSite> out;
  for (const Coord& off : unit_offsets(d)) {
    if (off == Coord{}) continue;
    MacroSite j = i;
    for (int k = 0; k < d; ++k) j[k] += off[k];
    if (sites.contains(j.c)) out.push_back(j);
  }
  return out;
}

std::vector<MacroSite> l1_neighbors(const MacroSite& i, const Region& sites) {
  const int d = sites.dim();
  std::vector<MacroSite> out;
  for (int k = 0; k < d; ++k) {
    for (int s : {-1, 1}) {
      MacroSite j = i;
      j[k] += s;
      if (sites.contains(j.c)) out.push_back(j);
    }
  }
  return out;
}

}  // namespace percreg
