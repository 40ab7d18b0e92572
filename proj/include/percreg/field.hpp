// Bernoulli bond percolation fields with deterministic per-edge randomness.
//
// Every edge draws its uniforms from a counter-based hash of (seed, lane,
// edge). Nothing is stored, so a field is defined on all of Z^d; the window
// only fixes the region that experiments and snapshots look at.

#ifndef PERCREG_FIELD_HPP
#define PERCREG_FIELD_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "percreg/lattice.hpp"

namespace percreg {

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed for sample `index` of stream `stream` under a master seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                    std::uint64_t index) {
  return mix64(mix64(master ^ mix64(stream + 0x632be59bd9b4e019ULL)) ^ index);
}

// The edge {lo, lo + e_axis}.
struct Edge {
  Vertex lo;
  int axis = 0;

  Vertex hi() const {
    Vertex v = lo;
    ++v[axis];
    return v;
  }
  friend auto operator<=>(const Edge&, const Edge&) = default;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// Canonical edge joining two vertices at L1 distance one, in either order.
Edge edge_between(const Vertex& a, const Vertex& b, int d);

enum class Coupling { monotone, two_source };

std::string to_string(Coupling c);
Coupling coupling_from_string(const std::string& s);

class OpenMask;

class EdgeField {
 public:
  // Single uniform U(e) per edge; e is p-open iff U(e) < p.
  static EdgeField monotone(const LatticeWindow& window, std::uint64_t seed);
  // V(e) ~ Bernoulli(q) and Z(e) ~ Bernoulli(p/q) from independent lanes;
  // q-open iff V = 1, p-open iff V = Z = 1.
  static EdgeField two_source(const LatticeWindow& window, std::uint64_t seed, double q);

  const LatticeWindow& window() const { return window_; }
  int dim() const { return window_.dim(); }
  std::uint64_t seed() const { return seed_; }
  Coupling coupling() const { return coupling_; }
  double q() const { return q_; }

  // Uniform in [0, 1) attached to `e` on counter lane `lane` (0 or 1).
  double uniform(const Edge& e, int lane) const;
  bool open(const Edge& e, double p) const;
  bool open_between(const Vertex& a, const Vertex& b, double p) const {
    return open(edge_between(a, b, dim()), p);
  }

  // Throws ParameterError unless p is admissible for this coupling.
  void check_parameter(double p) const;

  OpenMask materialize(const Region& region, double p) const;
  OpenMask materialize(double p) const;

 private:
  EdgeField(const LatticeWindow& w, std::uint64_t seed, Coupling c, double q);
  std::uint64_t hash(const Edge& e, int lane) const;

  LatticeWindow window_;
  std::uint64_t seed_;
  Coupling coupling_;
  double q_;
  std::uint64_t lane_base_[2];
};

// Bit-packed open/closed states of every edge with both endpoints in a region.
// Bit `index(v) * d + axis` holds the edge {v, v + e_axis}.
class OpenMask {
 public:
  OpenMask() = default;
  OpenMask(Region region, double p);

  const Region& region() const { return region_; }
  int dim() const { return region_.dim(); }
  double p() const { return p_; }

  bool open(std::int64_t vertex_index, int axis) const {
    const std::uint64_t bit = static_cast<std::uint64_t>(vertex_index) * dim() + axis;
    return (bits_[bit >> 6] >> (bit & 63)) & 1ULL;
  }
  void set_open(std::int64_t vertex_index, int axis) {
    const std::uint64_t bit = static_cast<std::uint64_t>(vertex_index) * dim() + axis;
    bits_[bit >> 6] |= 1ULL << (bit & 63);
  }
  // False for edges leaving the region.
  bool open(const Edge& e) const;
  bool open_between(const Vertex& a, const Vertex& b) const;

  std::int64_t open_count() const;
  const std::vector<std::uint64_t>& bits() const { return bits_; }

 private:
  Region region_;
  double p_ = 0.0;
  std::vector<std::uint64_t> bits_;
};

// Binary snapshot of the open edges of a window at one parameter.
//
// Layout, little-endian:
//   char[4]  magic "PRFS"
//   u32      format version (1)
//   u32 d, u32 L, u32 N, u32 coupling (0 monotone, 1 two-source)
//   f64 q (two-source parameter, 0 for monotone), f64 p, u64 seed
//   u64      number of edge ids (vertex_count * d)
//   u64      number of runs R
//   R x (u64 start, u64 length): maximal runs of consecutive open edge ids,
//            ascending. Edge id = window index of the lower endpoint * d + axis.
struct FieldSnapshot {
  int d = 0;
  int L = 0;
  int N = 0;
  Coupling coupling = Coupling::monotone;
  double q = 0.0;
  double p = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t edge_id_count = 0;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> runs;

  std::vector<std::uint64_t> open_edge_ids() const;
  friend bool operator==(const FieldSnapshot&, const FieldSnapshot&) = default;
};

FieldSnapshot snapshot(const EdgeField& field, double p);
void write_snapshot(std::ostream& out, const FieldSnapshot& snap);
FieldSnapshot read_snapshot(std::istream& in);

}  // namespace percreg

#endif  // PERCREG_FIELD_HPP
