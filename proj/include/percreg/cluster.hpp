// Open clusters of a materialized region and bad-site components of a
// macroscopic grid.

#ifndef PERCREG_CLUSTER_HPP
#define PERCREG_CLUSTER_HPP

#include <cstdint>
#include <vector>

#include "percreg/field.hpp"
#include "percreg/lattice.hpp"

namespace percreg {

// Disjoint-set forest with path halving and union by size.
class UnionFind {
 public:
  explicit UnionFind(std::int64_t n = 0);

  std::int64_t find(std::int64_t x);
  // Returns the surviving root.
  std::int64_t unite(std::int64_t a, std::int64_t b);
  std::int64_t size_of(std::int64_t x) { return size_[static_cast<std::size_t>(find(x))]; }

 private:
  std::vector<std::int64_t> parent_;
  std::vector<std::int64_t> size_;
};

// Connected components of the open subgraph induced on `region()`.
// Label 0 is the largest cluster; equal sizes are ordered by their
// lexicographically smallest vertex.
class ClusterLabeling {
 public:
  const Region& region() const { return region_; }
  int dim() const { return region_.dim(); }
  int count() const { return static_cast<int>(sizes_.size()); }

  // -1 for vertices outside the region.
  int label_of(const Vertex& v) const;
  int label_at(std::int64_t index) const { return labels_[static_cast<std::size_t>(index)]; }
  std::int64_t size(int label) const { return sizes_[static_cast<std::size_t>(label)]; }
  Vertex smallest_vertex(int label) const;
  // Largest coordinate span over all axes.
  int diameter(int label) const;
  bool touches_all_faces(int label) const;
  std::vector<Vertex> members(int label) const;
  const std::vector<int>& labels() const { return labels_; }

 private:
  friend ClusterLabeling label_clusters(const OpenMask& mask, const Region& region);

  Region region_;
  std::vector<int> labels_;
  std::vector<std::int64_t> sizes_;
  std::vector<std::int64_t> first_index_;
  std::vector<Coord> lo_, hi_;
};

// Uses only edges with both endpoints in `region`, which must lie inside
// the mask's region.
ClusterLabeling label_clusters(const OpenMask& mask, const Region& region);
ClusterLabeling label_clusters(const OpenMask& mask);
ClusterLabeling label_clusters(const EdgeField& field, const Region& region, double p);

// Max over axes of the coordinate span. Throws DomainError when empty.
int diameter(const std::vector<Vertex>& cluster, int d);

// Whether, for every axis, some open path inside (cluster ∩ box) joins the
// two opposite faces of `box`.
bool is_crossing(const ClusterLabeling& labeling, int label, const OpenMask& mask,
                 const Region& box);
bool is_crossing(const std::vector<Vertex>& cluster, const OpenMask& mask, const Region& box);

// Members of the components of (cluster ∩ box) that join opposite faces of
// `box` along every axis, or along some axis if no component does all of
// them. Flags are indexed by box.index(); empty when nothing crosses.
std::vector<char> crossing_members(const ClusterLabeling& labeling, int label,
                                   const OpenMask& mask, const Region& box);

// Good/bad flags over a rectangle of macroscopic sites.
struct SiteGrid {
  Region sites;
  std::vector<char> good;

  bool contains(const MacroSite& i) const { return sites.contains(i.c); }
  bool is_good(const MacroSite& i) const {
    return good[static_cast<std::size_t>(sites.index(i.c))] != 0;
  }
};

struct BadComponent {
  std::vector<MacroSite> sites;     // lexicographic order
  std::vector<MacroSite> boundary;  // exterior vertex boundary, lexicographic
  // Some site lies on the edge of the grid; the boundary then contains sites
  // outside the grid and the component cannot be bypassed inside it.
  bool touches_grid_edge = false;
};

struct BadComponents {
  std::vector<BadComponent> components;
  std::vector<int> component_of;  // per grid index, -1 for good sites

  int component_at(const SiteGrid& grid, const MacroSite& i) const {
    return component_of[static_cast<std::size_t>(grid.sites.index(i.c))];
  }
};

// L1 components of bad sites. Sites beyond the grid are treated as good and
// connected to infinity, so a boundary site is reachable from outside the
// grid through sites avoiding the component.
BadComponents bad_components(const SiteGrid& grid);

bool is_star_connected(const std::vector<MacroSite>& sites, int d);
bool is_l1_connected(const std::vector<MacroSite>& sites, int d);

// Sites of `bounds` not reachable from outside `bounds` by an L1 path
// avoiding `wall`.
std::vector<MacroSite> enclosed_sites(const std::vector<MacroSite>& wall, const Region& bounds);

}  // namespace percreg

#endif  // PERCREG_CLUSTER_HPP
