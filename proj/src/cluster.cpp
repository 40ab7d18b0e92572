#include "percreg/cluster.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace percreg {

UnionFind::UnionFind(std::int64_t n)
    : parent_(static_cast<std::size_t>(n)), size_(static_cast<std::size_t>(n), 1) {
  std::iota(parent_.begin(), parent_.end(), std::int64_t{0});
}

std::int64_t UnionFind::find(std::int64_t x) {
  while (parent_[static_cast<std::size_t>(x)] != x) {
    auto& px = parent_[static_cast<std::size_t>(x)];
    px = parent_[static_cast<std::size_t>(px)];
    x = px;
  }
  return x;
}

std::int64_t UnionFind::unite(std::int64_t a, std::int64_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return a;
  if (size_[static_cast<std::size_t>(a)] < size_[static_cast<std::size_t>(b)]) std::swap(a, b);
  parent_[static_cast<std::size_t>(b)] = a;
  size_[static_cast<std::size_t>(a)] += size_[static_cast<std::size_t>(b)];
  return a;
}

int ClusterLabeling::label_of(const Vertex& v) const {
  if (!region_.contains(v.c)) return -1;
  return labels_[static_cast<std::size_t>(region_.index(v.c))];
}

Vertex ClusterLabeling::smallest_vertex(int label) const {
  return Vertex{region_.point(first_index_[static_cast<std::size_t>(label)])};
}

int ClusterLabeling::diameter(int label) const {
  int best = 0;
  for (int k = 0; k < dim(); ++k) {
    best = std::max(best, hi_[static_cast<std::size_t>(label)][k] -
                              lo_[static_cast<std::size_t>(label)][k]);
  }
  return best;
}

bool ClusterLabeling::touches_all_faces(int label) const {
  for (int k = 0; k < dim(); ++k) {
    if (lo_[static_cast<std::size_t>(label)][k] != region_.lo()[k]) return false;
    if (hi_[static_cast<std::size_t>(label)][k] != region_.hi()[k]) return false;
  }
  return true;
}

std::vector<Vertex> ClusterLabeling::members(int label) const {
  std::vector<Vertex> out;
  out.reserve(static_cast<std::size_t>(size(label)));
  for (std::int64_t idx = 0; idx < region_.volume(); ++idx) {
    if (labels_[static_cast<std::size_t>(idx)] == label) out.push_back(Vertex{region_.point(idx)});
  }
  return out;
}

ClusterLabeling label_clusters(const OpenMask& mask, const Region& region) {
  if (!mask.region().contains(region)) {
    throw GeometryError("labeling region is not covered by the materialized mask");
  }
  const int d = region.dim();
  const Region& mr = mask.region();
  UnionFind uf(region.volume());
  for (std::int64_t idx = 0; idx < region.volume(); ++idx) {
    const Coord x = region.point(idx);
    const std::int64_t midx = mr.index(x);
    for (int k = 0; k < d; ++k) {
      if (x[k] < region.hi()[k] && mask.open(midx, k)) uf.unite(idx, idx + region.stride(k));
    }
  }

  // Gather roots in index order; the first index seen is the lexicographic
  // minimum of the component.
  std::vector<std::int64_t> root_slot(static_cast<std::size_t>(region.volume()), -1);
  struct Proto {
    std::int64_t first, size;
    Coord lo, hi;
  };
  std::vector<Proto> protos;
  std::vector<std::int64_t> slot_of(static_cast<std::size_t>(region.volume()));
  for (std::int64_t idx = 0; idx < region.volume(); ++idx) {
    const std::int64_t r = uf.find(idx);
    auto& slot = root_slot[static_cast<std::size_t>(r)];
    const Coord x = region.point(idx);
    if (slot < 0) {
      slot = static_cast<std::int64_t>(protos.size());
      protos.push_back(Proto{idx, 0, x, x});
    }
    Proto& pr = protos[static_cast<std::size_t>(slot)];
    ++pr.size;
    for (int k = 0; k < d; ++k) {
      pr.lo[k] = std::min(pr.lo[k], x[k]);
      pr.hi[k] = std::max(pr.hi[k], x[k]);
    }
    slot_of[static_cast<std::size_t>(idx)] = slot;
  }

  std::vector<std::size_t> order(protos.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (protos[a].size != protos[b].size) return protos[a].size > protos[b].size;
    return protos[a].first < protos[b].first;
  });
  std::vector<int> label_of_slot(protos.size());
  ClusterLabeling out;
  out.region_ = region;
  for (std::size_t r = 0; r < order.size(); ++r) {
    const Proto& pr = protos[order[r]];
    label_of_slot[order[r]] = static_cast<int>(r);
    out.sizes_.push_back(pr.size);
    out.first_index_.push_back(pr.first);
    out.lo_.push_back(pr.lo);
    out.hi_.push_back(pr.hi);
  }
  out.labels_.resize(static_cast<std::size_t>(region.volume()));
  for (std::size_t idx = 0; idx < out.labels_.size(); ++idx) {
    out.labels_[idx] = label_of_slot[static_cast<std::size_t>(slot_of[idx])];
  }
  return out;
}

ClusterLabeling label_clusters(const OpenMask& mask) { return label_clusters(mask, mask.region()); }

ClusterLabeling label_clusters(const EdgeField& field, const Region& region, double p) {
  return label_clusters(field.materialize(region, p), region);
}

int diameter(const std::vector<Vertex>& cluster, int d) {
  if (cluster.empty()) throw DomainError("diameter of an empty cluster");
  int best = 0;
  for (int k = 0; k < d; ++k) {
    int lo = cluster.front()[k], hi = lo;
    for (const Vertex& v : cluster) {
      lo = std::min(lo, v[k]);
      hi = std::max(hi, v[k]);
    }
    best = std::max(best, hi - lo);
  }
  return best;
}

namespace {

struct BoxComponents {
  UnionFind uf;
  std::vector<unsigned> faces;  // per box index, valid at roots: bit 2k low face, 2k+1 high
};

// Components of the flagged vertices of `box` under open edges.
BoxComponents box_components(const std::vector<char>& in_cluster, const OpenMask& mask,
                             const Region& box) {
  const int d = box.dim();
  BoxComponents bc{UnionFind(box.volume()), std::vector<unsigned>(static_cast<std::size_t>(box.volume()), 0)};
  for (std::int64_t idx = 0; idx < box.volume(); ++idx) {
    if (!in_cluster[static_cast<std::size_t>(idx)]) continue;
    const Coord x = box.point(idx);
    for (int k = 0; k < d; ++k) {
      if (x[k] == box.hi()[k]) continue;
      const std::int64_t nb = idx + box.stride(k);
      if (!in_cluster[static_cast<std::size_t>(nb)]) continue;
      if (mask.open(Edge{Vertex{x}, k})) bc.uf.unite(idx, nb);
    }
  }
  for (std::int64_t idx = 0; idx < box.volume(); ++idx) {
    if (!in_cluster[static_cast<std::size_t>(idx)]) continue;
    const Coord x = box.point(idx);
    unsigned f = 0;
    for (int k = 0; k < d; ++k) {
      if (x[k] == box.lo()[k]) f |= 1u << (2 * k);
      if (x[k] == box.hi()[k]) f |= 1u << (2 * k + 1);
    }
    bc.faces[static_cast<std::size_t>(bc.uf.find(idx))] |= f;
  }
  return bc;
}

std::vector<char> cluster_flags(const ClusterLabeling& labeling, int label, const Region& box) {
  std::vector<char> in(static_cast<std::size_t>(box.volume()), 0);
  if (label < 0) return in;
  for (std::int64_t idx = 0; idx < box.volume(); ++idx) {
    in[static_cast<std::size_t>(idx)] = labeling.label_of(Vertex{box.point(idx)}) == label;
  }
  return in;
}

bool crosses_axis(unsigned faces, int k) { return ((faces >> (2 * k)) & 3u) == 3u; }

bool crossing_from_flags(const std::vector<char>& in, const OpenMask& mask, const Region& box) {
  const int d = box.dim();
  BoxComponents bc = box_components(in, mask, box);
  std::vector<char> axis_done(static_cast<std::size_t>(d), 0);
  for (std::int64_t idx = 0; idx < box.volume(); ++idx) {
    if (!in[static_cast<std::size_t>(idx)] || bc.uf.find(idx) != idx) continue;
    for (int k = 0; k < d; ++k) {
      if (crosses_axis(bc.faces[static_cast<std::size_t>(idx)], k)) axis_done[static_cast<std::size_t>(k)] = 1;
    }
  }
  return std::all_of(axis_done.begin(), axis_done.end(), [](char c) { return c != 0; });
}

}  // namespace

bool is_crossing(const ClusterLabeling& labeling, int label, const OpenMask& mask,
                 const Region& box) {
  return crossing_from_flags(cluster_flags(labeling, label, box), mask, box);
}

bool is_crossing(const std::vector<Vertex>& cluster, const OpenMask& mask, const Region& box) {
  std::vector<char> in(static_cast<std::size_t>(box.volume()), 0);
  for (const Vertex& v : cluster) {
    if (box.contains(v.c)) in[static_cast<std::size_t>(box.index(v.c))] = 1;
  }
  return crossing_from_flags(in, mask, box);
}

std::vector<char> crossing_members(const ClusterLabeling& labeling, int label,
                                   const OpenMask& mask, const Region& box) {
  const int d = box.dim();
  const std::vector<char> in = cluster_flags(labeling, label, box);
  BoxComponents bc = box_components(in, mask, box);
  const unsigned all = (1u << (2 * d)) - 1;
  bool any_full = false;
  for (std::int64_t idx = 0; idx < box.volume(); ++idx) {
    if (in[static_cast<std::size_t>(idx)] && bc.uf.find(idx) == idx &&
        bc.faces[static_cast<std::size_t>(idx)] == all) {
      any_full = true;
    }
  }
  std::vector<char> out(static_cast<std::size_t>(box.volume()), 0);
  bool any = false;
  for (std::int64_t idx = 0; idx < box.volume(); ++idx) {
    if (!in[static_cast<std::size_t>(idx)]) continue;
    const unsigned f = bc.faces[static_cast<std::size_t>(bc.uf.find(idx))];
    bool keep = false;
    if (any_full) {
      keep = f == all;
    } else {
      for (int k = 0; k < d; ++k) keep = keep || crosses_axis(f, k);
    }
    if (keep) {
      out[static_cast<std::size_t>(idx)] = 1;
      any = true;
    }
  }
  if (!any) out.clear();
  return out;
}

namespace {

// Flood over `bounds` from every site of its outer shell through sites whose
// flag in `blocked` is zero.
std::vector<char> reach_from_shell(const Region& bounds, const std::vector<char>& blocked) {
  const int d = bounds.dim();
  std::vector<char> seen(static_cast<std::size_t>(bounds.volume()), 0);
  std::deque<std::int64_t> queue;
  for (std::int64_t idx = 0; idx < bounds.volume(); ++idx) {
    const Coord x = bounds.point(idx);
    bool shell = false;
    for (int k = 0; k < d; ++k) shell = shell || x[k] == bounds.lo()[k] || x[k] == bounds.hi()[k];
    if (shell && !blocked[static_cast<std::size_t>(idx)]) {
      seen[static_cast<std::size_t>(idx)] = 1;
      queue.push_back(idx);
    }
  }
  while (!queue.empty()) {
    const std::int64_t idx = queue.front();
    queue.pop_front();
    const Coord x = bounds.point(idx);
    for (int k = 0; k < d; ++k) {
      for (int s : {-1, 1}) {
        if ((s < 0 && x[k] == bounds.lo()[k]) || (s > 0 && x[k] == bounds.hi()[k])) continue;
        const std::int64_t nb = idx + s * bounds.stride(k);
        if (seen[static_cast<std::size_t>(nb)] || blocked[static_cast<std::size_t>(nb)]) continue;
        seen[static_cast<std::size_t>(nb)] = 1;
        queue.push_back(nb);
      }
    }
  }
  return seen;
}

}  // namespace

BadComponents bad_components(const SiteGrid& grid) {
  const Region& g = grid.sites;
  const int d = g.dim();
  BadComponents out;
  out.component_of.assign(static_cast<std::size_t>(g.volume()), -1);

  for (std::int64_t start = 0; start < g.volume(); ++start) {
    if (grid.good[static_cast<std::size_t>(start)] || out.component_of[static_cast<std::size_t>(start)] >= 0) {
      continue;
    }
    const int id = static_cast<int>(out.components.size());
    BadComponent comp;
    std::deque<std::int64_t> queue{start};
    out.component_of[static_cast<std::size_t>(start)] = id;
    std::vector<std::int64_t> indices;
    while (!queue.empty()) {
      const std::int64_t idx = queue.front();
      queue.pop_front();
      indices.push_back(idx);
      const Coord x = g.point(idx);
      for (int k = 0; k < d; ++k) {
        for (int s : {-1, 1}) {
          if ((s < 0 && x[k] == g.lo()[k]) || (s > 0 && x[k] == g.hi()[k])) {
            comp.touches_grid_edge = true;
            continue;
          }
          const std::int64_t nb = idx + s * g.stride(k);
          if (grid.good[static_cast<std::size_t>(nb)] || out.component_of[static_cast<std::size_t>(nb)] >= 0) continue;
          out.component_of[static_cast<std::size_t>(nb)] = id;
          queue.push_back(nb);
        }
      }
    }
    std::sort(indices.begin(), indices.end());
    for (std::int64_t idx : indices) comp.sites.push_back(MacroSite{g.point(idx)});

    // Exterior boundary on the grid padded by one layer of outside sites.
    const Region padded = g.grow(1);
    std::vector<char> in_c(static_cast<std::size_t>(padded.volume()), 0);
    for (const MacroSite& s : comp.sites) in_c[static_cast<std::size_t>(padded.index(s.c))] = 1;
    const std::vector<char> outside = reach_from_shell(padded, in_c);
    for (std::int64_t idx = 0; idx < padded.volume(); ++idx) {
      if (in_c[static_cast<std::size_t>(idx)] || !outside[static_cast<std::size_t>(idx)]) continue;
      const Coord x = padded.point(idx);
      bool adjacent = false;
      for (int k = 0; k < d && !adjacent; ++k) {
        for (int s : {-1, 1}) {
          Coord y = x;
          y[k] += s;
          if (padded.contains(y) && in_c[static_cast<std::size_t>(padded.index(y))]) adjacent = true;
        }
      }
      if (adjacent) comp.boundary.push_back(MacroSite{x});
    }
    out.components.push_back(std::move(comp));
  }
  return out;
}

namespace {

bool connected_under(const std::vector<MacroSite>& sites, int d, bool star) {
  if (sites.size() <= 1) return true;
  std::vector<MacroSite> sorted = sites;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<char> seen(sorted.size(), 0);
  std::deque<std::size_t> queue{0};
  seen[0] = 1;
  std::size_t reached = 1;
  const std::vector<Coord> offsets = unit_offsets(d);
  while (!queue.empty()) {
    const MacroSite cur = sorted[queue.front()];
    queue.pop_front();
    for (const Coord& off : offsets) {
      int l1 = 0;
      for (int k = 0; k < d; ++k) l1 += off[k] < 0 ? -off[k] : off[k];
      if (l1 == 0 || (!star && l1 != 1)) continue;
      MacroSite nb = cur;
      for (int k = 0; k < d; ++k) nb[k] += off[k];
      auto it = std::lower_bound(sorted.begin(), sorted.end(), nb);
      if (it == sorted.end() || *it != nb) continue;
      const auto j = static_cast<std::size_t>(it - sorted.begin());
      if (seen[j]) continue;
      seen[j] = 1;
      ++reached;
      queue.push_back(j);
    }
  }
  return reached == sorted.size();
}

}  // namespace

bool is_star_connected(const std::vector<MacroSite>& sites, int d) {
  return connected_under(sites, d, true);
}

bool is_l1_connected(const std::vector<MacroSite>& sites, int d) {
  return connected_under(sites, d, false);
}

std::vector<MacroSite> enclosed_sites(const std::vector<MacroSite>& wall, const Region& bounds) {
  const Region padded = bounds.grow(1);
  std::vector<char> blocked(static_cast<std::size_t>(padded.volume()), 0);
  for (const MacroSite& s : wall) {
    if (padded.contains(s.c)) blocked[static_cast<std::size_t>(padded.index(s.c))] = 1;
  }
  const std::vector<char> outside = reach_from_shell(padded, blocked);
  std::vector<MacroSite> out;
  for (std::int64_t idx = 0; idx < bounds.volume(); ++idx) {
    const Coord x = bounds.point(idx);
    const auto pidx = static_cast<std::size_t>(padded.index(x));
    if (!blocked[pidx] && !outside[pidx]) out.push_back(MacroSite{x});
  }
  return out;
}

}  // namespace percreg
