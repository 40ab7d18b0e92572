// Slow reference implementations used only by the tests.

#ifndef PERCREG_TESTS_ORACLES_HPP
#define PERCREG_TESTS_ORACLES_HPP

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "percreg/field.hpp"
#include "percreg/lattice.hpp"
#include "percreg/renorm.hpp"

namespace oracle {

using percreg::Coord;
using percreg::OpenMask;
using percreg::Region;
using percreg::Vertex;

inline std::vector<Vertex> region_vertices(const Region& r) {
  std::vector<Vertex> out;
  for (std::int64_t i = 0; i < r.volume(); ++i) out.push_back(Vertex{r.point(i)});
  return out;
}

inline std::vector<Vertex> neighbours_in(const Vertex& v, const Region& r) {
  std::vector<Vertex> out;
  for (int k = 0; k < r.dim(); ++k) {
    for (int s : {-1, 1}) {
      Vertex w = v;
      w[k] += s;
      if (r.contains(w.c)) out.push_back(w);
    }
  }
  return out;
}

// Clusters by recursive depth-first search; each cluster sorted, and the
// list sorted by (size descending, smallest vertex).
inline std::vector<std::vector<Vertex>> dfs_clusters(const OpenMask& mask, const Region& region) {
  std::map<Vertex, int> seen;
  std::vector<std::vector<Vertex>> out;
  std::function<void(const Vertex&, std::vector<Vertex>&)> visit = [&](const Vertex& v, std::vector<Vertex>& acc) {
    seen[v] = 1;
    acc.push_back(v);
    for (const Vertex& w : neighbours_in(v, region)) {
      if (!seen.count(w) && mask.open_between(v, w)) visit(w, acc);
    }
  };
  for (const Vertex& v : region_vertices(region)) {
    if (seen.count(v)) continue;
    std::vector<Vertex> acc;
    visit(v, acc);
    std::sort(acc.begin(), acc.end());
    out.push_back(std::move(acc));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a.front() < b.front();
  });
  return out;
}

// Unit-weight Dijkstra with a binary heap. Vertices farther than `cap` are
// left out of the result.
inline std::map<Vertex, long> dijkstra(const OpenMask& mask, const Vertex& src, const Region& region,
                                       long cap = std::numeric_limits<long>::max()) {
  std::map<Vertex, long> dist;
  using Item = std::pair<long, Vertex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[src] = 0;
  heap.push({0, src});
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (const Vertex& w : neighbours_in(v, region)) {
      if (d >= cap || !mask.open_between(v, w)) continue;
      const auto it = dist.find(w);
      if (it == dist.end() || it->second > d + 1) {
        dist[w] = d + 1;
        heap.push({d + 1, w});
      }
    }
  }
  return dist;
}

// Same search over a flat array indexed by region.index(); -1 for vertices
// not reached within `cap`.
inline std::vector<long> dijkstra_flat(const OpenMask& mask, const Vertex& src, const Region& region, long cap) {
  std::vector<long> dist(static_cast<std::size_t>(region.volume()), -1);
  using Item = std::pair<long, std::int64_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[static_cast<std::size_t>(region.index(src.c))] = 0;
  heap.push({0, region.index(src.c)});
  while (!heap.empty()) {
    const auto [d, at] = heap.top();
    heap.pop();
    if (d > dist[static_cast<std::size_t>(at)] || d >= cap) continue;
    const Vertex v{region.point(at)};
    for (const Vertex& w : neighbours_in(v, region)) {
      if (!mask.open_between(v, w)) continue;
      long& dw = dist[static_cast<std::size_t>(region.index(w.c))];
      if (dw == -1 || dw > d + 1) {
        dw = d + 1;
        heap.push({d + 1, region.index(w.c)});
      }
    }
  }
  return dist;
}

inline long dijkstra_distance(const OpenMask& mask, const Vertex& a, const Vertex& b, const Region& region) {
  const auto dist = dijkstra(mask, a, region);
  const auto it = dist.find(b);
  return it == dist.end() ? -1 : it->second;
}

inline int span_diameter(const std::vector<Vertex>& c, int d) {
  int best = 0;
  for (int k = 0; k < d; ++k) {
    int lo = c.front()[k], hi = lo;
    for (const Vertex& v : c) {
      lo = std::min(lo, v[k]);
      hi = std::max(hi, v[k]);
    }
    best = std::max(best, hi - lo);
  }
  return best;
}

// Some component of the open subgraph on (cluster ∩ box) meets both faces
// of `box` normal to every axis.
inline bool crosses(const std::vector<Vertex>& cluster, const OpenMask& mask, const Region& box) {
  std::set<Vertex> inside;
  for (const Vertex& v : cluster) {
    if (box.contains(v.c)) inside.insert(v);
  }
  const int d = box.dim();
  for (int k = 0; k < d; ++k) {
    bool found = false;
    std::set<Vertex> done;
    for (const Vertex& s : inside) {
      if (done.count(s) || found) continue;
      std::vector<Vertex> stack{s};
      done.insert(s);
      bool lo = false, hi = false;
      while (!stack.empty()) {
        const Vertex v = stack.back();
        stack.pop_back();
        lo |= v[k] == box.lo()[k];
        hi |= v[k] == box.hi()[k];
        for (const Vertex& w : neighbours_in(v, box)) {
          if (inside.count(w) && !done.count(w) && mask.open_between(v, w)) {
            done.insert(w);
            stack.push_back(w);
          }
        }
      }
      found = lo && hi;
    }
    if (!found) return false;
  }
  return true;
}

struct BoxVerdict {
  bool unique_big = false;
  bool all_crossed = false;
  bool distances_ok = false;
  bool good = false;
  int big = 0;
  std::vector<Vertex> witness;
};

// Good-box properties evaluated straight from their definitions. The mask
// must cover the enlarged box grown by the cap.
inline BoxVerdict classify(const OpenMask& mask, const percreg::MacroSite& i, int N, long cap) {
  const int d = mask.dim();
  BoxVerdict v;
  Coord lo{}, hi{};
  for (int k = 0; k < d; ++k) {
    lo[k] = i[k] * (2 * N + 1) - 3 * N - 1;
    hi[k] = i[k] * (2 * N + 1) + 3 * N + 1;
  }
  const Region big_box(d, lo, hi);
  const auto clusters = dfs_clusters(mask, big_box);
  std::vector<std::size_t> big;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    if (span_diameter(clusters[c], d) > N) big.push_back(c);
  }
  v.big = static_cast<int>(big.size());
  v.unique_big = big.size() == 1;
  for (std::size_t c : big) {
    if (span_diameter(clusters[c], d) < 2 * N) continue;
    bool all = true;
    for (const Coord& off : percreg::unit_offsets(d)) {
      Coord blo{}, bhi{};
      for (int k = 0; k < d; ++k) {
        const int center = (i[k] + off[k]) * (2 * N + 1);
        blo[k] = center - N;
        bhi[k] = center + N;
      }
      if (!crosses(clusters[c], mask, Region(d, blo, bhi))) {
        all = false;
        break;
      }
    }
    if (all) v.all_crossed = true;
  }
  if (v.unique_big) {
    v.witness = clusters[big.front()];
  } else if (!big.empty() && big.front() == 0) {
    v.witness = clusters[0];
  }
  if (!v.witness.empty()) {
    v.distances_ok = true;
    for (const Vertex& x : v.witness) {
      const auto dist = dijkstra_flat(mask, x, mask.region(), cap);
      for (const Vertex& y : v.witness) {
        const long dy = dist[static_cast<std::size_t>(mask.region().index(y.c))];
        if (dy < 0 || dy > cap) {
          v.distances_ok = false;
          break;
        }
      }
      if (!v.distances_ok) break;
    }
  }
  v.good = v.unique_big && v.all_crossed && v.distances_ok;
  return v;
}

// Empty when classify_box and the brute-force verdict agree on every
// property, the big-cluster count and the witness; else a description.
inline std::string classify_mismatch(const percreg::GoodBoxReport& got, const OpenMask& mask,
                                     const percreg::MacroSite& i, int N, double beta) {
  const auto ref = classify(mask, i, N, percreg::distance_cap(N, beta));
  std::string out;
  if (got.unique_big_cluster != ref.unique_big) out += " unique";
  if (got.all_subboxes_crossed != ref.all_crossed) out += " crossed";
  if (got.distance_bound_ok != ref.distances_ok) out += " distances";
  if (got.good != ref.good) out += " good";
  if (got.big_clusters != ref.big) out += " big";
  std::vector<Vertex> witness;
  if (got.has_witness()) {
    for (std::int64_t k = 0; k < got.big_box.volume(); ++k) {
      if (got.in_witness[static_cast<std::size_t>(k)]) witness.push_back(Vertex{got.big_box.point(k)});
    }
  }
  if (witness != ref.witness) out += " witness";
  if (got.good) {
    const Region box = percreg::box_region(i, N, mask.dim());
    if (!box.contains(got.representative.c) || !got.witness_contains(got.representative) ||
        !got.crossing_contains(got.representative)) {
      out += " representative";
    }
  }
  return out;
}

inline std::string classify_mismatch(const OpenMask& mask, const percreg::MacroSite& i, int N, double beta) {
  return classify_mismatch(percreg::classify_box(mask, i, N, beta), mask, i, N, beta);
}

// Field version: the oracle reads every edge within the cap of the enlarged
// box, including those beyond the field's window.
inline std::string classify_mismatch(const percreg::EdgeField& field, double p, const percreg::MacroSite& i,
                                     double beta) {
  const int N = field.window().box_scale();
  const Region need = percreg::big_box_region(i, N, field.dim()).grow(static_cast<int>(percreg::distance_cap(N, beta)));
  return classify_mismatch(percreg::classify_box(field, p, i, beta), field.materialize(need, p), i, N, beta);
}

// Connected site sets of size k containing the origin, by brute force over
// subsets of the L1 ball of radius k - 1.
inline long animals_brute(int d, int k) {
  std::vector<Coord> ball;
  Coord lo{}, hi{};
  for (int j = 0; j < d; ++j) {
    lo[j] = -(k - 1);
    hi[j] = k - 1;
  }
  const Region r(d, lo, hi);
  for (std::int64_t i = 0; i < r.volume(); ++i) {
    const Coord c = r.point(i);
    int n1 = 0;
    for (int j = 0; j < d; ++j) n1 += std::abs(c[j]);
    if (n1 <= k - 1 && c != Coord{}) ball.push_back(c);
  }
  long count = 0;
  std::vector<int> pick;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (static_cast<int>(pick.size()) == k - 1) {
      std::vector<Coord> cells{Coord{}};
      for (int p : pick) cells.push_back(ball[static_cast<std::size_t>(p)]);
      std::set<Coord> all(cells.begin(), cells.end()), seen{Coord{}};
      std::vector<Coord> stack{Coord{}};
      while (!stack.empty()) {
        const Coord c = stack.back();
        stack.pop_back();
        for (int j = 0; j < d; ++j) {
          for (int s : {-1, 1}) {
            Coord n = c;
            n[j] += s;
            if (all.count(n) && seen.insert(n).second) stack.push_back(n);
          }
        }
      }
      if (static_cast<int>(seen.size()) == k) ++count;
      return;
    }
    for (std::size_t i = start; i < ball.size(); ++i) {
      pick.push_back(static_cast<int>(i));
      rec(i + 1);
      pick.pop_back();
    }
  };
  rec(0);
  return count;
}

// Sites outside `comp` that are L1-adjacent to it and reachable from far
// away without crossing it, found on a generous bounding box.
inline std::set<Coord> exterior_boundary(const std::vector<Coord>& comp, int d) {
  Coord lo = comp.front(), hi = comp.front();
  for (const Coord& c : comp) {
    for (int j = 0; j < d; ++j) {
      lo[j] = std::min(lo[j], c[j]);
      hi[j] = std::max(hi[j], c[j]);
    }
  }
  for (int j = 0; j < d; ++j) {
    lo[j] -= 2;
    hi[j] += 2;
  }
  const Region r(d, lo, hi);
  const std::set<Coord> wall(comp.begin(), comp.end());
  std::set<Coord> outside{lo};
  std::vector<Coord> stack{lo};
  while (!stack.empty()) {
    const Coord c = stack.back();
    stack.pop_back();
    for (int j = 0; j < d; ++j) {
      for (int s : {-1, 1}) {
        Coord n = c;
        n[j] += s;
        if (r.contains(n) && !wall.count(n) && outside.insert(n).second) stack.push_back(n);
      }
    }
  }
  std::set<Coord> out;
  for (const Coord& c : comp) {
    for (int j = 0; j < d; ++j) {
      for (int s : {-1, 1}) {
        Coord n = c;
        n[j] += s;
        if (outside.count(n)) out.insert(n);
      }
    }
  }
  return out;
}

}  // namespace oracle

#endif  // PERCREG_TESTS_ORACLES_HPP
