#include "percreg/distance.hpp"

#include <algorithm>
#include <set>

namespace percreg {

std::vector<Edge> VertexPath::edges() const {
  std::vector<Edge> out;
  if (vertices.size() < 2) return out;
  out.reserve(vertices.size() - 1);
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
    out.push_back(edge_between(vertices[i], vertices[i + 1], d));
  }
  return out;
}

bool VertexPath::is_unit_step() const {
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
    if (dist1(vertices[i], vertices[i + 1], d) != 1) return false;
  }
  return true;
}

bool VertexPath::is_self_avoiding() const {
  std::set<Vertex> seen(vertices.begin(), vertices.end());
  return seen.size() == vertices.size();
}

BfsWorkspace::BfsWorkspace(const OpenMask& mask)
    : mask_(&mask),
      stamp_(static_cast<std::size_t>(mask.region().volume()), 0),
      dist_(static_cast<std::size_t>(mask.region().volume()), 0),
      parent_(static_cast<std::size_t>(mask.region().volume()), -1) {}

void BfsWorkspace::run(const Vertex& source, std::int64_t cap, const Region* limit,
                       const Vertex* target) {
  const Region& r = mask_->region();
  const Region& lim = limit ? *limit : r;
  if (!lim.contains(source.c)) throw GeometryError("BFS source outside the search region");
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  truncated_ = false;
  order_.clear();
  const int d = r.dim();
  const std::int64_t src = r.index(source.c);
  const std::int64_t tgt = target && r.contains(target->c) ? r.index(target->c) : -1;
  stamp_[static_cast<std::size_t>(src)] = epoch_;
  dist_[static_cast<std::size_t>(src)] = 0;
  parent_[static_cast<std::size_t>(src)] = -1;
  order_.push_back(src);
  if (src == tgt) return;

  for (std::size_t head = 0; head < order_.size(); ++head) {
    const std::int64_t idx = order_[head];
    const std::int32_t du = dist_[static_cast<std::size_t>(idx)];
    const Coord x = r.point(idx);
    for (int k = 0; k < d; ++k) {
      for (int s : {-1, 1}) {
        if (s < 0 ? x[k] == lim.lo()[k] : x[k] == lim.hi()[k]) continue;
        const std::int64_t nb = idx + s * r.stride(k);
        if (!mask_->open(s < 0 ? nb : idx, k)) continue;
        if (stamp_[static_cast<std::size_t>(nb)] == epoch_) continue;
        if (du >= cap) {
          truncated_ = true;
          continue;
        }
        stamp_[static_cast<std::size_t>(nb)] = epoch_;
        dist_[static_cast<std::size_t>(nb)] = du + 1;
        parent_[static_cast<std::size_t>(nb)] = idx;
        order_.push_back(nb);
        if (nb == tgt) return;
      }
    }
  }
}

bool BfsWorkspace::reached(const Vertex& v) const {
  const Region& r = mask_->region();
  return r.contains(v.c) && stamp_[static_cast<std::size_t>(r.index(v.c))] == epoch_;
}

std::int64_t BfsWorkspace::dist(const Vertex& v) const {
  const Region& r = mask_->region();
  if (!r.contains(v.c)) return -1;
  return dist_at(r.index(v.c));
}

VertexPath BfsWorkspace::path_to(const Vertex& v) const {
  if (!reached(v)) throw NoPathError("vertex " + to_string(v, mask_->dim()) + " was not reached");
  const Region& r = mask_->region();
  VertexPath path;
  path.d = r.dim();
  for (std::int64_t idx = r.index(v.c); idx >= 0; idx = parent_[static_cast<std::size_t>(idx)]) {
    path.vertices.push_back(Vertex{r.point(idx)});
  }
  std::reverse(path.vertices.begin(), path.vertices.end());
  return path;
}

Distance chemical_distance(BfsWorkspace& ws, const Vertex& x, const Vertex& y, std::int64_t cap) {
  const Region& r = ws.mask().region();
  if (!r.contains(x.c) || !r.contains(y.c)) {
    throw GeometryError("distance endpoints must lie in the materialized region");
  }
  if (x == y) return Distance::of(0);
  ws.run(x, cap, nullptr, &y);
  if (ws.reached(y)) return Distance::of(ws.dist(y));
  return Distance{ws.truncated() ? Distance::Status::cap_exceeded : Distance::Status::disconnected, 0};
}

Distance chemical_distance(const OpenMask& mask, const Vertex& x, const Vertex& y, std::int64_t cap) {
  BfsWorkspace ws(mask);
  return chemical_distance(ws, x, y, cap);
}

Distance chemical_distance(const EdgeField& field, double p, const Vertex& x, const Vertex& y,
                           std::int64_t cap) {
  return chemical_distance(field.materialize(p), x, y, cap);
}

VertexPath geodesic(BfsWorkspace& ws, const Vertex& x, const Vertex& y) {
  const Region& r = ws.mask().region();
  if (!r.contains(x.c) || !r.contains(y.c)) {
    throw GeometryError("geodesic endpoints must lie in the materialized region");
  }
  ws.run(x, kNoCap, nullptr, &y);
  if (!ws.reached(y)) {
    const int d = r.dim();
    throw NoPathError("no open path between " + to_string(x, d) + " and " + to_string(y, d));
  }
  return ws.path_to(y);
}

VertexPath geodesic(const OpenMask& mask, const Vertex& x, const Vertex& y) {
  BfsWorkspace ws(mask);
  return geodesic(ws, x, y);
}

VertexPath geodesic(const EdgeField& field, double p, const Vertex& x, const Vertex& y) {
  return geodesic(field.materialize(p), x, y);
}

std::vector<Edge> closed_edges_on_path(const EdgeField& field, const VertexPath& path, double p) {
  std::vector<Edge> out;
  for (const Edge& e : path.edges()) {
    if (!field.open(e, p)) out.push_back(e);
  }
  return out;
}

bool is_open_path(const EdgeField& field, const VertexPath& path, double p) {
  if (!path.is_unit_step()) return false;
  for (const Edge& e : path.edges()) {
    if (!field.open(e, p)) return false;
  }
  return true;
}

bool is_open_path(const OpenMask& mask, const VertexPath& path) {
  if (!path.is_unit_step()) return false;
  for (const Edge& e : path.edges()) {
    if (!mask.open(e)) return false;
  }
  return true;
}

Vertex regularize(const Vertex& x, const ClusterLabeling& labeling, int label) {
  if (label < 0 || label >= labeling.count()) {
    throw DomainError("cannot regularize to an empty cluster");
  }
  const Region& r = labeling.region();
  const int d = r.dim();
  long best = -1;
  std::int64_t best_idx = -1;
  // Index order is lexicographic, so the first minimiser wins ties.
  for (std::int64_t idx = 0; idx < r.volume(); ++idx) {
    if (labeling.label_at(idx) != label) continue;
    const long dd = dist1(Vertex{r.point(idx)}, x, d);
    if (best < 0 || dd < best) {
      best = dd;
      best_idx = idx;
      if (dd == 0) break;
    }
  }
  return Vertex{r.point(best_idx)};
}

}  // namespace percreg
