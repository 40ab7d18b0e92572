// Chemical distance: graph distance in the open subgraph.

#ifndef PERCREG_DISTANCE_HPP
#define PERCREG_DISTANCE_HPP

#include <cstdint>
#include <limits>
#include <vector>

#include "percreg/cluster.hpp"
#include "percreg/field.hpp"

namespace percreg {

struct VertexPath {
  int d = 2;
  std::vector<Vertex> vertices;

  std::int64_t length() const {
    return vertices.empty() ? 0 : static_cast<std::int64_t>(vertices.size()) - 1;
  }
  const Vertex& front() const { return vertices.front(); }
  const Vertex& back() const { return vertices.back(); }
  // Edge i joins vertices[i] and vertices[i + 1]. Throws DomainError on a
  // non-unit step.
  std::vector<Edge> edges() const;
  bool is_unit_step() const;
  bool is_self_avoiding() const;
};

inline constexpr std::int64_t kNoCap = std::numeric_limits<std::int64_t>::max();

struct Distance {
  enum class Status { finite, disconnected, cap_exceeded };
  Status status = Status::disconnected;
  std::int64_t value = 0;  // meaningful only when finite

  bool finite() const { return status == Status::finite; }
  static Distance of(std::int64_t v) { return Distance{Status::finite, v}; }
};

// Breadth-first search over an OpenMask with reusable scratch space.
// Neighbours are scanned axis by axis, -e_k before +e_k, and the first
// vertex to reach a site becomes its parent.
class BfsWorkspace {
 public:
  explicit BfsWorkspace(const OpenMask& mask);

  const OpenMask& mask() const { return *mask_; }

  // Explores every vertex within distance `cap` of `source`, inside `limit`
  // when given (a sub-region of the mask). Stops once `target` is reached.
  void run(const Vertex& source, std::int64_t cap = kNoCap, const Region* limit = nullptr,
           const Vertex* target = nullptr);

  bool reached(const Vertex& v) const;
  // -1 when unreached.
  std::int64_t dist(const Vertex& v) const;
  std::int64_t dist_at(std::int64_t mask_index) const {
    return stamp_[static_cast<std::size_t>(mask_index)] == epoch_
               ? dist_[static_cast<std::size_t>(mask_index)]
               : -1;
  }
  VertexPath path_to(const Vertex& v) const;
  // Mask indices in discovery order.
  const std::vector<std::int64_t>& visited() const { return order_; }
  // True when the cap stopped the search with open edges left unexplored.
  bool truncated() const { return truncated_; }

 private:
  const OpenMask* mask_;
  std::vector<std::uint32_t> stamp_;
  std::vector<std::int32_t> dist_;
  std::vector<std::int64_t> parent_;
  std::vector<std::int64_t> order_;
  std::uint32_t epoch_ = 0;
  bool truncated_ = false;
};

Distance chemical_distance(const OpenMask& mask, const Vertex& x, const Vertex& y,
                           std::int64_t cap = kNoCap);
Distance chemical_distance(BfsWorkspace& ws, const Vertex& x, const Vertex& y,
                           std::int64_t cap = kNoCap);
// Distance inside the field's window.
Distance chemical_distance(const EdgeField& field, double p, const Vertex& x, const Vertex& y,
                           std::int64_t cap = kNoCap);

// Shortest open path; throws NoPathError when x and y are not connected.
VertexPath geodesic(const OpenMask& mask, const Vertex& x, const Vertex& y);
VertexPath geodesic(BfsWorkspace& ws, const Vertex& x, const Vertex& y);
VertexPath geodesic(const EdgeField& field, double p, const Vertex& x, const Vertex& y);

// The p-closed edges of `path`, in path order.
std::vector<Edge> closed_edges_on_path(const EdgeField& field, const VertexPath& path, double p);
bool is_open_path(const EdgeField& field, const VertexPath& path, double p);
bool is_open_path(const OpenMask& mask, const VertexPath& path);

// Vertex of the cluster closest to x in L1; ties go to the lexicographically
// smallest vertex. Throws DomainError for an empty cluster.
Vertex regularize(const Vertex& x, const ClusterLabeling& labeling, int label);

}  // namespace percreg

#endif  // PERCREG_DISTANCE_HPP
