// Turning a q-open path into a p-open one by detours through good boxes.

#ifndef PERCREG_BYPASS_HPP
#define PERCREG_BYPASS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "percreg/cluster.hpp"
#include "percreg/distance.hpp"
#include "percreg/renorm.hpp"

namespace percreg {

struct AnimalCover {
  std::vector<MacroSite> path;         // Γ̃, in construction order (may repeat sites)
  std::vector<MacroSite> visited;      // Γ, every box the path visits, lexicographic
  std::vector<std::int64_t> pivots;    // vertex index p(k) that started each step
};

// Walks the path and starts a new enlarged box each time it leaves the
// current one.
AnimalCover animal_cover(const VertexPath& gamma, int N);

// Open path from x to y through a *-connected set of good sites. x and y
// must lie in the crossing cluster of boxes of `sites`; HypothesisError
// otherwise. Each hop between consecutive boxes is a geodesic of length at
// most floor(12 beta N), else ConsistencyError.
VertexPath link_through_good_boxes(const MacroField& macro, const std::vector<MacroSite>& sites,
                                   const Vertex& x, const Vertex& y, BfsWorkspace& ws);

// Chronological loop erasure: on revisiting a vertex, the loop since its
// first visit is cut out.
VertexPath loop_erase(const VertexPath& path);

struct BypassResult {
  VertexPath gamma_prime;
  std::vector<VertexPath> link_segments;  // one per kept component, in path order
  std::vector<VertexPath> detours;        // maximal runs of gamma' edges not in gamma
  std::int64_t n_closed = 0;
  std::int64_t bad_mass = 0;       // sum of |C| over bad components meeting Γ
  std::int64_t boundary_mass = 0;  // sum of |∂_v C| over the same components
  std::int64_t extra_length = 0;   // edges of gamma' not in gamma
  double bound_value = 0.0;        // 12 beta N (n_closed + boundary_mass)
  double coarse_bound = 0.0;       // 12 beta N (1 + 2d) (n_closed + bad_mass)
  bool satisfied = false;

  // Sizes of the successive extractions and the entry/exit times.
  int r1 = 0, r2 = 0, r3 = 0, r4 = 0;
  std::vector<std::int64_t> psi_in, psi_out;
};

// `gamma` must be q-open for some q >= p; only the p-states in `p_mask` are
// read. The mask must cover the window grown by the distance cap.
// HypothesisError: the input falls outside the construction's hypotheses
// (endpoint boxes off the spanning good component, path leaving the
// classified sites, a needed bad component touching the grid edge).
// ConsistencyError: an audit failed although the hypotheses held.
BypassResult modify_path(const OpenMask& p_mask, const MacroField& macro,
                         const BadComponents& bad, const VertexPath& gamma);

struct BypassExperimentConfig {
  int d = 2;
  int N = 4;
  int macro_radius = 6;  // (2m+1)^d boxes in the window
  double p = 0.80;
  double q = 0.95;
  double beta = 2.0;
  std::int64_t target = 300;
  std::int64_t max_attempts = 20000;
  int endpoint_offset = 3;  // endpoints sit in boxes at macro coordinate -/+ offset
  std::uint64_t seed = 1;
  int workers = 1;
};

struct BypassAuditRow {
  std::int64_t attempt = 0;
  std::uint64_t seed = 0;
  std::int64_t gamma_len = 0;
  std::int64_t n_closed = 0;
  std::int64_t bad_mass = 0;
  std::int64_t boundary_mass = 0;
  std::int64_t extra_length = 0;
  double bound_value = 0.0;
  bool satisfied = false;
  bool open_recheck = false;  // gamma' re-verified edge by edge against the field
  bool segments_ok = false;   // detours self-avoiding, disjoint, touching gamma only at ends
  std::string failure;        // non-empty for consistency failures
  bool ok() const { return satisfied && open_recheck && segments_ok && failure.empty(); }
};

struct BypassExperimentResult {
  std::vector<BypassAuditRow> rows;  // admissible samples, by attempt index
  std::int64_t attempts = 0;
  std::map<std::string, std::int64_t> censored;  // reason -> count
  std::int64_t violations = 0;
};

BypassExperimentResult run_bypass_experiment(const BypassExperimentConfig& cfg);

// Independent check of the detour structure: the runs of gamma' outside gamma are
// self-avoiding, pairwise vertex-disjoint, and meet the rest of gamma' only
// at their two ends.
bool detours_well_formed(const VertexPath& gamma, const VertexPath& gamma_prime);

}  // namespace percreg

#endif  // PERCREG_BYPASS_HPP
