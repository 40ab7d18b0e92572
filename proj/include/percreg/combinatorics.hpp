// Numeric and enumerative checks of the counting estimates behind the
// coarse-graining argument.

#ifndef PERCREG_COMBINATORICS_HPP
#define PERCREG_COMBINATORICS_HPP

#include <cstdint>
#include <vector>

#include "percreg/cluster.hpp"
#include "percreg/distance.hpp"
#include "percreg/lattice.hpp"

namespace percreg {

struct StirlingCheck {
  double lhs = 0.0;  // sum_{j>=N} z^j C(r+j-1, j)
  double rhs = 0.0;  // (e/2pi) a^N / (1 - a), a = e z (1 + r/N)
  std::int64_t terms_used = 0;
  bool ok = false;
};

// Requires 0 < e z (1 + r/N) < 1, r >= 3, N >= 1 (DomainError otherwise).
// Sums until the geometric tail estimate drops below 1e-12 of the partial
// sum; CapacityError if that needs more than `max_terms` terms.
StirlingCheck stirling_sum_bound(double z, int r, int N, std::int64_t max_terms = 1000000);

// Number of L1-connected sets of k sites containing the origin. Redelmeier
// enumeration of translation classes, times k. CapacityError once more than
// `budget` sets have been generated.
std::int64_t animal_count(int d, int k, std::int64_t budget = 200000000);

struct CorridorCover {
  std::vector<MacroSite> centers;  // v(0), ..., v(tau)
  int tau = 0;
  bool count_ok = false;    // tau <= 1 + |path| / K
  bool contains_ok = false; // every site within L-inf distance one of the path lies in a cube
};

// Cubes S(v) = v + [-K, K]^d. v(k+1) is the first path site after v(k) at
// L-inf distance >= K from v(k).
CorridorCover corridor_cover(const std::vector<MacroSite>& path, int K, int d);

// Whether `sites` lie in the union of the cubes around `centers`.
bool covered_by_cubes(const std::vector<MacroSite>& sites, const std::vector<MacroSite>& centers,
                      int K, int d);

struct BoundaryAudit {
  std::int64_t components = 0;
  std::int64_t size_violations = 0;  // |boundary| > 2d |C|
  std::int64_t disconnected = 0;     // boundary not *-connected
  double max_ratio = 0.0;            // max |boundary| / |C|
  std::int64_t total_sites = 0;
  std::int64_t total_boundary = 0;

  bool ok() const { return size_violations == 0 && disconnected == 0; }
  void merge(const BoundaryAudit& o);
};

BoundaryAudit boundary_bound_audit(const BadComponents& components, int d);

struct BoundarySampling {
  int d = 2;
  int N = 3;
  int macro_radius = 4;
  double p = 0.7;
  double beta = 1.5;
  std::int64_t fields = 1000;
  std::uint64_t seed = 1;
  int workers = 1;
};

// Simple random walk with `steps` unit steps from the origin.
VertexPath random_walk(int d, int steps, std::uint64_t seed);
// Walk on macro sites whose steps are uniform nonzero offsets in {-1,0,1}^d.
std::vector<MacroSite> random_star_walk(int d, int steps, std::uint64_t seed);

// Audit over the bad components of freshly sampled macro fields.
BoundaryAudit sampled_boundary_audit(const BoundarySampling& cfg);

}  // namespace percreg

#endif  // PERCREG_COMBINATORICS_HPP
