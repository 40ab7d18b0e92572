#include "percreg/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "percreg/errors.hpp"
#include "percreg/field.hpp"
#include "percreg/renorm.hpp"
#include "percreg/stats.hpp"

namespace percreg {

StirlingCheck stirling_sum_bound(double z, int r, int N, std::int64_t max_terms) {
  if (r < 3) throw DomainError("r must be at least 3");
  if (N < 1) throw DomainError("N must be at least 1");
  const double e = std::numbers::e;
  const double a = e * z * (1.0 + static_cast<double>(r) / N);
  if (!(z > 0.0) || !(a < 1.0)) throw DomainError("need 0 < e z (1 + r/N) < 1");

  StirlingCheck out;
  out.rhs = e / (2.0 * std::numbers::pi) * std::pow(a, N) / (1.0 - a);

  // First term z^N C(r+N-1, N) in log space, then the ratio z (r+j)/(j+1).
  double term = std::exp(N * std::log(z) + std::lgamma(static_cast<double>(r + N)) -
                         std::lgamma(static_cast<double>(N + 1)) - std::lgamma(static_cast<double>(r)));
  double sum = 0.0, comp = 0.0;
  for (std::int64_t j = N;; ++j) {
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    ++out.terms_used;
    const double ratio = z * static_cast<double>(r + j) / static_cast<double>(j + 1);
    const double next = term * ratio;
    // Ratios decrease towards z, so the tail is at most next / (1 - ratio).
    if (ratio < 1.0 && next / (1.0 - ratio) < 1e-12 * sum) break;
    if (out.terms_used >= max_terms) throw CapacityError("series did not converge within the term budget");
    term = next;
  }
  out.lhs = sum;
  out.ok = out.lhs <= out.rhs;
  return out;
}

namespace {

struct Redelmeier {
  int d;
  int k;
  std::int64_t budget;
  std::int64_t fixed = 0;
  std::int64_t generated = 0;
  std::set<Coord> marked;

  // Cells after the origin in the order that makes it the smallest cell of
  // each counted animal.
  bool allowed(const Coord& c) const {
    for (int i = d - 1; i >= 0; --i) {
      if (c[i] != 0) return c[i] > 0;
    }
    return true;
  }

  void grow(std::vector<Coord> untried, int size) {
    while (!untried.empty()) {
      const Coord c = untried.back();
      untried.pop_back();
      if (++generated > budget) throw CapacityError("animal enumeration budget exceeded");
      if (size + 1 == k) {
        ++fixed;
        continue;
      }
      std::vector<Coord> next = untried;
      std::vector<Coord> fresh;
      for (int i = 0; i < d; ++i) {
        for (int s : {-1, 1}) {
          Coord n = c;
          n[i] += s;
          if (!allowed(n) || marked.count(n)) continue;
          marked.insert(n);
          fresh.push_back(n);
          next.push_back(n);
        }
      }
      grow(std::move(next), size + 1);
      for (const Coord& n : fresh) marked.erase(n);
    }
  }
};

}  // namespace

std::int64_t animal_count(int d, int k, std::int64_t budget) {
  if (d < 1 || d > kMaxDim) throw DomainError("dimension out of range");
  if (k < 1) throw DomainError("animal size must be positive");
  Redelmeier run{d, k, budget, 0, 0, {}};
  const Coord origin{};
  run.marked.insert(origin);
  run.grow({origin}, 0);
  return run.fixed * k;
}

bool covered_by_cubes(const std::vector<MacroSite>& sites, const std::vector<MacroSite>& centers,
                      int K, int d) {
  return std::all_of(sites.begin(), sites.end(), [&](const MacroSite& s) {
    return std::any_of(centers.begin(), centers.end(),
                       [&](const MacroSite& v) { return dist_inf(s, v, d) <= K; });
  });
}

CorridorCover corridor_cover(const std::vector<MacroSite>& path, int K, int d) {
  if (K < 1) throw DomainError("cube radius must be positive");
  CorridorCover out;
  if (path.empty()) {
    out.count_ok = out.contains_ok = true;
    return out;
  }
  out.centers.push_back(path.front());
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (dist_inf(path[i], out.centers.back(), d) >= K) out.centers.push_back(path[i]);
  }
  out.tau = static_cast<int>(out.centers.size()) - 1;
  out.count_ok = out.tau <= 1.0 + static_cast<double>(path.size()) / K;

  std::set<MacroSite> halo;
  const std::vector<Coord> offsets = unit_offsets(d);
  for (const MacroSite& s : path) {
    for (const Coord& off : offsets) {
      MacroSite n = s;
      for (int k = 0; k < d; ++k) n[k] += off[k];
      halo.insert(n);
    }
  }
  out.contains_ok = covered_by_cubes(std::vector<MacroSite>(halo.begin(), halo.end()), out.centers, K, d);
  return out;
}

void BoundaryAudit::merge(const BoundaryAudit& o) {
  components += o.components;
  size_violations += o.size_violations;
  disconnected += o.disconnected;
  max_ratio = std::max(max_ratio, o.max_ratio);
  total_sites += o.total_sites;
  total_boundary += o.total_boundary;
}

BoundaryAudit boundary_bound_audit(const BadComponents& components, int d) {
  BoundaryAudit out;
  for (const BadComponent& c : components.components) {
    const auto size = static_cast<std::int64_t>(c.sites.size());
    const auto bsize = static_cast<std::int64_t>(c.boundary.size());
    ++out.components;
    out.total_sites += size;
    out.total_boundary += bsize;
    if (bsize > 2LL * d * size) ++out.size_violations;
    if (!is_star_connected(c.boundary, d)) ++out.disconnected;
    if (size > 0) out.max_ratio = std::max(out.max_ratio, static_cast<double>(bsize) / static_cast<double>(size));
  }
  return out;
}

VertexPath random_walk(int d, int steps, std::uint64_t seed) {
  VertexPath out{d, {Vertex{}}};
  Vertex cur;
  for (int t = 0; t < steps; ++t) {
    const std::uint64_t r = mix64(seed + static_cast<std::uint64_t>(t) * 0x9e3779b97f4a7c15ULL) % (2 * static_cast<std::uint64_t>(d));
    cur[static_cast<int>(r / 2)] += (r % 2) ? 1 : -1;
    out.vertices.push_back(cur);
  }
  return out;
}

std::vector<MacroSite> random_star_walk(int d, int steps, std::uint64_t seed) {
  std::vector<Coord> offsets;
  for (const Coord& off : unit_offsets(d)) {
    if (off != Coord{}) offsets.push_back(off);
  }
  std::vector<MacroSite> out{MacroSite{}};
  MacroSite cur;
  for (int t = 0; t < steps; ++t) {
    const std::uint64_t r = mix64(seed + static_cast<std::uint64_t>(t) * 0x9e3779b97f4a7c15ULL) % offsets.size();
    for (int k = 0; k < d; ++k) cur[k] += offsets[r][k];
    out.push_back(cur);
  }
  return out;
}

BoundaryAudit sampled_boundary_audit(const BoundarySampling& cfg) {
  const LatticeWindow window = LatticeWindow::from_macro_radius(cfg.d, cfg.N, cfg.macro_radius);
  const Region region = macro_mask_region(window, cfg.beta);
  std::vector<BoundaryAudit> parts(static_cast<std::size_t>(std::max<std::int64_t>(cfg.fields, 0)));
  parallel_for(cfg.fields, cfg.workers, [&](std::int64_t i) {
    const EdgeField field = EdgeField::monotone(
        window, derive_seed(cfg.seed, 5000 + static_cast<std::uint64_t>(cfg.N), static_cast<std::uint64_t>(i)));
    const MacroField macro = build_macro_field(field.materialize(region, cfg.p), window, cfg.beta);
    parts[static_cast<std::size_t>(i)] = boundary_bound_audit(bad_components(macro.grid()), cfg.d);
  });
  BoundaryAudit total;
  for (const BoundaryAudit& a : parts) total.merge(a);
  return total;
}

}  // namespace percreg
