#include "percreg/bypass.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <tuple>
#include <unordered_map>

#include "percreg/errors.hpp"

namespace percreg {

namespace {

bool contains_sorted(const std::vector<MacroSite>& sorted, const MacroSite& s) {
  return std::binary_search(sorted.begin(), sorted.end(), s);
}

std::size_t position_of(const std::vector<MacroSite>& sorted, const MacroSite& s) {
  return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), s) - sorted.begin());
}

// Shortest *-path inside `sorted` from a to b; ties follow offset order.
std::vector<MacroSite> star_path(const std::vector<MacroSite>& sorted, const MacroSite& a,
                                 const MacroSite& b, int d) {
  std::vector<long> parent(sorted.size(), -2);
  const std::size_t ia = position_of(sorted, a);
  parent[ia] = -1;
  std::deque<std::size_t> queue{ia};
  const std::vector<Coord> offsets = unit_offsets(d);
  while (!queue.empty()) {
    const std::size_t cur = queue.front();
    queue.pop_front();
    if (sorted[cur] == b) break;
    for (const Coord& off : offsets) {
      MacroSite nb = sorted[cur];
      bool zero = true;
      for (int k = 0; k < d; ++k) {
        nb[k] += off[k];
        if (off[k]) zero = false;
      }
      if (zero || !contains_sorted(sorted, nb)) continue;
      const std::size_t in = position_of(sorted, nb);
      if (parent[in] != -2) continue;
      parent[in] = static_cast<long>(cur);
      queue.push_back(in);
    }
  }
  const std::size_t ib = position_of(sorted, b);
  if (parent[ib] == -2) return {};
  std::vector<MacroSite> path;
  for (long cur = static_cast<long>(ib); cur != -1; cur = parent[static_cast<std::size_t>(cur)]) {
    path.push_back(sorted[static_cast<std::size_t>(cur)]);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

// *-components of a sorted site set.
std::vector<int> star_components(const std::vector<MacroSite>& sorted, int d, int& count) {
  std::vector<int> comp(sorted.size(), -1);
  const std::vector<Coord> offsets = unit_offsets(d);
  count = 0;
  for (std::size_t s = 0; s < sorted.size(); ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = count;
    std::deque<std::size_t> queue{s};
    while (!queue.empty()) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      for (const Coord& off : offsets) {
        MacroSite nb = sorted[cur];
        for (int k = 0; k < d; ++k) nb[k] += off[k];
        if (!contains_sorted(sorted, nb)) continue;
        const std::size_t in = position_of(sorted, nb);
        if (comp[in] >= 0) continue;
        comp[in] = count;
        queue.push_back(in);
      }
    }
    ++count;
  }
  return comp;
}

struct EdgeKeySet {
  std::set<Edge> edges;
  explicit EdgeKeySet(const VertexPath& p) {
    for (const Edge& e : p.edges()) edges.insert(e);
  }
  bool has(const Edge& e) const { return edges.count(e) != 0; }
};

// Maximal runs of consecutive edges of `path` absent from `base`.
std::vector<VertexPath> runs_outside(const VertexPath& base, const VertexPath& path) {
  const EdgeKeySet known(base);
  std::vector<VertexPath> runs;
  VertexPath cur{path.d, {}};
  for (std::size_t t = 0; t + 1 < path.vertices.size(); ++t) {
    const Edge e = edge_between(path.vertices[t], path.vertices[t + 1], path.d);
    if (known.has(e)) {
      if (!cur.vertices.empty()) runs.push_back(std::move(cur));
      cur = VertexPath{path.d, {}};
      continue;
    }
    if (cur.vertices.empty()) cur.vertices.push_back(path.vertices[t]);
    cur.vertices.push_back(path.vertices[t + 1]);
  }
  if (!cur.vertices.empty()) runs.push_back(std::move(cur));
  return runs;
}

}  // namespace

AnimalCover animal_cover(const VertexPath& gamma, int N) {
  if (gamma.vertices.empty()) throw DomainError("empty path");
  if (N < 1) throw DomainError("box scale must be positive");
  const int d = gamma.d;
  AnimalCover out;
  std::int64_t pivot = 0;
  MacroSite cur = box_of(gamma.vertices[0], N, d);
  out.path.push_back(cur);
  out.pivots.push_back(0);
  Region big = big_box_region(cur, N, d);
  for (std::size_t t = 1; t < gamma.vertices.size(); ++t) {
    if (big.contains(gamma.vertices[t].c)) continue;
    pivot = static_cast<std::int64_t>(t);
    cur = box_of(gamma.vertices[t], N, d);
    out.path.push_back(cur);
    out.pivots.push_back(pivot);
    big = big_box_region(cur, N, d);
  }
  for (const Vertex& v : gamma.vertices) out.visited.push_back(box_of(v, N, d));
  std::sort(out.visited.begin(), out.visited.end());
  out.visited.erase(std::unique(out.visited.begin(), out.visited.end()), out.visited.end());
  return out;
}

VertexPath link_through_good_boxes(const MacroField& macro, const std::vector<MacroSite>& sites,
                                   const Vertex& x, const Vertex& y, BfsWorkspace& ws) {
  const int d = macro.window().dim();
  const int N = macro.box_scale();
  std::vector<MacroSite> sorted = sites;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted.empty()) throw HypothesisError("link needs at least one box");
  for (const MacroSite& s : sorted) {
    if (!macro.classified(s) || !macro.is_good(s)) {
      throw HypothesisError("link box " + to_string(s, d) + " is not a classified good box");
    }
  }
  if (!is_star_connected(sorted, d)) throw HypothesisError("link boxes are not *-connected");

  const MacroSite bx = box_of(x, N, d);
  const MacroSite by = box_of(y, N, d);
  if (!contains_sorted(sorted, bx) || !macro.report(bx).witness_contains(x)) {
    throw HypothesisError("start " + to_string(x, d) + " is not in the crossing cluster of a link box");
  }
  if (!contains_sorted(sorted, by) || !macro.report(by).witness_contains(y)) {
    throw HypothesisError("end " + to_string(y, d) + " is not in the crossing cluster of a link box");
  }

  const std::vector<MacroSite> route = star_path(sorted, bx, by, d);
  std::vector<Vertex> points{x};
  for (std::size_t i = 1; i < route.size(); ++i) points.push_back(macro.report(route[i]).representative);
  points.push_back(y);

  const std::int64_t cap = distance_cap(N, macro.beta());
  VertexPath out{d, {x}};
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const Vertex& a = points[i];
    const Vertex& b = points[i + 1];
    if (a == b) continue;
    if (!ws.mask().region().contains(a.c) || !ws.mask().region().contains(b.c)) {
      throw GeometryError("link hop leaves the p-mask");
    }
    ws.run(a, cap, nullptr, &b);
    if (!ws.reached(b)) {
      throw ConsistencyError("hop " + to_string(a, d) + " -> " + to_string(b, d) +
                             " exceeds the good-box distance cap");
    }
    const VertexPath hop = ws.path_to(b);
    out.vertices.insert(out.vertices.end(), hop.vertices.begin() + 1, hop.vertices.end());
  }
  return out;
}

VertexPath loop_erase(const VertexPath& path) {
  VertexPath out{path.d, {}};
  std::map<Vertex, std::size_t> where;
  for (const Vertex& v : path.vertices) {
    auto it = where.find(v);
    if (it != where.end()) {
      for (std::size_t j = it->second + 1; j < out.vertices.size(); ++j) where.erase(out.vertices[j]);
      out.vertices.resize(it->second + 1);
      continue;
    }
    where.emplace(v, out.vertices.size());
    out.vertices.push_back(v);
  }
  return out;
}

BypassResult modify_path(const OpenMask& p_mask, const MacroField& macro,
                         const BadComponents& bad, const VertexPath& gamma) {
  const int d = macro.window().dim();
  const int N = macro.box_scale();
  if (gamma.vertices.empty()) throw DomainError("empty path");
  if (gamma.d != d) throw DomainError("path dimension differs from the macro field");
  if (!gamma.is_unit_step()) throw DomainError("path has a non-unit step");
  if (!p_mask.region().contains(macro_mask_region(macro.window(), macro.beta()))) {
    throw GeometryError("p-mask must cover the window grown by the distance cap");
  }
  const SiteGrid grid = macro.grid();
  const std::size_t n = gamma.vertices.size();

  std::vector<MacroSite> box_at(n);
  for (std::size_t t = 0; t < n; ++t) {
    box_at[t] = box_of(gamma.vertices[t], N, d);
    if (!macro.classified(box_at[t])) throw HypothesisError("path leaves the classified boxes");
  }
  if (!macro.in_spanning(box_at.front()) || !macro.in_spanning(box_at.back())) {
    throw HypothesisError("path endpoint box is off the spanning good component");
  }
  if (!macro.report(box_at.front()).witness_contains(gamma.front()) ||
      !macro.report(box_at.back()).witness_contains(gamma.back())) {
    throw HypothesisError("path endpoint is not in its box's crossing cluster");
  }

  BypassResult res;
  const double scale = 12.0 * macro.beta() * N;

  std::vector<std::size_t> closed;
  for (std::size_t t = 0; t + 1 < n; ++t) {
    if (!p_mask.open_between(gamma.vertices[t], gamma.vertices[t + 1])) closed.push_back(t);
  }
  res.n_closed = static_cast<std::int64_t>(closed.size());

  // Bad components met by the path, for the bound.
  {
    std::set<int> met;
    for (const MacroSite& s : box_at) {
      if (!grid.is_good(s)) met.insert(bad.component_at(grid, s));
    }
    for (int c : met) {
      res.bad_mass += static_cast<std::int64_t>(bad.components[static_cast<std::size_t>(c)].sites.size());
      res.boundary_mass +=
          static_cast<std::int64_t>(bad.components[static_cast<std::size_t>(c)].boundary.size());
    }
  }
  res.bound_value = scale * static_cast<double>(res.n_closed + res.boundary_mass);
  res.coarse_bound = scale * (1.0 + 2.0 * d) * static_cast<double>(res.n_closed + res.bad_mass);

  if (closed.empty()) {
    res.gamma_prime = gamma;
    res.satisfied = true;
    return res;
  }

  // Boxes holding an endpoint of a closed edge, in path order.
  std::vector<MacroSite> phi1;
  {
    std::set<MacroSite> seen;
    for (std::size_t t : closed) {
      for (const MacroSite& s : {box_at[t], box_at[t + 1]}) {
        if (seen.insert(s).second) phi1.push_back(s);
      }
    }
  }
  res.r1 = static_cast<int>(phi1.size());

  // Good boxes stand for themselves, bad ones are replaced by the exterior
  // boundary of their component.
  std::vector<MacroSite> extended;
  {
    std::set<int> used;
    for (const MacroSite& s : phi1) {
      if (grid.is_good(s)) {
        extended.push_back(s);
        continue;
      }
      const int c = bad.component_at(grid, s);
      if (!used.insert(c).second) continue;
      const BadComponent& comp = bad.components[static_cast<std::size_t>(c)];
      if (comp.touches_grid_edge) throw HypothesisError("bad component on the path touches the grid edge");
      extended.insert(extended.end(), comp.boundary.begin(), comp.boundary.end());
    }
  }
  std::sort(extended.begin(), extended.end());
  extended.erase(std::unique(extended.begin(), extended.end()), extended.end());
  for (const MacroSite& s : extended) {
    if (!grid.contains(s) || !grid.is_good(s)) throw ConsistencyError("extended set holds a bad box");
  }

  int ncomp = 0;
  const std::vector<int> comp_of_site = star_components(extended, d, ncomp);
  auto comp_at_time = [&](std::size_t t) -> int {
    if (!contains_sorted(extended, box_at[t])) return -1;
    return comp_of_site[position_of(extended, box_at[t])];
  };

  std::vector<long> first(static_cast<std::size_t>(ncomp), -1), last(static_cast<std::size_t>(ncomp), -1);
  std::vector<int> comp_time(n);
  for (std::size_t t = 0; t < n; ++t) {
    const int c = comp_time[t] = comp_at_time(t);
    if (c < 0) continue;
    if (first[static_cast<std::size_t>(c)] < 0) first[static_cast<std::size_t>(c)] = static_cast<long>(t);
    last[static_cast<std::size_t>(c)] = static_cast<long>(t);
  }
  std::vector<std::vector<MacroSite>> comp_sites(static_cast<std::size_t>(ncomp));
  for (std::size_t s = 0; s < extended.size(); ++s) {
    comp_sites[static_cast<std::size_t>(comp_of_site[s])].push_back(extended[s]);
  }
  std::vector<int> phi2;
  for (int c = 0; c < ncomp; ++c) {
    if (first[static_cast<std::size_t>(c)] >= 0) phi2.push_back(c);
  }
  std::sort(phi2.begin(), phi2.end(), [&](int a, int b) {
    return first[static_cast<std::size_t>(a)] < first[static_cast<std::size_t>(b)];
  });
  res.r2 = static_cast<int>(phi2.size());

  // Drop components enclosed by another one whose visits bracket theirs.
  std::vector<char> keep(static_cast<std::size_t>(ncomp), 0);
  for (int c : phi2) keep[static_cast<std::size_t>(c)] = 1;
  if (phi2.size() > 1) {
    for (int outer : phi2) {
      const std::vector<MacroSite> inside = enclosed_sites(comp_sites[static_cast<std::size_t>(outer)], grid.sites);
      if (inside.empty()) continue;
      for (int inner : phi2) {
        if (inner == outer || !keep[static_cast<std::size_t>(inner)]) continue;
        const auto& cs = comp_sites[static_cast<std::size_t>(inner)];
        const bool enclosed = std::all_of(cs.begin(), cs.end(), [&](const MacroSite& s) {
          return std::binary_search(inside.begin(), inside.end(), s);
        });
        if (enclosed && first[static_cast<std::size_t>(outer)] <= first[static_cast<std::size_t>(inner)] &&
            last[static_cast<std::size_t>(inner)] <= last[static_cast<std::size_t>(outer)]) {
          keep[static_cast<std::size_t>(inner)] = 0;
        }
      }
    }
  }

  auto chain = [&](const std::vector<char>& allowed) {
    std::vector<std::pair<long, long>> spans;
    std::vector<int> order;
    long t = -1;
    for (;;) {
      long next = -1;
      for (std::size_t s = static_cast<std::size_t>(t + 1); s < n; ++s) {
        const int c = comp_time[s];
        if (c >= 0 && allowed[static_cast<std::size_t>(c)]) {
          next = static_cast<long>(s);
          break;
        }
      }
      if (next < 0) break;
      const int c = comp_time[static_cast<std::size_t>(next)];
      spans.emplace_back(next, last[static_cast<std::size_t>(c)]);
      order.push_back(c);
      t = last[static_cast<std::size_t>(c)];
    }
    return std::make_pair(spans, order);
  };
  auto covered = [&](const std::vector<std::pair<long, long>>& spans) {
    for (std::size_t t : closed) {
      const bool ok = std::any_of(spans.begin(), spans.end(), [&](const auto& sp) {
        return sp.first <= static_cast<long>(t) && static_cast<long>(t) + 1 <= sp.second;
      });
      if (!ok) return false;
    }
    return true;
  };

  res.r3 = static_cast<int>(std::count(keep.begin(), keep.end(), 1));
  auto [spans, order] = chain(keep);
  if (!covered(spans)) {
    std::vector<char> all(static_cast<std::size_t>(ncomp), 0);
    for (int c : phi2) all[static_cast<std::size_t>(c)] = 1;
    std::tie(spans, order) = chain(all);
    if (!covered(spans)) throw ConsistencyError("a closed edge is not covered by any detour");
  }
  res.r4 = static_cast<int>(spans.size());
  for (std::size_t k = 0; k < spans.size(); ++k) {
    res.psi_in.push_back(spans[k].first);
    res.psi_out.push_back(spans[k].second);
    if (spans[k].first > spans[k].second || (k > 0 && spans[k].first <= spans[k - 1].second)) {
      throw ConsistencyError("entry and exit times do not interleave");
    }
  }

  BfsWorkspace ws(p_mask);
  VertexPath joined{d, {}};
  long resume = 0;
  for (std::size_t k = 0; k < spans.size(); ++k) {
    for (long t = resume; t <= spans[k].first; ++t) {
      if (t > 0 && !p_mask.open_between(gamma.vertices[static_cast<std::size_t>(t - 1)],
                                             gamma.vertices[static_cast<std::size_t>(t)])) {
        throw ConsistencyError("closed edge left between detours");
      }
      joined.vertices.push_back(gamma.vertices[static_cast<std::size_t>(t)]);
    }
    const Vertex& xin = gamma.vertices[static_cast<std::size_t>(spans[k].first)];
    const Vertex& xout = gamma.vertices[static_cast<std::size_t>(spans[k].second)];
    VertexPath link;
    try {
      link = link_through_good_boxes(macro, comp_sites[static_cast<std::size_t>(order[k])], xin, xout, ws);
    } catch (const HypothesisError& e) {
      throw ConsistencyError(std::string("detour ") + std::to_string(k) + ": " + e.what());
    }
    joined.vertices.insert(joined.vertices.end(), link.vertices.begin() + 1, link.vertices.end());
    res.link_segments.push_back(std::move(link));
    resume = spans[k].second + 1;
  }
  for (long t = resume; t < static_cast<long>(n); ++t) {
    if (t > 0 && !p_mask.open_between(gamma.vertices[static_cast<std::size_t>(t - 1)],
                                      gamma.vertices[static_cast<std::size_t>(t)])) {
      throw ConsistencyError("closed edge left after the last detour");
    }
    joined.vertices.push_back(gamma.vertices[static_cast<std::size_t>(t)]);
  }

  res.gamma_prime = loop_erase(joined);
  const VertexPath& gp = res.gamma_prime;
  if (gp.front() != gamma.front() || gp.back() != gamma.back()) {
    throw ConsistencyError("modified path has the wrong endpoints");
  }
  if (!gp.is_unit_step() || !gp.is_self_avoiding()) throw ConsistencyError("modified path is not simple");
  if (!is_open_path(p_mask, gp)) throw ConsistencyError("modified path uses a p-closed edge");

  res.detours = runs_outside(gamma, gp);
  for (const VertexPath& r : res.detours) res.extra_length += r.length();
  if (!detours_well_formed(gamma, gp)) throw ConsistencyError("detours overlap");
  res.satisfied = static_cast<double>(res.extra_length) <= res.bound_value;
  return res;
}

bool detours_well_formed(const VertexPath& gamma, const VertexPath& gamma_prime) {
  if (!gamma_prime.is_unit_step()) return false;
  const std::vector<VertexPath> runs = runs_outside(gamma, gamma_prime);
  std::map<Vertex, int> owner;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    if (!runs[r].is_self_avoiding()) return false;
    for (std::size_t j = 1; j + 1 < runs[r].vertices.size(); ++j) {
      if (!owner.emplace(runs[r].vertices[j], static_cast<int>(r)).second) return false;
    }
  }
  // Interior vertices appear once in gamma' overall.
  std::map<Vertex, int> count;
  for (const Vertex& v : gamma_prime.vertices) ++count[v];
  for (const auto& [v, r] : owner) {
    (void)r;
    if (count[v] != 1) return false;
  }
  for (std::size_t r = 0; r < runs.size(); ++r) {
    for (const Vertex& end : {runs[r].front(), runs[r].back()}) {
      if (owner.count(end)) return false;
    }
  }
  return true;
}

BypassExperimentResult run_bypass_experiment(const BypassExperimentConfig& cfg) {
  if (cfg.d < 2) throw DomainError("bypass experiment needs d >= 2");
  if (cfg.endpoint_offset < 1 || cfg.endpoint_offset > cfg.macro_radius - 1) {
    throw DomainError("endpoint offset must leave the endpoint boxes interior");
  }
  if (!(cfg.p <= cfg.q)) throw ParameterError("bypass experiment needs p <= q");
  const LatticeWindow window = LatticeWindow::from_macro_radius(cfg.d, cfg.N, cfg.macro_radius);
  const Region mask_region = macro_mask_region(window, cfg.beta);
  const int span = 2 * cfg.endpoint_offset + 1;

  struct Outcome {
    bool admissible = false;
    std::string censor;
    BypassAuditRow row;
  };

  BypassExperimentResult out;
  const std::int64_t batch = std::max<std::int64_t>(32, 4 * cfg.workers);
  std::int64_t next = 0;
  while (static_cast<std::int64_t>(out.rows.size()) < cfg.target && next < cfg.max_attempts) {
    const std::int64_t count = std::min(batch, cfg.max_attempts - next);
    std::vector<Outcome> results(static_cast<std::size_t>(count));
    parallel_for(count, cfg.workers, [&](std::int64_t j) {
      Outcome& o = results[static_cast<std::size_t>(j)];
      const std::int64_t attempt = next + j;
      const std::uint64_t seed = derive_seed(cfg.seed, 4000 + static_cast<std::uint64_t>(cfg.N),
                                             static_cast<std::uint64_t>(attempt));
      o.row.attempt = attempt;
      o.row.seed = seed;
      const EdgeField field = EdgeField::monotone(window, seed);
      const OpenMask pmask = field.materialize(mask_region, cfg.p);
      const OpenMask qmask = field.materialize(window.region(), cfg.q);
      const MacroField macro = build_macro_field(pmask, window, cfg.beta);
      const BadComponents bad = bad_components(macro.grid());

      const ClusterLabeling labels = label_clusters(pmask, window.region());
      if (labels.count() == 0 || !labels.touches_all_faces(0)) {
        o.censor = "no spanning p-cluster";
        return;
      }
      const std::uint64_t pick = mix64(seed ^ 0x7f4a7c159e3779b9ULL);
      MacroSite a, b;
      a[0] = -cfg.endpoint_offset;
      b[0] = cfg.endpoint_offset;
      for (int k = 1; k < cfg.d; ++k) {
        a[k] = static_cast<int>((pick >> (8 * k)) % static_cast<std::uint64_t>(span)) - cfg.endpoint_offset;
        b[k] = static_cast<int>((pick >> (8 * k + 32)) % static_cast<std::uint64_t>(span)) - cfg.endpoint_offset;
      }
      const Vertex y = regularize(box_center(a, cfg.N, cfg.d), labels, 0);
      const Vertex z = regularize(box_center(b, cfg.N, cfg.d), labels, 0);
      VertexPath gamma;
      try {
        gamma = geodesic(qmask, y, z);
      } catch (const NoPathError&) {
        o.censor = "endpoints not q-connected";
        return;
      }
      o.row.gamma_len = gamma.length();
      try {
        const BypassResult res = modify_path(pmask, macro, bad, gamma);
        o.admissible = true;
        o.row.n_closed = res.n_closed;
        o.row.bad_mass = res.bad_mass;
        o.row.boundary_mass = res.boundary_mass;
        o.row.extra_length = res.extra_length;
        o.row.bound_value = res.bound_value;
        o.row.satisfied = res.satisfied;
        const VertexPath& gp = res.gamma_prime;
        o.row.open_recheck = gp.front() == y && gp.back() == z && gp.is_unit_step() &&
                             is_open_path(field, gp, cfg.p);
        o.row.segments_ok = gp.is_self_avoiding() && detours_well_formed(gamma, gp);
      } catch (const HypothesisError& e) {
        o.censor = e.what();
      } catch (const ConsistencyError& e) {
        o.admissible = true;
        o.row.failure = e.what();
      }
    });
    for (Outcome& o : results) {
      ++out.attempts;
      if (!o.admissible) {
        ++out.censored[o.censor];
        continue;
      }
      if (!o.row.ok()) ++out.violations;
      out.rows.push_back(std::move(o.row));
      if (static_cast<std::int64_t>(out.rows.size()) == cfg.target) break;
    }
    next += count;
  }
  return out;
}

}  // namespace percreg
