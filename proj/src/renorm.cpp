#include "percreg/renorm.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <memory>
#include <optional>

namespace percreg {

std::int64_t distance_cap(int N, double beta) {
  if (N < 1) throw DomainError("box scale N must be >= 1");
  if (!(beta > 0.0)) throw ParameterError("beta must be positive");
  return static_cast<std::int64_t>(std::floor(12.0 * beta * N + 1e-9));
}

namespace {

MacroSite offset_site(const MacroSite& i, const Coord& off, int d) {
  MacroSite j = i;
  for (int k = 0; k < d; ++k) j[k] += off[k];
  return j;
}

bool crosses_all_subboxes(const ClusterLabeling& lab, int label, const OpenMask& mask,
                          const MacroSite& i, int N) {
  const int d = mask.dim();
  for (const Coord& off : unit_offsets(d)) {
    if (!is_crossing(lab, label, mask, box_region(offset_site(i, off, d), N, d))) return false;
  }
  return true;
}

// Exact check of D(x, y) <= cap for all x, y in the witness. Restricted
// distances inside B'_N bound the true ones from above, so only sources that
// might exceed the cap are re-examined in the unrestricted graph.
bool witness_distances_ok(const ClusterLabeling& lab, int label, const OpenMask& local,
                          const Region& bb, std::int64_t cap,
                          const std::function<BfsWorkspace&()>& extended) {
  const Region& lr = local.region();
  std::vector<std::int64_t> members;  // local mask indices
  for (std::int64_t idx = 0; idx < bb.volume(); ++idx) {
    if (lab.label_at(idx) == label) members.push_back(lr.index(bb.point(idx)));
  }
  Coord mid{};
  for (int k = 0; k < bb.dim(); ++k) mid[k] = (bb.lo()[k] + bb.hi()[k]) / 2;
  const Vertex c = regularize(Vertex{mid}, lab, label);

  BfsWorkspace ws(local);
  ws.run(c, kNoCap, &bb);
  std::int64_t ecc = 0;
  for (std::int64_t m : members) ecc = std::max(ecc, ws.dist_at(m));
  if (2 * ecc <= cap) return true;

  std::vector<std::int64_t> rc(members.size());
  for (std::size_t a = 0; a < members.size(); ++a) rc[a] = ws.dist_at(members[a]);
  BfsWorkspace& ext = extended();
  const Region& er = ext.mask().region();
  for (std::size_t a = 0; a < members.size(); ++a) {
    if (rc[a] + ecc <= cap) continue;
    const Vertex x{lr.point(members[a])};
    ext.run(x, cap);
    for (std::int64_t m : members) {
      if (ext.dist_at(er.index(lr.point(m))) < 0) return false;
    }
  }
  return true;
}

GoodBoxReport classify_impl(const OpenMask& local, const MacroSite& i, int N, double beta,
                            const std::function<BfsWorkspace&()>& extended) {
  const int d = local.dim();
  GoodBoxReport rep;
  rep.site = i;
  rep.big_box = big_box_region(i, N, d);
  rep.box = box_region(i, N, d);
  const Region& bb = rep.big_box;
  const ClusterLabeling lab = label_clusters(local, bb);

  std::vector<int> big;
  for (int l = 0; l < lab.count(); ++l) {
    if (lab.diameter(l) > N) big.push_back(l);
  }
  rep.big_clusters = static_cast<int>(big.size());
  rep.unique_big_cluster = big.size() == 1;
  for (int l : big) {
    if (lab.diameter(l) >= 2 * N && crosses_all_subboxes(lab, l, local, i, N)) {
      rep.all_subboxes_crossed = true;
      break;
    }
  }

  int witness = -1;
  if (rep.unique_big_cluster) {
    witness = big.front();
  } else if (!big.empty() && big.front() == 0) {
    witness = 0;
  }
  if (witness >= 0) {
    rep.in_witness.assign(static_cast<std::size_t>(bb.volume()), 0);
    for (std::int64_t idx = 0; idx < bb.volume(); ++idx) {
      rep.in_witness[static_cast<std::size_t>(idx)] = lab.label_at(idx) == witness;
    }
    rep.distance_bound_ok =
        witness_distances_ok(lab, witness, local, bb, distance_cap(N, beta), extended);
  }
  rep.good = rep.unique_big_cluster && rep.all_subboxes_crossed && rep.distance_bound_ok;
  if (rep.good) {
    rep.crossing = crossing_members(lab, witness, local, rep.box);
    if (rep.crossing.empty()) {
      throw ConsistencyError("good box " + to_string(i, d) + " has no crossing component");
    }
    const auto first = std::find(rep.crossing.begin(), rep.crossing.end(), 1);
    rep.representative = Vertex{rep.box.point(first - rep.crossing.begin())};
  }
  return rep;
}

}  // namespace

GoodBoxReport classify_box(const OpenMask& mask, const MacroSite& i, int N, double beta) {
  const Region need = big_box_region(i, N, mask.dim()).grow(static_cast<int>(distance_cap(N, beta)));
  if (!mask.region().contains(need)) {
    throw GeometryError("mask does not cover the distance neighbourhood of site " +
                        to_string(i, mask.dim()));
  }
  std::unique_ptr<BfsWorkspace> ext;
  return classify_impl(mask, i, N, beta, [&]() -> BfsWorkspace& {
    if (!ext) ext = std::make_unique<BfsWorkspace>(mask);
    return *ext;
  });
}

GoodBoxReport classify_box(const EdgeField& field, double p, const MacroSite& i, double beta) {
  const LatticeWindow& w = field.window();
  const int N = w.box_scale();
  const Region bb = big_box_region(i, N, w.dim());
  if (!w.region().contains(bb)) {
    throw GeometryError("enlarged box of site " + to_string(i, w.dim()) + " escapes the window");
  }
  const OpenMask local = field.materialize(bb, p);
  std::optional<OpenMask> ext_mask;
  std::unique_ptr<BfsWorkspace> ext;
  return classify_impl(local, i, N, beta, [&]() -> BfsWorkspace& {
    if (!ext) {
      ext_mask = field.materialize(bb.grow(static_cast<int>(distance_cap(N, beta))), p);
      ext = std::make_unique<BfsWorkspace>(*ext_mask);
    }
    return *ext;
  });
}

const GoodBoxReport& MacroField::report(const MacroSite& i) const {
  if (!classified(i)) {
    throw GeometryError("site " + to_string(i, window_.dim()) + " is not classified");
  }
  return reports_[static_cast<std::size_t>(sites_.index(i.c))];
}

SiteGrid MacroField::grid() const {
  SiteGrid g{sites_, std::vector<char>(reports_.size(), 0)};
  for (std::size_t k = 0; k < reports_.size(); ++k) g.good[k] = reports_[k].good;
  return g;
}

double MacroField::good_fraction() const {
  if (reports_.empty()) return 0.0;
  std::int64_t n = 0;
  for (const auto& r : reports_) n += r.good;
  return static_cast<double>(n) / static_cast<double>(reports_.size());
}

int MacroField::good_component_of(const MacroSite& i) const {
  if (!classified(i)) return -1;
  return good_component_[static_cast<std::size_t>(sites_.index(i.c))];
}

Region macro_mask_region(const LatticeWindow& window, double beta) {
  return window.region().grow(static_cast<int>(distance_cap(window.box_scale(), beta)));
}

MacroField build_macro_field(const OpenMask& mask, const LatticeWindow& window, double beta) {
  if (!mask.region().contains(macro_mask_region(window, beta))) {
    throw GeometryError("mask does not cover the window grown by the distance cap");
  }
  const int d = window.dim();
  const int N = window.box_scale();
  MacroField mf;
  mf.window_ = window;
  mf.p_ = mask.p();
  mf.beta_ = beta;
  mf.sites_ = window.interior_macro_region();
  const Region& s = mf.sites_;
  std::unique_ptr<BfsWorkspace> ext;
  auto extended = [&]() -> BfsWorkspace& {
    if (!ext) ext = std::make_unique<BfsWorkspace>(mask);
    return *ext;
  };
  mf.reports_.reserve(static_cast<std::size_t>(s.volume()));
  for (std::int64_t idx = 0; idx < s.volume(); ++idx) {
    mf.reports_.push_back(classify_impl(mask, MacroSite{s.point(idx)}, N, beta, extended));
  }

  // Good components under L1 adjacency, discovered in lexicographic order.
  mf.good_component_.assign(static_cast<std::size_t>(s.volume()), -1);
  int ncomp = 0;
  int best = -1;
  std::int64_t best_size = 0;
  for (std::int64_t start = 0; start < s.volume(); ++start) {
    if (!mf.reports_[static_cast<std::size_t>(start)].good ||
        mf.good_component_[static_cast<std::size_t>(start)] >= 0) {
      continue;
    }
    const int id = ncomp++;
    std::deque<std::int64_t> queue{start};
    mf.good_component_[static_cast<std::size_t>(start)] = id;
    std::int64_t size = 0;
    unsigned faces = 0;
    while (!queue.empty()) {
      const std::int64_t idx = queue.front();
      queue.pop_front();
      ++size;
      const Coord x = s.point(idx);
      for (int k = 0; k < d; ++k) {
        if (x[k] == s.lo()[k]) faces |= 1u << (2 * k);
        if (x[k] == s.hi()[k]) faces |= 1u << (2 * k + 1);
        for (int sg : {-1, 1}) {
          if ((sg < 0 && x[k] == s.lo()[k]) || (sg > 0 && x[k] == s.hi()[k])) continue;
          const std::int64_t nb = idx + sg * s.stride(k);
          if (!mf.reports_[static_cast<std::size_t>(nb)].good ||
              mf.good_component_[static_cast<std::size_t>(nb)] >= 0) {
            continue;
          }
          mf.good_component_[static_cast<std::size_t>(nb)] = id;
          queue.push_back(nb);
        }
      }
    }
    if (faces == (1u << (2 * d)) - 1 && size > best_size) {
      best = id;
      best_size = size;
    }
  }
  mf.spanning_ = best;
  return mf;
}

MacroField build_macro_field(const EdgeField& field, double p, double beta) {
  const LatticeWindow& w = field.window();
  return build_macro_field(field.materialize(macro_mask_region(w, beta), p), w, beta);
}

RateTable estimate_bad_probability(double p, const std::vector<int>& N_list, double beta,
                                   std::int64_t samples, const SamplingOptions& opt) {
  if (samples <= 0) throw DomainError("bad-box rate needs at least one sample");
  RateTable table;
  std::vector<double> xs, ys;
  for (int N : N_list) {
    const LatticeWindow w = LatticeWindow::make(opt.d, 3 * N + 1, N);
    std::vector<char> bad(static_cast<std::size_t>(samples), 0);
    parallel_for(samples, opt.workers, [&](std::int64_t s) {
      const EdgeField f = EdgeField::monotone(w, derive_seed(opt.seed, 1000 + static_cast<std::uint64_t>(N),
                                                             static_cast<std::uint64_t>(s)));
      bad[static_cast<std::size_t>(s)] = !classify_box(f, p, MacroSite{}, beta).good;
    });
    RateRow row;
    row.d = opt.d;
    row.p = p;
    row.N = N;
    row.beta = beta;
    row.samples = samples;
    for (char b : bad) row.bad_count += b;
    row.rate = static_cast<double>(row.bad_count) / static_cast<double>(samples);
    row.ci = wilson_interval(row.bad_count, samples);
    if (row.bad_count > 0) {
      xs.push_back(N);
      ys.push_back(std::log(row.rate));
    }
    table.rows.push_back(row);
  }
  table.log_slope = fit_slope(xs, ys);
  return table;
}

double measure_T_mN(double p, int m, int N, std::int64_t samples, const SamplingOptions& opt) {
  if (samples <= 0) throw DomainError("T_mN estimate needs at least one sample");
  if (m > N) throw DomainError("T_mN requires m <= N");
  const LatticeWindow w = LatticeWindow::make(opt.d, N, N);
  std::vector<char> hit(static_cast<std::size_t>(samples), 0);
  parallel_for(samples, opt.workers, [&](std::int64_t s) {
    const EdgeField f = EdgeField::monotone(w, derive_seed(opt.seed, 2000 + static_cast<std::uint64_t>(N),
                                                           static_cast<std::uint64_t>(s)));
    const OpenMask mask = f.materialize(p);
    const ClusterLabeling lab = label_clusters(mask);
    bool crossing = false;
    int wide = 0;
    for (int l = 0; l < lab.count(); ++l) {
      const int diam = lab.diameter(l);
      if (diam >= m) ++wide;
      if (!crossing && diam >= 2 * N && is_crossing(lab, l, mask, mask.region())) crossing = true;
    }
    hit[static_cast<std::size_t>(s)] = crossing && wide >= 2;
  });
  std::int64_t k = 0;
  for (char h : hit) k += h;
  return static_cast<double>(k) / static_cast<double>(samples);
}

BetaCalibration calibrate_beta(double p, int N, std::int64_t samples, double target,
                               const SamplingOptions& opt) {
  if (samples <= 0) throw DomainError("beta calibration needs at least one sample");
  const int L = std::max(6 * N, N + 16);
  const LatticeWindow w = LatticeWindow::make(opt.d, L, L);
  std::vector<std::int64_t> dist(static_cast<std::size_t>(samples), -1);
  Vertex x;
  x[0] = N;
  parallel_for(samples, opt.workers, [&](std::int64_t s) {
    const EdgeField f = EdgeField::monotone(w, derive_seed(opt.seed, 3000 + static_cast<std::uint64_t>(N),
                                                           static_cast<std::uint64_t>(s)));
    const Distance dd = chemical_distance(f.materialize(p), Vertex{}, x);
    if (dd.finite()) dist[static_cast<std::size_t>(s)] = dd.value;
  });
  std::vector<std::int64_t> finite;
  for (auto v : dist) {
    if (v >= 0) finite.push_back(v);
  }
  std::sort(finite.begin(), finite.end(), std::greater<>());
  // Exceedances allowed while staying strictly below the target rate.
  const auto allowed = static_cast<std::int64_t>(std::ceil(target * static_cast<double>(samples))) - 1;
  std::int64_t k = 1;
  if (allowed < static_cast<std::int64_t>(finite.size())) {
    k = std::max<std::int64_t>(1, finite[static_cast<std::size_t>(std::max<std::int64_t>(0, allowed))] + 1);
  }
  BetaCalibration cal;
  cal.beta = static_cast<double>(k) / N;
  cal.samples = samples;
  cal.finite = static_cast<std::int64_t>(finite.size());
  std::int64_t exceed = 0;
  for (auto v : finite) exceed += v >= k;
  cal.tail_rate = static_cast<double>(exceed) / static_cast<double>(samples);
  return cal;
}

}  // namespace percreg
