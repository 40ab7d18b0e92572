#include "percreg/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "percreg/cluster.hpp"
#include "percreg/distance.hpp"
#include "percreg/errors.hpp"
#include "percreg/field.hpp"

namespace percreg {

namespace {

int floor_div2(int v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); }

struct Endpoints {
  bool ok = false;
  Vertex a, b;
};

// Endpoints moved onto the largest cluster of the window, if it touches
// every face.
Endpoints regularized(const OpenMask& mask, const SegmentGeometry& g) {
  const ClusterLabeling labels = label_clusters(mask, g.window.region());
  Endpoints e;
  if (labels.count() == 0 || !labels.touches_all_faces(0)) return e;
  e.a = regularize(g.a, labels, 0);
  e.b = regularize(g.b, labels, 0);
  e.ok = true;
  return e;
}

double l2_norm(const Vertex& x, int d) {
  double s = 0;
  for (int k = 0; k < d; ++k) s += static_cast<double>(x[k]) * x[k];
  return std::sqrt(s);
}

double gap_reference(double p, double q) {
  const double g = q - p;
  return g > 0 ? g * std::fabs(std::log(g)) : 0.0;
}

using Point2 = std::array<double, 2>;

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

double segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  const double vx = b[0] - a[0], vy = b[1] - a[1];
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0 ? ((p[0] - a[0]) * vx + (p[1] - a[1]) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = p[0] - (a[0] + t * vx), dy = p[1] - (a[1] + t * vy);
  return std::sqrt(dx * dx + dy * dy);
}

// Distance from p to the filled convex polygon `hull` (counter-clockwise).
double distance_to_hull(const Point2& p, const std::vector<Point2>& hull) {
  if (hull.empty()) return std::numeric_limits<double>::infinity();
  if (hull.size() == 1) return segment_distance(p, hull[0], hull[0]);
  bool inside = hull.size() >= 3;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point2& a = hull[i];
    const Point2& b = hull[(i + 1) % hull.size()];
    if (cross(a, b, p) < 0) inside = false;
    best = std::min(best, segment_distance(p, a, b));
  }
  return inside ? 0.0 : best;
}

}  // namespace

SegmentGeometry segment_geometry(int d, const Vertex& x, int n) {
  if (n < 1) throw DomainError("scale n must be positive");
  if (norm1(x, d) == 0) throw DomainError("direction must be nonzero");
  const long span = n * norm_inf(x, d);
  const int L = static_cast<int>((span + 1) / 2 + std::max<long>(8, (span + 1) / 2));
  SegmentGeometry g;
  g.window = LatticeWindow::make(d, L, L);
  for (int k = 0; k < d; ++k) {
    g.a[k] = -floor_div2(n * x[k]);
    g.b[k] = g.a[k] + n * x[k];
  }
  return g;
}

std::vector<EstimateRecord> estimate_mu(double p, const Vertex& x, const std::vector<int>& n_list,
                                        std::int64_t samples, const SamplingOptions& opt) {
  if (samples <= 0) throw DomainError("need at least one sample");
  std::vector<EstimateRecord> out;
  for (int n : n_list) {
    const SegmentGeometry g = segment_geometry(opt.d, x, n);
    std::vector<std::int64_t> dist(static_cast<std::size_t>(samples), -1);
    std::vector<char> below(static_cast<std::size_t>(samples), 0);
    parallel_for(samples, opt.workers, [&](std::int64_t s) {
      const EdgeField f = EdgeField::monotone(
          g.window, derive_seed(opt.seed, 6000 + static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(s)));
      const OpenMask mask = f.materialize(p);
      const Endpoints e = regularized(mask, g);
      if (!e.ok) return;
      const Distance dd = chemical_distance(mask, e.a, e.b);
      if (!dd.finite()) throw ConsistencyError("regularized endpoints are disconnected");
      dist[static_cast<std::size_t>(s)] = dd.value;
      below[static_cast<std::size_t>(s)] = dd.value < dist1(e.a, e.b, opt.d);
    });
    EstimateRecord rec;
    rec.d = opt.d;
    rec.p = p;
    rec.x = x;
    rec.n = n;
    rec.samples = samples;
    Accumulator acc;
    for (std::int64_t s = 0; s < samples; ++s) {
      const std::int64_t v = dist[static_cast<std::size_t>(s)];
      if (v < 0) {
        ++rec.censored;
        continue;
      }
      acc.add(static_cast<double>(v) / n);
      rec.below_l1 += below[static_cast<std::size_t>(s)];
    }
    if (acc.n == 0) {
      throw EstimationError("all " + std::to_string(samples) + " samples censored at n=" + std::to_string(n));
    }
    rec.mean = acc.mean();
    rec.stderr_ = acc.stderr_of_mean();
    out.push_back(rec);
  }
  return out;
}

bool ModulusTable::ratio_bounded() const {
  int smallest = -1;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double gap = rows[i].q - rows[i].p;
    if (gap <= 0) continue;
    if (smallest < 0 || gap < rows[static_cast<std::size_t>(smallest)].q - rows[static_cast<std::size_t>(smallest)].p) {
      smallest = static_cast<int>(i);
    }
  }
  if (smallest < 0) return true;
  double others = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<int>(i) == smallest || rows[i].q - rows[i].p <= 0) continue;
    others = std::max(others, rows[i].ratio);
    any = true;
  }
  return !any || rows[static_cast<std::size_t>(smallest)].ratio <= 2.0 * others;
}

ModulusTable modulus_experiment(const std::vector<double>& p_grid, double q,
                                const std::vector<Vertex>& directions, int n, std::int64_t samples,
                                const SamplingOptions& opt) {
  if (p_grid.empty() || directions.empty()) throw DomainError("empty parameter grid or direction set");
  if (samples <= 0) throw DomainError("need at least one sample");
  for (double p : p_grid) {
    if (!(p <= q)) throw ParameterError("every p must satisfy p <= q");
  }
  ModulusTable t;
  t.d = opt.d;
  t.q = q;
  t.n = n;
  t.samples = samples;
  t.directions = directions;
  t.p_grid = p_grid;
  std::vector<double> params = p_grid;
  params.push_back(q);
  const std::size_t P = params.size();
  const std::size_t lowest =
      static_cast<std::size_t>(std::min_element(params.begin(), params.end()) - params.begin());

  t.mu.assign(P, std::vector<double>(directions.size(), 0.0));
  t.mu_stderr.assign(P, std::vector<double>(directions.size(), 0.0));
  for (std::size_t k = 0; k < directions.size(); ++k) {
    const SegmentGeometry g = segment_geometry(opt.d, directions[k], n);
    std::vector<std::vector<std::int64_t>> dist(static_cast<std::size_t>(samples));
    parallel_for(samples, opt.workers, [&](std::int64_t s) {
      const EdgeField f = EdgeField::monotone(
          g.window, derive_seed(opt.seed, 7000 + k, static_cast<std::uint64_t>(s)));
      const OpenMask base = f.materialize(params[lowest]);
      const Endpoints e = regularized(base, g);
      if (!e.ok) return;
      std::vector<std::int64_t> row(P, -1);
      for (std::size_t i = 0; i < P; ++i) {
        const Distance dd = i == lowest ? chemical_distance(base, e.a, e.b)
                                        : chemical_distance(f.materialize(params[i]), e.a, e.b);
        if (!dd.finite()) throw ConsistencyError("endpoints disconnected above the base parameter");
        row[i] = dd.value;
      }
      dist[static_cast<std::size_t>(s)] = std::move(row);
    });
    std::vector<Accumulator> acc(P);
    for (const auto& row : dist) {
      if (row.empty()) {
        ++t.censored;
        continue;
      }
      for (std::size_t i = 0; i < P; ++i) acc[i].add(static_cast<double>(row[i]) / n);
      for (std::size_t i = 0; i < P; ++i) {
        for (std::size_t j = 0; j < P; ++j) {
          if (!(params[i] < params[j])) continue;
          ++t.pathwise_pairs;
          if (row[j] > row[i]) ++t.pathwise_violations;
        }
      }
    }
    if (acc[0].n == 0) throw EstimationError("all samples censored for direction " + to_string(directions[k], opt.d));
    for (std::size_t i = 0; i < P; ++i) {
      t.mu[i][k] = acc[i].mean();
      t.mu_stderr[i][k] = acc[i].stderr_of_mean();
    }
  }

  for (std::size_t i = 0; i + 1 < P; ++i) {
    ModulusRow r;
    r.p = params[i];
    r.q = q;
    for (std::size_t k = 0; k < directions.size(); ++k) {
      r.sup_diff = std::max(r.sup_diff, std::fabs(t.mu[i][k] - t.mu[P - 1][k]) / l2_norm(directions[k], opt.d));
    }
    r.reference = gap_reference(r.p, q);
    r.ratio = r.reference > 0 ? r.sup_diff / r.reference : 0.0;
    t.kappa = std::max(t.kappa, r.ratio);
    t.rows.push_back(r);
  }
  return t;
}

std::vector<Point2> convex_hull(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point2> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double hull_hausdorff(const std::vector<Point2>& a, const std::vector<Point2>& b) {
  const std::vector<Point2> ha = convex_hull(a);
  const std::vector<Point2> hb = convex_hull(b);
  double out = 0.0;
  for (const Point2& p : ha) out = std::max(out, distance_to_hull(p, hb));
  for (const Point2& p : hb) out = std::max(out, distance_to_hull(p, ha));
  return out;
}

std::vector<Vertex> default_shape_directions() {
  std::vector<Vertex> out;
  for (const auto& base : {std::array<int, 2>{1, 0}, {2, 1}, {1, 1}, {1, 2}}) {
    for (int sx : {1, -1}) {
      for (int sy : {1, -1}) {
        const Vertex v = vertex({sx * base[0], sy * base[1]});
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
        const Vertex w = vertex({sy * base[1], sx * base[0]});
        if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
      }
    }
  }
  return out;
}

ShapeEstimate shape_hausdorff(double p, double q, const std::vector<Vertex>& directions, int n,
                              std::int64_t samples, const SamplingOptions& opt) {
  if (opt.d != 2) throw DomainError("shape estimates are planar");
  if (directions.size() < 8) throw DomainError("need at least 8 directions");
  const ModulusTable t = modulus_experiment({p}, q, directions, n, samples, opt);
  ShapeEstimate s;
  s.mu_min = std::numeric_limits<double>::infinity();
  double sup = 0.0;
  for (std::size_t k = 0; k < directions.size(); ++k) {
    const double len = l2_norm(directions[k], 2);
    const double mp = t.mu[0][k] / len, mq = t.mu[1][k] / len;
    if (!(mp > 0) || !(mq > 0)) throw EstimationError("non-positive time constant estimate");
    s.mu_min = std::min({s.mu_min, mp, mq});
    sup = std::max(sup, std::fabs(mp - mq));
    s.shape_p.push_back({directions[k][0] / t.mu[0][k], directions[k][1] / t.mu[0][k]});
    s.shape_q.push_back({directions[k][0] / t.mu[1][k], directions[k][1] / t.mu[1][k]});
  }
  s.hausdorff = hull_hausdorff(s.shape_p, s.shape_q);
  const double ref = gap_reference(p, q);
  s.kappa = ref > 0 ? sup / ref : 0.0;
  s.bound = s.kappa / (s.mu_min * s.mu_min) * ref;
  s.within_bound = s.hausdorff <= s.bound + 1e-12;
  return s;
}

std::vector<TailRow> stretch_tail(double p, const std::vector<int>& l1_list, double beta,
                                  std::int64_t samples, const SamplingOptions& opt) {
  if (samples <= 0) throw DomainError("need at least one sample");
  std::vector<TailRow> out;
  for (int l1 : l1_list) {
    Vertex e1;
    e1[0] = 1;
    const SegmentGeometry g = segment_geometry(opt.d, e1, l1);
    std::vector<char> hit(static_cast<std::size_t>(samples), 0);
    parallel_for(samples, opt.workers, [&](std::int64_t s) {
      const EdgeField f = EdgeField::monotone(
          g.window, derive_seed(opt.seed, 8000 + static_cast<std::uint64_t>(l1), static_cast<std::uint64_t>(s)));
      const Distance dd = chemical_distance(f.materialize(p), g.a, g.b);
      hit[static_cast<std::size_t>(s)] = dd.finite() && beta * l1 <= static_cast<double>(dd.value);
    });
    TailRow r;
    r.p = p;
    r.beta = beta;
    r.l1 = l1;
    r.samples = samples;
    for (char h : hit) r.hits += h;
    r.freq = static_cast<double>(r.hits) / static_cast<double>(samples);
    const Interval ci = wilson_interval(r.hits, samples);
    r.ci = (ci.high - ci.low) / 2.0;
    out.push_back(r);
  }
  return out;
}

bool ClosedFractionReport::mean_ok() const { return std::fabs(mean - target) <= 3.0 * stderr_; }
bool ClosedFractionReport::exceed_ok() const { return exceed_freq <= chernoff + 3.0 * exceed_stderr; }

ClosedFractionReport geodesic_closed_fraction(double p, double q, int l1, double delta,
                                              std::int64_t samples, const SamplingOptions& opt) {
  if (samples <= 0) throw DomainError("need at least one sample");
  if (!(delta > 0)) throw DomainError("delta must be positive");
  if (!(p <= q)) throw ParameterError("need p <= q");
  Vertex e1;
  e1[0] = 1;
  const SegmentGeometry g = segment_geometry(opt.d, e1, l1);
  struct Sample {
    std::int64_t len = -1;
    std::int64_t closed = 0;
  };
  std::vector<Sample> res(static_cast<std::size_t>(samples));
  parallel_for(samples, opt.workers, [&](std::int64_t s) {
    const EdgeField f = EdgeField::two_source(
        g.window, derive_seed(opt.seed, 9000 + static_cast<std::uint64_t>(l1), static_cast<std::uint64_t>(s)), q);
    f.check_parameter(p);
    const OpenMask qmask = f.materialize(q);
    const Endpoints e = regularized(qmask, g);
    if (!e.ok || e.a == e.b) return;
    const VertexPath gamma = geodesic(qmask, e.a, e.b);
    Sample& out = res[static_cast<std::size_t>(s)];
    out.len = gamma.length();
    out.closed = static_cast<std::int64_t>(closed_edges_on_path(f, gamma, p).size());
  });

  ClosedFractionReport r;
  r.p = p;
  r.q = q;
  r.l1 = l1;
  r.delta = delta;
  r.samples = samples;
  r.target = (q - p) / q;
  r.chernoff = std::exp(-2.0 * delta * delta * l1);
  Accumulator acc;
  for (const Sample& s : res) {
    if (s.len <= 0) continue;
    ++r.retained;
    acc.add(static_cast<double>(s.closed) / static_cast<double>(s.len));
    if (static_cast<double>(s.closed) >= static_cast<double>(s.len) * (r.target + delta)) ++r.exceed;
  }
  if (r.retained == 0) throw EstimationError("all samples censored");
  r.mean = acc.mean();
  r.stderr_ = acc.stderr_of_mean();
  r.exceed_freq = static_cast<double>(r.exceed) / static_cast<double>(r.retained);
  r.exceed_stderr = std::sqrt(r.exceed_freq * (1.0 - r.exceed_freq) / static_cast<double>(r.retained));
  return r;
}

}  // namespace percreg
