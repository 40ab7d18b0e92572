#include "percreg/experiment.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

#include "percreg/bypass.hpp"
#include "percreg/combinatorics.hpp"
#include "percreg/errors.hpp"
#include "percreg/estimation.hpp"
#include "percreg/renorm.hpp"

namespace percreg {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

namespace {

using Defaults = std::vector<std::pair<std::string, std::string>>;

const std::map<std::string, Defaults>& all_defaults() {
  static const std::map<std::string, Defaults> table = {
      {"classify",
       {{"d", "2"}, {"N", "4"}, {"macro_radius", "3"}, {"p", "0.8"}, {"beta", "auto"},
        {"calibration_samples", "4000"}, {"calibration_target", "0.001"},
        {"rate_N", "4,6,8,12"}, {"rate_samples", "2000"}}},
      {"bypass",
       {{"d", "2"}, {"N", "4"}, {"macro_radius", "6"}, {"p", "0.8"}, {"q", "0.95"}, {"beta", "auto"},
        {"calibration_samples", "4000"}, {"calibration_target", "0.001"}, {"target", "300"},
        {"max_attempts", "20000"}, {"endpoint_offset", "3"}}},
      {"estimate", {{"d", "2"}, {"p", "0.7"}, {"x", "1,0"}, {"n", "32,64,128"}, {"samples", "200"}}},
      {"modulus",
       {{"d", "2"}, {"q", "0.95"}, {"p", "0.94,0.9,0.85,0.8,0.75,0.7"}, {"directions", "1,0;1,1"},
        {"n", "64"}, {"samples", "400"}, {"svg", "false"}}},
      {"shape", {{"d", "2"}, {"p", "0.8"}, {"q", "0.95"}, {"directions", "default"}, {"n", "32"}, {"samples", "100"}}},
      {"tails", {{"d", "2"}, {"p", "0.7"}, {"beta", "3"}, {"l1", "16,32,64"}, {"samples", "2000"}}},
      {"coupling", {{"d", "2"}, {"p", "0.85"}, {"q", "0.95"}, {"l1", "64"}, {"delta", "0.1"}, {"samples", "2000"}}},
      {"verify-combinatorics",
       {{"stirling_r", "3,5,10"}, {"stirling_N", "3,10,30"},
        {"stirling_fractions", "0.001,0.01,0.1,0.25,0.5,0.75,0.9,0.99,0.999"},
        {"animal_max_k_2d", "7"}, {"animal_max_k_3d", "4"},
        {"corridor_paths", "500"}, {"corridor_K", "2,4,8"}, {"corridor_max_steps", "400"},
        {"boundary_fields", "1000"}, {"boundary_N", "3"}, {"boundary_macro_radius", "4"},
        {"boundary_p", "0.7"}, {"boundary_beta", "1.5"}}},
  };
  return table;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    const auto b = cur.find_first_not_of(" \t");
    const auto e = cur.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? "" : cur.substr(b, e - b + 1));
  }
  return out;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string vec_text(const Vertex& x, int d) { return to_string(x, d, ' '); }

class Csv {
 public:
  Csv(const std::vector<std::pair<std::string, std::string>>& meta, const std::vector<std::string>& header) {
    for (const auto& [k, v] : meta) out_ << "# " << k << '=' << v << '\n';
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

struct Artifacts {
  fs::path dir;
  std::vector<std::pair<std::string, std::string>> written;  // name, fingerprint

  void write(const std::string& name, const std::string& content) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + (dir / name).string());
    f << content;
    written.emplace_back(name, hex64(fnv1a(content)));
  }
};

std::vector<std::pair<std::string, std::string>> base_meta(const RunSpec& spec) {
  std::vector<std::pair<std::string, std::string>> meta{{"experiment", spec.params.experiment()},
                                                        {"seed", std::to_string(spec.seed)}};
  for (const auto& [k, v] : spec.params.values()) meta.emplace_back(k, v);
  return meta;
}

SamplingOptions sampling(const RunSpec& spec) {
  SamplingOptions o;
  o.seed = spec.seed;
  o.workers = spec.workers;
  o.d = static_cast<int>(spec.params.integer("d"));
  return o;
}

double resolve_beta(const RunSpec& spec, double p, int N) {
  if (spec.params.text("beta") != "auto") return spec.params.number("beta");
  return calibrate_beta(p, N, spec.params.integer("calibration_samples"),
                        spec.params.number("calibration_target"), sampling(spec))
      .beta;
}

RunOutcome run_classify(const RunSpec& spec, Artifacts& art) {
  const ParamSet& ps = spec.params;
  const int d = static_cast<int>(ps.integer("d"));
  const int N = static_cast<int>(ps.integer("N"));
  const double p = ps.number("p");
  const double beta = resolve_beta(spec, p, N);
  auto meta = base_meta(spec);
  meta.emplace_back("beta_used", num(beta));

  const LatticeWindow w = LatticeWindow::from_macro_radius(d, N, static_cast<int>(ps.integer("macro_radius")));
  const EdgeField field = EdgeField::monotone(w, derive_seed(spec.seed, 10, 0));
  const MacroField macro = build_macro_field(field, p, beta);
  Csv boxes(meta, {"site", "good", "unique_big_cluster", "all_subboxes_crossed", "distance_bound_ok", "big_clusters"});
  const Region& sites = macro.sites();
  for (std::int64_t i = 0; i < sites.volume(); ++i) {
    const GoodBoxReport& r = macro.report(MacroSite{sites.point(i)});
    boxes.row({to_string(r.site, d, ' '), std::to_string(r.good), std::to_string(r.unique_big_cluster),
               std::to_string(r.all_subboxes_crossed), std::to_string(r.distance_bound_ok),
               std::to_string(r.big_clusters)});
  }
  art.write("boxes.csv", boxes.str());

  const std::vector<int> Ns = ps.int_list("rate_N");
  const std::int64_t samples = ps.integer("rate_samples");
  if (!Ns.empty() && samples > 0) {
    const RateTable t = estimate_bad_probability(p, Ns, beta, samples, sampling(spec));
    auto rmeta = meta;
    rmeta.emplace_back("log_slope", num(t.log_slope));
    Csv rates(rmeta, {"d", "p", "N", "beta", "samples", "bad_count", "rate", "ci_low", "ci_high"});
    for (const RateRow& r : t.rows) {
      rates.row({std::to_string(r.d), num(r.p), std::to_string(r.N), num(r.beta), std::to_string(r.samples),
                 std::to_string(r.bad_count), num(r.rate), num(r.ci.low), num(r.ci.high)});
    }
    art.write("rates.csv", rates.str());
  }
  return {};
}

RunOutcome run_bypass(const RunSpec& spec, Artifacts& art) {
  const ParamSet& ps = spec.params;
  BypassExperimentConfig cfg;
  cfg.d = static_cast<int>(ps.integer("d"));
  cfg.N = static_cast<int>(ps.integer("N"));
  cfg.macro_radius = static_cast<int>(ps.integer("macro_radius"));
  cfg.p = ps.number("p");
  cfg.q = ps.number("q");
  cfg.target = ps.integer("target");
  cfg.max_attempts = ps.integer("max_attempts");
  cfg.endpoint_offset = static_cast<int>(ps.integer("endpoint_offset"));
  cfg.seed = spec.seed;
  cfg.workers = spec.workers;
  cfg.beta = resolve_beta(spec, cfg.p, cfg.N);
  const BypassExperimentResult res = run_bypass_experiment(cfg);

  auto meta = base_meta(spec);
  meta.emplace_back("beta_used", num(cfg.beta));
  meta.emplace_back("attempts", std::to_string(res.attempts));
  meta.emplace_back("admissible", std::to_string(res.rows.size()));
  std::int64_t censored = 0;
  for (const auto& [reason, n] : res.censored) censored += n;
  meta.emplace_back("censored", std::to_string(censored));
  meta.emplace_back("violations", std::to_string(res.violations));
  Csv csv(meta, {"seed", "gamma_len", "n_closed", "bad_mass", "boundary_mass", "extra_length", "bound_value", "satisfied"});
  RunOutcome out;
  for (const BypassAuditRow& r : res.rows) {
    csv.row({std::to_string(r.seed), std::to_string(r.gamma_len), std::to_string(r.n_closed),
             std::to_string(r.bad_mass), std::to_string(r.boundary_mass), std::to_string(r.extra_length),
             num(r.bound_value), r.ok() ? "1" : "0"});
    if (!r.ok() && out.status == 0) {
      out.status = 2;
      out.message = "bypass audit failed for sample seed " + std::to_string(r.seed) +
                    (r.failure.empty() ? "" : ": " + r.failure);
    }
  }
  art.write("bypass_audit.csv", csv.str());
  Csv cens(meta, {"reason", "count"});
  for (const auto& [reason, n] : res.censored) cens.row({"\"" + reason + "\"", std::to_string(n)});
  art.write("bypass_censored.csv", cens.str());
  if (static_cast<std::int64_t>(res.rows.size()) < cfg.target && out.status == 0) {
    out.status = 2;
    out.message = "only " + std::to_string(res.rows.size()) + " admissible samples within the attempt budget";
  }
  return out;
}

RunOutcome run_estimate(const RunSpec& spec, Artifacts& art) {
  const ParamSet& ps = spec.params;
  const SamplingOptions o = sampling(spec);
  const Vertex x = ps.vertex_value("x");
  const auto recs = estimate_mu(ps.number("p"), x, ps.int_list("n"), ps.integer("samples"), o);
  Csv csv(base_meta(spec), {"d", "p", "x", "n", "samples", "censored", "mean", "stderr"});
  RunOutcome out;
  for (const EstimateRecord& r : recs) {
    csv.row({std::to_string(r.d), num(r.p), vec_text(r.x, r.d), std::to_string(r.n), std::to_string(r.samples),
             std::to_string(r.censored), num(r.mean), num(r.stderr_)});
    if (r.below_l1 > 0 && out.status == 0) {
      out.status = 2;
      out.message = "distance below the L1 distance at n=" + std::to_string(r.n);
    }
  }
  art.write("estimates.csv", csv.str());
  return out;
}

std::string modulus_svg(const ModulusTable& t) {
  double xmax = 0, ymax = 0;
  for (const ModulusRow& r : t.rows) {
    xmax = std::max(xmax, r.q - r.p);
    ymax = std::max({ymax, r.sup_diff, t.kappa * r.reference});
  }
  if (xmax <= 0) xmax = 1;
  if (ymax <= 0) ymax = 1;
  const double W = 480, H = 320, M = 40;
  auto px = [&](double v) { return M + v / xmax * (W - 2 * M); };
  auto py = [&](double v) { return H - M - v / ymax * (H - 2 * M); };
  std::vector<const ModulusRow*> rows;
  for (const ModulusRow& r : t.rows) rows.push_back(&r);
  std::sort(rows.begin(), rows.end(), [](auto a, auto b) { return a->q - a->p < b->q - b->p; });
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  s << "<line x1=\"" << M << "\" y1=\"" << H - M << "\" x2=\"" << W - M << "\" y2=\"" << H - M << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << M << "\" y1=\"" << M << "\" x2=\"" << M << "\" y2=\"" << H - M << "\" stroke=\"black\"/>\n";
  s << "<polyline fill=\"none\" stroke=\"gray\" stroke-dasharray=\"4\" points=\"";
  for (const auto* r : rows) s << num(px(r->q - r->p)) << ',' << num(py(t.kappa * r->reference)) << ' ';
  s << "\"/>\n<polyline fill=\"none\" stroke=\"steelblue\" points=\"";
  for (const auto* r : rows) s << num(px(r->q - r->p)) << ',' << num(py(r->sup_diff)) << ' ';
  s << "\"/>\n";
  for (const auto* r : rows) {
    s << "<circle cx=\"" << num(px(r->q - r->p)) << "\" cy=\"" << num(py(r->sup_diff)) << "\" r=\"3\" fill=\"steelblue\"/>\n";
  }
  s << "<text x=\"" << W / 2 << "\" y=\"" << H - 8 << "\" font-size=\"12\">q - p</text>\n";
  s << "<text x=\"4\" y=\"16\" font-size=\"12\">sup |mu_p - mu_q| (dashed: kappa (q-p)|log(q-p)|)</text>\n";
  s << "</svg>\n";
  return s.str();
}

RunOutcome run_modulus(const RunSpec& spec, Artifacts& art) {
  const ParamSet& ps = spec.params;
  const SamplingOptions o = sampling(spec);
  const ModulusTable t = modulus_experiment(ps.number_list("p"), ps.number("q"), ps.vertex_list("directions"),
                                            static_cast<int>(ps.integer("n")), ps.integer("samples"), o);
  auto meta = base_meta(spec);
  meta.emplace_back("kappa", num(t.kappa));
  meta.emplace_back("ratio_bounded", t.ratio_bounded() ? "1" : "0");
  meta.emplace_back("censored", std::to_string(t.censored));
  meta.emplace_back("pathwise_pairs", std::to_string(t.pathwise_pairs));
  meta.emplace_back("pathwise_violations", std::to_string(t.pathwise_violations));
  Csv csv(meta, {"p", "q", "sup_diff", "reference", "ratio"});
  for (const ModulusRow& r : t.rows) csv.row({num(r.p), num(r.q), num(r.sup_diff), num(r.reference), num(r.ratio)});
  art.write("modulus.csv", csv.str());

  Csv mu(meta, {"p", "x", "mu", "stderr"});
  for (std::size_t i = 0; i < t.mu.size(); ++i) {
    const double p = i < t.p_grid.size() ? t.p_grid[i] : t.q;
    for (std::size_t k = 0; k < t.directions.size(); ++k) {
      mu.row({num(p), vec_text(t.directions[k], t.d), num(t.mu[i][k]), num(t.mu_stderr[i][k])});
    }
  }
  art.write("modulus_mu.csv", mu.str());
  if (ps.flag("svg")) art.write("modulus.svg", modulus_svg(t));

  RunOutcome out;
  if (t.pathwise_violations > 0) {
    out.status = 2;
    out.message = std::to_string(t.pathwise_violations) + " pathwise monotonicity violations";
  }
  return out;
}

RunOutcome run_shape(const RunSpec& spec, Artifacts& art) {
  const ParamSet& ps = spec.params;
  const std::vector<Vertex> dirs =
      ps.text("directions") == "default" ? default_shape_directions() : ps.vertex_list("directions");
  const ShapeEstimate s = shape_hausdorff(ps.number("p"), ps.number("q"), dirs, static_cast<int>(ps.integer("n")),
                                          ps.integer("samples"), sampling(spec));
  Csv csv(base_meta(spec), {"p", "q", "hausdorff", "kappa", "mu_min", "bound", "within_bound"});
  csv.row({num(ps.number("p")), num(ps.number("q")), num(s.hausdorff), num(s.kappa), num(s.mu_min), num(s.bound),
           s.within_bound ? "1" : "0"});
  art.write("shape.csv", csv.str());
  Csv pts(base_meta(spec), {"param", "direction", "x", "y"});
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    pts.row({"p", vec_text(dirs[k], 2), num(s.shape_p[k][0]), num(s.shape_p[k][1])});
  }
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    pts.row({"q", vec_text(dirs[k], 2), num(s.shape_q[k][0]), num(s.shape_q[k][1])});
  }
  art.write("shape_points.csv", pts.str());
  return {};
}

RunOutcome run_tails(const RunSpec& spec, Artifacts& art) {
  const ParamSet& ps = spec.params;
  const auto rows = stretch_tail(ps.number("p"), ps.int_list("l1"), ps.number("beta"), ps.integer("samples"),
                                 sampling(spec));
  Csv csv(base_meta(spec), {"p", "beta", "l1", "freq", "ci"});
  for (const TailRow& r : rows) csv.row({num(r.p), num(r.beta), std::to_string(r.l1), num(r.freq), num(r.ci)});
  art.write("tails.csv", csv.str());
  return {};
}

RunOutcome run_coupling(const RunSpec& spec, Artifacts& art) {
  const ParamSet& ps = spec.params;
  const ClosedFractionReport r =
      geodesic_closed_fraction(ps.number("p"), ps.number("q"), static_cast<int>(ps.integer("l1")),
                               ps.number("delta"), ps.integer("samples"), sampling(spec));
  Csv csv(base_meta(spec), {"p", "q", "l1", "delta", "samples", "retained", "mean", "stderr", "target",
                            "exceed_freq", "exceed_stderr", "chernoff", "mean_ok", "exceed_ok"});
  csv.row({num(r.p), num(r.q), std::to_string(r.l1), num(r.delta), std::to_string(r.samples),
           std::to_string(r.retained), num(r.mean), num(r.stderr_), num(r.target), num(r.exceed_freq),
           num(r.exceed_stderr), num(r.chernoff), r.mean_ok() ? "1" : "0", r.exceed_ok() ? "1" : "0"});
  art.write("coupling.csv", csv.str());
  return {};
}

RunOutcome run_combinatorics(const RunSpec& spec, Artifacts& art) {
  const ParamSet& ps = spec.params;
  json audit;
  audit["seed"] = spec.seed;
  for (const auto& [k, v] : ps.values()) audit["params"][k] = v;
  bool pass = true;
  std::string first_failure;
  auto fail = [&](const std::string& what) {
    if (pass) first_failure = what;
    pass = false;
  };

  json st = json::array();
  std::int64_t st_bad = 0;
  for (int r : ps.int_list("stirling_r")) {
    for (int N : ps.int_list("stirling_N")) {
      const double zmax = 1.0 / (std::exp(1.0) * (1.0 + static_cast<double>(r) / N));
      for (double f : ps.number_list("stirling_fractions")) {
        const StirlingCheck c = stirling_sum_bound(f * zmax, r, N);
        st.push_back({{"r", r}, {"N", N}, {"z", f * zmax}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"ok", c.ok}});
        if (!c.ok) {
          ++st_bad;
          fail("stirling bound fails at r=" + std::to_string(r) + " N=" + std::to_string(N));
        }
      }
    }
  }
  audit["stirling"] = {{"cases", st}, {"violations", st_bad}};

  json an = json::array();
  for (int d : {2, 3}) {
    const int kmax = static_cast<int>(ps.integer(d == 2 ? "animal_max_k_2d" : "animal_max_k_3d"));
    std::int64_t prev = 0;
    for (int k = 1; k <= kmax; ++k) {
      const std::int64_t c = animal_count(d, k);
      const double bound = std::pow(std::pow(7.0, d), k);
      const bool ok = static_cast<double>(c) <= bound && c > prev;
      an.push_back({{"d", d}, {"k", k}, {"count", c}, {"bound", bound}, {"ok", ok}});
      if (!ok) fail("animal count check fails at d=" + std::to_string(d) + " k=" + std::to_string(k));
      prev = c;
    }
  }
  audit["animals"] = an;

  json co = json::array();
  const std::int64_t paths = ps.integer("corridor_paths");
  const int max_steps = static_cast<int>(ps.integer("corridor_max_steps"));
  for (int K : ps.int_list("corridor_K")) {
    std::int64_t bad = 0, max_tau = 0;
    for (std::int64_t i = 0; i < paths; ++i) {
      const std::uint64_t s = derive_seed(spec.seed, 11000 + static_cast<std::uint64_t>(K), static_cast<std::uint64_t>(i));
      const int steps = 1 + static_cast<int>(mix64(s) % static_cast<std::uint64_t>(max_steps));
      const CorridorCover c = corridor_cover(random_star_walk(2, steps, s), K, 2);
      max_tau = std::max<std::int64_t>(max_tau, c.tau);
      if (!c.count_ok || !c.contains_ok) ++bad;
    }
    co.push_back({{"K", K}, {"paths", paths}, {"violations", bad}, {"max_tau", max_tau}});
    if (bad) fail("corridor cover fails for K=" + std::to_string(K));
  }
  audit["corridor"] = co;

  BoundarySampling bs;
  bs.N = static_cast<int>(ps.integer("boundary_N"));
  bs.macro_radius = static_cast<int>(ps.integer("boundary_macro_radius"));
  bs.p = ps.number("boundary_p");
  bs.beta = ps.number("boundary_beta");
  bs.fields = ps.integer("boundary_fields");
  bs.seed = spec.seed;
  bs.workers = spec.workers;
  const BoundaryAudit ba = sampled_boundary_audit(bs);
  audit["boundary"] = {{"fields", bs.fields}, {"components", ba.components}, {"size_violations", ba.size_violations},
                       {"disconnected", ba.disconnected}, {"max_ratio", ba.max_ratio},
                       {"total_sites", ba.total_sites}, {"total_boundary", ba.total_boundary}};
  if (!ba.ok()) fail("boundary bound audit found violations");

  audit["pass"] = pass;
  art.write("combinatorics.json", audit.dump(2) + "\n");
  RunOutcome out;
  if (!pass) {
    out.status = 2;
    out.message = first_failure;
  }
  return out;
}

std::string config_fingerprint(const std::string& experiment, std::uint64_t seed,
                               const std::map<std::string, std::string>& values) {
  std::string canon = experiment + "\n" + std::to_string(seed) + "\n";
  for (const auto& [k, v] : values) canon += k + "=" + v + "\n";
  return hex64(fnv1a(canon));
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"classify", "bypass", "estimate", "modulus", "shape",
                                                 "tails", "coupling", "verify-combinatorics"};
  return names;
}

ParamSet ParamSet::defaults(const std::string& experiment) {
  const auto it = all_defaults().find(experiment);
  if (it == all_defaults().end()) throw ConfigError("unknown experiment '" + experiment + "'");
  ParamSet ps;
  ps.experiment_ = experiment;
  for (const auto& [k, v] : it->second) ps.values_[k] = v;
  return ps;
}

void ParamSet::set(const std::string& key, const std::string& value, int line) {
  if (!values_.count(key)) {
    throw ConfigError(source_ + (line ? ":" + std::to_string(line) : "") + ": unknown key '" + key +
                      "' in [" + experiment_ + "]");
  }
  values_[key] = value;
  if (line) lines_[key] = line;
}

void ParamSet::bad_value(const std::string& key, const std::string& expected) const {
  const auto it = lines_.find(key);
  throw ConfigError(source_ + (it != lines_.end() ? ":" + std::to_string(it->second) : "") + ": [" +
                    experiment_ + "] " + key + " = '" + text(key) + "': expected " + expected);
}

std::string ParamSet::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("experiment " + experiment_ + " has no parameter '" + key + "'");
  return it->second;
}

double ParamSet::number(const std::string& key) const {
  const std::string s = text(key);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  bad_value(key, "a number");
}

std::int64_t ParamSet::integer(const std::string& key) const {
  const std::string s = text(key);
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  bad_value(key, "an integer");
}

bool ParamSet::flag(const std::string& key) const {
  const std::string s = text(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  bad_value(key, "true or false");
}

std::vector<int> ParamSet::int_list(const std::string& key) const {
  std::vector<int> out;
  if (text(key).empty()) return out;
  for (const std::string& part : split(text(key), ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(part, &used);
      if (used != part.size()) bad_value(key, "a comma-separated integer list");
      out.push_back(v);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      bad_value(key, "a comma-separated integer list");
    }
  }
  return out;
}

std::vector<double> ParamSet::number_list(const std::string& key) const {
  std::vector<double> out;
  if (text(key).empty()) return out;
  for (const std::string& part : split(text(key), ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(part, &used);
      if (used != part.size()) bad_value(key, "a comma-separated number list");
      out.push_back(v);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      bad_value(key, "a comma-separated number list");
    }
  }
  return out;
}

std::vector<Vertex> ParamSet::vertex_list(const std::string& key) const {
  std::vector<Vertex> out;
  for (const std::string& item : split(text(key), ';')) {
    const std::vector<std::string> parts = split(item, ',');
    if (parts.empty() || parts.size() > static_cast<std::size_t>(kMaxDim)) bad_value(key, "integer vectors like 1,0;1,1");
    Vertex v;
    for (std::size_t k = 0; k < parts.size(); ++k) {
      try {
        std::size_t used = 0;
        v[static_cast<int>(k)] = std::stoi(parts[k], &used);
        if (used != parts[k].size()) bad_value(key, "integer vectors like 1,0;1,1");
      } catch (const ConfigError&) {
        throw;
      } catch (const std::exception&) {
        bad_value(key, "integer vectors like 1,0;1,1");
      }
    }
    out.push_back(v);
  }
  return out;
}

Vertex ParamSet::vertex_value(const std::string& key) const {
  const std::vector<Vertex> v = vertex_list(key);
  if (v.size() != 1) bad_value(key, "a single integer vector like 1,0");
  return v.front();
}

RunSpec load_run_spec(const std::string& experiment, const std::string& ini_path) {
  RunSpec spec;
  spec.params = ParamSet::defaults(experiment);
  if (ini_path.empty()) return spec;
  spec.params.set_source(ini_path);

  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(ini_path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(ini_path + ":" + std::to_string(e.line()) + ": " + e.message());
  }

  // Line numbers for diagnostics, which the tree does not keep.
  std::map<std::string, int> key_line;
  {
    std::ifstream in(ini_path);
    std::string line, section;
    for (int n = 1; std::getline(in, line); ++n) {
      const auto b = line.find_first_not_of(" \t");
      if (b == std::string::npos || line[b] == ';' || line[b] == '#') continue;
      if (line[b] == '[') {
        section = line.substr(b + 1, line.find(']') - b - 1);
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(b, eq - b);
      key.erase(key.find_last_not_of(" \t") + 1);
      key_line[section + "." + key] = n;
    }
  }

  const auto& names = experiment_names();
  for (const auto& [section, body] : tree) {
    if (section != "run" && std::find(names.begin(), names.end(), section) == names.end()) {
      throw ConfigError(ini_path + ": unknown section [" + section + "]");
    }
  }
  if (const auto run = tree.get_child_optional("run")) {
    for (const auto& [key, node] : *run) {
      const std::string v = node.get_value<std::string>();
      const int line = key_line[std::string("run.") + key];
      try {
        if (key == "seed") {
          std::size_t used = 0;
          spec.seed = std::stoull(v, &used);
          if (used != v.size()) throw std::invalid_argument(v);
        } else if (key == "workers") {
          spec.workers = std::stoi(v);
        } else {
          throw ConfigError(ini_path + ":" + std::to_string(line) + ": unknown key '" + key + "' in [run]");
        }
      } catch (const ConfigError&) {
        throw;
      } catch (const std::exception&) {
        throw ConfigError(ini_path + ":" + std::to_string(line) + ": [run] " + key + " = '" + v + "' is not valid");
      }
    }
  }
  if (const auto sec = tree.get_child_optional(experiment)) {
    for (const auto& [key, node] : *sec) {
      spec.params.set(key, node.get_value<std::string>(), key_line[experiment + "." + key]);
    }
  }
  return spec;
}

RunOutcome run_experiment(const RunSpec& spec, const fs::path& out_dir) {
  const ParamSet& ps = spec.params;
  if (ps.values().count("d")) {
    const auto d = ps.integer("d");
    if (d < 2 || d > kMaxDim) throw ConfigError("[" + ps.experiment() + "] d must lie in [2, 4]");
    if (d == 2) {
      for (const char* key : {"p", "q"}) {
        if (!ps.values().count(key)) continue;
        for (double p : ps.number_list(key)) {
          if (p <= 0.5) {
            std::cerr << "warning: " << key << "=" << p << " is not above the critical point 1/2 of Z^2\n";
          }
        }
      }
    }
  }
  if (spec.workers < 1) throw ConfigError("workers must be at least 1");
  fs::create_directories(out_dir);

  Artifacts art{out_dir, {}};
  const std::string& e = ps.experiment();
  RunOutcome out;
  if (e == "classify") out = run_classify(spec, art);
  else if (e == "bypass") out = run_bypass(spec, art);
  else if (e == "estimate") out = run_estimate(spec, art);
  else if (e == "modulus") out = run_modulus(spec, art);
  else if (e == "shape") out = run_shape(spec, art);
  else if (e == "tails") out = run_tails(spec, art);
  else if (e == "coupling") out = run_coupling(spec, art);
  else if (e == "verify-combinatorics") out = run_combinatorics(spec, art);
  else throw ConfigError("unknown experiment '" + e + "'");

  json m;
  m["format"] = kManifestFormat;
  m["tool_version"] = kToolVersion;
  m["experiment"] = e;
  m["seed"] = spec.seed;
  m["workers"] = spec.workers;
  m["params"] = json::object();
  for (const auto& [k, v] : ps.values()) m["params"][k] = v;
  m["config_fingerprint"] = config_fingerprint(e, spec.seed, ps.values());
  m["outputs"] = json::object();
  for (const auto& [name, fp] : art.written) {
    m["outputs"][name] = fp;
    out.files.push_back(name);
  }
  m["status"] = out.status;
  m["message"] = out.message;
  std::ofstream f(out_dir / "manifest.json", std::ios::binary);
  f << m.dump(2) << '\n';
  return out;
}

RunOutcome replay_manifest(const fs::path& manifest, const fs::path& out_dir, int workers) {
  std::ifstream in(manifest, std::ios::binary);
  if (!in) throw ConfigError("cannot read manifest " + manifest.string());
  json m;
  try {
    m = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(manifest.string() + ": " + e.what());
  }
  const int format = m.value("format", 0);
  const std::string version = m.value("tool_version", std::string());
  if (format != kManifestFormat || version != kToolVersion) {
    throw ConfigError("manifest was written by format " + std::to_string(format) + ", version '" + version +
                      "'; this build reads format " + std::to_string(kManifestFormat) + ", version " + kToolVersion +
                      " and cannot guarantee an identical replay");
  }
  RunSpec spec;
  spec.params = ParamSet::defaults(m.at("experiment").get<std::string>());
  spec.params.set_source(manifest.string());
  spec.seed = m.at("seed").get<std::uint64_t>();
  spec.workers = workers;
  for (const auto& [k, v] : m.at("params").items()) spec.params.set(k, v.get<std::string>());
  const std::map<std::string, std::string> recorded(m.at("params").get<std::map<std::string, std::string>>());
  const bool edited = m.value("config_fingerprint", std::string()) !=
                      config_fingerprint(spec.params.experiment(), spec.seed, recorded);

  const std::map<std::string, std::string> expected = m.at("outputs").get<std::map<std::string, std::string>>();
  RunOutcome out = run_experiment(spec, out_dir);

  std::vector<std::string> differing;
  for (const auto& [name, fp] : expected) {
    std::ifstream f(out_dir / name, std::ios::binary);
    std::ostringstream buf;
    buf << f.rdbuf();
    if (!f || hex64(fnv1a(buf.str())) != fp) differing.push_back(name);
  }
  if (edited || !differing.empty()) {
    out.status = 2;
    std::string msg = edited ? "manifest parameters were edited after the run; not a replay" : "";
    if (!differing.empty()) {
      msg += std::string(msg.empty() ? "" : "; ") + "outputs differ:";
      for (const auto& d : differing) msg += " " + d;
    }
    out.message = msg;
  } else if (out.message.empty()) {
    out.message = "replay identical";
  }
  return out;
}

}  // namespace percreg
