// Good and bad N-boxes, the macroscopic site field, and Monte Carlo
// measurements of how often boxes fail.

#ifndef PERCREG_RENORM_HPP
#define PERCREG_RENORM_HPP

#include <cstdint>
#include <vector>

#include "percreg/cluster.hpp"
#include "percreg/distance.hpp"
#include "percreg/field.hpp"
#include "percreg/stats.hpp"

namespace percreg {

// Largest integer chemical distance allowed inside a good box, floor(12 beta N).
std::int64_t distance_cap(int N, double beta);

struct GoodBoxReport {
  MacroSite site;
  bool unique_big_cluster = false;    // exactly one cluster of B'_N with diameter > N
  bool all_subboxes_crossed = false;  // some cluster crosses all 3^d N-boxes of B'_N
  bool distance_bound_ok = false;     // D <= 12 beta N between witness vertices
  bool good = false;
  int big_clusters = 0;

  // Candidate cluster: the unique big cluster, else the largest cluster if it
  // is big. Empty flags when there is none.
  Region big_box;
  std::vector<char> in_witness;  // indexed by big_box.index()
  // Witness vertices of B_N(i) on a component of (witness ∩ B_N(i)) that
  // crosses the box. Filled for good boxes only.
  Region box;
  std::vector<char> crossing;
  Vertex representative;  // lexicographically smallest crossing member

  bool has_witness() const { return !in_witness.empty(); }
  bool witness_contains(const Vertex& v) const {
    return has_witness() && big_box.contains(v.c) &&
           in_witness[static_cast<std::size_t>(big_box.index(v.c))] != 0;
  }
  bool crossing_contains(const Vertex& v) const {
    return !crossing.empty() && box.contains(v.c) &&
           crossing[static_cast<std::size_t>(box.index(v.c))] != 0;
  }
};

// Classifies site i from a mask covering B'_N(i) grown by distance_cap().
GoodBoxReport classify_box(const OpenMask& mask, const MacroSite& i, int N, double beta);
// Throws GeometryError unless B'_N(i) lies in the field's window. Edges
// beyond B'_N(i) are materialized only if a distance check needs them.
GoodBoxReport classify_box(const EdgeField& field, double p, const MacroSite& i, double beta);

class MacroField {
 public:
  const LatticeWindow& window() const { return window_; }
  double p() const { return p_; }
  int box_scale() const { return window_.box_scale(); }
  double beta() const { return beta_; }
  // Classified sites: those whose B'_N lies in the window.
  const Region& sites() const { return sites_; }

  bool classified(const MacroSite& i) const { return sites_.contains(i.c); }
  const GoodBoxReport& report(const MacroSite& i) const;
  bool is_good(const MacroSite& i) const { return report(i).good; }
  SiteGrid grid() const;
  double good_fraction() const;

  // L1 components of good sites; -1 for bad sites.
  int good_component_of(const MacroSite& i) const;
  // Largest good component touching every face of sites(), or -1.
  int spanning_component() const { return spanning_; }
  bool in_spanning(const MacroSite& i) const {
    return classified(i) && spanning_ >= 0 && good_component_of(i) == spanning_;
  }

 private:
  friend MacroField build_macro_field(const OpenMask& mask, const LatticeWindow& window,
                                      double beta);

  LatticeWindow window_ = LatticeWindow::make(2, 1, 1);
  double p_ = 0.0;
  double beta_ = 0.0;
  Region sites_;
  std::vector<GoodBoxReport> reports_;
  std::vector<int> good_component_;
  int spanning_ = -1;
};

// Region that must be materialized to classify every site of the window.
Region macro_mask_region(const LatticeWindow& window, double beta);

MacroField build_macro_field(const OpenMask& mask, const LatticeWindow& window, double beta);
MacroField build_macro_field(const EdgeField& field, double p, double beta);

struct RateRow {
  int d = 2;
  double p = 0.0;
  int N = 0;
  double beta = 0.0;
  std::int64_t samples = 0;
  std::int64_t bad_count = 0;
  double rate = 0.0;
  Interval ci;
};

struct RateTable {
  std::vector<RateRow> rows;
  // Least-squares slope of log(rate) in N over rows with a positive rate;
  // NaN when fewer than two such rows exist.
  double log_slope = 0.0;
};

struct SamplingOptions {
  std::uint64_t seed = 1;
  int workers = 1;
  int d = 2;
};

// P(B_N(0) is p-bad), one fresh field per sample.
RateTable estimate_bad_probability(double p, const std::vector<int>& N_list, double beta,
                                   std::int64_t samples, const SamplingOptions& opt);

// P(B_N has a crossing cluster and another open cluster of diameter >= m).
double measure_T_mN(double p, int m, int N, std::int64_t samples, const SamplingOptions& opt);

struct BetaCalibration {
  double beta = 0.0;
  std::int64_t samples = 0;
  std::int64_t finite = 0;
  // Empirical frequency of {beta N <= D(0, N e_1) < inf} at the chosen beta.
  double tail_rate = 0.0;
};

// Smallest beta on the grid k/N whose empirical rate of
// {beta N <= D(0, N e_1) < inf} stays below `target`.
BetaCalibration calibrate_beta(double p, int N, std::int64_t samples, double target,
                               const SamplingOptions& opt);

}  // namespace percreg

#endif  // PERCREG_RENORM_HPP
