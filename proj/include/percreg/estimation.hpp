// Monte Carlo estimates of the time constant and related quantities.
//
// Every distance is measured inside a finite window around the two
// endpoints, after moving each endpoint to the nearest vertex of the largest
// open cluster touching all faces of the window.

#ifndef PERCREG_ESTIMATION_HPP
#define PERCREG_ESTIMATION_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "percreg/lattice.hpp"
#include "percreg/renorm.hpp"
#include "percreg/stats.hpp"

namespace percreg {

// Endpoints a and a + n x with a = -floor(n x / 2), inside [-L, L]^d with
// L = ceil(n |x|_inf / 2) + max(8, n |x|_inf / 2).
struct SegmentGeometry {
  LatticeWindow window = LatticeWindow::make(2, 1, 1);
  Vertex a, b;
};
SegmentGeometry segment_geometry(int d, const Vertex& x, int n);

struct EstimateRecord {
  int d = 2;
  double p = 0.0;
  Vertex x;
  int n = 0;
  std::int64_t samples = 0;   // requested
  std::int64_t censored = 0;  // no spanning cluster in the window
  double mean = 0.0;          // of D / n over retained samples
  double stderr_ = 0.0;
  // Retained samples with D below the L1 distance of the regularized
  // endpoints. Always zero for a correct distance routine.
  std::int64_t below_l1 = 0;
};

// EstimationError when every sample is censored.
std::vector<EstimateRecord> estimate_mu(double p, const Vertex& x, const std::vector<int>& n_list,
                                        std::int64_t samples, const SamplingOptions& opt);

struct ModulusRow {
  double p = 0.0;
  double q = 0.0;
  double sup_diff = 0.0;   // max over directions of |mu_p - mu_q| per unit L2 length
  double reference = 0.0;  // (q - p) |log(q - p)|
  double ratio = 0.0;      // sup_diff / reference; 0 when p = q
};

struct ModulusTable {
  int d = 2;
  double q = 0.0;
  int n = 0;
  std::int64_t samples = 0;
  std::int64_t censored = 0;
  std::vector<Vertex> directions;
  std::vector<double> p_grid;
  // mu[i][k]: parameter p_grid[i] (or q for i == p_grid.size()), direction k,
  // per unit of |x|_1 scaling, i.e. D / n.
  std::vector<std::vector<double>> mu;
  std::vector<std::vector<double>> mu_stderr;
  std::vector<ModulusRow> rows;  // one per p_grid entry, same order
  double kappa = 0.0;            // max ratio over rows
  // Sample-level pairs (s < t parameters) with D_t > D_s; zero under the
  // monotone coupling.
  std::int64_t pathwise_violations = 0;
  std::int64_t pathwise_pairs = 0;

  // The ratio at the smallest gap q - p is at most twice the largest ratio
  // over the other rows.
  bool ratio_bounded() const;
};

// Common random numbers: one monotone field per (direction, sample) serves
// every parameter, and both endpoints are regularized once to the spanning
// cluster of the smallest parameter, which lies inside every other one.
ModulusTable modulus_experiment(const std::vector<double>& p_grid, double q,
                                const std::vector<Vertex>& directions, int n, std::int64_t samples,
                                const SamplingOptions& opt);

struct ShapeEstimate {
  double hausdorff = 0.0;
  double kappa = 0.0;     // sup over directions of |mu_p - mu_q| (unit L2) / ((q-p)|log(q-p)|)
  double mu_min = 0.0;    // smallest unit-direction estimate over both parameters
  double bound = 0.0;     // kappa / mu_min^2 * (q-p)|log(q-p)|
  bool within_bound = false;
  std::vector<std::array<double, 2>> shape_p, shape_q;  // boundary points x / mu(x)
};

// Symmetric Hausdorff distance (L2) between the convex hulls of two planar
// point sets.
double hull_hausdorff(const std::vector<std::array<double, 2>>& a,
                      const std::vector<std::array<double, 2>>& b);
std::vector<std::array<double, 2>> convex_hull(std::vector<std::array<double, 2>> pts);

// The direction set must have at least 8 entries in d = 2.
ShapeEstimate shape_hausdorff(double p, double q, const std::vector<Vertex>& directions, int n,
                              std::int64_t samples, const SamplingOptions& opt);

// The 16 directions generated by (1,0), (2,1), (1,1), (1,2) under the
// symmetries of the square.
std::vector<Vertex> default_shape_directions();

struct TailRow {
  double p = 0.0;
  double beta = 0.0;
  int l1 = 0;
  std::int64_t samples = 0;
  std::int64_t hits = 0;
  double freq = 0.0;
  double ci = 0.0;  // half-width of the 95% Wilson interval
};

// Frequency of {beta l1 <= D(a, a + l1 e_1) < inf}, no regularization.
std::vector<TailRow> stretch_tail(double p, const std::vector<int>& l1_list, double beta,
                                  std::int64_t samples, const SamplingOptions& opt);

struct ClosedFractionReport {
  double p = 0.0;
  double q = 0.0;
  int l1 = 0;
  double delta = 0.0;
  std::int64_t samples = 0;
  std::int64_t retained = 0;
  double mean = 0.0;          // of |gamma_c| / |gamma|
  double stderr_ = 0.0;
  double target = 0.0;        // (q - p) / q
  std::int64_t exceed = 0;    // samples with |gamma_c| >= |gamma| (target + delta)
  double exceed_freq = 0.0;
  double exceed_stderr = 0.0;
  double chernoff = 0.0;      // exp(-2 delta^2 l1)

  bool mean_ok() const;       // |mean - target| <= 3 stderr
  bool exceed_ok() const;     // exceed_freq <= chernoff + 3 exceed_stderr
};

// Two-source coupling; q-geodesics between endpoints regularized to the
// spanning q-cluster. Samples without one are censored.
ClosedFractionReport geodesic_closed_fraction(double p, double q, int l1, double delta,
                                              std::int64_t samples, const SamplingOptions& opt);

}  // namespace percreg

#endif  // PERCREG_ESTIMATION_HPP
