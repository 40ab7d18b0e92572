// Small statistics helpers and the sample-parallel loop shared by the
// Monte Carlo routines.

#ifndef PERCREG_STATS_HPP
#define PERCREG_STATS_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace percreg {

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

// Wilson score interval for k successes out of n at normal quantile z.
Interval wilson_interval(std::int64_t k, std::int64_t n, double z = 1.959963984540054);

// Running sums; merging two accumulators is associative and commutative in
// exact arithmetic, and callers merge in sample-index order so the floating
// result does not depend on scheduling.
struct Accumulator {
  std::int64_t n = 0;
  long double sum = 0.0L;
  long double sum_sq = 0.0L;

  void add(double x) {
    ++n;
    sum += x;
    sum_sq += static_cast<long double>(x) * x;
  }
  void merge(const Accumulator& o) {
    n += o.n;
    sum += o.sum;
    sum_sq += o.sum_sq;
  }
  double mean() const { return n ? static_cast<double>(sum / n) : 0.0; }
  // Sample standard deviation (n - 1 denominator); 0 for n < 2.
  double stddev() const;
  double stderr_of_mean() const { return n ? stddev() / std::sqrt(static_cast<double>(n)) : 0.0; }
};

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

// Calls body(i) for i in [0, n) on up to `workers` threads. Each index is
// processed exactly once; callers store results by index and reduce in order.
void parallel_for(std::int64_t n, int workers, const std::function<void(std::int64_t)>& body);

}  // namespace percreg

#endif  // PERCREG_STATS_HPP
