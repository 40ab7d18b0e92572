#include <cmath>

#include "doctest.h"
#include "percreg/estimation.hpp"

using namespace percreg;

TEST_SUITE("estimation") {
  TEST_CASE("segment geometry") {
    const auto g = segment_geometry(2, vertex({1, 0}), 32);
    CHECK(g.a == vertex({-16, 0}));
    CHECK(g.b == vertex({16, 0}));
    CHECK(g.window.half_side() == 32);
    const auto h = segment_geometry(2, vertex({1, 1}), 5);
    CHECK(h.a == vertex({-2, -2}));
    CHECK(h.b == vertex({3, 3}));
    CHECK(h.window.contains(h.b));
    CHECK(h.window.half_side() == 11);
    CHECK_THROWS_AS(segment_geometry(2, vertex({0, 0}), 4), DomainError);
    CHECK_THROWS_AS(segment_geometry(2, vertex({1, 0}), 0), DomainError);
  }

  TEST_CASE("fully open lattice gives the L1 norm") {
    SamplingOptions opt;
    for (const Vertex& x : {vertex({1, 0}), vertex({1, 1}), vertex({2, 1})}) {
      const auto recs = estimate_mu(1.0, x, {8, 16}, 5, opt);
      for (const auto& r : recs) {
        CHECK(r.mean == static_cast<double>(norm1(x, 2)));
        CHECK(r.stderr_ == 0.0);
        CHECK(r.censored == 0);
        CHECK(r.below_l1 == 0);
      }
    }
  }

  TEST_CASE("estimates stay above the L1 norm and are reproducible") {
    SamplingOptions opt;
    opt.seed = 4;
    const auto a = estimate_mu(0.7, vertex({1, 0}), {16}, 40, opt);
    CHECK(a[0].mean > 1.0);
    CHECK(a[0].below_l1 == 0);
    opt.workers = 3;
    const auto b = estimate_mu(0.7, vertex({1, 0}), {16}, 40, opt);
    CHECK(a[0].mean == b[0].mean);
    CHECK(a[0].stderr_ == b[0].stderr_);
  }

  TEST_CASE("modulus table under common random numbers") {
    SamplingOptions opt;
    const auto t = modulus_experiment({0.7, 0.8, 0.9}, 0.95, {vertex({1, 0}), vertex({1, 1})}, 16, 30, opt);
    CHECK(t.pathwise_violations == 0);
    CHECK(t.pathwise_pairs > 0);
    REQUIRE(t.mu.size() == 4);
    for (std::size_t k = 0; k < 2; ++k) {
      for (std::size_t i = 0; i + 1 < t.mu.size(); ++i) CHECK(t.mu[i][k] >= t.mu[i + 1][k]);
    }
    REQUIRE(t.rows.size() == 3);
    for (const auto& r : t.rows) {
      CHECK(r.reference == doctest::Approx((r.q - r.p) * std::fabs(std::log(r.q - r.p))));
      CHECK(r.sup_diff <= t.kappa * r.reference + 1e-12);
    }
    CHECK_THROWS_AS(modulus_experiment({0.99}, 0.95, {vertex({1, 0})}, 8, 4, opt), ParameterError);
  }

  TEST_CASE("ratio bound rule") {
    ModulusTable t;
    t.p_grid = {0.94, 0.9, 0.8};
    t.q = 0.95;
    t.rows = {{0.94, 0.95, 0, 0, 0.3}, {0.9, 0.95, 0, 0, 0.2}, {0.8, 0.95, 0, 0, 0.5}};
    CHECK(t.ratio_bounded());
    t.rows[0].ratio = 1.2;
    CHECK_FALSE(t.ratio_bounded());
  }

  TEST_CASE("hull and Hausdorff distance") {
    const std::vector<std::array<double, 2>> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}};
    CHECK(convex_hull(sq).size() == 4);
    CHECK(hull_hausdorff(sq, sq) == doctest::Approx(0.0));
    const std::vector<std::array<double, 2>> big{{-1, -1}, {2, -1}, {2, 2}, {-1, 2}};
    CHECK(hull_hausdorff(sq, big) == doctest::Approx(std::sqrt(2.0)));
    const std::vector<std::array<double, 2>> shifted{{0.5, 0}, {1.5, 0}, {1.5, 1}, {0.5, 1}};
    CHECK(hull_hausdorff(sq, shifted) == doctest::Approx(0.5));
    CHECK(default_shape_directions().size() == 16);
  }

  TEST_CASE("shape at p = q = 1 is the L1 ball") {
    SamplingOptions opt;
    const auto s = shape_hausdorff(1.0, 1.0, default_shape_directions(), 8, 2, opt);
    CHECK(s.hausdorff == doctest::Approx(0.0));
    for (const auto& pt : s.shape_p) CHECK(std::fabs(pt[0]) + std::fabs(pt[1]) == doctest::Approx(1.0));
    opt.d = 3;
    CHECK_THROWS_AS(shape_hausdorff(0.8, 0.9, default_shape_directions(), 8, 2, opt), DomainError);
  }

  TEST_CASE("stretch tail") {
    SamplingOptions opt;
    const auto rows = stretch_tail(1.0, {8, 16}, 1.0, 10, opt);
    for (const auto& r : rows) CHECK(r.freq == 1.0);
    const auto none = stretch_tail(1.0, {8}, 1.5, 10, opt);
    CHECK(none[0].hits == 0);
    const auto mid = stretch_tail(0.6, {8, 32}, 1.3, 200, opt);
    for (const auto& r : mid) {
      CHECK(r.freq == doctest::Approx(static_cast<double>(r.hits) / 200));
      CHECK(r.ci > 0.0);
      CHECK(r.ci < 0.1);
    }
  }

  TEST_CASE("closed fraction along q-geodesics") {
    SamplingOptions opt;
    const auto r = geodesic_closed_fraction(0.85, 0.95, 32, 0.1, 300, opt);
    CHECK(r.target == doctest::Approx(0.1 / 0.95));
    CHECK(r.retained > 250);
    CHECK(r.mean_ok());
    CHECK(r.exceed_ok());
    CHECK(r.chernoff == doctest::Approx(std::exp(-2 * 0.01 * 32)));
    const auto same = geodesic_closed_fraction(0.95, 0.95, 16, 0.1, 20, opt);
    CHECK(same.mean == 0.0);
    CHECK_THROWS_AS(geodesic_closed_fraction(0.85, 0.95, 32, 0.0, 10, opt), DomainError);
  }
}
