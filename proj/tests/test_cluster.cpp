#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "percreg/cluster.hpp"

using namespace percreg;

namespace {

SiteGrid grid_from(const Region& sites, const std::set<Coord>& bad) {
  SiteGrid g{sites, std::vector<char>(static_cast<std::size_t>(sites.volume()), 1)};
  for (const Coord& c : bad) g.good[static_cast<std::size_t>(sites.index(c))] = 0;
  return g;
}

}  // namespace

TEST_SUITE("cluster") {
  TEST_CASE("labeling agrees with depth-first search") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
      const int d = seed % 3 == 0 ? 3 : 2;
      const int L = d == 3 ? 3 : 7;
      const double p = 0.3 + 0.02 * static_cast<double>(seed);
      const auto w = LatticeWindow::make(d, L, L);
      const auto mask = EdgeField::monotone(w, seed).materialize(p);
      const auto lab = label_clusters(mask);
      const auto ref = oracle::dfs_clusters(mask, w.region());
      REQUIRE(lab.count() == static_cast<int>(ref.size()));
      for (int c = 0; c < lab.count(); ++c) {
        CHECK(lab.members(c) == ref[static_cast<std::size_t>(c)]);
        CHECK(lab.smallest_vertex(c) == ref[static_cast<std::size_t>(c)].front());
        CHECK(lab.diameter(c) == oracle::span_diameter(ref[static_cast<std::size_t>(c)], d));
      }
    }
  }

  TEST_CASE("restricted labeling ignores edges leaving the region") {
    const auto w = LatticeWindow::make(2, 6, 6);
    const auto mask = EdgeField::monotone(w, 4).materialize(1.0);
    const Region sub(2, Coord{-2, -2}, Coord{1, 3});
    const auto lab = label_clusters(mask, sub);
    CHECK(lab.count() == 1);
    CHECK(lab.size(0) == sub.volume());
    CHECK(lab.label_of(vertex({5, 5})) == -1);
    CHECK(lab.touches_all_faces(0));
  }

  TEST_CASE("crossing predicate") {
    const auto w = LatticeWindow::make(2, 6, 6);
    const Region box = Region::cube(2, Coord{}, 2);
    SUBCASE("fully open box crosses") {
      const auto mask = EdgeField::monotone(w, 4).materialize(1.0);
      const auto lab = label_clusters(mask);
      CHECK(is_crossing(lab, 0, mask, box));
    }
    SUBCASE("a single horizontal line does not cross vertically") {
      OpenMask mask(w.region(), 0.5);
      for (int x = -6; x < 6; ++x) mask.set_open(w.region().index(Coord{x, 0}), 0);
      const auto lab = label_clusters(mask);
      CHECK_FALSE(is_crossing(lab, 0, mask, box));
      CHECK(oracle::crosses(lab.members(0), mask, box) == false);
    }
    SUBCASE("random fields agree with the oracle") {
      for (std::uint64_t s = 0; s < 40; ++s) {
        const auto mask = EdgeField::monotone(w, 100 + s).materialize(0.6);
        const auto lab = label_clusters(mask);
        for (int c = 0; c < std::min(3, lab.count()); ++c) {
          CHECK(is_crossing(lab, c, mask, box) == oracle::crosses(lab.members(c), mask, box));
        }
      }
    }
  }

  TEST_CASE("diameter") {
    CHECK(diameter({vertex({0, 0}), vertex({3, 1}), vertex({1, -2})}, 2) == 3);
    CHECK_THROWS_AS(diameter({}, 2), DomainError);
  }

  TEST_CASE("domino boundary") {
    const Region sites = Region::cube(2, Coord{}, 4);
    const auto bad = bad_components(grid_from(sites, {Coord{0, 0}, Coord{1, 0}}));
    REQUIRE(bad.components.size() == 1);
    const auto& c = bad.components[0];
    CHECK(c.sites.size() == 2);
    CHECK(c.boundary.size() == 6);
    CHECK(c.boundary.size() <= 8);  // 2d |C|
    CHECK(is_star_connected(c.boundary, 2));
    CHECK_FALSE(c.touches_grid_edge);
  }

  TEST_CASE("ring encloses its hole") {
    const Region sites = Region::cube(2, Coord{}, 5);
    std::set<Coord> ring;
    for (int x = -2; x <= 2; ++x) {
      for (int y = -2; y <= 2; ++y) {
        if (std::max(std::abs(x), std::abs(y)) == 2) ring.insert(Coord{x, y});
      }
    }
    const auto bad = bad_components(grid_from(sites, ring));
    REQUIRE(bad.components.size() == 1);
    // outer boundary only: the 7x7 square ring minus its 4 corners
    CHECK(bad.components[0].boundary.size() == 20);
    std::vector<MacroSite> wall;
    for (const Coord& c : ring) wall.push_back(MacroSite{c});
    CHECK(enclosed_sites(wall, Region::cube(2, Coord{}, 3)).size() == 9);
  }

  TEST_CASE("boundary matches the exhaustive exterior search") {
    const Region sites = Region::cube(2, Coord{}, 6);
    for (std::uint64_t s = 0; s < 60; ++s) {
      std::set<Coord> bad;
      for (std::int64_t k = 0; k < sites.volume(); ++k) {
        const Coord c = sites.point(k);
        if (std::max(std::abs(c[0]), std::abs(c[1])) < 5 && mix64(s * 1000 + static_cast<std::uint64_t>(k)) % 100 < 30) bad.insert(c);
      }
      const auto comps = bad_components(grid_from(sites, bad));
      for (const auto& comp : comps.components) {
        std::vector<Coord> cs;
        for (const auto& m : comp.sites) cs.push_back(m.c);
        const auto ref = oracle::exterior_boundary(cs, 2);
        std::vector<Coord> got;
        for (const auto& m : comp.boundary) got.push_back(m.c);
        CHECK(got == std::vector<Coord>(ref.begin(), ref.end()));
        CHECK(is_l1_connected(comp.sites, 2));
        CHECK(got.size() <= 4 * cs.size());
      }
    }
  }

  TEST_CASE("component touching the grid edge is flagged") {
    const Region sites = Region::cube(2, Coord{}, 2);
    const auto bad = bad_components(grid_from(sites, {Coord{2, 0}, Coord{1, 0}}));
    REQUIRE(bad.components.size() == 1);
    CHECK(bad.components[0].touches_grid_edge);
  }

  TEST_CASE("star connectivity") {
    CHECK(is_star_connected({site({0, 0}), site({1, 1})}, 2));
    CHECK_FALSE(is_l1_connected({site({0, 0}), site({1, 1})}, 2));
    CHECK_FALSE(is_star_connected({site({0, 0}), site({2, 0})}, 2));
  }

  TEST_CASE("union-find") {
    UnionFind uf(5);
    uf.unite(0, 1);
    uf.unite(3, 4);
    uf.unite(1, 4);
    CHECK(uf.find(0) == uf.find(3));
    CHECK(uf.size_of(4) == 4);
    CHECK(uf.find(2) == 2);
  }
}
