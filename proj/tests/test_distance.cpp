#include "doctest.h"
#include "oracles.hpp"
#include "percreg/distance.hpp"

using namespace percreg;

TEST_SUITE("distance") {
  TEST_CASE("chemical distance agrees with Dijkstra") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
      const int d = seed % 4 == 0 ? 3 : 2;
      const int L = d == 3 ? 3 : 8;
      const auto w = LatticeWindow::make(d, L, L);
      const auto mask = EdgeField::monotone(w, seed).materialize(0.55);
      const Vertex src{w.region().point(static_cast<std::int64_t>(mix64(seed) % static_cast<std::uint64_t>(w.vertex_count())))};
      const auto ref = oracle::dijkstra(mask, src, w.region());
      BfsWorkspace ws(mask);
      const Region r = w.region();
      for (std::int64_t i = 0; i < r.volume(); ++i) {
        const Vertex y{r.point(i)};
        const Distance got = chemical_distance(ws, src, y);
        const auto it = ref.find(y);
        if (it == ref.end()) {
          CHECK(got.status == Distance::Status::disconnected);
        } else {
          REQUIRE(got.finite());
          CHECK(got.value == it->second);
        }
      }
    }
  }

  TEST_CASE("geodesic is an open path of optimal length") {
    const auto w = LatticeWindow::make(2, 10, 10);
    const auto f = EdgeField::monotone(w, 8);
    const auto mask = f.materialize(0.7);
    const auto lab = label_clusters(mask);
    const Vertex a = regularize(vertex({-8, -8}), lab, 0);
    const Vertex b = regularize(vertex({8, 8}), lab, 0);
    const VertexPath g = geodesic(mask, a, b);
    CHECK(g.front() == a);
    CHECK(g.back() == b);
    CHECK(g.is_unit_step());
    CHECK(g.is_self_avoiding());
    CHECK(is_open_path(mask, g));
    CHECK(is_open_path(f, g, 0.7));
    CHECK(closed_edges_on_path(f, g, 0.7).empty());
    CHECK(g.length() == oracle::dijkstra_distance(mask, a, b, w.region()));
    // the same path under a smaller parameter loses exactly its closed edges
    std::int64_t closed = 0;
    for (const Edge& e : g.edges()) closed += !f.open(e, 0.5);
    CHECK(static_cast<std::int64_t>(closed_edges_on_path(f, g, 0.5).size()) == closed);
    CHECK(geodesic(mask, a, b).vertices == g.vertices);
  }

  TEST_CASE("cap and disconnection") {
    const auto w = LatticeWindow::make(2, 5, 5);
    const auto full = EdgeField::monotone(w, 1).materialize(1.0);
    CHECK(chemical_distance(full, vertex({0, 0}), vertex({3, 4})).value == 7);
    CHECK(chemical_distance(full, vertex({0, 0}), vertex({3, 4}), 6).status == Distance::Status::cap_exceeded);
    CHECK(chemical_distance(full, vertex({0, 0}), vertex({3, 4}), 7).value == 7);
    const auto empty = EdgeField::monotone(w, 1).materialize(0.0);
    CHECK(chemical_distance(empty, vertex({0, 0}), vertex({1, 0})).status == Distance::Status::disconnected);
    CHECK(chemical_distance(empty, vertex({2, 2}), vertex({2, 2})).value == 0);
    CHECK_THROWS_AS(geodesic(empty, vertex({0, 0}), vertex({1, 0})), NoPathError);
  }

  TEST_CASE("ties break toward the first axis") {
    const auto w = LatticeWindow::make(2, 3, 3);
    const auto full = EdgeField::monotone(w, 1).materialize(1.0);
    const VertexPath g = geodesic(full, vertex({0, 0}), vertex({1, 1}));
    REQUIRE(g.vertices.size() == 3);
    CHECK(g.length() == 2);
    CHECK((g.vertices[1] == vertex({1, 0}) || g.vertices[1] == vertex({0, 1})));
  }

  TEST_CASE("regularize picks the nearest cluster vertex") {
    const auto w = LatticeWindow::make(2, 4, 4);
    OpenMask mask(w.region(), 0.5);
    for (int x = -4; x < 4; ++x) mask.set_open(w.region().index(Coord{x, 2}), 0);
    const auto lab = label_clusters(mask);
    CHECK(lab.size(0) == 9);
    CHECK(regularize(vertex({1, 0}), lab, 0) == vertex({1, 2}));
    CHECK(regularize(vertex({1, 2}), lab, 0) == vertex({1, 2}));
    CHECK(regularize(vertex({-4, -4}), lab, 0) == vertex({-4, 2}));
  }

  TEST_CASE("path helpers") {
    VertexPath p{2, {vertex({0, 0}), vertex({1, 0}), vertex({1, 1}), vertex({0, 1}), vertex({0, 0})}};
    CHECK(p.length() == 4);
    CHECK(p.is_unit_step());
    CHECK_FALSE(p.is_self_avoiding());
    VertexPath jump{2, {vertex({0, 0}), vertex({2, 0})}};
    CHECK_FALSE(jump.is_unit_step());
    CHECK_THROWS_AS(jump.edges(), DomainError);
  }
}
