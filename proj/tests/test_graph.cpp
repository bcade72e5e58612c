// Copyright 2026 The qyao-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <set>

#include "qyao/graph.hpp"
#include "support/oracles.hpp"

using namespace qyao::graph;

namespace {

std::vector<std::pair<int, int>> edge_pairs(const BaseGraph& g) {
  std::vector<std::pair<int, int>> out;
  for (const auto& e : g.edges()) out.emplace_back(e.a, e.b);
  return out;
}

}  // namespace

TEST_CASE("layered graph ids and edges") {
  const std::vector<std::pair<int, int>> v{{1, 0}};
  const auto g = layered_graph(2, 3, v);
  CHECK(g.size() == 6);
  // 2 rows x 2 horizontal steps + 1 vertical
  CHECK(g.edges().size() == 5);
  CHECK(g.adjacent(2, 3));
  CHECK(g.adjacent(0, 2));
  CHECK_FALSE(g.adjacent(0, 3));
  CHECK(g.inputs() == std::vector<VertexId>{0, 1});
  CHECK(g.outputs() == std::vector<VertexId>{4, 5});
  CHECK(g.max_degree() == 3);
  CHECK(g.connected());
  CHECK_THROWS_AS(layered_graph(1, 2, v), GraphError);
}

TEST_CASE("dotted graph replaces every edge") {
  const auto g = path_graph(3);
  const auto d = dotted_graph(g);
  CHECK(d.size() == 5);
  CHECK(d.edges().size() == 4);
  CHECK(d.adjacent(0, 3));
  CHECK(d.adjacent(3, 1));
  CHECK_FALSE(d.adjacent(0, 1));
  CHECK(d.site(3).column == 1);
  CHECK(d.degree(3) == 2);
}

TEST_CASE("base graph json round trip") {
  const std::vector<std::pair<int, int>> v{{0, 0}};
  const auto g = layered_graph(2, 2, v);
  const auto back = base_graph_from_json(to_json(g));
  CHECK(back.size() == g.size());
  CHECK(back.edges() == g.edges());
  CHECK(back.inputs() == g.inputs());
  CHECK(back.outputs() == g.outputs());
  CHECK(to_json(back) == to_json(g));
  CHECK_THROWS(base_graph_from_json(nlohmann::json::parse(R"({"vertices": []})")));
}

TEST_CASE("dotted triple graph layout") {
  const auto base = path_graph(2);
  const DtgGraph dtg(base);
  CHECK(dtg.size() == 3 * 2 + 9);
  CHECK(dtg.edges().size() == 18);
  CHECK(dtg.primary_set(1) == std::array<VertexId, 3>{3, 4, 5});
  for (int k = 0; k < 9; ++k) {
    const VertexId q = 6 + k;
    CHECK(dtg.vertex(q).kind == VertexKind::added);
    CHECK(dtg.neighbours(q).size() == 2);
    // added (i, j) joins slot i of vertex 0 and slot j of vertex 1
    const std::set<VertexId> want{k / 3, 3 + k % 3};
    const std::set<VertexId> got(dtg.neighbours(q).begin(), dtg.neighbours(q).end());
    CHECK(got == want);
    CHECK(dtg.location(q) == 2);
  }
  CHECK(dtg.at_location(0).size() == 3);
  CHECK(dtg.at_location(2).size() == 9);
  CHECK(dtg.vertex_bound() == 3 * 2 * (3 * 1 + 1));
}

TEST_CASE("every colouring of a small graph satisfies the colouring rules") {
  const std::vector<std::pair<int, int>> v{{0, 0}};
  const auto base = layered_graph(2, 2, v);
  const DtgGraph dtg(base);
  const int n = base.size();
  std::vector<int> perms(n, 0);
  std::vector<long> trap_hits(dtg.size(), 0);
  long total = 0;
  while (true) {
    const auto col = colouring_from_permutations(dtg, perms);
    CHECK(validate_colouring(dtg, col).empty());
    CHECK(oracle::colouring_problems(base, col.colour).empty());
    for (int q = 0; q < dtg.size(); ++q) {
      const auto p = oracle::paint(col[q]);
      CHECK(is_trap(dtg, col, q) == oracle::oracle_trap(n, q, p));
      CHECK(is_dummy(dtg, col, q) == oracle::oracle_dummy(n, q, p));
      trap_hits[q] += is_trap(dtg, col, q);
    }
    const auto comp = computation_vertices(col, dtg);
    CHECK(static_cast<int>(comp.size()) == dtg.num_locations());
    ++total;
    int k = 0;
    while (k < n && ++perms[k] == 6) perms[k++] = 0;
    if (k == n) break;
  }
  const auto pairs = edge_pairs(base);
  for (int q = 0; q < dtg.size(); ++q)
    CHECK(static_cast<double>(trap_hits[q]) / total == doctest::Approx(oracle::trap_rate(n, pairs, q)));
  CHECK(oracle::trap_rate(n, pairs, 0) == doctest::Approx(1.0 / 3));
  CHECK(oracle::trap_rate(n, pairs, 3 * n) == doctest::Approx(1.0 / 9));
}

TEST_CASE("validation rejects broken colourings") {
  const DtgGraph dtg(path_graph(2));
  const std::vector<int> perms{0, 0};
  auto col = colouring_from_permutations(dtg, perms);
  auto bad = col;
  bad.colour[0] = Colour::red;
  CHECK_FALSE(validate_colouring(dtg, bad).empty());
  CHECK_FALSE(oracle::colouring_problems(dtg.base(), bad.colour).empty());
  bad = col;
  bad.colour[6] = bad.colour[6] == Colour::red ? Colour::green : Colour::red;
  CHECK_FALSE(validate_colouring(dtg, bad).empty());
  bad = col;
  bad.colour.pop_back();
  CHECK_FALSE(validate_colouring(dtg, bad).empty());
}

TEST_CASE("breaking at dummies leaves D(G) and isolated traps") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 40; ++t) {
    const auto base = oracle::random_layered_graph(rng);
    const DtgGraph dtg(base);
    const auto col = sample_trap_colouring(dtg, rng);
    const auto rep = break_at_dummies(dtg, col);
    const auto want = oracle::break_oracle(dtg, col.colour);
    CHECK(rep.computation_matches_dotted);
    CHECK(rep.white_primaries_isolated);
    CHECK(rep.black_added_isolated);
    CHECK(want.computation_is_dotted);
    CHECK(want.traps_isolated);
    CHECK(rep.surviving_vertices == want.vertices);
    CHECK(rep.surviving_edges == want.edges);
    const int e = static_cast<int>(base.edges().size());
    CHECK(want.vertices == 2 * base.size() + 2 * e);
    CHECK(trap_positions(col, dtg).size() == static_cast<std::size_t>(base.size() + e));
    CHECK(dummy_positions(col, dtg).size() == static_cast<std::size_t>(base.size() + 7 * e));
  }
}

TEST_CASE("flow of layered graphs") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 30; ++t) {
    const auto d = dotted_graph(oracle::random_layered_graph(rng));
    const auto flow = compute_flow(d);
    CHECK(check_flow(d, flow).empty());
    for (VertexId v = 0; v < d.size(); ++v) {
      const VertexId f = flow.successor[v];
      if (d.is_output(v)) {
        CHECK(f == kNoVertex);
        continue;
      }
      if (d.site(v).bridge) {
        CHECK(f == v);
        continue;
      }
      REQUIRE(f != kNoVertex);
      CHECK(d.adjacent(v, f));
      CHECK(flow.rank[v] < flow.rank[f]);
      for (VertexId w : d.neighbours(f))
        if (w != v) CHECK(flow.rank[v] < flow.rank[w]);
    }
  }
}

TEST_CASE("check_flow reports a bad successor") {
  const auto d = dotted_graph(path_graph(3));
  auto flow = compute_flow(d);
  flow.successor[0] = 1;  // not a neighbour
  CHECK_FALSE(check_flow(d, flow).empty());
  flow = compute_flow(d);
  std::swap(flow.rank[0], flow.rank[3]);
  CHECK_FALSE(check_flow(d, flow).empty());
}

TEST_CASE("dependency sets on a path") {
  // D(path 3): 0 - 3 - 1 - 4 - 2, flow 0->3->1->4->2
  const auto d = dotted_graph(path_graph(3));
  const auto deps = dependency_sets(d, compute_flow(d));
  CHECK(deps.x[3] == std::vector<VertexId>{0});
  CHECK(deps.x[1] == std::vector<VertexId>{3});
  CHECK(deps.z[1] == std::vector<VertexId>{0});
  CHECK(deps.z[4] == std::vector<VertexId>{3});
  CHECK(deps.past[4] == std::vector<VertexId>{1, 3});
  CHECK(deps.past[0].empty());
}

TEST_CASE("extended past is the union of pasts over all colourings") {
  const std::vector<std::pair<int, int>> v{{0, 0}};
  const auto base = layered_graph(2, 2, v);
  const DtgGraph dtg(base);
  const auto d = dotted_graph(base);
  const auto deps = dependency_sets(d, compute_flow(d));
  const int n = base.size();
  std::vector<std::set<VertexId>> uni(dtg.size());
  std::vector<int> perms(n, 0);
  while (true) {
    const auto col = colouring_from_permutations(dtg, perms);
    for (int q = 0; q < dtg.size(); ++q)
      for (VertexId p : past_under(dtg, deps, col, q)) uni[q].insert(p);
    int k = 0;
    while (k < n && ++perms[k] == 6) perms[k++] = 0;
    if (k == n) break;
  }
  for (int q = 0; q < dtg.size(); ++q) {
    const auto ep = extended_past(dtg, deps, q);
    CHECK(std::set<VertexId>(ep.begin(), ep.end()) == uni[q]);
  }
}
