// Copyright 2026 The qyao-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "qyao/graph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>

#include "qyao/random.hpp"

namespace qyao::graph {

namespace {

std::string vstr(VertexId v) { return std::to_string(v); }

}  // namespace

BaseGraph::BaseGraph(std::vector<Site> sites, std::vector<Edge> edges, std::vector<VertexId> inputs,
                     std::vector<VertexId> outputs)
    : sites_(std::move(sites)), inputs_(std::move(inputs)), outputs_(std::move(outputs)) {
  const int n = size();
  if (n == 0) throw GraphError("graph has no vertices");
  adjacency_.assign(n, {});
  input_flag_.assign(n, false);
  output_flag_.assign(n, false);

  std::set<std::pair<VertexId, VertexId>> seen;
  for (Edge e : edges) {
    if (e.a < 0 || e.a >= n || e.b < 0 || e.b >= n)
      throw GraphError("edge (" + vstr(e.a) + "," + vstr(e.b) + ") references a missing vertex");
    if (e.a == e.b) throw GraphError("self-loop at vertex " + vstr(e.a));
    if (e.a > e.b) std::swap(e.a, e.b);
    if (!seen.insert({e.a, e.b}).second)
      throw GraphError("duplicate edge (" + vstr(e.a) + "," + vstr(e.b) + ")");
    edges_.push_back(e);
    adjacency_[e.a].push_back(e.b);
    adjacency_[e.b].push_back(e.a);
  }
  for (auto& adj : adjacency_) {
    std::sort(adj.begin(), adj.end());
    max_degree_ = std::max(max_degree_, static_cast<int>(adj.size()));
  }

  auto mark = [n](const std::vector<VertexId>& list, std::vector<bool>& flag, const char* what) {
    for (VertexId v : list) {
      if (v < 0 || v >= n) throw GraphError(std::string(what) + " location " + vstr(v) + " is not a vertex");
      if (flag[v]) throw GraphError(std::string("duplicate ") + what + " location " + vstr(v));
      flag[v] = true;
    }
  };
  mark(inputs_, input_flag_, "input");
  mark(outputs_, output_flag_, "output");
  if (num_columns() > 1) {
    for (VertexId v : inputs_)
      if (output_flag_[v]) throw GraphError("vertex " + vstr(v) + " is both input and output");
  }
}

bool BaseGraph::adjacent(VertexId a, VertexId b) const {
  const auto& adj = adjacency_.at(a);
  return std::binary_search(adj.begin(), adj.end(), b);
}

int BaseGraph::num_columns() const {
  int lo = sites_.front().column, hi = lo;
  for (const auto& s : sites_) {
    lo = std::min(lo, s.column);
    hi = std::max(hi, s.column);
  }
  return hi - lo + 1;
}

std::vector<int> BaseGraph::distances_from(VertexId v) const {
  std::vector<int> dist(size(), -1);
  std::deque<VertexId> queue{v};
  dist.at(v) = 0;
  while (!queue.empty()) {
    const VertexId u = queue.front();
    queue.pop_front();
    for (VertexId w : adjacency_[u]) {
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

bool BaseGraph::connected() const {
  const auto d = distances_from(0);
  return std::none_of(d.begin(), d.end(), [](int x) { return x < 0; });
}

BaseGraph layered_graph(int rows, int columns, std::span<const std::pair<int, int>> verticals) {
  if (rows < 1 || columns < 1) throw GraphError("layered graph needs at least one row and one column");
  std::vector<Site> sites;
  for (int c = 0; c < columns; ++c)
    for (int r = 0; r < rows; ++r) sites.push_back({c, r, false});
  auto id = [rows](int c, int r) { return c * rows + r; };

  std::vector<Edge> edges;
  for (int c = 0; c < columns; ++c) {
    std::vector<int> here;
    for (auto [col, row] : verticals) {
      if (col < 0 || col >= columns || row < 0 || row + 1 >= rows)
        throw GraphError("vertical edge (" + vstr(col) + "," + vstr(row) + ") outside the grid");
      if (col == c) here.push_back(row);
    }
    std::sort(here.begin(), here.end());
    for (int r : here) edges.push_back({id(c, r), id(c, r + 1)});
    if (c + 1 < columns)
      for (int r = 0; r < rows; ++r) edges.push_back({id(c, r), id(c + 1, r)});
  }
  std::vector<VertexId> in, out;
  for (int r = 0; r < rows; ++r) {
    in.push_back(id(0, r));
    out.push_back(id(columns - 1, r));
  }
  return BaseGraph(std::move(sites), std::move(edges), std::move(in), std::move(out));
}

BaseGraph path_graph(int length) { return layered_graph(1, length); }

BaseGraph dotted_graph(const BaseGraph& base) {
  const int n = base.size();
  std::vector<Site> sites;
  sites.reserve(n + base.edges().size());
  for (const auto& s : base.sites()) sites.push_back({2 * s.column, s.row, s.bridge});
  std::vector<Edge> edges;
  for (std::size_t e = 0; e < base.edges().size(); ++e) {
    const auto [a, b] = base.edges()[e];
    const Site sa = base.site(a), sb = base.site(b);
    Site mid;
    if (sa.row == sb.row && std::abs(sa.column - sb.column) == 1) {
      mid = {2 * std::min(sa.column, sb.column) + 1, sa.row, false};
    } else if (sa.column == sb.column) {
      mid = {2 * sa.column, std::min(sa.row, sb.row), true};
    } else {
      mid = {sa.column + sb.column, std::min(sa.row, sb.row), false};
    }
    const VertexId m = n + static_cast<VertexId>(e);
    sites.push_back(mid);
    edges.push_back({a, m});
    edges.push_back({m, b});
  }
  return BaseGraph(std::move(sites), std::move(edges), base.inputs(), base.outputs());
}

// ---------------------------------------------------------------------------

DtgGraph::DtgGraph(BaseGraph base) : base_(std::move(base)) {
  const int n = base_.size();
  for (int v = 0; v < n; ++v)
    for (int i = 0; i < 3; ++i) vertices_.push_back({3 * v + i, VertexKind::primary, v, i});
  for (std::size_t e = 0; e < base_.edges().size(); ++e) {
    const auto [u, w] = base_.edges()[e];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const VertexId id = static_cast<VertexId>(vertices_.size());
        vertices_.push_back({id, VertexKind::added, static_cast<int>(e), 3 * i + j});
        edges_.push_back({3 * u + i, id});
        edges_.push_back({3 * w + j, id});
      }
    }
  }
  adjacency_.assign(vertices_.size(), {});
  incident_.assign(vertices_.size(), {});
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const auto [a, b] = edges_[k];
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
    incident_[a].push_back(static_cast<int>(k));
    incident_[b].push_back(static_cast<int>(k));
  }
  by_location_.assign(num_locations(), {});
  for (const auto& v : vertices_) by_location_[location(v.id)].push_back(v.id);
}

std::array<VertexId, 3> DtgGraph::primary_set(VertexId base_vertex) const {
  if (base_vertex < 0 || base_vertex >= base_.size()) throw GraphError("no primary set for " + vstr(base_vertex));
  return {3 * base_vertex, 3 * base_vertex + 1, 3 * base_vertex + 2};
}

std::array<VertexId, 9> DtgGraph::added_set(int base_edge) const {
  if (base_edge < 0 || base_edge >= static_cast<int>(base_.edges().size()))
    throw GraphError("no added set for edge " + vstr(base_edge));
  std::array<VertexId, 9> out{};
  for (int k = 0; k < 9; ++k) out[k] = 3 * base_.size() + 9 * base_edge + k;
  return out;
}

LocationId DtgGraph::location(VertexId q) const {
  const auto& v = vertices_.at(q);
  return v.kind == VertexKind::primary ? v.base_index : base_.size() + v.base_index;
}

std::span<const VertexId> DtgGraph::at_location(LocationId loc) const { return by_location_.at(loc); }

long DtgGraph::vertex_bound() const {
  return 3L * base_.size() * (3L * base_.max_degree() + 1);
}

DtgGraph dotted_triple_graph(const BaseGraph& base) { return DtgGraph(base); }

// ---------------------------------------------------------------------------

const char* colour_name(Colour c) {
  switch (c) {
    case Colour::white: return "white";
    case Colour::black: return "black";
    case Colour::green: return "green";
    case Colour::red: return "red";
    case Colour::blue: return "blue";
  }
  return "?";
}

const std::array<std::array<int, 3>, 6>& slot_permutations() {
  // role per slot: 0 computation, 1 white, 2 black
  static const std::array<std::array<int, 3>, 6> perms{{
      {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0},
  }};
  return perms;
}

namespace {

Colour role_colour(int role, bool input) {
  switch (role) {
    case 0: return input ? Colour::blue : Colour::green;
    case 1: return Colour::white;
    default: return Colour::black;
  }
}

int comp_slot(int perm) {
  const auto& p = slot_permutations()[perm];
  return static_cast<int>(std::find(p.begin(), p.end(), 0) - p.begin());
}

Colour added_colour(Colour a, Colour b) {
  auto norm = [](Colour c) { return c == Colour::blue ? Colour::green : c; };
  return norm(a) == norm(b) ? norm(a) : Colour::red;
}

}  // namespace

bool is_computation(Colour c) { return c == Colour::green || c == Colour::blue; }

TrapColouring colouring_from_permutations(const DtgGraph& dtg, std::span<const int> perms) {
  const auto& base = dtg.base();
  if (static_cast<int>(perms.size()) != base.size()) throw GraphError("one permutation per base vertex required");
  TrapColouring col;
  col.permutation.assign(perms.begin(), perms.end());
  col.colour.assign(dtg.size(), Colour::red);
  for (int v = 0; v < base.size(); ++v) {
    if (perms[v] < 0 || perms[v] >= 6) throw GraphError("permutation index out of range");
    const auto set = dtg.primary_set(v);
    for (int i = 0; i < 3; ++i) col.colour[set[i]] = role_colour(slot_permutations()[perms[v]][i], base.is_input(v));
  }
  for (std::size_t e = 0; e < base.edges().size(); ++e) {
    const auto [u, w] = base.edges()[e];
    const auto pu = dtg.primary_set(u), pw = dtg.primary_set(w);
    const auto added = dtg.added_set(static_cast<int>(e));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) col.colour[added[3 * i + j]] = added_colour(col.colour[pu[i]], col.colour[pw[j]]);
  }
  return col;
}

TrapColouring sample_trap_colouring(const DtgGraph& dtg, std::mt19937_64& rng) {
  std::vector<int> perms(dtg.base().size());
  for (auto& p : perms) p = static_cast<int>(uniform_below(rng, 6));
  return colouring_from_permutations(dtg, perms);
}

std::vector<ColouringViolation> validate_colouring(const DtgGraph& dtg, const TrapColouring& col) {
  std::vector<ColouringViolation> out;
  if (static_cast<int>(col.colour.size()) != dtg.size()) {
    out.push_back({0, {}, "colouring size does not match the graph"});
    return out;
  }
  const auto& base = dtg.base();
  for (int v = 0; v < base.size(); ++v) {
    const auto set = dtg.primary_set(v);
    int comp = 0, white = 0, black = 0;
    for (VertexId q : set) {
      const Colour c = col[q];
      if (c == Colour::red) out.push_back({1, {q}, "primary vertex coloured red"});
      if (c == Colour::blue && !base.is_input(v)) out.push_back({5, {q}, "blue outside an input base-location"});
      if (c == Colour::green && base.is_input(v)) out.push_back({5, {q}, "green at an input base-location"});
      comp += is_computation(c);
      white += c == Colour::white;
      black += c == Colour::black;
    }
    if (comp != 1 || white != 1 || black != 1)
      out.push_back({3, {set.begin(), set.end()}, "primary set needs exactly one vertex of each colour"});
  }
  for (std::size_t e = 0; e < base.edges().size(); ++e) {
    const auto [u, w] = base.edges()[e];
    const auto pu = dtg.primary_set(u), pw = dtg.primary_set(w);
    const auto added = dtg.added_set(static_cast<int>(e));
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const VertexId q = added[3 * i + j];
        if (col[q] == Colour::blue) {
          out.push_back({2, {q}, "added vertex coloured blue"});
          continue;
        }
        if (col[q] != added_colour(col[pu[i]], col[pw[j]]))
          out.push_back({4, {q, pu[i], pw[j]}, "added colour inconsistent with its primaries"});
      }
    }
  }
  return out;
}

bool is_dummy(const DtgGraph& dtg, const TrapColouring& col, VertexId q) {
  const Colour c = col[q];
  if (c == Colour::red) return true;
  return dtg.is_primary(q) ? c == Colour::black : c == Colour::white;
}

bool is_trap(const DtgGraph& dtg, const TrapColouring& col, VertexId q) {
  const Colour c = col[q];
  return dtg.is_primary(q) ? c == Colour::white : c == Colour::black;
}

std::vector<VertexId> dummy_positions(const TrapColouring& col, const DtgGraph& dtg) {
  if (!validate_colouring(dtg, col).empty()) throw GraphError("invalid trap-colouring");
  std::vector<VertexId> out;
  for (VertexId q = 0; q < dtg.size(); ++q)
    if (is_dummy(dtg, col, q)) out.push_back(q);
  return out;
}

std::vector<VertexId> trap_positions(const TrapColouring& col, const DtgGraph& dtg) {
  std::vector<VertexId> out;
  for (VertexId q = 0; q < dtg.size(); ++q)
    if (is_trap(dtg, col, q)) out.push_back(q);
  return out;
}

std::vector<VertexId> computation_vertices(const TrapColouring& col, const DtgGraph& dtg) {
  std::vector<VertexId> out(dtg.num_locations(), kNoVertex);
  for (VertexId q = 0; q < dtg.size(); ++q)
    if (is_computation(col[q])) out[dtg.location(q)] = q;
  return out;
}

DummyBreakReport break_at_dummies(const DtgGraph& dtg, const TrapColouring& col) {
  DummyBreakReport rep;
  const auto dummies = dummy_positions(col, dtg);
  std::vector<bool> gone(dtg.size(), false);
  for (VertexId q : dummies) gone[q] = true;
  std::vector<int> surviving_degree(dtg.size(), 0);
  std::set<std::pair<VertexId, VertexId>> surviving;
  for (const auto& e : dtg.edges()) {
    if (gone[e.a] || gone[e.b]) continue;
    surviving.insert({std::min(e.a, e.b), std::max(e.a, e.b)});
    ++surviving_degree[e.a];
    ++surviving_degree[e.b];
  }
  rep.surviving_edges = static_cast<int>(surviving.size());
  rep.surviving_vertices = dtg.size() - static_cast<int>(dummies.size());

  const auto comp = computation_vertices(col, dtg);
  const BaseGraph dotted = dotted_graph(dtg.base());
  bool iso = std::none_of(comp.begin(), comp.end(), [](VertexId q) { return q == kNoVertex; });
  if (iso) {
    for (const auto& e : dotted.edges()) {
      const VertexId a = comp[e.a], b = comp[e.b];
      if (!surviving.count({std::min(a, b), std::max(a, b)})) iso = false;
    }
    iso = iso && surviving.size() == dotted.edges().size();
  }
  rep.computation_matches_dotted = iso;

  rep.white_primaries_isolated = true;
  rep.black_added_isolated = true;
  for (VertexId q = 0; q < dtg.size(); ++q) {
    if (!is_trap(dtg, col, q)) continue;
    if (surviving_degree[q] != 0) {
      if (dtg.is_primary(q)) rep.white_primaries_isolated = false;
      else rep.black_added_isolated = false;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

Flow compute_flow(const BaseGraph& g) {
  const int n = g.size();
  int last_column = g.sites().front().column;
  for (const auto& s : g.sites()) last_column = std::max(last_column, s.column);

  Flow flow;
  flow.successor.assign(n, kNoVertex);
  for (VertexId v = 0; v < n; ++v) {
    if (g.is_output(v)) continue;
    const Site s = g.site(v);
    if (s.bridge) {
      if (g.degree(v) != 2) throw GraphError("bridge " + vstr(v) + " must join exactly two rows");
      flow.successor[v] = v;
      continue;
    }
    VertexId next = kNoVertex;
    for (VertexId u : g.neighbours(v)) {
      const Site t = g.site(u);
      if (!t.bridge && t.row == s.row && t.column == s.column + 1) {
        if (next != kNoVertex) throw GraphError("vertex " + vstr(v) + " has two row successors");
        next = u;
      }
    }
    if (next == kNoVertex && s.column != last_column)
      throw GraphError("vertex " + vstr(v) + " has no row successor: graph is not layered");
    flow.successor[v] = next;
  }

  flow.order.resize(n);
  std::iota(flow.order.begin(), flow.order.end(), 0);
  std::stable_sort(flow.order.begin(), flow.order.end(), [&](VertexId a, VertexId b) {
    const Site sa = g.site(a), sb = g.site(b);
    if (sa.column != sb.column) return sa.column < sb.column;
    if (sa.bridge != sb.bridge) return sa.bridge;
    return sa.row < sb.row;
  });
  flow.rank.assign(n, 0);
  for (int k = 0; k < n; ++k) flow.rank[flow.order[k]] = k;

  if (auto problems = check_flow(g, flow); !problems.empty()) throw GraphError("invalid flow: " + problems.front());
  return flow;
}

std::vector<std::string> check_flow(const BaseGraph& g, const Flow& flow) {
  std::vector<std::string> out;
  const int n = g.size();
  if (static_cast<int>(flow.successor.size()) != n || static_cast<int>(flow.rank.size()) != n ||
      static_cast<int>(flow.order.size()) != n) {
    out.push_back("flow arrays do not match the graph size");
    return out;
  }
  std::vector<int> hits(n, 0);
  for (VertexId i = 0; i < n; ++i) {
    const VertexId f = flow.successor[i];
    if (f == kNoVertex) continue;
    if (g.is_output(i)) out.push_back("output " + vstr(i) + " has a successor");
    if (f == i) {
      if (!g.site(i).bridge) out.push_back("vertex " + vstr(i) + " maps to itself but is not a bridge");
      for (VertexId j : g.neighbours(i))
        if (!flow.precedes(i, j)) out.push_back("bridge " + vstr(i) + " must precede neighbour " + vstr(j));
      continue;
    }
    ++hits[f];
    if (!g.adjacent(i, f)) out.push_back("f(" + vstr(i) + ") is not a neighbour");
    if (g.is_input(f)) out.push_back("f(" + vstr(i) + ") is an input");
    if (!flow.precedes(i, f)) out.push_back(vstr(i) + " does not precede f(" + vstr(i) + ")");
    for (VertexId j : g.neighbours(f))
      if (j != i && !flow.precedes(i, j))
        out.push_back(vstr(i) + " must precede " + vstr(j) + ", a neighbour of f(" + vstr(i) + ")");
  }
  for (VertexId v = 0; v < n; ++v)
    if (hits[v] > 1) out.push_back("flow is not injective at " + vstr(v));
  return out;
}

DependencySets dependency_sets(const BaseGraph& g, const Flow& flow) {
  const int n = g.size();
  DependencySets deps;
  deps.x.assign(n, {});
  deps.z.assign(n, {});
  deps.past.assign(n, {});
  for (VertexId j = 0; j < n; ++j) {
    const VertexId f = flow.successor.at(j);
    if (f == kNoVertex) continue;
    if (f != j) deps.x[f].push_back(j);
    for (VertexId i : g.neighbours(f))
      if (i != j) deps.z[i].push_back(j);
  }
  for (VertexId i = 0; i < n; ++i) {
    std::sort(deps.x[i].begin(), deps.x[i].end());
    std::sort(deps.z[i].begin(), deps.z[i].end());
    std::set_union(deps.x[i].begin(), deps.x[i].end(), deps.z[i].begin(), deps.z[i].end(),
                   std::back_inserter(deps.past[i]));
  }
  return deps;
}

namespace {

// Endpoint base vertices of a location.
std::vector<VertexId> location_endpoints(const DtgGraph& dtg, LocationId loc) {
  const int n = dtg.base().size();
  if (loc < n) return {loc};
  const auto e = dtg.base().edges().at(loc - n);
  return {e.a, e.b};
}

VertexId computation_vertex_at(const DtgGraph& dtg, std::span<const int> perms, LocationId loc) {
  const int n = dtg.base().size();
  if (loc < n) return dtg.primary_set(loc)[comp_slot(perms[loc])];
  const int e = loc - n;
  const auto [u, w] = dtg.base().edges()[e];
  return dtg.added_set(e)[3 * comp_slot(perms[u]) + comp_slot(perms[w])];
}

}  // namespace

std::vector<VertexId> past_under(const DtgGraph& dtg, const DependencySets& deps, const TrapColouring& col,
                                 VertexId q) {
  if (!is_computation(col[q])) return {};
  std::vector<VertexId> out;
  for (LocationId loc : deps.past.at(dtg.location(q))) out.push_back(computation_vertex_at(dtg, col.permutation, loc));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<VertexId> extended_past(const DtgGraph& dtg, const DependencySets& deps, VertexId q) {
  const LocationId home = dtg.location(q);
  const auto& past_locs = deps.past.at(home);
  if (past_locs.empty()) return {};

  // Base vertices whose permutation can change Past(q).
  std::vector<VertexId> relevant = location_endpoints(dtg, home);
  for (LocationId loc : past_locs)
    for (VertexId v : location_endpoints(dtg, loc)) relevant.push_back(v);
  std::sort(relevant.begin(), relevant.end());
  relevant.erase(std::unique(relevant.begin(), relevant.end()), relevant.end());

  const auto& base = dtg.base();
  std::vector<int> reach(base.size(), -1);
  for (VertexId v : location_endpoints(dtg, home)) {
    const auto d = base.distances_from(v);
    for (int k = 0; k < base.size(); ++k)
      if (d[k] >= 0 && (reach[k] < 0 || d[k] < reach[k])) reach[k] = d[k];
  }
  for (VertexId v : relevant)
    if (reach[v] < 0 || reach[v] > 2) throw GraphError("dependency of " + vstr(q) + " lies beyond distance 2");

  std::vector<int> perms(base.size(), 0);
  std::set<VertexId> ep;
  const auto home_ends = location_endpoints(dtg, home);
  const DtgVertex& hv = dtg.vertex(q);
  std::vector<int> digits(relevant.size(), 0);
  while (true) {
    for (std::size_t k = 0; k < relevant.size(); ++k) perms[relevant[k]] = digits[k];
    // q is computation iff it sits in the computation slot(s) of its location.
    bool comp;
    if (hv.kind == VertexKind::primary) {
      comp = comp_slot(perms[hv.base_index]) == hv.slot;
    } else {
      comp = 3 * comp_slot(perms[home_ends[0]]) + comp_slot(perms[home_ends[1]]) == hv.slot;
    }
    if (comp)
      for (LocationId loc : past_locs) ep.insert(computation_vertex_at(dtg, perms, loc));
    std::size_t k = 0;
    while (k < digits.size() && ++digits[k] == 6) digits[k++] = 0;
    if (k == digits.size()) break;
  }
  return {ep.begin(), ep.end()};
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const BaseGraph& g) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (VertexId v = 0; v < g.size(); ++v) {
    const Site s = g.site(v);
    j["vertices"].push_back({{"id", v}, {"column", s.column}, {"row", s.row}, {"bridge", s.bridge}});
  }
  j["edges"] = nlohmann::json::array();
  for (const auto& e : g.edges()) j["edges"].push_back({e.a, e.b});
  j["inputs"] = g.inputs();
  j["outputs"] = g.outputs();
  return j;
}

BaseGraph base_graph_from_json(const nlohmann::json& j) {
  try {
    std::vector<Site> sites;
    const auto& verts = j.at("vertices");
    sites.resize(verts.size());
    std::vector<bool> filled(verts.size(), false);
    for (const auto& v : verts) {
      const int id = v.at("id").get<int>();
      if (id < 0 || id >= static_cast<int>(verts.size()) || filled[id])
        throw GraphError("vertex ids must be 0..n-1 without repeats");
      filled[id] = true;
      sites[id] = {v.value("column", 0), v.value("row", 0), v.value("bridge", false)};
    }
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
    return BaseGraph(std::move(sites), std::move(edges), j.value("inputs", std::vector<VertexId>{}),
                     j.value("outputs", std::vector<VertexId>{}));
  } catch (const nlohmann::json::exception& e) {
    throw GraphError(std::string("malformed graph description: ") + e.what());
  }
}

nlohmann::json to_json(const DtgGraph& dtg, const TrapColouring* col) {
  nlohmann::json j;
  j["base"] = to_json(dtg.base());
  j["vertices"] = nlohmann::json::array();
  for (const auto& v : dtg.vertices()) {
    nlohmann::json rec{{"id", v.id},
                       {"kind", v.kind == VertexKind::primary ? "primary" : "added"},
                       {"location", dtg.location(v.id)},
                       {"slot", v.slot}};
    if (v.kind == VertexKind::primary) rec["base_vertex"] = v.base_index;
    else rec["base_edge"] = v.base_index;
    if (col) rec["colour"] = colour_name((*col)[v.id]);
    j["vertices"].push_back(std::move(rec));
  }
  j["edges"] = nlohmann::json::array();
  for (const auto& e : dtg.edges()) j["edges"].push_back({e.a, e.b});
  return j;
}

}  // namespace qyao::graph
