// Copyright 2026 The qyao-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace qyao::graph {

using VertexId = int;
inline constexpr VertexId kNoVertex = -1;

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Position of a vertex in the layered picture. Bridges are the dotted
/// vertices that replace an edge joining two rows of the same column.
struct Site {
  int column = 0;
  int row = 0;
  bool bridge = false;
  bool operator==(const Site&) const = default;
};

struct Edge {
  VertexId a = 0;
  VertexId b = 0;
  bool operator==(const Edge&) const = default;
};

class BaseGraph {
 public:
  BaseGraph() = default;
  BaseGraph(std::vector<Site> sites, std::vector<Edge> edges, std::vector<VertexId> inputs,
            std::vector<VertexId> outputs);

  [[nodiscard]] int size() const { return static_cast<int>(sites_.size()); }
  [[nodiscard]] const std::vector<Site>& sites() const { return sites_; }
  [[nodiscard]] const Site& site(VertexId v) const { return sites_.at(v); }
  [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
  [[nodiscard]] const std::vector<VertexId>& inputs() const { return inputs_; }
  [[nodiscard]] const std::vector<VertexId>& outputs() const { return outputs_; }
  [[nodiscard]] const std::vector<VertexId>& neighbours(VertexId v) const { return adjacency_.at(v); }
  [[nodiscard]] int degree(VertexId v) const { return static_cast<int>(adjacency_.at(v).size()); }
  [[nodiscard]] int max_degree() const { return max_degree_; }
  [[nodiscard]] bool adjacent(VertexId a, VertexId b) const;
  [[nodiscard]] bool is_input(VertexId v) const { return input_flag_.at(v); }
  [[nodiscard]] bool is_output(VertexId v) const { return output_flag_.at(v); }
  [[nodiscard]] int num_columns() const;
  /// Graph distance (BFS); -1 when disconnected.
  [[nodiscard]] std::vector<int> distances_from(VertexId v) const;
  [[nodiscard]] bool connected() const;

 private:
  std::vector<Site> sites_;
  std::vector<Edge> edges_;
  std::vector<VertexId> inputs_;
  std::vector<VertexId> outputs_;
  std::vector<std::vector<VertexId>> adjacency_;
  std::vector<bool> input_flag_;
  std::vector<bool> output_flag_;
  int max_degree_ = 0;
};

/// rows x columns grid of wires; vertex (column k, row r) has id k*rows + r.
/// `verticals` lists (column, upper row) pairs joined to row+1.
BaseGraph layered_graph(int rows, int columns, std::span<const std::pair<int, int>> verticals = {});
BaseGraph path_graph(int length);

/// D(G): every edge replaced by a degree-2 vertex. Base vertices keep their
/// ids; edge e becomes vertex size()+e.
BaseGraph dotted_graph(const BaseGraph& base);

// ---------------------------------------------------------------------------
// Dotted triple-graph

enum class VertexKind : std::uint8_t { primary, added };

struct DtgVertex {
  VertexId id = 0;
  VertexKind kind = VertexKind::primary;
  /// Base vertex for primaries, base edge index for added vertices.
  int base_index = 0;
  /// 0..2 within P_v for primaries; 3*i + j (P_u[i] to P_w[j]) within A_e.
  int slot = 0;
};

/// Base-locations are numbered like the vertices of D(G): base vertex v is
/// location v, base edge e is location base.size() + e.
using LocationId = int;

class DtgGraph {
 public:
  DtgGraph() = default;
  explicit DtgGraph(BaseGraph base);

  [[nodiscard]] const BaseGraph& base() const { return base_; }
  [[nodiscard]] int size() const { return static_cast<int>(vertices_.size()); }
  [[nodiscard]] const std::vector<DtgVertex>& vertices() const { return vertices_; }
  [[nodiscard]] const DtgVertex& vertex(VertexId q) const { return vertices_.at(q); }
  [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
  [[nodiscard]] const std::vector<VertexId>& neighbours(VertexId q) const { return adjacency_.at(q); }
  [[nodiscard]] const std::vector<int>& incident_edges(VertexId q) const { return incident_.at(q); }
  [[nodiscard]] std::array<VertexId, 3> primary_set(VertexId base_vertex) const;
  [[nodiscard]] std::array<VertexId, 9> added_set(int base_edge) const;
  [[nodiscard]] LocationId location(VertexId q) const;
  [[nodiscard]] int num_locations() const { return base_.size() + static_cast<int>(base_.edges().size()); }
  [[nodiscard]] std::span<const VertexId> at_location(LocationId loc) const;
  [[nodiscard]] bool is_primary(VertexId q) const { return vertices_.at(q).kind == VertexKind::primary; }
  /// 3N(3c+1)
  [[nodiscard]] long vertex_bound() const;

 private:
  BaseGraph base_;
  std::vector<DtgVertex> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::vector<VertexId>> adjacency_;
  std::vector<std::vector<int>> incident_;
  std::vector<std::vector<VertexId>> by_location_;
};

DtgGraph dotted_triple_graph(const BaseGraph& base);

// ---------------------------------------------------------------------------
// Trap-colouring

enum class Colour : std::uint8_t { white, black, green, red, blue };

const char* colour_name(Colour c);

/// The six assignments of (computation, white, black) to the three slots of
/// a primary set, indexed 0..5.
const std::array<std::array<int, 3>, 6>& slot_permutations();

struct TrapColouring {
  std::vector<Colour> colour;
  /// Index into slot_permutations() per base vertex.
  std::vector<int> permutation;

  [[nodiscard]] Colour operator[](VertexId q) const { return colour.at(q); }
};

TrapColouring colouring_from_permutations(const DtgGraph& dtg, std::span<const int> perms);
TrapColouring sample_trap_colouring(const DtgGraph& dtg, std::mt19937_64& rng);

struct ColouringViolation {
  int condition = 0;  // 1..5 for (i)..(v), 0 for shape errors
  std::vector<VertexId> vertices;
  std::string message;
};

std::vector<ColouringViolation> validate_colouring(const DtgGraph& dtg, const TrapColouring& col);

bool is_computation(Colour c);
bool is_dummy(const DtgGraph& dtg, const TrapColouring& col, VertexId q);
bool is_trap(const DtgGraph& dtg, const TrapColouring& col, VertexId q);

/// D: red vertices, white added vertices and black primary vertices.
std::vector<VertexId> dummy_positions(const TrapColouring& col, const DtgGraph& dtg);
std::vector<VertexId> trap_positions(const TrapColouring& col, const DtgGraph& dtg);
/// Computation vertex at every location (green/blue primary, green added).
std::vector<VertexId> computation_vertices(const TrapColouring& col, const DtgGraph& dtg);

struct DummyBreakReport {
  bool computation_matches_dotted = false;
  bool white_primaries_isolated = false;
  bool black_added_isolated = false;
  int surviving_vertices = 0;
  int surviving_edges = 0;
};

/// Remove D and its edges; compare what survives with D(G) and the isolated traps.
DummyBreakReport break_at_dummies(const DtgGraph& dtg, const TrapColouring& col);

// ---------------------------------------------------------------------------
// Flow and dependencies

/// successor[v] = f(v), kNoVertex on outputs. Bridges map to themselves:
/// they are measured in the Y basis and their own stabilizer corrects them.
struct Flow {
  std::vector<VertexId> successor;
  std::vector<VertexId> order;
  std::vector<int> rank;

  [[nodiscard]] bool defined(VertexId v) const { return successor.at(v) != kNoVertex; }
  [[nodiscard]] bool precedes(VertexId a, VertexId b) const { return rank.at(a) < rank.at(b); }
};

/// Row-preserving flow f(k, l) = (k+1, l) with column-major order (bridges
/// first within a column).
Flow compute_flow(const BaseGraph& g);

/// Every violated flow condition as text; empty when the flow is valid.
std::vector<std::string> check_flow(const BaseGraph& g, const Flow& flow);

struct DependencySets {
  std::vector<std::vector<VertexId>> x;
  std::vector<std::vector<VertexId>> z;
  std::vector<std::vector<VertexId>> past;
};

DependencySets dependency_sets(const BaseGraph& g, const Flow& flow);

/// Past of q under a fixed colouring; `deps` is over D(G) (= locations).
std::vector<VertexId> past_under(const DtgGraph& dtg, const DependencySets& deps,
                                 const TrapColouring& col, VertexId q);

/// Union of the past over all colourings, by enumerating only primary sets
/// within base distance 2 of q's base-location.
std::vector<VertexId> extended_past(const DtgGraph& dtg, const DependencySets& deps, VertexId q);

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json to_json(const BaseGraph& g);
BaseGraph base_graph_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DtgGraph& dtg, const TrapColouring* col = nullptr);

}  // namespace qyao::graph
