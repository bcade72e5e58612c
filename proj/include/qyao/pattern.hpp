// Copyright 2026 The qyao-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "qyao/angle.hpp"
#include "qyao/graph.hpp"
#include "qyao/qsim.hpp"
#include "qyao/random.hpp"

namespace qyao::pattern {

using graph::VertexId;

class PatternError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Outcome bits per vertex; -1 where no outcome is known yet.
using OutcomeMap = std::vector<std::int8_t>;

/// A measurement pattern on the dotted base-graph D(G).
struct MeasurementPattern {
  int wires = 0;
  graph::BaseGraph base;    // G
  graph::BaseGraph dotted;  // D(G); vertex ids are base-locations
  std::vector<Angle> phi;   // per D(G) vertex; zero on outputs
  graph::Flow flow;
  graph::DependencySets deps;

  [[nodiscard]] const std::vector<VertexId>& order() const { return flow.order; }
  [[nodiscard]] int size() const { return dotted.size(); }
  /// Input location of wire w (row w of column 0).
  [[nodiscard]] VertexId input_of(int wire) const { return base.inputs().at(wire); }
  [[nodiscard]] VertexId output_of(int wire) const { return base.outputs().at(wire); }
};

/// phi'_i = (-1)^{s_X} phi_i + pi s_Z.
Angle corrected_angle(VertexId i, Angle phi_i, std::span<const std::int8_t> s, const graph::DependencySets& deps);

/// delta_i = phi'_i + theta_i + pi r_i.
Angle delta(VertexId i, Angle phi_i, Angle theta_i, bool r_i, std::span<const std::int8_t> s,
            const graph::DependencySets& deps);

/// The same angle written over raw outcomes b_j of the influence past:
/// (-1)^{s^X} phi + theta + pi (r_i xor s^Z) with s_j = b_j xor r_j.
/// Entries of `b` outside the past are ignored.
Angle delta_from_influence_past(VertexId i, Angle phi_i, Angle theta_i, bool r_i, std::span<const std::int8_t> b,
                                std::span<const std::uint8_t> r, const graph::DependencySets& deps);

// ---------------------------------------------------------------------------
// Gate compilation

enum class GateKind : std::uint8_t { identity, hadamard, t, cz, cnot };

struct Gate {
  GateKind kind = GateKind::identity;
  int wire = 0;    // target (single-qubit) or control
  int target = 1;  // second wire of two-qubit gates; must be wire +- 1
};

/// One base column step: each wire is measured at its base vertex and then at
/// the horizontal added vertex that follows it. Bridges join row b to b+1 in
/// the step's first column.
struct Step {
  std::vector<Angle> vertex;
  std::vector<Angle> added;
  std::vector<int> bridges;
};

struct Fragment {
  int wires = 1;
  std::vector<Step> steps;
};

inline constexpr Angle kBridgeAngle = Angle::half_pi();

Gate parse_gate(const std::string& text);
std::string gate_name(const Gate& g);
Fragment compile_gate(const Gate& gate, int wires);
Fragment compose_patterns(std::span<const Fragment> fragments, int wires);
MeasurementPattern build_pattern(const Fragment& fragment);

/// One-vertex pattern: an input that is measured at `phi` with no output.
MeasurementPattern single_vertex_pattern(Angle phi);

/// Pattern on an arbitrary base graph; `phi` has one entry per D(G) vertex.
/// Bridges must carry kBridgeAngle and outputs zero.
MeasurementPattern pattern_from_graph(graph::BaseGraph base, std::vector<Angle> phi);

/// Unitary implemented by the pattern (global phase fixed arbitrarily), read
/// off the Choi state of a noiseless simulation.
Eigen::MatrixXcd pattern_unitary(const MeasurementPattern& p);

/// Unitary of a gate on `wires` qubits, wire 0 the most significant factor.
Eigen::MatrixXcd gate_matrix(const Gate& gate, int wires);

/// Measurement order of DT(G): locations follow the base flow, the members of
/// each P_v / A_e appear in a uniformly random order. Output locations are
/// not part of the measured order.
std::vector<VertexId> dtg_measurement_order(const graph::DtgGraph& dtg, const MeasurementPattern& p, Rng& rng);

/// Runs the plain pattern on `state`: D(G) vertex v is qubit v, inputs must
/// already be prepared. Applies the output byproduct corrections; returns the
/// outcome map.
OutcomeMap simulate_pattern(const MeasurementPattern& p, qsim::QuantumState& state, Rng& rng);

nlohmann::json to_json(const MeasurementPattern& p);

}  // namespace qyao::pattern
