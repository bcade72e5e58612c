// Copyright 2026 The qyao-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "qyao/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <sstream>

namespace qyao::pattern {

namespace {

bool outcome_at(std::span<const std::int8_t> s, VertexId j) {
  if (j < 0 || j >= static_cast<VertexId>(s.size()) || s[j] < 0)
    throw PatternError("missing outcome for vertex " + std::to_string(j));
  return s[j] != 0;
}

bool parity(std::span<const std::int8_t> s, const std::vector<VertexId>& set) {
  bool p = false;
  for (VertexId j : set) p ^= outcome_at(s, j);
  return p;
}

void check_vertex(VertexId i, const graph::DependencySets& deps) {
  if (i < 0 || i >= static_cast<VertexId>(deps.past.size())) throw PatternError("unknown vertex " + std::to_string(i));
}

}  // namespace

Angle corrected_angle(VertexId i, Angle phi_i, std::span<const std::int8_t> s, const graph::DependencySets& deps) {
  check_vertex(i, deps);
  return phi_i.signed_by(parity(s, deps.x[i])).plus_pi_if(parity(s, deps.z[i]));
}

Angle delta(VertexId i, Angle phi_i, Angle theta_i, bool r_i, std::span<const std::int8_t> s,
            const graph::DependencySets& deps) {
  return (corrected_angle(i, phi_i, s, deps) + theta_i).plus_pi_if(r_i);
}

Angle delta_from_influence_past(VertexId i, Angle phi_i, Angle theta_i, bool r_i, std::span<const std::int8_t> b,
                                std::span<const std::uint8_t> r, const graph::DependencySets& deps) {
  check_vertex(i, deps);
  auto s_parity = [&](const std::vector<VertexId>& set) {
    bool p = false;
    for (VertexId j : set) {
      if (j >= static_cast<VertexId>(r.size())) throw PatternError("missing r for vertex " + std::to_string(j));
      p ^= outcome_at(b, j) ^ (r[j] != 0);
    }
    return p;
  };
  const bool sx = s_parity(deps.x[i]);
  const bool sz = s_parity(deps.z[i]);
  return (phi_i.signed_by(sx) + theta_i).plus_pi_if(r_i != sz);
}

// ---------------------------------------------------------------------------

Gate parse_gate(const std::string& text) {
  // forms: "H 0", "T 1", "I 0", "CZ 0 1", "CNOT 0 1"
  std::istringstream in(text);
  std::string name;
  Gate g;
  if (!(in >> name >> g.wire)) throw PatternError("malformed gate '" + text + "'");
  std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::toupper(c); });
  if (name == "I" || name == "ID" || name == "IDENTITY") g.kind = GateKind::identity;
  else if (name == "H") g.kind = GateKind::hadamard;
  else if (name == "T") g.kind = GateKind::t;
  else if (name == "CZ") g.kind = GateKind::cz;
  else if (name == "CNOT" || name == "CX") g.kind = GateKind::cnot;
  else throw PatternError("unsupported gate '" + name + "'");
  if (g.kind == GateKind::cz || g.kind == GateKind::cnot) {
    if (!(in >> g.target)) throw PatternError("two-qubit gate '" + text + "' needs a target wire");
  }
  return g;
}

std::string gate_name(const Gate& g) {
  switch (g.kind) {
    case GateKind::identity: return "I " + std::to_string(g.wire);
    case GateKind::hadamard: return "H " + std::to_string(g.wire);
    case GateKind::t: return "T " + std::to_string(g.wire);
    case GateKind::cz: return "CZ " + std::to_string(g.wire) + " " + std::to_string(g.target);
    case GateKind::cnot: return "CNOT " + std::to_string(g.wire) + " " + std::to_string(g.target);
  }
  return "?";
}

namespace {

Step blank_step(int wires) {
  return {std::vector<Angle>(wires), std::vector<Angle>(wires), {}};
}

void check_wire(int w, int wires) {
  if (w < 0 || w >= wires) throw PatternError("wire " + std::to_string(w) + " out of range");
}

}  // namespace

Fragment compile_gate(const Gate& gate, int wires) {
  if (wires < 1) throw PatternError("a pattern needs at least one wire");
  check_wire(gate.wire, wires);
  Fragment f{wires, {}};
  switch (gate.kind) {
    case GateKind::identity:
      f.steps.push_back(blank_step(wires));
      break;
    case GateKind::hadamard: {
      // S . HSH . S
      Step a = blank_step(wires), b = blank_step(wires);
      a.vertex[gate.wire] = Angle(6);
      a.added[gate.wire] = Angle(6);
      b.vertex[gate.wire] = Angle(6);
      f.steps = {a, b};
      break;
    }
    case GateKind::t: {
      Step a = blank_step(wires);
      a.vertex[gate.wire] = Angle(7);
      f.steps = {a};
      break;
    }
    case GateKind::cz: {
      check_wire(gate.target, wires);
      if (std::abs(gate.target - gate.wire) != 1) throw PatternError("CZ acts on adjacent wires only");
      Step a = blank_step(wires);
      a.bridges.push_back(std::min(gate.wire, gate.target));
      // cancels the phase left by the Y-measured bridge
      a.vertex[gate.wire] = Angle(2);
      a.vertex[gate.target] = Angle(2);
      f.steps = {a};
      break;
    }
    case GateKind::cnot: {
      check_wire(gate.target, wires);
      const Gate h{GateKind::hadamard, gate.target, 0};
      const Gate cz{GateKind::cz, gate.wire, gate.target};
      const std::vector<Fragment> parts{compile_gate(h, wires), compile_gate(cz, wires), compile_gate(h, wires)};
      return compose_patterns(parts, wires);
    }
  }
  return f;
}

Fragment compose_patterns(std::span<const Fragment> fragments, int wires) {
  Fragment out{wires, {}};
  for (const auto& f : fragments) {
    if (f.wires != wires) throw PatternError("fragment wire count does not match");
    out.steps.insert(out.steps.end(), f.steps.begin(), f.steps.end());
  }
  return out;
}

MeasurementPattern build_pattern(const Fragment& fragment) {
  const int wires = fragment.wires;
  const int steps = static_cast<int>(fragment.steps.size());
  std::vector<std::pair<int, int>> verticals;
  for (int k = 0; k < steps; ++k) {
    const Step& st = fragment.steps[k];
    if (static_cast<int>(st.vertex.size()) != wires || static_cast<int>(st.added.size()) != wires)
      throw PatternError("step " + std::to_string(k) + " has the wrong number of wires");
    std::vector<int> rows = st.bridges;
    std::sort(rows.begin(), rows.end());
    for (std::size_t t = 0; t < rows.size(); ++t) {
      if (rows[t] < 0 || rows[t] + 1 >= wires) throw PatternError("bridge outside the wires");
      if (t > 0 && rows[t] <= rows[t - 1] + 1) throw PatternError("bridges in one step must not share a wire");
      verticals.emplace_back(k, rows[t]);
    }
  }

  MeasurementPattern p;
  p.wires = wires;
  p.base = graph::layered_graph(wires, steps + 1, verticals);
  p.dotted = graph::dotted_graph(p.base);
  p.phi.assign(p.dotted.size(), Angle::zero());
  const int n = p.base.size();
  for (int k = 0; k < steps; ++k)
    for (int w = 0; w < wires; ++w) p.phi[k * wires + w] = fragment.steps[k].vertex[w];
  for (std::size_t e = 0; e < p.base.edges().size(); ++e) {
    const auto [a, b] = p.base.edges()[e];
    const auto sa = p.base.site(a), sb = p.base.site(b);
    const VertexId loc = n + static_cast<VertexId>(e);
    if (sa.column == sb.column) p.phi[loc] = kBridgeAngle;
    else p.phi[loc] = fragment.steps[std::min(sa.column, sb.column)].added[sa.row];
  }
  p.flow = graph::compute_flow(p.dotted);
  p.deps = graph::dependency_sets(p.dotted, p.flow);
  return p;
}

MeasurementPattern single_vertex_pattern(Angle phi) {
  MeasurementPattern p;
  p.wires = 1;
  p.base = graph::BaseGraph({graph::Site{0, 0, false}}, {}, {0}, {});
  p.dotted = graph::dotted_graph(p.base);
  p.phi = {phi};
  p.flow = graph::compute_flow(p.dotted);
  p.deps = graph::dependency_sets(p.dotted, p.flow);
  return p;
}

MeasurementPattern pattern_from_graph(graph::BaseGraph base, std::vector<Angle> phi) {
  MeasurementPattern p;
  p.wires = static_cast<int>(base.inputs().size());
  if (!base.outputs().empty() && base.outputs().size() != base.inputs().size())
    throw PatternError("inputs and outputs differ in number");
  p.dotted = graph::dotted_graph(base);
  if (static_cast<int>(phi.size()) != p.dotted.size())
    throw PatternError("expected " + std::to_string(p.dotted.size()) + " angles, got " + std::to_string(phi.size()));
  for (VertexId v = 0; v < p.dotted.size(); ++v) {
    if (p.dotted.site(v).bridge && phi[v] != kBridgeAngle)
      throw PatternError("bridge vertex " + std::to_string(v) + " must be measured at pi/2");
    if (p.dotted.is_output(v) && phi[v] != Angle::zero())
      throw PatternError("output vertex " + std::to_string(v) + " carries an angle");
  }
  p.base = std::move(base);
  p.phi = std::move(phi);
  p.flow = graph::compute_flow(p.dotted);
  p.deps = graph::dependency_sets(p.dotted, p.flow);
  return p;
}

Eigen::MatrixXcd pattern_unitary(const MeasurementPattern& p) {
  const int w = p.wires;
  if (w == 0 || static_cast<int>(p.base.outputs().size()) != w) throw PatternError("pattern has no output wires");
  const int n = p.size();
  const int dim = 1 << w;
  std::vector<qsim::Qubit> qs;
  for (int k = 0; k < w; ++k) qs.push_back(p.input_of(k));
  for (int k = 0; k < w; ++k) qs.push_back(n + k);
  std::vector<qsim::cplx> choi(static_cast<std::size_t>(dim) * dim, 0.0);
  for (int i = 0; i < dim; ++i) choi[static_cast<std::size_t>(i) * dim + i] = 1.0 / std::sqrt(static_cast<double>(dim));
  qsim::QuantumState st;
  st.prepare_joint(qs, choi);
  Rng rng(0);
  simulate_pattern(p, st, rng);
  std::vector<qsim::Qubit> out;
  for (int k = 0; k < w; ++k) out.push_back(p.output_of(k));
  for (int k = 0; k < w; ++k) out.push_back(n + k);
  const Eigen::VectorXcd v = st.pure_state(out);
  Eigen::MatrixXcd u(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) u(r, c) = v(r * dim + c) * std::sqrt(static_cast<double>(dim));
  return u;
}

Eigen::MatrixXcd gate_matrix(const Gate& gate, int wires) {
  using Eigen::MatrixXcd;
  check_wire(gate.wire, wires);
  auto embed = [wires](const MatrixXcd& m, int first) {
    const int width = static_cast<int>(std::log2(static_cast<double>(m.rows())) + 0.5);
    MatrixXcd out = MatrixXcd::Identity(1, 1);
    for (int w = 0; w < wires;) {
      MatrixXcd factor;
      if (w == first) {
        factor = m;
        w += width;
      } else {
        factor = MatrixXcd::Identity(2, 2);
        ++w;
      }
      MatrixXcd next(out.rows() * factor.rows(), out.cols() * factor.cols());
      for (Eigen::Index i = 0; i < out.rows(); ++i)
        for (Eigen::Index j = 0; j < out.cols(); ++j)
          next.block(i * factor.rows(), j * factor.cols(), factor.rows(), factor.cols()) = out(i, j) * factor;
      out = std::move(next);
    }
    return out;
  };
  switch (gate.kind) {
    case GateKind::identity: return MatrixXcd::Identity(1 << wires, 1 << wires);
    case GateKind::hadamard: return embed(qsim::to_eigen(qsim::hadamard()), gate.wire);
    case GateKind::t: return embed(qsim::to_eigen(qsim::z_rotation(Angle(1))), gate.wire);
    case GateKind::cz:
    case GateKind::cnot: {
      check_wire(gate.target, wires);
      if (std::abs(gate.target - gate.wire) != 1) throw PatternError("two-qubit gates act on adjacent wires only");
      MatrixXcd m = MatrixXcd::Identity(4, 4);
      if (gate.kind == GateKind::cz) {
        m(3, 3) = -1;
      } else if (gate.wire < gate.target) {  // control is the upper factor
        m(2, 2) = 0; m(3, 3) = 0; m(2, 3) = 1; m(3, 2) = 1;
      } else {
        m(1, 1) = 0; m(3, 3) = 0; m(1, 3) = 1; m(3, 1) = 1;
      }
      return embed(m, std::min(gate.wire, gate.target));
    }
  }
  throw PatternError("unsupported gate");
}

std::vector<VertexId> dtg_measurement_order(const graph::DtgGraph& dtg, const MeasurementPattern& p, Rng& rng) {
  if (dtg.num_locations() != p.dotted.size()) throw PatternError("DT(G) does not match the pattern");
  std::vector<VertexId> order;
  for (VertexId loc : p.order()) {
    if (p.dotted.is_output(loc)) continue;
    auto members = dtg.at_location(loc);
    std::vector<VertexId> block(members.begin(), members.end());
    for (std::size_t k = block.size(); k > 1; --k) std::swap(block[k - 1], block[uniform_below(rng, k)]);
    order.insert(order.end(), block.begin(), block.end());
  }
  return order;
}

OutcomeMap simulate_pattern(const MeasurementPattern& p, qsim::QuantumState& state, Rng& rng) {
  const int n = p.size();
  for (VertexId v = 0; v < n; ++v)
    if (!p.dotted.is_input(v)) state.prepare_plus_theta(v, Angle::zero());
  // Entangle lazily: a vertex receives its edges just before it is measured.
  std::vector<bool> done(p.dotted.edges().size(), false);
  std::vector<std::vector<int>> incident(n);
  for (std::size_t k = 0; k < p.dotted.edges().size(); ++k) {
    incident[p.dotted.edges()[k].a].push_back(static_cast<int>(k));
    incident[p.dotted.edges()[k].b].push_back(static_cast<int>(k));
  }
  auto entangle = [&](VertexId v) {
    for (int k : incident[v]) {
      if (done[k]) continue;
      done[k] = true;
      state.cz(p.dotted.edges()[k].a, p.dotted.edges()[k].b);
    }
  };
  OutcomeMap s(n, -1);
  for (VertexId v : p.order()) {
    if (p.dotted.is_output(v)) continue;
    entangle(v);
    s[v] = state.measure(v, corrected_angle(v, p.phi[v], s, p.deps), rng) ? 1 : 0;
  }
  for (VertexId v = 0; v < n; ++v) entangle(v);
  for (VertexId o : p.dotted.outputs()) {
    if (parity(s, p.deps.x[o])) state.apply(o, qsim::pauli_x());
    if (parity(s, p.deps.z[o])) state.apply(o, qsim::pauli_z());
  }
  return s;
}

nlohmann::json to_json(const MeasurementPattern& p) {
  nlohmann::json j;
  j["wires"] = p.wires;
  j["graph"] = graph::to_json(p.dotted);
  std::vector<int> phi;
  for (Angle a : p.phi) phi.push_back(a.eighths());
  j["phi"] = phi;
  j["flow"] = p.flow.successor;
  j["order"] = p.flow.order;
  return j;
}

}  // namespace qyao::pattern
