// Copyright 2026 The qyao-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>

#include "qyao/protocol.hpp"

namespace qyao::protocol {

Client::Client(const Setup& setup, ClientSecrets secrets)
    : setup_(setup), secrets_(std::move(secrets)), b_(setup.dtg.size(), -1) {
  finalize_secrets(setup_, secrets_);
}

std::vector<VertexId> Client::input_qubits(bool server_side) const {
  std::vector<VertexId> out;
  for (int w : server_side ? setup_.server_wires : setup_.client_wires)
    out.push_back(secrets_.computation[setup_.pattern.input_of(w)]);
  return out;
}

std::vector<VertexId> Client::output_computation_qubits(bool server_side) const {
  std::vector<VertexId> out;
  for (int w : server_side ? setup_.server_wires : setup_.client_wires)
    out.push_back(secrets_.computation[setup_.pattern.output_of(w)]);
  return out;
}

std::vector<VertexId> Client::output_layer() const {
  std::vector<VertexId> out;
  for (VertexId loc : setup_.pattern.dotted.outputs())
    for (VertexId q : setup_.dtg.at_location(loc)) out.push_back(q);
  return out;
}

namespace {

bool dummy_parity(const Setup& setup, const ClientSecrets& s, VertexId q) {
  bool p = false;
  for (VertexId j : setup.dtg.neighbours(q))
    if (s.dummy[j]) p ^= s.d[j] != 0;
  return p;
}

bool is_input_computation(const Setup& setup, const ClientSecrets& s, VertexId q) {
  const auto loc = setup.dtg.location(q);
  return setup.pattern.dotted.is_input(loc) && s.computation[loc] == q;
}

}  // namespace

Angle Client::effective_theta(VertexId q) const {
  return is_input_computation(setup_, secrets_, q) ? secrets_.theta[q].signed_by(secrets_.x[q]) : secrets_.theta[q];
}

DeltaRule Client::delta_rule(VertexId q) const {
  const auto loc = setup_.dtg.location(q);
  DeltaRule rule;
  rule.theta = effective_theta(q);
  rule.r = secrets_.r[q] != 0;
  if (secrets_.computation[loc] != q) return rule;

  const auto& dotted = setup_.pattern.dotted;
  const auto& deps = setup_.pattern.deps;
  rule.computation = true;
  rule.phi = setup_.pattern.phi[loc];
  if (dotted.is_input(loc)) rule.x_const = secrets_.x[q] != 0;
  for (VertexId u : dotted.neighbours(loc))
    if (dotted.is_input(u)) rule.z_const ^= secrets_.x[secrets_.computation[u]] != 0;
  for (VertexId j : deps.x[loc]) rule.x_deps.push_back(secrets_.computation[j]);
  for (VertexId j : deps.z[loc]) rule.z_deps.push_back(secrets_.computation[j]);
  return rule;
}

Angle Client::delta_for(VertexId q, std::span<const std::int8_t> b) const {
  const DeltaRule rule = delta_rule(q);
  auto s_parity = [&](const std::vector<VertexId>& set) {
    bool p = false;
    for (VertexId j : set) {
      if (b[j] < 0) throw ProtocolError("outcome of vertex " + std::to_string(j) + " needed before it is known");
      p ^= (b[j] != 0) != (secrets_.r[j] != 0);
    }
    return p;
  };
  const bool sx = rule.x_const != s_parity(rule.x_deps);
  const bool sz = rule.z_const != s_parity(rule.z_deps);
  return (rule.phi.signed_by(sx) + rule.theta).plus_pi_if(rule.r != sz);
}

Angle Client::delta(VertexId q) const { return delta_for(q, b_); }

bool Client::record_outcome(VertexId q, bool b) {
  if (b_.at(q) >= 0) throw ProtocolError("outcome of vertex " + std::to_string(q) + " reported twice");
  b_[q] = b ? 1 : 0;
  secrets_.s[q] = static_cast<std::int8_t>(b != (secrets_.r[q] != 0));
  return !(secrets_.trap[q] && b != (secrets_.r[q] != 0));
}

void Client::encrypt_server_inputs(qsim::QuantumState& st) const {
  for (VertexId q : input_qubits(true)) {
    st.apply_z_rotation(q, secrets_.theta[q]);
    if (secrets_.x[q]) st.apply(q, qsim::pauli_x());
  }
}

void Client::compensate_server_inputs(qsim::QuantumState& st) const {
  for (VertexId q : input_qubits(true))
    if (dummy_parity(setup_, secrets_, q)) st.apply(q, qsim::pauli_z());
}

void Client::prepare_qubits(qsim::QuantumState& st, const PartyInput& client_input) const {
  const auto own = input_qubits(false);
  std::vector<VertexId> joint = own;
  for (int k = 0; k < client_input.references; ++k) joint.push_back(setup_.dtg.size() + k);
  if (!joint.empty()) {
    std::vector<qsim::cplx> amps(client_input.amplitudes.data(),
                                 client_input.amplitudes.data() + client_input.amplitudes.size());
    st.prepare_joint(joint, amps);
  }
  for (VertexId q : own) {
    st.apply_z_rotation(q, secrets_.theta[q]);
    if (secrets_.x[q]) st.apply(q, qsim::pauli_x());
    if (dummy_parity(setup_, secrets_, q)) st.apply(q, qsim::pauli_z());
  }
  for (VertexId q = 0; q < setup_.dtg.size(); ++q) {
    if (is_input_computation(setup_, secrets_, q)) continue;
    if (secrets_.dummy[q]) st.prepare_dummy(q, secrets_.d[q] != 0);
    else st.prepare_plus_theta(q, secrets_.theta[q].plus_pi_if(dummy_parity(setup_, secrets_, q)));
  }
}

void Client::apply_input_keys(const KeyReveal& keys) {
  const auto expected = input_qubits(true);
  if (keys.keys.size() != expected.size()) throw ProtocolError("malformed input key map");
  for (const auto& k : keys.keys) {
    if (std::find(expected.begin(), expected.end(), k.vertex) == expected.end())
      throw ProtocolError("input key for vertex " + std::to_string(k.vertex) + " which is not a server input");
    secrets_.x[k.vertex] ^= k.mx ? 1 : 0;
    secrets_.theta[k.vertex] = secrets_.theta[k.vertex].signed_by(k.mx).plus_pi_if(k.mz);
  }
  secrets_.server_input_keys = keys.keys;
}

std::vector<VertexId> Client::measure_output_traps(qsim::QuantumState& st, std::span<const PadKey> server_keys,
                                                   Rng& physics) const {
  std::vector<VertexId> failed;
  for (VertexId loc : setup_.pattern.dotted.outputs()) {
    for (VertexId q : setup_.dtg.at_location(loc)) {
      if (secrets_.dummy[q]) {
        st.discard(q);
        continue;
      }
      if (!secrets_.trap[q]) continue;
      Angle angle = secrets_.theta[q];
      auto key = std::find_if(server_keys.begin(), server_keys.end(), [q](const PadKey& k) { return k.vertex == q; });
      if (key != server_keys.end()) angle = angle.signed_by(key->mx).plus_pi_if(key->mz);
      const bool r = secrets_.r[q] != 0;
      if (st.measure(q, angle.plus_pi_if(r), physics) != r) failed.push_back(q);
    }
  }
  return failed;
}

OutputKey Client::output_key(int wire) const {
  const VertexId loc = setup_.pattern.output_of(wire);
  const VertexId q = secrets_.computation[loc];
  const DeltaRule rule = delta_rule(q);
  OutputKey key{wire, q, rule.theta, rule.x_const, rule.z_const, {}};
  for (VertexId j : rule.x_deps) key.dependencies.push_back({j, secrets_.r[j] != 0, true});
  for (VertexId j : rule.z_deps) key.dependencies.push_back({j, secrets_.r[j] != 0, false});
  return key;
}

void decrypt_with_key(qsim::QuantumState& st, const OutputKey& key, std::span<const std::int8_t> b,
                      const PadKey* pad) {
  const VertexId q = key.vertex;
  if (pad) {
    if (pad->mx) st.apply(q, qsim::pauli_x());
    if (pad->mz) st.apply(q, qsim::pauli_z());
  }
  st.apply_z_rotation(q, -key.theta);
  bool x = key.x_frame, z = key.z_frame;
  for (const auto& dep : key.dependencies) {
    if (dep.vertex >= static_cast<VertexId>(b.size()) || b[dep.vertex] < 0)
      throw ProtocolError("missing outcome for output key dependency " + std::to_string(dep.vertex));
    const bool s = (b[dep.vertex] != 0) != dep.r;
    (dep.x_dependency ? x : z) ^= s;
  }
  if (x) st.apply(q, qsim::pauli_x());
  if (z) st.apply(q, qsim::pauli_z());
}

void Client::decrypt_own_outputs(qsim::QuantumState& st) const {
  for (int w : setup_.client_wires) decrypt_with_key(st, output_key(w), b_, nullptr);
}

}  // namespace qyao::protocol
