// Copyright 2026 The qyao-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>

#include "qyao/otm.hpp"
#include "qyao/protocol.hpp"

namespace qyao::protocol {

void Entangler::entangle_edge(qsim::QuantumState& st, int edge) {
  if (done_.at(edge)) throw ProtocolError("edge " + std::to_string(edge) + " entangled twice");
  done_[edge] = 1;
  ++applied_;
  const auto e = dtg_.edges()[edge];
  st.cz(e.a, e.b);
}

void Entangler::entangle_around(qsim::QuantumState& st, VertexId q) {
  for (int k : dtg_.incident_edges(q))
    if (!done_[k]) entangle_edge(st, k);
}

void Entangler::finish(qsim::QuantumState& st) {
  for (int k = 0; k < static_cast<int>(done_.size()); ++k)
    if (!done_[k]) entangle_edge(st, k);
}

namespace {

void apply_server_pad(qsim::QuantumState& st, const PadKey& k) {
  if (k.mz) st.apply(k.vertex, qsim::pauli_z());
  if (k.mx) st.apply(k.vertex, qsim::pauli_x());
}

const PadKey* find_pad(const std::vector<PadKey>& pads, VertexId q) {
  auto it = std::find_if(pads.begin(), pads.end(), [q](const PadKey& k) { return k.vertex == q; });
  return it == pads.end() ? nullptr : &*it;
}

}  // namespace

RunResult run_qyao(const Setup& setup, const PartyInput& client_input, const PartyInput& server_input,
                   std::uint64_t seed, const RunOptions& options, ServerDeviation* deviation) {
  ServerDeviation honest;
  ServerDeviation* dev = deviation ? deviation : &honest;
  const auto& dtg = setup.dtg;
  const int n = dtg.size();
  if (options.mode == Mode::noninteractive && (options.flag_bits < 1 || options.flag_bits > otm::kMaxFlagBits))
    throw ProtocolError("flag length out of range");

  Rng client_rng = make_stream(seed, Stream::client);
  Rng server_rng = make_stream(seed, Stream::server);
  Rng physics = make_stream(seed, Stream::physics);
  Rng flag_rng = make_stream(seed, Stream::flags);

  // joint_input checks the input shapes
  (void)joint_input(setup, client_input, server_input);

  Client client(setup, sample_secrets(setup, client_rng));
  dev->observe_secrets(setup, client.secrets());

  RunResult result;
  Transcript& t = result.transcript;
  t.mode = options.mode;
  auto send = [&](Phase phase, Party from, Payload payload) {
    if (options.record_messages) t.messages.push_back({phase, from, std::move(payload)});
  };

  const auto server_inputs = client.input_qubits(true);
  std::vector<PadKey> input_pads;
  for (VertexId q : server_inputs) input_pads.push_back({q, random_bit(server_rng), random_bit(server_rng)});
  std::vector<PadKey> output_pads;
  for (int w : setup.server_wires)
    for (VertexId q : dtg.at_location(setup.pattern.output_of(w)))
      output_pads.push_back({q, random_bit(server_rng), random_bit(server_rng)});

  qsim::QuantumState st(options.capacity);

  // Input injection
  std::vector<VertexId> server_joint = server_inputs;
  for (int k = 0; k < server_input.references; ++k) server_joint.push_back(n + client_input.references + k);
  if (!server_joint.empty()) {
    std::vector<qsim::cplx> amps(server_input.amplitudes.data(),
                                 server_input.amplitudes.data() + server_input.amplitudes.size());
    st.prepare_joint(server_joint, amps);
  }
  if (!server_inputs.empty()) {
    dev->on_input(st, server_inputs);
    for (const auto& k : input_pads) apply_server_pad(st, k);
    send(Phase::injection, Party::server, QubitTransfer{setup.server_wires, true});
    client.encrypt_server_inputs(st);
  }
  client.prepare_qubits(st, client_input);
  client.compensate_server_inputs(st);
  {
    std::vector<VertexId> all(n);
    for (VertexId q = 0; q < n; ++q) all[q] = q;
    send(Phase::injection, Party::client, QubitTransfer{std::move(all)});
  }
  if (!server_inputs.empty()) {
    KeyReveal by_wire{input_pads, true};
    for (std::size_t k = 0; k < by_wire.keys.size(); ++k) by_wire.keys[k].vertex = setup.server_wires[k];
    send(Phase::injection, Party::server, by_wire);
    client.apply_input_keys(KeyReveal{input_pads});
  }

  // Evaluation
  Entangler entangler(dtg);
  const auto& order = client.secrets().order;
  std::vector<VertexId> failed_traps, failed_flags;
  std::vector<std::int8_t> measured(n, -1);
  std::vector<std::optional<std::uint64_t>> flags(n);
  std::unique_ptr<otm::OtmSet> otms;

  auto open_otm = [&](VertexId q) {
    const auto& ep = setup.extended_past[q];
    std::uint64_t label = 0;
    for (std::size_t k = 0; k < ep.size(); ++k)
      if (measured[ep[k]] > 0) label |= std::uint64_t{1} << k;
    label = dev->otm_label(q, ep, label);
    const otm::OtmCell cell = otms->memory[q]->read(label);
    flags[q] = dev->returned_flag(q, cell.flag, options.flag_bits);
    return cell;
  };

  if (options.mode == Mode::interactive) {
    for (VertexId q : order) {
      const Angle delta = client.delta(q);
      send(Phase::evaluation, Party::client, AngleInstruction{q, delta});
      entangler.entangle_around(st, q);
      dev->before_measure(st, q);
      const bool b = st.measure(q, delta, physics);
      measured[q] = b;
      const bool reported = dev->report_outcome(q, b);
      send(Phase::evaluation, Party::server, OutcomeReport{q, reported});
      t.rounds.push_back({q, delta, reported});
      if (!client.record_outcome(q, reported)) failed_traps.push_back(q);
    }
  } else {
    otms = std::make_unique<otm::OtmSet>(otm::prepare_otms(client, options.flag_bits, flag_rng));
    result.otm_count = otms->count();
    OtmTransfer transfer{otms->count(), {}};
    for (VertexId q : order)
      if (otms->direct[q]) transfer.direct.push_back({q, *otms->direct[q]});
    send(Phase::evaluation, Party::client, std::move(transfer));
    for (VertexId q : order) {
      Angle delta;
      if (otms->direct[q]) {
        delta = *otms->direct[q];
      } else if (otms->memory[q]) {
        const auto cell = open_otm(q);
        if (!cell.delta) throw ProtocolError("measured vertex has a flag-only token");
        delta = *cell.delta;
      } else {
        throw ProtocolError("no angle source for vertex " + std::to_string(q));
      }
      entangler.entangle_around(st, q);
      dev->before_measure(st, q);
      const bool b = st.measure(q, delta, physics);
      measured[q] = b;
      t.rounds.push_back({q, delta, b});
    }
    for (VertexId q : client.output_layer())
      if (otms->memory[q]) open_otm(q);
  }

  // Output extraction
  entangler.finish(st);
  for (const auto& k : output_pads) apply_server_pad(st, k);
  const auto layer = client.output_layer();
  dev->on_output(st, layer);
  send(Phase::extraction, Party::server, QubitTransfer{layer});
  if (options.mode == Mode::noninteractive) {
    FlagReport report;
    for (VertexId q = 0; q < n; ++q)
      if (otms->memory[q]) {
        if (!flags[q]) throw ProtocolError("missing flag for vertex " + std::to_string(q));
        report.flags.emplace_back(q, *flags[q]);
        if (*flags[q] != otms->accept[q]) failed_flags.push_back(q);
      }
    send(Phase::extraction, Party::server, std::move(report));
    for (VertexId q : order) {
      const bool reported = dev->report_outcome(q, measured[q] > 0);
      send(Phase::extraction, Party::server, OutcomeReport{q, reported});
      client.record_outcome(q, reported);
    }
  }
  const auto returned = client.output_computation_qubits(true);
  if (!returned.empty()) {
    send(Phase::extraction, Party::client, QubitTransfer{returned});
    send(Phase::extraction, Party::server, KeyReveal{output_pads});
  }
  const auto output_failures = client.measure_output_traps(st, output_pads, physics);
  failed_traps.insert(failed_traps.end(), output_failures.begin(), output_failures.end());

  Verdict& verdict = t.verdict;
  verdict.failed_traps = failed_traps;
  verdict.failed_flags = failed_flags;
  verdict.accepted = failed_traps.empty() && failed_flags.empty();

  std::vector<VertexId> final_qubits;
  for (int w = 0; w < setup.wires(); ++w)
    final_qubits.push_back(client.secrets().computation[setup.pattern.output_of(w)]);
  for (int k = 0; k < client_input.references + server_input.references; ++k) final_qubits.push_back(n + k);

  if (verdict.accepted) {
    send(Phase::verdict, Party::client, AcceptNotice{});
    client.decrypt_own_outputs(st);
    if (!setup.server_wires.empty()) {
      OutputKeyReveal reveal;
      for (int w : setup.server_wires) reveal.keys.push_back(client.output_key(w));
      reveal.echoed = output_pads;
      send(Phase::verdict, Party::client, reveal);
      for (const auto& key : reveal.keys) decrypt_with_key(st, key, client.outcomes(), find_pad(output_pads, key.vertex));
    }
    result.output = st.pure_state(final_qubits);
  } else {
    send(Phase::verdict, Party::client, AbortNotice{failed_traps, failed_flags});
    if (!returned.empty() && returned.size() <= 10) result.withheld_server_output = st.reduced_density(returned);
  }

  result.verdict = verdict;
  result.secrets = client.secrets();
  result.high_water = st.high_water();
  result.entangled_edges = entangler.applied();
  return result;
}

}  // namespace qyao::protocol
