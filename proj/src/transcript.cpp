// Copyright 2026 The qyao-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <set>
#include <sstream>

#include "qyao/protocol.hpp"

namespace qyao::protocol {

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::injection: return "injection";
    case Phase::evaluation: return "evaluation";
    case Phase::extraction: return "extraction";
    case Phase::verdict: return "verdict";
  }
  return "?";
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

nlohmann::json keys_json(const std::vector<PadKey>& keys, bool by_wire = false) {
  auto out = nlohmann::json::array();
  for (const auto& k : keys) out.push_back({{by_wire ? "wire" : "vertex", k.vertex}, {"mx", k.mx ? 1 : 0}, {"mz", k.mz ? 1 : 0}});
  return out;
}

}  // namespace

std::string message_kind(const Message& m) {
  return std::visit(overloaded{
                        [](const QubitTransfer&) { return "QubitTransfer"; },
                        [](const AngleInstruction&) { return "AngleInstruction"; },
                        [](const OutcomeReport&) { return "OutcomeReport"; },
                        [](const KeyReveal&) { return "KeyReveal"; },
                        [](const OutputKeyReveal&) { return "OutputKeyReveal"; },
                        [](const OtmTransfer&) { return "OtmTransfer"; },
                        [](const FlagReport&) { return "FlagReport"; },
                        [](const AbortNotice&) { return "AbortNotice"; },
                        [](const AcceptNotice&) { return "AcceptNotice"; },
                    },
                    m.payload);
}

nlohmann::json to_json(const Message& m) {
  nlohmann::json j{{"phase", phase_name(m.phase)},
                   {"sender", m.sender == Party::client ? "client" : "server"},
                   {"kind", message_kind(m)}};
  std::visit(overloaded{
                 [&](const QubitTransfer& p) { j[p.by_wire ? "wires" : "qubits"] = p.qubits; },
                 [&](const AngleInstruction& p) {
                   j["vertex"] = p.vertex;
                   j["delta"] = p.delta.eighths();
                 },
                 [&](const OutcomeReport& p) {
                   j["vertex"] = p.vertex;
                   j["b"] = p.b ? 1 : 0;
                 },
                 [&](const KeyReveal& p) { j["keys"] = keys_json(p.keys, p.by_wire); },
                 [&](const OutputKeyReveal& p) {
                   auto keys = nlohmann::json::array();
                   for (const auto& k : p.keys) {
                     auto deps = nlohmann::json::array();
                     for (const auto& d : k.dependencies)
                       deps.push_back({{"vertex", d.vertex}, {"r", d.r ? 1 : 0}, {"byproduct", d.x_dependency ? "X" : "Z"}});
                     keys.push_back({{"wire", k.wire},
                                     {"vertex", k.vertex},
                                     {"theta", k.theta.eighths()},
                                     {"x_frame", k.x_frame ? 1 : 0},
                                     {"z_frame", k.z_frame ? 1 : 0},
                                     {"dependencies", deps}});
                   }
                   j["keys"] = keys;
                   j["echoed"] = keys_json(p.echoed);
                 },
                 [&](const OtmTransfer& p) {
                   j["otm_count"] = p.otm_count;
                   auto direct = nlohmann::json::array();
                   for (const auto& a : p.direct) direct.push_back({{"vertex", a.vertex}, {"delta", a.delta.eighths()}});
                   j["direct"] = direct;
                 },
                 [&](const FlagReport& p) {
                   auto flags = nlohmann::json::array();
                   for (const auto& [v, f] : p.flags) {
                     std::ostringstream hex;
                     hex << std::hex << f;
                     flags.push_back({{"vertex", v}, {"flag", hex.str()}});
                   }
                   j["flags"] = flags;
                 },
                 [&](const AbortNotice& p) {
                   j["failed_traps"] = p.failed_traps;
                   j["failed_flags"] = p.failed_flags;
                 },
                 [&](const AcceptNotice&) {},
             },
             m.payload);
  return j;
}

std::string to_jsonl(const Transcript& t) {
  std::string out;
  for (const auto& m : t.messages) out += to_json(m).dump() + "\n";
  for (const auto& r : t.rounds)
    out += nlohmann::json{{"kind", "Round"}, {"vertex", r.vertex}, {"delta", r.delta.eighths()}, {"b", r.b ? 1 : 0}}
               .dump() +
           "\n";
  out += nlohmann::json{{"kind", "Verdict"},
                        {"mode", mode_name(t.mode)},
                        {"accepted", t.verdict.accepted},
                        {"failed_traps", t.verdict.failed_traps},
                        {"failed_flags", t.verdict.failed_flags}}
             .dump() +
         "\n";
  return out;
}

std::vector<std::string> validate_transcript(const Transcript& t) {
  std::vector<std::string> problems;
  auto fail = [&](std::size_t k, const std::string& what) {
    problems.push_back("message " + std::to_string(k) + ": " + what);
  };

  Phase phase = Phase::injection;
  std::set<VertexId> instructed, reported;
  VertexId open_instruction = graph::kNoVertex;
  bool otm_seen = false, accepted = false, aborted = false;
  for (std::size_t k = 0; k < t.messages.size(); ++k) {
    const Message& m = t.messages[k];
    if (m.phase < phase) fail(k, "phase goes backwards");
    phase = m.phase;
    const bool from_client = m.sender == Party::client;
    std::visit(overloaded{
                   [&](const QubitTransfer&) {
                     if (m.phase == Phase::evaluation || m.phase == Phase::verdict) fail(k, "qubit transfer outside its phases");
                   },
                   [&](const AngleInstruction& p) {
                     if (!from_client || m.phase != Phase::evaluation) fail(k, "angle instruction out of place");
                     if (t.mode == Mode::noninteractive) fail(k, "direct angle instruction in a non-interactive run");
                     if (open_instruction != graph::kNoVertex) fail(k, "instruction before the previous outcome");
                     if (!instructed.insert(p.vertex).second) fail(k, "vertex instructed twice");
                     open_instruction = p.vertex;
                   },
                   [&](const OutcomeReport& p) {
                     if (from_client) fail(k, "outcome reported by the client");
                     if (t.mode == Mode::interactive) {
                       if (m.phase != Phase::evaluation) fail(k, "outcome outside evaluation");
                       if (p.vertex != open_instruction) fail(k, "outcome without a pending instruction");
                       open_instruction = graph::kNoVertex;
                     } else if (m.phase != Phase::extraction) {
                       fail(k, "non-interactive outcomes are reported at extraction");
                     }
                     if (!reported.insert(p.vertex).second) fail(k, "vertex reported twice");
                   },
                   [&](const KeyReveal&) {
                     if (from_client) fail(k, "pad keys revealed by the client");
                     if (m.phase != Phase::injection && m.phase != Phase::extraction) fail(k, "key reveal out of place");
                   },
                   [&](const OutputKeyReveal&) {
                     if (!from_client || !accepted) fail(k, "output keys before acceptance");
                   },
                   [&](const OtmTransfer&) {
                     if (!from_client || t.mode != Mode::noninteractive || m.phase != Phase::evaluation || otm_seen)
                       fail(k, "misplaced OTM transfer");
                     otm_seen = true;
                   },
                   [&](const FlagReport&) {
                     if (from_client || t.mode != Mode::noninteractive || m.phase != Phase::extraction)
                       fail(k, "misplaced flag report");
                   },
                   [&](const AbortNotice&) {
                     if (!from_client || m.phase != Phase::verdict || accepted || aborted) fail(k, "misplaced abort");
                     aborted = true;
                   },
                   [&](const AcceptNotice&) {
                     if (!from_client || m.phase != Phase::verdict || accepted || aborted) fail(k, "misplaced accept");
                     accepted = true;
                   },
               },
               m.payload);
  }
  if (!t.messages.empty()) {
    if (open_instruction != graph::kNoVertex) problems.push_back("instruction without outcome");
    if (accepted == aborted) problems.push_back("transcript needs exactly one verdict notice");
    if (accepted != t.verdict.accepted) problems.push_back("verdict notice disagrees with the verdict");
  }
  if (t.verdict.accepted != (t.verdict.failed_traps.empty() && t.verdict.failed_flags.empty()))
    problems.push_back("verdict inconsistent with its failures");
  std::set<VertexId> round_vertices;
  for (const auto& r : t.rounds)
    if (!round_vertices.insert(r.vertex).second) problems.push_back("round vertex repeated");
  return problems;
}

}  // namespace qyao::protocol
