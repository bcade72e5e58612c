// Copyright 2026 The qyao-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "qyao/angle.hpp"
#include "qyao/graph.hpp"
#include "qyao/pattern.hpp"
#include "qyao/qsim.hpp"
#include "qyao/random.hpp"

namespace qyao::protocol {

using graph::VertexId;

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode : std::uint8_t { interactive, noninteractive };
const char* mode_name(Mode m);
Mode parse_mode(const std::string& text);

/// Public data both parties agree on: the pattern, its DT(G), which wires
/// carry whose input/output, and the extended pasts.
struct Setup {
  pattern::MeasurementPattern pattern;
  graph::DtgGraph dtg;
  std::vector<int> client_wires;
  std::vector<int> server_wires;
  /// owner[w]: 0 client, 1 server
  std::vector<std::uint8_t> server_owned;
  /// EP per DT(G) vertex, sorted
  std::vector<std::vector<VertexId>> extended_past;

  [[nodiscard]] int wires() const { return pattern.wires; }
  [[nodiscard]] bool is_output_location(graph::LocationId loc) const { return pattern.dotted.is_output(loc); }
};

Setup make_setup(pattern::MeasurementPattern p, std::vector<int> client_wires, std::vector<int> server_wires);

/// Pure input of one party: amplitudes over (its wires in listed order, then
/// `references` purifying qubits), first factor most significant.
struct PartyInput {
  Eigen::VectorXcd amplitudes = Eigen::VectorXcd::Ones(1);
  int references = 0;
};

/// Product of single-wire states given by name: "0", "1", "+", "-", "+i", "-i", "t" (a generic state)
/// or "angle:k" for |+_{k pi/4}>.
PartyInput named_input(std::span<const std::string> names);
/// Each wire maximally entangled with its own reference qubit.
PartyInput entangled_input(int wires);

/// Joint input in canonical order: wires 0..W-1, client references, server references.
Eigen::VectorXcd joint_input(const Setup& setup, const PartyInput& client, const PartyInput& server);
/// (U on the wires) applied to a canonical joint vector.
Eigen::VectorXcd apply_on_wires(const Eigen::MatrixXcd& u, const Eigen::VectorXcd& joint, int wires);

// ---------------------------------------------------------------------------
// Secrets

struct PadKey {
  VertexId vertex = 0;
  bool mx = false;
  bool mz = false;
};

struct ClientSecrets {
  graph::TrapColouring colouring;
  std::vector<Angle> theta;
  std::vector<std::uint8_t> r;
  std::vector<std::uint8_t> d;
  std::vector<std::uint8_t> x;
  std::vector<VertexId> order;
  /// s_i = b_i xor r_i once known, -1 before
  std::vector<std::int8_t> s;
  std::vector<PadKey> server_input_keys;

  // derived from the colouring
  std::vector<VertexId> computation;  // per location
  std::vector<std::uint8_t> dummy;
  std::vector<std::uint8_t> trap;
};

/// Draws colouring, theta, r, d, x and the measurement order, in that order.
ClientSecrets sample_secrets(const Setup& setup, Rng& rng);
/// Fills the derived fields from colouring; checks sizes.
void finalize_secrets(const Setup& setup, ClientSecrets& secrets);

// ---------------------------------------------------------------------------
// Messages and transcript

enum class Phase : std::uint8_t { injection, evaluation, extraction, verdict };
enum class Party : std::uint8_t { client, server };
const char* phase_name(Phase p);

/// Qubits named by DT(G) vertex, or by wire for the server's inputs (their
/// placement is the client's secret).
struct QubitTransfer {
  std::vector<VertexId> qubits;
  bool by_wire = false;
};
struct AngleInstruction {
  VertexId vertex = 0;
  Angle delta;
};
struct OutcomeReport {
  VertexId vertex = 0;
  bool b = false;
};
struct KeyReveal {
  std::vector<PadKey> keys;
  bool by_wire = false;  // PadKey::vertex holds a wire index
};
struct DependencyKey {
  VertexId vertex = 0;
  bool r = false;
  bool x_dependency = false;  // X byproduct if set, Z otherwise
};
struct OutputKey {
  int wire = 0;
  VertexId vertex = 0;
  Angle theta;
  bool x_frame = false;  // input pads entering the byproduct
  bool z_frame = false;
  std::vector<DependencyKey> dependencies;
};
struct OutputKeyReveal {
  std::vector<OutputKey> keys;
  std::vector<PadKey> echoed;
};
struct OtmTransfer {
  int otm_count = 0;
  std::vector<AngleInstruction> direct;
};
struct FlagReport {
  std::vector<std::pair<VertexId, std::uint64_t>> flags;
};
struct AbortNotice {
  std::vector<VertexId> failed_traps;
  std::vector<VertexId> failed_flags;
};
struct AcceptNotice {};

using Payload = std::variant<QubitTransfer, AngleInstruction, OutcomeReport, KeyReveal, OutputKeyReveal, OtmTransfer,
                             FlagReport, AbortNotice, AcceptNotice>;

struct Message {
  Phase phase = Phase::injection;
  Party sender = Party::client;
  Payload payload;
};

std::string message_kind(const Message& m);

struct Round {
  VertexId vertex = 0;
  Angle delta;
  bool b = false;
  bool operator==(const Round&) const = default;
};

struct Verdict {
  bool accepted = false;
  std::vector<VertexId> failed_traps;
  std::vector<VertexId> failed_flags;
};

struct Transcript {
  Mode mode = Mode::interactive;
  std::vector<Message> messages;
  std::vector<Round> rounds;
  Verdict verdict;
};

/// Phase grammar and request/response ordering; empty when well formed.
std::vector<std::string> validate_transcript(const Transcript& t);
nlohmann::json to_json(const Message& m);
/// One JSON record per line.
std::string to_jsonl(const Transcript& t);

// ---------------------------------------------------------------------------
// Server deviations

/// Hooks a malicious server may use. The default implementation is honest.
class ServerDeviation {
 public:
  virtual ~ServerDeviation() = default;
  /// Test harness only: sees the client's secrets before the run.
  virtual void observe_secrets(const Setup&, const ClientSecrets&) {}
  /// Acts on the server's input qubits (wire order) before padding.
  virtual void on_input(qsim::QuantumState&, std::span<const VertexId>) {}
  virtual void before_measure(qsim::QuantumState&, VertexId) {}
  virtual bool report_outcome(VertexId, bool b) { return b; }
  /// Label used to open the OTM of `owner`; bit k of `honest` is b_{ep[k]}.
  virtual std::uint64_t otm_label(VertexId /*owner*/, std::span<const VertexId> /*ep*/, std::uint64_t honest) {
    return honest;
  }
  /// Flag handed back for the OTM of `owner`.
  virtual std::uint64_t returned_flag(VertexId /*owner*/, std::uint64_t obtained, int /*flag_bits*/) {
    return obtained;
  }
  /// Acts on the output-layer qubits just before they go back to the client.
  virtual void on_output(qsim::QuantumState&, std::span<const VertexId>) {}
};

// ---------------------------------------------------------------------------
// Parties

/// Everything the client needs to compute delta_q from raw outcomes:
/// delta = (-1)^{x_const ^ s(x_deps)} phi + theta + pi (r ^ z_const ^ s(z_deps)),
/// with phi = 0 and no dependencies for traps and dummies.
struct DeltaRule {
  bool computation = false;
  Angle phi;
  Angle theta;
  bool r = false;
  bool x_const = false;
  bool z_const = false;
  std::vector<VertexId> x_deps;
  std::vector<VertexId> z_deps;
};

/// Client side of the protocol. Holds the secrets and the outcomes received.
class Client {
 public:
  Client(const Setup& setup, ClientSecrets secrets);

  [[nodiscard]] const ClientSecrets& secrets() const { return secrets_; }
  [[nodiscard]] const Setup& setup() const { return setup_; }

  /// Rotates the returned server inputs by X^{x'} Z(theta').
  void encrypt_server_inputs(qsim::QuantumState& st) const;
  /// Prepares every DT(G) qubit except the server inputs (already present).
  void prepare_qubits(qsim::QuantumState& st, const PartyInput& client_input) const;
  /// Dummy compensation for the server input qubits.
  void compensate_server_inputs(qsim::QuantumState& st) const;
  /// x := x' xor m_x, theta := (-1)^{m_x} theta' + pi m_z.
  void apply_input_keys(const KeyReveal& keys);

  /// delta of `q` from the outcomes recorded so far.
  [[nodiscard]] Angle delta(VertexId q) const;
  /// delta of `q` when the outcomes of the past come from `b` (per vertex).
  [[nodiscard]] Angle delta_for(VertexId q, std::span<const std::int8_t> b) const;
  [[nodiscard]] DeltaRule delta_rule(VertexId q) const;
  /// Outcomes as reported to the client, -1 where unknown.
  [[nodiscard]] const std::vector<std::int8_t>& outcomes() const { return b_; }
  /// Records b_q and s_q; returns false when q is a trap and b_q != r_q.
  bool record_outcome(VertexId q, bool b);

  /// Traps at output locations: measured by the client with the server's keys where needed.
  std::vector<VertexId> measure_output_traps(qsim::QuantumState& st, std::span<const PadKey> server_keys,
                                             Rng& physics) const;
  [[nodiscard]] OutputKey output_key(int wire) const;
  void decrypt_own_outputs(qsim::QuantumState& st) const;

  [[nodiscard]] std::vector<VertexId> output_computation_qubits(bool server_side) const;
  [[nodiscard]] std::vector<VertexId> output_layer() const;
  [[nodiscard]] std::vector<VertexId> input_qubits(bool server_side) const;

 private:
  [[nodiscard]] bool frame_x(graph::LocationId loc, std::span<const std::int8_t> b) const;
  [[nodiscard]] bool frame_z(graph::LocationId loc, std::span<const std::int8_t> b) const;
  [[nodiscard]] Angle effective_theta(VertexId q) const;

  const Setup& setup_;
  ClientSecrets secrets_;
  std::vector<std::int8_t> b_;
};

/// Server-side record of which DT(G) edges have been entangled.
class Entangler {
 public:
  explicit Entangler(const graph::DtgGraph& dtg) : dtg_(dtg), done_(dtg.edges().size(), 0) {}

  /// Throws on a second application of the same edge.
  void entangle_edge(qsim::QuantumState& st, int edge);
  /// Every not yet applied edge incident to q.
  void entangle_around(qsim::QuantumState& st, VertexId q);
  void finish(qsim::QuantumState& st);
  [[nodiscard]] int applied() const { return applied_; }

 private:
  const graph::DtgGraph& dtg_;
  std::vector<std::uint8_t> done_;
  int applied_ = 0;
};

/// Undoes the server's pad, then the client's output key.
void decrypt_with_key(qsim::QuantumState& st, const OutputKey& key, std::span<const std::int8_t> b,
                      const PadKey* pad);

// ---------------------------------------------------------------------------
// Runs

struct RunOptions {
  Mode mode = Mode::interactive;
  int flag_bits = 8;
  int capacity = qsim::kDefaultCapacity;
  bool record_messages = true;
};

struct RunResult {
  Transcript transcript;
  Verdict verdict;
  /// Joint state of wires 0..W-1, client references, server references;
  /// present only when the run accepted.
  std::optional<Eigen::VectorXcd> output;
  /// Server output qubits as held after an abort (keys withheld), wire order.
  std::optional<Eigen::MatrixXcd> withheld_server_output;
  ClientSecrets secrets;
  int high_water = 0;
  int entangled_edges = 0;
  int otm_count = 0;
};

RunResult run_qyao(const Setup& setup, const PartyInput& client_input, const PartyInput& server_input,
                   std::uint64_t seed, const RunOptions& options = {}, ServerDeviation* deviation = nullptr);

}  // namespace qyao::protocol
