// Copyright 2026 The qyao-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qyao/protocol.hpp"

namespace qyao::adversary {

using graph::VertexId;

class AdversaryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Pauli : std::uint8_t { x, y, z };
enum class PhasePoint : std::uint8_t { before_measurement, on_output };

const char* pauli_name(Pauli p);
const char* phase_point_name(PhasePoint p);

enum class Target : std::uint8_t {
  vertex,          // a fixed DT(G) vertex
  random_primary,  // uniform over the primary set of a base vertex
  random_vertex,   // uniform over every vertex reachable at the phase point
};

struct PauliHit {
  Target target = Target::vertex;
  VertexId vertex = 0;
  graph::LocationId location = 0;
  std::optional<Pauli> pauli;  // nullopt: uniform over X, Y, Z
  PhasePoint point = PhasePoint::before_measurement;
};

struct Honest {};
struct PauliAttack {
  std::vector<PauliHit> hits;
};
struct OutcomeLie {
  std::map<VertexId, bool> flips;
};
struct LabelFlip {
  std::optional<VertexId> owner;  // nullopt: uniform over tokens whose label carries `vertex`
  VertexId vertex = 0;
};
/// Opens tokens with labels that disagree with the outcomes actually obtained.
struct OtmInconsistentOpening {
  std::vector<LabelFlip> flips;
};
/// Forces a rejection flag out of one final-layer token, then guesses the
/// accept flag uniformly among the strings it did not see.
struct FlagGuess {
  std::optional<VertexId> owner;
};
/// Single-qubit operators applied to the server's inputs, in server wire order.
struct InputDeviation {
  std::vector<qsim::Mat2> ops;
  std::vector<std::string> names;
};
/// White-box: Z on the trap of a location under the sampled colouring.
struct TrapHit {
  graph::LocationId location = 0;
};

struct AttackStrategy;
struct Compose {
  std::vector<AttackStrategy> parts;
};

struct AttackStrategy {
  std::string name = "honest";
  std::variant<Honest, PauliAttack, OutcomeLie, OtmInconsistentOpening, FlagGuess, InputDeviation, TrapHit, Compose>
      kind = Honest{};
};

[[nodiscard]] bool is_white_box(const AttackStrategy& s);
[[nodiscard]] bool needs_noninteractive(const AttackStrategy& s);

/// Throws AdversaryError when the strategy does not fit the setup or mode.
void validate_strategy(const AttackStrategy& s, const protocol::Setup& setup, protocol::Mode mode);

AttackStrategy parse_strategy(const nlohmann::json& j);
nlohmann::json to_json(const AttackStrategy& s);

/// Per-run deviation; random targets are resolved from `rng` at construction.
std::unique_ptr<protocol::ServerDeviation> make_deviation(const AttackStrategy& s, const protocol::Setup& setup,
                                                          Rng rng);

// ---------------------------------------------------------------------------

/// Everything a trial needs besides the strategy and the seed.
struct Scenario {
  protocol::Setup setup;
  Eigen::MatrixXcd unitary;  // on the pattern's wires, wire 0 most significant
  protocol::PartyInput client_input;
  protocol::PartyInput server_input;
  protocol::RunOptions options;
};

/// U applied to the joint input after the strategy's input deviation.
Eigen::VectorXcd ideal_output(const Scenario& sc, const AttackStrategy& s);

enum class TrialClass : std::uint8_t { abort, accept_correct, accept_corrupt };
const char* trial_class_name(TrialClass c);

inline constexpr double kCorrectFidelity = 1.0 - 1e-6;

struct TrialOutcome {
  TrialClass cls = TrialClass::abort;
  double fidelity = 0.0;  // 0 on abort
  protocol::Verdict verdict;
};

TrialOutcome run_with_adversary(const AttackStrategy& s, const Scenario& sc, std::uint64_t seed);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};
Interval wilson_interval(std::uint64_t hits, std::uint64_t n, double z = 3.0);

struct TrialStats {
  std::uint64_t trials = 0;
  std::uint64_t aborts = 0;
  std::uint64_t accept_correct = 0;
  std::uint64_t accept_corrupt = 0;

  void add(TrialClass c);
  void merge(const TrialStats& o);
  [[nodiscard]] double rate(std::uint64_t count) const;
  [[nodiscard]] double abort_rate() const { return rate(aborts); }
  [[nodiscard]] double corrupt_rate() const { return rate(accept_corrupt); }
  [[nodiscard]] double p_ok() const { return 1.0 - abort_rate(); }
  /// Binomial standard error of a rate.
  [[nodiscard]] double sigma(double p) const;
};

nlohmann::json to_json(const TrialStats& s, double z = 3.0);

/// Trial i uses trial_seed(seed, i); the result does not depend on `jobs`.
TrialStats estimate_detection(const AttackStrategy& s, const Scenario& sc, std::uint64_t trials, std::uint64_t seed,
                              int jobs = 1);

struct EpsilonBound {
  int d = 1;
  double epsilon = 8.0 / 9.0;
};
EpsilonBound epsilon_bound(int base_degree, double tolerance);

/// Non-interactive runs of FlagGuess with an m-bit flag.
TrialStats flag_guess_attack(const Scenario& sc, int flag_bits, std::uint64_t trials, std::uint64_t seed, int jobs = 1);

// ---------------------------------------------------------------------------
// Blindness

struct BlindnessReport {
  std::string mode;
  double distance = 0.0;  // exact mode
  double max_z = 0.0;     // Monte Carlo mode
  std::uint64_t samples = 0;
  std::size_t views = 0;  // distinct classical views (exact) or histogram cells
  std::vector<std::pair<VertexId, double>> z_by_vertex;
};

nlohmann::json to_json(const BlindnessReport& r);

/// Throws AdversaryError when the public data of the two scenarios differ.
void check_same_shape(const Scenario& a, const Scenario& b);

/// Exhaustive average over colouring, theta, r, d, x and measurement order on
/// a single-base-vertex graph; returns the trace distance between the two
/// server views (received qubits joint with the angle sequence).
BlindnessReport blindness_exact(const Scenario& a, const Scenario& b);

/// Two-sample chi-square per server-measured vertex over the 16 (delta, b) cells.
BlindnessReport blindness_montecarlo(const Scenario& a, const Scenario& b, std::uint64_t samples, std::uint64_t seed,
                                     int jobs = 1);

}  // namespace qyao::adversary
