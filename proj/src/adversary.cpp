// Copyright 2026 The qyao-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "qyao/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace qyao::adversary {

const char* pauli_name(Pauli p) {
  switch (p) {
    case Pauli::x: return "X";
    case Pauli::y: return "Y";
    case Pauli::z: return "Z";
  }
  return "?";
}

const char* phase_point_name(PhasePoint p) {
  return p == PhasePoint::before_measurement ? "before_measurement" : "on_output";
}

const char* trial_class_name(TrialClass c) {
  switch (c) {
    case TrialClass::abort: return "abort";
    case TrialClass::accept_correct: return "accept_correct";
    case TrialClass::accept_corrupt: return "accept_corrupt";
  }
  return "?";
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

qsim::Mat2 pauli_matrix(Pauli p) {
  switch (p) {
    case Pauli::x: return qsim::pauli_x();
    case Pauli::y: return qsim::pauli_y();
    case Pauli::z: return qsim::pauli_z();
  }
  return qsim::pauli_z();
}

bool at_output(const protocol::Setup& setup, VertexId q) { return setup.is_output_location(setup.dtg.location(q)); }

std::vector<VertexId> reachable(const protocol::Setup& setup, PhasePoint point) {
  std::vector<VertexId> out;
  for (VertexId q = 0; q < setup.dtg.size(); ++q)
    if (at_output(setup, q) == (point == PhasePoint::on_output)) out.push_back(q);
  return out;
}

std::vector<VertexId> label_owners(const protocol::Setup& setup, VertexId v) {
  std::vector<VertexId> out;
  for (VertexId q = 0; q < setup.dtg.size(); ++q) {
    const auto& ep = setup.extended_past[q];
    if (std::binary_search(ep.begin(), ep.end(), v)) out.push_back(q);
  }
  return out;
}

std::optional<VertexId> default_guess_owner(const protocol::Setup& setup) {
  for (VertexId q = 0; q < setup.dtg.size(); ++q)
    if (at_output(setup, q) && !setup.extended_past[q].empty()) return q;
  return std::nullopt;
}

void check_vertex(const protocol::Setup& setup, VertexId q) {
  if (q < 0 || q >= setup.dtg.size()) throw AdversaryError("vertex " + std::to_string(q) + " does not exist");
}

void check_hit(const PauliHit& h, const protocol::Setup& setup) {
  const bool output = h.point == PhasePoint::on_output;
  switch (h.target) {
    case Target::vertex:
      check_vertex(setup, h.vertex);
      if (at_output(setup, h.vertex) != output)
        throw AdversaryError("vertex " + std::to_string(h.vertex) + " is not reachable at " + phase_point_name(h.point));
      break;
    case Target::random_primary:
      if (h.location < 0 || h.location >= setup.dtg.base().size())
        throw AdversaryError("location " + std::to_string(h.location) + " is not a base vertex");
      if (setup.is_output_location(h.location) != output)
        throw AdversaryError("location " + std::to_string(h.location) + " is not reachable at " + phase_point_name(h.point));
      break;
    case Target::random_vertex:
      if (reachable(setup, h.point).empty()) throw AdversaryError("no vertex reachable at " + std::string(phase_point_name(h.point)));
      break;
  }
}

class StrategyDeviation final : public protocol::ServerDeviation {
 public:
  StrategyDeviation(const protocol::Setup& setup, Rng rng) : setup_(setup), rng_(rng) {}

  void add(const AttackStrategy& s) {
    std::visit(overloaded{
                   [](const Honest&) {},
                   [&](const PauliAttack& a) {
                     for (const auto& h : a.hits) add_hit(h);
                   },
                   [&](const OutcomeLie& a) {
                     for (const auto& [v, flip] : a.flips)
                       if (flip) lies_[v] = !lies_[v];
                   },
                   [&](const OtmInconsistentOpening& a) {
                     for (const auto& f : a.flips) {
                       VertexId owner;
                       if (f.owner) {
                         owner = *f.owner;
                       } else {
                         const auto owners = label_owners(setup_, f.vertex);
                         owner = owners[uniform_below(rng_, owners.size())];
                       }
                       label_flips_[owner].push_back(f.vertex);
                     }
                   },
                   [&](const FlagGuess& a) { guess_owner_ = a.owner ? a.owner : default_guess_owner(setup_); },
                   [&](const InputDeviation& a) { input_ops_ = a.ops; },
                   [&](const TrapHit& a) { trap_hits_.push_back(a.location); },
                   [&](const Compose& a) {
                     for (const auto& part : a.parts) add(part);
                   },
               },
               s.kind);
  }

  void observe_secrets(const protocol::Setup& setup, const protocol::ClientSecrets& secrets) override {
    for (graph::LocationId loc : trap_hits_) {
      const auto at = setup.dtg.at_location(loc);
      auto it = std::find_if(at.begin(), at.end(), [&](VertexId q) { return secrets.trap[q] != 0; });
      if (it == at.end()) throw AdversaryError("no trap at location " + std::to_string(loc));
      (setup.is_output_location(loc) ? output_ : before_)[*it].push_back(Pauli::z);
    }
  }

  void on_input(qsim::QuantumState& st, std::span<const VertexId> qubits) override {
    for (std::size_t k = 0; k < input_ops_.size() && k < qubits.size(); ++k) st.apply(qubits[k], input_ops_[k]);
  }

  void before_measure(qsim::QuantumState& st, VertexId q) override { apply_all(st, before_, q); }

  bool report_outcome(VertexId q, bool b) override {
    auto it = lies_.find(q);
    return it != lies_.end() && it->second ? !b : b;
  }

  std::uint64_t otm_label(VertexId owner, std::span<const VertexId> ep, std::uint64_t honest) override {
    std::uint64_t label = honest;
    if (auto it = label_flips_.find(owner); it != label_flips_.end())
      for (VertexId v : it->second) {
        auto pos = std::lower_bound(ep.begin(), ep.end(), v);
        label ^= std::uint64_t{1} << (pos - ep.begin());
      }
    if (guess_owner_ && *guess_owner_ == owner) {
      const std::uint64_t mask = ep.size() >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << ep.size()) - 1;
      label = ~honest & mask;
    }
    return label;
  }

  std::uint64_t returned_flag(VertexId owner, std::uint64_t obtained, int flag_bits) override {
    if (!guess_owner_ || *guess_owner_ != owner) return obtained;
    const std::uint64_t v = uniform_below(rng_, (std::uint64_t{1} << flag_bits) - 1);
    return v < obtained ? v : v + 1;
  }

  void on_output(qsim::QuantumState& st, std::span<const VertexId> layer) override {
    for (VertexId q : layer) apply_all(st, output_, q);
  }

 private:
  using Schedule = std::map<VertexId, std::vector<Pauli>>;

  void add_hit(const PauliHit& h) {
    VertexId q = h.vertex;
    if (h.target == Target::random_primary) {
      q = setup_.dtg.primary_set(h.location)[uniform_below(rng_, 3)];
    } else if (h.target == Target::random_vertex) {
      const auto pool = reachable(setup_, h.point);
      q = pool[uniform_below(rng_, pool.size())];
    }
    const Pauli p = h.pauli ? *h.pauli : static_cast<Pauli>(uniform_below(rng_, 3));
    (h.point == PhasePoint::on_output ? output_ : before_)[q].push_back(p);
  }

  static void apply_all(qsim::QuantumState& st, const Schedule& s, VertexId q) {
    auto it = s.find(q);
    if (it == s.end()) return;
    for (Pauli p : it->second) st.apply(q, pauli_matrix(p));
  }

  const protocol::Setup& setup_;
  Rng rng_;
  Schedule before_, output_;
  std::map<VertexId, bool> lies_;
  std::map<VertexId, std::vector<VertexId>> label_flips_;
  std::optional<VertexId> guess_owner_;
  std::vector<qsim::Mat2> input_ops_;
  std::vector<graph::LocationId> trap_hits_;
};

}  // namespace

bool is_white_box(const AttackStrategy& s) {
  return std::visit(overloaded{
                        [](const TrapHit&) { return true; },
                        [](const Compose& c) { return std::any_of(c.parts.begin(), c.parts.end(), is_white_box); },
                        [](const auto&) { return false; },
                    },
                    s.kind);
}

bool needs_noninteractive(const AttackStrategy& s) {
  return std::visit(overloaded{
                        [](const OtmInconsistentOpening&) { return true; },
                        [](const FlagGuess&) { return true; },
                        [](const Compose& c) { return std::any_of(c.parts.begin(), c.parts.end(), needs_noninteractive); },
                        [](const auto&) { return false; },
                    },
                    s.kind);
}

void validate_strategy(const AttackStrategy& s, const protocol::Setup& setup, protocol::Mode mode) {
  if (needs_noninteractive(s) && mode != protocol::Mode::noninteractive)
    throw AdversaryError("strategy '" + s.name + "' needs non-interactive mode");
  std::visit(overloaded{
                 [](const Honest&) {},
                 [&](const PauliAttack& a) {
                   for (const auto& h : a.hits) check_hit(h, setup);
                 },
                 [&](const OutcomeLie& a) {
                   for (const auto& [v, flip] : a.flips) {
                     check_vertex(setup, v);
                     if (at_output(setup, v)) throw AdversaryError("vertex " + std::to_string(v) + " is measured by the client");
                   }
                 },
                 [&](const OtmInconsistentOpening& a) {
                   for (const auto& f : a.flips) {
                     check_vertex(setup, f.vertex);
                     if (f.owner) {
                       check_vertex(setup, *f.owner);
                       const auto& ep = setup.extended_past[*f.owner];
                       if (!std::binary_search(ep.begin(), ep.end(), f.vertex))
                         throw AdversaryError("label of " + std::to_string(*f.owner) + " does not carry " + std::to_string(f.vertex));
                     } else if (label_owners(setup, f.vertex).empty()) {
                       throw AdversaryError("no token label carries vertex " + std::to_string(f.vertex));
                     }
                   }
                 },
                 [&](const FlagGuess& a) {
                   const auto owner = a.owner ? a.owner : default_guess_owner(setup);
                   if (!owner) throw AdversaryError("no final-layer token to attack");
                   check_vertex(setup, *owner);
                   if (!at_output(setup, *owner) || setup.extended_past[*owner].empty())
                     throw AdversaryError("vertex " + std::to_string(*owner) + " has no final-layer token");
                 },
                 [&](const InputDeviation& a) {
                   if (setup.server_wires.empty()) throw AdversaryError("the server has no input to deviate");
                   if (a.ops.size() != setup.server_wires.size())
                     throw AdversaryError("one operator per server wire expected");
                 },
                 [&](const TrapHit& a) {
                   if (a.location < 0 || a.location >= setup.dtg.num_locations())
                     throw AdversaryError("location " + std::to_string(a.location) + " does not exist");
                 },
                 [&](const Compose& c) {
                   for (const auto& part : c.parts) validate_strategy(part, setup, mode);
                 },
             },
             s.kind);
}

std::unique_ptr<protocol::ServerDeviation> make_deviation(const AttackStrategy& s, const protocol::Setup& setup,
                                                          Rng rng) {
  auto dev = std::make_unique<StrategyDeviation>(setup, rng);
  dev->add(s);
  return dev;
}

// ---------------------------------------------------------------------------

namespace {

void collect_input_ops(const AttackStrategy& s, std::vector<qsim::Mat2>& ops) {
  std::visit(overloaded{
                 [&](const InputDeviation& d) { ops = d.ops; },
                 [&](const Compose& c) {
                   for (const auto& part : c.parts) collect_input_ops(part, ops);
                 },
                 [](const auto&) {},
             },
             s.kind);
}

}  // namespace

Eigen::VectorXcd ideal_output(const Scenario& sc, const AttackStrategy& s) {
  std::vector<qsim::Mat2> ops;
  collect_input_ops(s, ops);
  protocol::PartyInput server = sc.server_input;
  if (!ops.empty()) {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Identity(1, 1);
    for (const auto& op : ops) {
      Eigen::MatrixXcd next(d.rows() * 2, d.cols() * 2);
      const Eigen::MatrixXcd m = qsim::to_eigen(op);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) next.block(i * d.rows(), j * d.cols(), d.rows(), d.cols()) = m(i, j) * d;
      d = next;
    }
    server.amplitudes = protocol::apply_on_wires(d, server.amplitudes, static_cast<int>(ops.size()));
  }
  return protocol::apply_on_wires(sc.unitary, protocol::joint_input(sc.setup, sc.client_input, server), sc.setup.wires());
}

namespace {

TrialOutcome classify(const protocol::RunResult& r, const Eigen::VectorXcd& ideal) {
  TrialOutcome out;
  out.verdict = r.verdict;
  if (!r.verdict.accepted) return out;
  out.fidelity = qsim::fidelity(*r.output, ideal);
  out.cls = out.fidelity >= kCorrectFidelity ? TrialClass::accept_correct : TrialClass::accept_corrupt;
  return out;
}

TrialOutcome run_one(const AttackStrategy& s, const Scenario& sc, const Eigen::VectorXcd& ideal, std::uint64_t seed) {
  auto dev = make_deviation(s, sc.setup, make_stream(seed, Stream::adversary));
  return classify(protocol::run_qyao(sc.setup, sc.client_input, sc.server_input, seed, sc.options, dev.get()), ideal);
}

}  // namespace

TrialOutcome run_with_adversary(const AttackStrategy& s, const Scenario& sc, std::uint64_t seed) {
  validate_strategy(s, sc.setup, sc.options.mode);
  return run_one(s, sc, ideal_output(sc, s), seed);
}

Interval wilson_interval(std::uint64_t hits, std::uint64_t n, double z) {
  if (n == 0) return {};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2 * nn)) / denom;
  const double half = z / denom * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn));
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

void TrialStats::add(TrialClass c) {
  ++trials;
  switch (c) {
    case TrialClass::abort: ++aborts; break;
    case TrialClass::accept_correct: ++accept_correct; break;
    case TrialClass::accept_corrupt: ++accept_corrupt; break;
  }
}

void TrialStats::merge(const TrialStats& o) {
  trials += o.trials;
  aborts += o.aborts;
  accept_correct += o.accept_correct;
  accept_corrupt += o.accept_corrupt;
}

double TrialStats::rate(std::uint64_t count) const {
  return trials == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(trials);
}

double TrialStats::sigma(double p) const {
  return trials == 0 ? 0.0 : std::sqrt(p * (1 - p) / static_cast<double>(trials));
}

nlohmann::json to_json(const TrialStats& s, double z) {
  const Interval ci = wilson_interval(s.accept_corrupt, s.trials, z);
  return {{"trials", s.trials},
          {"abort", s.aborts},
          {"accept_correct", s.accept_correct},
          {"accept_corrupt", s.accept_corrupt},
          {"p_ok", s.p_ok()},
          {"abort_rate", s.abort_rate()},
          {"corrupt_rate", s.corrupt_rate()},
          {"corrupt_interval", {ci.lo, ci.hi}},
          {"interval_z", z},
          {"confidence_radius", z * s.sigma(s.corrupt_rate())}};
}

TrialStats estimate_detection(const AttackStrategy& s, const Scenario& sc, std::uint64_t trials, std::uint64_t seed,
                              int jobs) {
  if (trials == 0) throw AdversaryError("at least one trial needed");
  validate_strategy(s, sc.setup, sc.options.mode);
  const Eigen::VectorXcd ideal = ideal_output(sc, s);
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(std::min<std::uint64_t>(trials, 256))));

  std::vector<TrialStats> partial(jobs);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&](int w) {
    try {
      for (std::uint64_t i = w; i < trials; i += jobs) partial[w].add(run_one(s, sc, ideal, trial_seed(seed, i)).cls);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  TrialStats total;
  for (const auto& p : partial) total.merge(p);
  return total;
}

EpsilonBound epsilon_bound(int base_degree, double tolerance) {
  if (base_degree < 1) throw AdversaryError("base degree must be at least 1");
  if (tolerance < 0) throw AdversaryError("tolerance must be non-negative");
  EpsilonBound b;
  b.d = std::max(1, static_cast<int>(std::ceil(tolerance / (2.0 * (2 * base_degree + 1)))));
  b.epsilon = std::pow(8.0 / 9.0, b.d);
  return b;
}

TrialStats flag_guess_attack(const Scenario& sc, int flag_bits, std::uint64_t trials, std::uint64_t seed, int jobs) {
  Scenario ni = sc;
  ni.options.mode = protocol::Mode::noninteractive;
  ni.options.flag_bits = flag_bits;
  ni.options.record_messages = false;
  AttackStrategy s{"flag-guess", FlagGuess{}};
  return estimate_detection(s, ni, trials, seed, jobs);
}

}  // namespace qyao::adversary
