// Copyright 2026 The qyao-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "qyao/otm.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace qyao::otm {

OneTimeMemory::OneTimeMemory(int label_bits, CellFn cells) : bits_(label_bits), cells_(std::move(cells)) {
  if (label_bits < 0 || label_bits > kMaxLabelBits) throw OtmError("label width out of range");
}

std::unique_ptr<OneTimeMemory> OneTimeMemory::create(std::vector<OtmCell> cells) {
  if (cells.empty() || !std::has_single_bit(cells.size())) throw OtmError("cell count must be a power of two");
  const int bits = std::countr_zero(cells.size());
  return std::make_unique<OneTimeMemory>(bits, [table = std::move(cells)](std::uint64_t label) { return table[label]; });
}

void OneTimeMemory::check_label(std::uint64_t label) const {
  if (label >= size()) throw InvalidLabelError("label " + std::to_string(label) + " outside the token");
}

OtmCell OneTimeMemory::read(std::uint64_t label) {
  if (consumed_.load()) throw DestroyedTokenError("token already read");
  check_label(label);
  bool expected = false;
  if (!consumed_.compare_exchange_strong(expected, true)) throw DestroyedTokenError("token already read");
  return cells_(label);
}

OtmCell OneTimeMemory::inspect(std::uint64_t label) const {
  check_label(label);
  return cells_(label);
}

int OtmSet::count() const {
  return static_cast<int>(std::count_if(memory.begin(), memory.end(), [](const auto& m) { return m != nullptr; }));
}

int flag_length_for(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw OtmError("epsilon must lie strictly between 0 and 1");
  for (int m = 1; m <= kMaxFlagBits; ++m)
    if (eps * static_cast<double>((std::uint64_t{1} << m) - 1) >= 1.0 - 1e-12) return m;
  throw OtmError("epsilon too small for a " + std::to_string(kMaxFlagBits) + "-bit flag");
}

namespace {

std::uint64_t flag_space(int bits) { return std::uint64_t{1} << bits; }

/// Uniform string of `bits` bits other than `avoid`.
std::uint64_t other_than(Rng& rng, std::uint64_t avoid, int bits) {
  const std::uint64_t v = uniform_below(rng, flag_space(bits) - 1);
  return v < avoid ? v : v + 1;
}

std::uint64_t reject_flag(std::uint64_t key, std::uint64_t label, std::uint64_t accept, int bits) {
  std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                    static_cast<std::uint32_t>(label), static_cast<std::uint32_t>(label >> 32)};
  Rng rng(seq);
  return other_than(rng, accept, bits);
}

bool parity(std::uint64_t x) { return (std::popcount(x) & 1) != 0; }

}  // namespace

OtmSet prepare_otms(const protocol::Client& client, int flag_bits, Rng& flag_rng) {
  if (flag_bits < 1 || flag_bits > kMaxFlagBits) throw OtmError("flag length out of range");
  const auto& setup = client.setup();
  const auto& secrets = client.secrets();
  const int n = setup.dtg.size();

  OtmSet set;
  set.flag_bits = flag_bits;
  set.memory.resize(n);
  set.direct.resize(n);
  set.accept.resize(n);
  for (auto& a : set.accept) a = uniform_below(flag_rng, flag_space(flag_bits));

  for (VertexId q = 0; q < n; ++q) {
    const auto& ep = setup.extended_past[q];
    const bool final_layer = setup.is_output_location(setup.dtg.location(q));
    const protocol::DeltaRule rule = client.delta_rule(q);
    if (ep.empty()) {
      if (!final_layer) set.direct[q] = rule.theta.plus_pi_if(rule.r) + (rule.computation ? rule.phi.signed_by(rule.x_const).plus_pi_if(rule.z_const) : Angle::zero());
      continue;
    }
    if (static_cast<int>(ep.size()) > kMaxLabelBits) throw OtmError("extended past too large for a token");

    auto bit_of = [&](VertexId j) {
      auto it = std::lower_bound(ep.begin(), ep.end(), j);
      if (it == ep.end() || *it != j)
        throw OtmError("dependency " + std::to_string(j) + " of vertex " + std::to_string(q) + " outside its extended past");
      return std::uint64_t{1} << (it - ep.begin());
    };
    std::uint64_t xmask = 0, zmask = 0, rmask = 0, trapmask = 0;
    for (VertexId j : rule.x_deps) xmask |= bit_of(j);
    for (VertexId j : rule.z_deps) zmask |= bit_of(j);
    for (std::size_t k = 0; k < ep.size(); ++k) {
      if (secrets.r[ep[k]]) rmask |= std::uint64_t{1} << k;
      if (secrets.trap[ep[k]]) trapmask |= std::uint64_t{1} << k;
    }
    const std::uint64_t key = flag_rng();
    const std::uint64_t accept = set.accept[q];
    auto cells = [=](std::uint64_t label) {
      OtmCell cell;
      const std::uint64_t s = label ^ rmask;  // s_j = b_j xor r_j
      if (!final_layer) {
        const bool sx = rule.x_const != parity(s & xmask);
        const bool sz = rule.z_const != parity(s & zmask);
        cell.delta = (rule.phi.signed_by(sx) + rule.theta).plus_pi_if(rule.r != sz);
      }
      cell.flag = (s & trapmask) == 0 ? accept : reject_flag(key, label, accept, flag_bits);
      return cell;
    };
    set.memory[q] = std::make_unique<OneTimeMemory>(static_cast<int>(ep.size()), cells);
  }
  return set;
}

nlohmann::json export_table(const OneTimeMemory& otm, VertexId owner, int flag_bits) {
  if (otm.label_bits() > 16) throw OtmError("token too large to export");
  auto out = nlohmann::json::array();
  for (std::uint64_t label = 0; label < otm.size(); ++label) {
    const OtmCell cell = otm.inspect(label);
    std::string bits;
    for (int k = 0; k < otm.label_bits(); ++k) bits.push_back((label >> k) & 1U ? '1' : '0');
    std::ostringstream hex;
    hex << std::hex << cell.flag;
    nlohmann::json rec{{"vertex", owner}, {"label", bits}, {"flag", hex.str()}, {"flag_bits", flag_bits}};
    rec["delta"] = cell.delta ? nlohmann::json(cell.delta->eighths()) : nlohmann::json(nullptr);
    out.push_back(std::move(rec));
  }
  return out;
}

double flag_guess_experiment(int flag_bits, std::uint64_t trials, Rng& rng) {
  if (flag_bits < 1 || flag_bits > kMaxFlagBits) throw OtmError("flag length out of range");
  if (trials == 0) return 0.0;
  std::uint64_t hits = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const std::uint64_t accept = uniform_below(rng, flag_space(flag_bits));
    const std::uint64_t known_reject = other_than(rng, accept, flag_bits);
    hits += other_than(rng, known_reject, flag_bits) == accept;
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

double exhaustive_guess_probability(int flag_bits) {
  if (flag_bits < 1 || flag_bits > 3) throw OtmError("exhaustive enumeration limited to 3-bit flags");
  const std::uint64_t k = flag_space(flag_bits);
  double total = 0, hits = 0;
  for (std::uint64_t accept = 0; accept < k; ++accept)
    for (std::uint64_t reject = 0; reject < k; ++reject) {
      if (reject == accept) continue;
      for (std::uint64_t guess = 0; guess < k; ++guess) {
        if (guess == reject) continue;
        total += 1;
        hits += guess == accept;
      }
    }
  return hits / total;
}

protocol::RunResult run_noninteractive(const protocol::Setup& setup, const protocol::PartyInput& client_input,
                                       const protocol::PartyInput& server_input, std::uint64_t seed,
                                       int flag_bits, protocol::ServerDeviation* deviation) {
  protocol::RunOptions options;
  options.mode = protocol::Mode::noninteractive;
  options.flag_bits = flag_bits;
  return protocol::run_qyao(setup, client_input, server_input, seed, options, deviation);
}

}  // namespace qyao::otm
