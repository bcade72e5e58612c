// Copyright 2026 The qyao-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "qyao/angle.hpp"
#include "qyao/protocol.hpp"
#include "qyao/random.hpp"

namespace qyao::otm {

using graph::VertexId;

class OtmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DestroyedTokenError : public OtmError {
 public:
  using OtmError::OtmError;
};

class InvalidLabelError : public OtmError {
 public:
  using OtmError::OtmError;
};

inline constexpr int kMaxFlagBits = 63;
inline constexpr int kMaxLabelBits = 40;

struct OtmCell {
  std::optional<Angle> delta;  // empty in final-layer tokens
  std::uint64_t flag = 0;
  bool operator==(const OtmCell&) const = default;
};

/// 1-out-of-2^label_bits token. Cells are produced on demand by the
/// preparer's function; only the first read ever returns one.
class OneTimeMemory {
 public:
  using CellFn = std::function<OtmCell(std::uint64_t)>;

  OneTimeMemory(int label_bits, CellFn cells);
  OneTimeMemory(const OneTimeMemory&) = delete;
  OneTimeMemory& operator=(const OneTimeMemory&) = delete;

  /// Table-backed token; the table size must be a power of two.
  static std::unique_ptr<OneTimeMemory> create(std::vector<OtmCell> cells);

  OtmCell read(std::uint64_t label);
  [[nodiscard]] bool consumed() const { return consumed_.load(); }
  [[nodiscard]] int label_bits() const { return bits_; }
  [[nodiscard]] std::uint64_t size() const { return std::uint64_t{1} << bits_; }
  /// Preparer-side view of a cell, used for debugging and table export.
  [[nodiscard]] OtmCell inspect(std::uint64_t label) const;

 private:
  void check_label(std::uint64_t label) const;

  int bits_;
  CellFn cells_;
  std::atomic<bool> consumed_{false};
};

struct OtmSet {
  int flag_bits = 0;
  std::vector<std::unique_ptr<OneTimeMemory>> memory;  // per DT(G) vertex, null if none
  std::vector<std::optional<Angle>> direct;            // first-layer angles
  std::vector<std::uint64_t> accept;                   // l0 per vertex

  [[nodiscard]] int count() const;
};

/// Smallest m with 2^m >= 1/eps + 1.
int flag_length_for(double eps);

/// One token per vertex with a nonempty extended past; the first layer gets
/// its angle directly; tokens at output locations carry flags only.
OtmSet prepare_otms(const protocol::Client& client, int flag_bits, Rng& flag_rng);

/// Client-side export: one record per cell.
nlohmann::json export_table(const OneTimeMemory& otm, VertexId owner, int flag_bits);

/// Server that knows one reject flag guesses the accept flag.
double flag_guess_experiment(int flag_bits, std::uint64_t trials, Rng& rng);
/// Exact guessing probability by enumeration (flag_bits <= 3).
double exhaustive_guess_probability(int flag_bits);

protocol::RunResult run_noninteractive(const protocol::Setup& setup, const protocol::PartyInput& client_input,
                                       const protocol::PartyInput& server_input, std::uint64_t seed,
                                       int flag_bits, protocol::ServerDeviation* deviation = nullptr);

}  // namespace qyao::otm
