// Copyright 2026 The qyao-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qyao/adversary.hpp"

namespace qyao::config {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Experiment description. Keys of the JSON form:
///   builtin        name from builtin_names(); other keys override it
///   gates, wires   gate list ("H 0", "CNOT 0 1", ...) compiled to a brickwork pattern
///   graph, phi     base graph (object or file path) with one angle per D(G) vertex, in units of pi/4
///   client_wires, server_wires
///   client_input, server_input   one entry per owned wire: a state name, an integer k for
///                                |+_{k pi/4}>, or the single string "entangled"
///   mode, seed, trials, flag_bits, d, tolerance
///   strategy       strategy object, file path, or "builtin:NAME"
///   blindness      {"mode": "exact"|"montecarlo"|"auto", "samples": N, "alternative": {...}}
///                  where alternative is a merge patch producing the second client setup
struct ExperimentConfig {
  std::string name;
  nlohmann::json source;  // the fully merged JSON
  std::filesystem::path base_dir;
  std::vector<std::string> gates;
  int wires = 0;
  std::optional<graph::BaseGraph> graph;
  std::vector<Angle> phi;
  std::vector<int> client_wires, server_wires;
  nlohmann::json client_input = nlohmann::json::array();
  nlohmann::json server_input = nlohmann::json::array();
  protocol::Mode mode = protocol::Mode::interactive;
  std::uint64_t seed = 1;
  std::uint64_t trials = 1;
  int flag_bits = 8;
  int d = 1;
  std::optional<adversary::AttackStrategy> strategy;
  std::string blindness_mode = "auto";
  std::uint64_t blindness_samples = 10000;
  std::optional<nlohmann::json> blindness_alternative;
};

std::vector<std::string> builtin_names();
nlohmann::json builtin_config(const std::string& name);
std::vector<std::string> builtin_strategy_names();
/// Bundled strategies; random-slot-z targets the primary set of base vertex 0.
adversary::AttackStrategy builtin_strategy(const std::string& name);

/// Relative file paths inside `j` resolve against `base_dir`.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
/// A path to a JSON file, or "builtin:NAME".
ExperimentConfig load_config(const std::string& where);

pattern::MeasurementPattern make_pattern(const ExperimentConfig& c);
adversary::Scenario make_scenario(const ExperimentConfig& c);
/// The second scenario of a blindness comparison.
adversary::Scenario alternative_scenario(const ExperimentConfig& c);

}  // namespace qyao::config
