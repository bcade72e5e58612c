// Copyright 2026 The qyao-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "qyao/config.hpp"

#include <fstream>
#include <map>

namespace qyao::config {

using nlohmann::json;

namespace {

const std::map<std::string, json>& builtins() {
  static const std::map<std::string, json> table = {
      {"identity-path2",
       {{"name", "identity-path2"}, {"gates", {"I 0"}}, {"wires", 1}, {"client_wires", {0}},
        {"server_wires", json::array()}, {"client_input", {"t"}}}},
      {"hadamard",
       {{"name", "hadamard"}, {"gates", {"H 0"}}, {"wires", 1}, {"client_wires", {0}},
        {"server_wires", json::array()}, {"client_input", {"t"}}}},
      {"t-gate",
       {{"name", "t-gate"}, {"gates", {"T 0"}}, {"wires", 1}, {"client_wires", json::array()},
        {"server_wires", {0}}, {"server_input", {"+"}}}},
      {"cz-2wire",
       {{"name", "cz-2wire"}, {"gates", {"CZ 0 1"}}, {"wires", 2}, {"client_wires", {0}},
        {"server_wires", {1}}, {"client_input", {"+"}}, {"server_input", {"t"}}}},
      {"cnot-2wire",
       {{"name", "cnot-2wire"}, {"gates", {"CNOT 0 1"}}, {"wires", 2}, {"client_wires", {0}},
        {"server_wires", {1}}, {"client_input", {"t"}}, {"server_input", {"+"}}}},
      {"single-vertex",
       {{"name", "single-vertex"},
        {"graph", {{"vertices", {{{"id", 0}, {"column", 0}, {"row", 0}}}}, {"edges", json::array()},
                   {"inputs", {0}}, {"outputs", json::array()}}},
        {"phi", {0}},
        {"client_wires", {0}},
        {"server_wires", json::array()},
        {"client_input", {"0"}},
        {"blindness", {{"mode", "exact"}, {"alternative", {{"phi", {3}}, {"client_input", {"+i"}}}}}}}},
  };
  return table;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& base_dir, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
}

std::vector<int> int_list(const json& j, const char* key) {
  if (!j.contains(key)) return {};
  return j.at(key).get<std::vector<int>>();
}

protocol::PartyInput party_input(const json& spec, std::size_t owned, const char* who) {
  if (spec.is_string() && spec.get<std::string>() == "entangled")
    return protocol::entangled_input(static_cast<int>(owned));
  if (!spec.is_array()) throw ConfigError(std::string(who) + "_input must be a list or \"entangled\"");
  if (spec.size() != owned)
    throw ConfigError(std::string(who) + "_input has " + std::to_string(spec.size()) + " entries for " +
                      std::to_string(owned) + " wires");
  std::vector<std::string> names;
  for (const auto& e : spec) {
    if (e.is_number_integer()) names.push_back("angle:" + std::to_string(e.get<int>()));
    else if (e.is_string()) names.push_back(e.get<std::string>());
    else throw ConfigError(std::string(who) + "_input entries are names or integers");
  }
  try {
    return protocol::named_input(names);
  } catch (const protocol::ProtocolError& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

std::vector<std::string> builtin_names() {
  std::vector<std::string> out;
  for (const auto& [name, _] : builtins()) out.push_back(name);
  return out;
}

json builtin_config(const std::string& name) {
  auto it = builtins().find(name);
  if (it == builtins().end()) throw ConfigError("unknown builtin '" + name + "'");
  return it->second;
}

std::vector<std::string> builtin_strategy_names() {
  return {"flag-guess", "honest", "random-pauli", "random-slot-z"};
}

adversary::AttackStrategy builtin_strategy(const std::string& name) {
  using namespace adversary;
  if (name == "honest") return {};
  if (name == "random-pauli")
    return {name, PauliAttack{{PauliHit{Target::random_vertex, 0, 0, std::nullopt, PhasePoint::before_measurement}}}};
  if (name == "random-slot-z")
    return {name, PauliAttack{{PauliHit{Target::random_primary, 0, 0, Pauli::z, PhasePoint::before_measurement}}}};
  if (name == "flag-guess") return {name, FlagGuess{}};
  throw ConfigError("unknown builtin strategy '" + name + "'");
}

ExperimentConfig parse_config(const json& input, const std::filesystem::path& base_dir) {
  if (!input.is_object()) throw ConfigError("configuration must be a JSON object");
  json j = input;
  if (j.contains("builtin")) {
    json merged = builtin_config(j.at("builtin").get<std::string>());
    if (j.contains("graph")) merged.erase("gates");
    if (j.contains("gates")) {
      merged.erase("graph");
      merged.erase("phi");
    }
    json patch = j;
    patch.erase("builtin");
    merged.merge_patch(patch);
    j = std::move(merged);
  }

  ExperimentConfig c;
  try {
    c.source = j;
    c.base_dir = base_dir;
    c.name = j.value("name", std::string("experiment"));
    if (j.contains("gates") == j.contains("graph")) throw ConfigError("give exactly one of gates or graph");
    if (j.contains("gates")) {
      c.gates = j.at("gates").get<std::vector<std::string>>();
      c.wires = j.at("wires").get<int>();
      if (c.wires < 1) throw ConfigError("wires must be positive");
    } else {
      const json& g = j.at("graph");
      c.graph = graph::base_graph_from_json(g.is_string() ? read_json_file(resolve(base_dir, g.get<std::string>())) : g);
      for (int k : j.at("phi").get<std::vector<int>>()) c.phi.emplace_back(k);
      c.wires = static_cast<int>(c.graph->inputs().size());
    }
    c.client_wires = int_list(j, "client_wires");
    c.server_wires = int_list(j, "server_wires");
    if (j.contains("client_input")) c.client_input = j.at("client_input");
    if (j.contains("server_input")) c.server_input = j.at("server_input");
    if (j.contains("mode")) c.mode = protocol::parse_mode(j.at("mode").get<std::string>());
    c.seed = j.value("seed", std::uint64_t{1});
    c.trials = j.value("trials", std::uint64_t{1});
    if (c.trials < 1) throw ConfigError("trials must be at least 1");
    c.flag_bits = j.value("flag_bits", 8);
    if (c.flag_bits < 1 || c.flag_bits > 63) throw ConfigError("flag_bits must lie in 1..63");
    if (j.contains("d")) {
      c.d = j.at("d").get<int>();
      if (c.d < 1) throw ConfigError("d must be at least 1");
    } else if (j.contains("tolerance")) {
      const int degree = std::max(1, make_pattern(c).base.max_degree());
      c.d = adversary::epsilon_bound(degree, j.at("tolerance").get<double>()).d;
    }
    if (j.contains("strategy")) {
      const json& s = j.at("strategy");
      if (s.is_string()) {
        const auto where = s.get<std::string>();
        c.strategy = where.starts_with("builtin:") ? builtin_strategy(where.substr(8))
                                                   : adversary::parse_strategy(read_json_file(resolve(base_dir, where)));
      } else {
        c.strategy = adversary::parse_strategy(s);
      }
    }
    if (j.contains("blindness")) {
      const json& b = j.at("blindness");
      c.blindness_mode = b.value("mode", std::string("auto"));
      if (c.blindness_mode != "auto" && c.blindness_mode != "exact" && c.blindness_mode != "montecarlo")
        throw ConfigError("blindness mode must be auto, exact or montecarlo");
      c.blindness_samples = b.value("samples", std::uint64_t{10000});
      if (b.contains("alternative")) c.blindness_alternative = b.at("alternative");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  } catch (const adversary::AdversaryError& e) {
    throw ConfigError(e.what());
  } catch (const graph::GraphError& e) {
    throw ConfigError(e.what());
  } catch (const protocol::ProtocolError& e) {
    throw ConfigError(e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::string& where) {
  if (where.starts_with("builtin:")) return parse_config(builtin_config(where.substr(8)));
  const std::filesystem::path path(where);
  return parse_config(read_json_file(path), path.parent_path());
}

pattern::MeasurementPattern make_pattern(const ExperimentConfig& c) {
  try {
    if (c.graph) return pattern::pattern_from_graph(*c.graph, c.phi);
    std::vector<pattern::Fragment> fragments;
    for (const auto& g : c.gates) fragments.push_back(pattern::compile_gate(pattern::parse_gate(g), c.wires));
    return pattern::build_pattern(pattern::compose_patterns(fragments, c.wires));
  } catch (const pattern::PatternError& e) {
    throw ConfigError(e.what());
  } catch (const graph::GraphError& e) {
    throw ConfigError(e.what());
  }
}

adversary::Scenario make_scenario(const ExperimentConfig& c) {
  try {
    auto p = make_pattern(c);
    Eigen::MatrixXcd u;
    if (c.graph) {
      if (!c.graph->outputs().empty()) u = pattern::pattern_unitary(p);
    } else {
      u = Eigen::MatrixXcd::Identity(1 << c.wires, 1 << c.wires);
      for (const auto& g : c.gates) u = pattern::gate_matrix(pattern::parse_gate(g), c.wires) * u;
    }
    adversary::Scenario sc{protocol::make_setup(std::move(p), c.client_wires, c.server_wires), u,
                           party_input(c.client_input, c.client_wires.size(), "client"),
                           party_input(c.server_input, c.server_wires.size(), "server"),
                           {}};
    sc.options.mode = c.mode;
    sc.options.flag_bits = c.flag_bits;
    if (c.strategy) adversary::validate_strategy(*c.strategy, sc.setup, c.mode);
    return sc;
  } catch (const pattern::PatternError& e) {
    throw ConfigError(e.what());
  } catch (const protocol::ProtocolError& e) {
    throw ConfigError(e.what());
  } catch (const adversary::AdversaryError& e) {
    throw ConfigError(e.what());
  }
}

adversary::Scenario alternative_scenario(const ExperimentConfig& c) {
  json merged = c.source;
  merged.erase("blindness");
  merged.erase("strategy");
  if (c.blindness_alternative) {
    const json& alt = *c.blindness_alternative;
    if (alt.contains("gates")) {
      merged.erase("graph");
      merged.erase("phi");
    }
    if (alt.contains("graph")) merged.erase("gates");
    merged.merge_patch(alt);
  }
  return make_scenario(parse_config(merged, c.base_dir));
}

}  // namespace qyao::config
