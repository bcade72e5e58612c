// Copyright 2026 The qyao-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "qyao/config.hpp"
#include "support/oracles.hpp"

using namespace qyao;
using namespace qyao::config;
using nlohmann::json;

namespace {

std::string cfg(const std::string& file) { return std::string(QYAO_CONFIG_DIR) + "/" + file; }

}  // namespace

TEST_CASE("builtins load and build scenarios") {
  for (const auto& name : builtin_names()) {
    CAPTURE(name);
    const auto c = load_config("builtin:" + name);
    CHECK(c.name == name);
    const auto sc = make_scenario(c);
    CHECK(sc.setup.wires() == c.wires);
  }
  for (const auto& name : builtin_strategy_names()) CHECK_NOTHROW(builtin_strategy(name));
  CHECK_THROWS_AS(load_config("builtin:nope"), ConfigError);
  CHECK_THROWS_AS(builtin_strategy("nope"), ConfigError);
}

TEST_CASE("scenario unitaries match literal gates") {
  const auto cz = make_scenario(load_config("builtin:cz-2wire"));
  CHECK(oracle::phase_overlap(cz.unitary, oracle::cz(0, 1, 2)) > 1 - 1e-12);
  const auto cnot = make_scenario(load_config("builtin:cnot-2wire"));
  CHECK(oracle::phase_overlap(cnot.unitary, oracle::cnot(0, 1, 2)) > 1 - 1e-12);
  const auto h = make_scenario(load_config("builtin:hadamard"));
  CHECK(oracle::phase_overlap(h.unitary, oracle::had()) > 1 - 1e-12);
}

TEST_CASE("overrides merge onto a builtin") {
  const auto c = parse_config(json::parse(R"({"builtin": "hadamard", "seed": 9, "trials": 5, "mode": "noninteractive",
                                              "client_input": [3]})"));
  CHECK(c.gates == std::vector<std::string>{"H 0"});
  CHECK(c.seed == 9);
  CHECK(c.trials == 5);
  CHECK(c.mode == protocol::Mode::noninteractive);
  const auto sc = make_scenario(c);
  Eigen::VectorXcd plus3(2);
  plus3 << oracle::kS, std::polar(oracle::kS, 3 * std::numbers::pi / 4);
  CHECK(oracle::overlap(sc.client_input.amplitudes, plus3) == doctest::Approx(1.0));
  // a graph replaces the builtin's gate list
  const auto g = parse_config(json::parse(R"({"builtin": "hadamard",
      "graph": {"vertices": [{"id": 0, "column": 0, "row": 0}, {"id": 1, "column": 1, "row": 0}],
                "edges": [[0, 1]], "inputs": [0], "outputs": [1]},
      "phi": [6, 0, 6]})"));
  CHECK(g.graph.has_value());
  CHECK(g.gates.empty());
}

TEST_CASE("malformed configurations") {
  for (const char* d : {R"([1, 2])", R"({"wires": 1})",
                        R"({"gates": ["H 0"], "wires": 1, "graph": {}, "phi": []})",
                        R"({"gates": ["H 0"], "wires": 1, "client_wires": [0], "client_input": ["+", "+"]})",
                        R"({"gates": ["H 0"], "wires": 1, "client_wires": [0], "client_input": [true]})",
                        R"({"gates": ["H 0"], "wires": 1, "client_wires": [0], "client_input": ["+"], "mode": "x"})",
                        R"({"gates": ["H 0"], "wires": 1, "trials": 0})",
                        R"({"gates": ["H 0"], "wires": 1, "flag_bits": 0})",
                        R"({"gates": ["H 0"], "wires": 1, "d": 0})",
                        R"({"gates": ["H 0"], "wires": 1, "strategy": "builtin:nope"})",
                        R"({"gates": ["H 0"], "wires": 1, "blindness": {"mode": "fast"}})"}) {
    CAPTURE(d);
    CHECK_THROWS_AS(make_scenario(parse_config(json::parse(d))), ConfigError);
  }
  CHECK_THROWS_AS(make_scenario(parse_config(json::parse(R"({"gates": ["SWAP 0 1"], "wires": 2})"))), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/file.json"), ConfigError);
}

TEST_CASE("tolerance selects d") {
  const auto c = parse_config(json::parse(R"({"builtin": "identity-path2", "tolerance": 7})"));
  const int degree = std::max(1, make_pattern(c).base.max_degree());
  CHECK(c.d == std::max(1, static_cast<int>(std::ceil(7.0 / (2.0 * (2 * degree + 1))))));
  const auto explicit_d = parse_config(json::parse(R"({"builtin": "identity-path2", "d": 3, "tolerance": 7})"));
  CHECK(explicit_d.d == 3);
}

TEST_CASE("strategies from files and builtins") {
  const auto a = load_config(cfg("attack-random-pauli.json"));
  REQUIRE(a.strategy.has_value());
  CHECK(a.strategy->name == "random-pauli");
  const auto b = parse_config(json::parse(R"({"builtin": "identity-path2", "strategy": "builtin:random-slot-z"})"));
  REQUIRE(b.strategy.has_value());
  CHECK(b.strategy->name == "random-slot-z");
  // OTM strategies need the non-interactive mode
  const auto f = parse_config(json::parse(R"({"builtin": "identity-path2", "strategy": {"type": "flag_guess"}})"));
  CHECK_THROWS_AS(make_scenario(f), ConfigError);
}

TEST_CASE("bundled config files parse") {
  for (const char* f : {"identity-path2.json", "cnot-2wire.json", "attack-random-pauli.json", "attack-flag-guess.json",
                        "blindness-single-vertex.json", "blindness-path2.json", "path2-graph.json",
                        "run-trap-hit.json"}) {
    CAPTURE(f);
    const auto c = load_config(cfg(f));
    CHECK_NOTHROW(make_scenario(c));
  }
}

TEST_CASE("blindness alternatives") {
  const auto c = load_config(cfg("blindness-single-vertex.json"));
  CHECK(c.blindness_mode == "exact");
  const auto a = make_scenario(c);
  const auto b = alternative_scenario(c);
  CHECK_NOTHROW(adversary::check_same_shape(a, b));
  CHECK(oracle::overlap(b.client_input.amplitudes, oracle::ket("-")) == doctest::Approx(1.0));
  const auto p = load_config(cfg("blindness-path2.json"));
  CHECK(p.blindness_samples == 10000);
  const auto pb = alternative_scenario(p);
  CHECK(oracle::phase_overlap(pb.unitary, oracle::tgate()) > 1 - 1e-12);
  CHECK_NOTHROW(adversary::check_same_shape(make_scenario(p), pb));
}

TEST_CASE("graph configs use the pattern's own unitary") {
  const auto c = load_config(cfg("path2-graph.json"));
  const auto sc = make_scenario(c);
  // J(a) = H diag(1, e^{-ia}), angles 6 then 6 (pi/4 units)
  const Eigen::MatrixXcd j = oracle::had() * oracle::mat2(1, 0, 0, std::polar(1.0, -6 * std::numbers::pi / 4));
  CHECK(oracle::phase_overlap(sc.unitary, j * j) > 1 - 1e-9);
}
