// Copyright 2026 The qyao-sim Authors
// SPDX-License-Identifier: Apache-2.0

// Strategy files. Example:
//   {"name": "z-on-input", "type": "pauli",
//    "hits": [{"location": 0, "pauli": "Z", "point": "before_measurement"}]}

#include "qyao/adversary.hpp"

namespace qyao::adversary {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

using nlohmann::json;

std::optional<Pauli> parse_pauli(const std::string& s) {
  if (s == "X" || s == "x") return Pauli::x;
  if (s == "Y" || s == "y") return Pauli::y;
  if (s == "Z" || s == "z") return Pauli::z;
  if (s == "random") return std::nullopt;
  throw AdversaryError("unknown Pauli '" + s + "'");
}

PhasePoint parse_point(const std::string& s) {
  if (s == "before_measurement") return PhasePoint::before_measurement;
  if (s == "on_output") return PhasePoint::on_output;
  throw AdversaryError("unknown phase point '" + s + "'");
}

qsim::Mat2 named_operator(const std::string& s) {
  if (s == "I") return {1, 0, 0, 1};
  if (s == "X") return qsim::pauli_x();
  if (s == "Y") return qsim::pauli_y();
  if (s == "Z") return qsim::pauli_z();
  if (s == "H") return qsim::hadamard();
  if (s == "S") return qsim::z_rotation(Angle::half_pi());
  if (s == "T") return qsim::z_rotation(Angle(1));
  throw AdversaryError("unknown operator '" + s + "'");
}

PauliHit parse_hit(const json& j) {
  PauliHit h;
  if (j.contains("target")) {
    const auto t = j.at("target").get<std::string>();
    if (t == "vertex") h.target = Target::vertex;
    else if (t == "random_primary") h.target = Target::random_primary;
    else if (t == "random_vertex") h.target = Target::random_vertex;
    else throw AdversaryError("unknown target '" + t + "'");
  } else if (j.contains("vertex")) {
    h.target = Target::vertex;
  } else if (j.contains("location")) {
    h.target = Target::random_primary;
  } else {
    h.target = Target::random_vertex;
  }
  if (h.target == Target::vertex) h.vertex = j.at("vertex").get<VertexId>();
  if (h.target == Target::random_primary) h.location = j.at("location").get<graph::LocationId>();
  h.pauli = parse_pauli(j.value("pauli", std::string("random")));
  h.point = parse_point(j.value("point", std::string("before_measurement")));
  return h;
}

json hit_json(const PauliHit& h) {
  json j;
  switch (h.target) {
    case Target::vertex:
      j["target"] = "vertex";
      j["vertex"] = h.vertex;
      break;
    case Target::random_primary:
      j["target"] = "random_primary";
      j["location"] = h.location;
      break;
    case Target::random_vertex: j["target"] = "random_vertex"; break;
  }
  j["pauli"] = h.pauli ? pauli_name(*h.pauli) : "random";
  j["point"] = phase_point_name(h.point);
  return j;
}

}  // namespace

AttackStrategy parse_strategy(const json& j) {
  try {
    AttackStrategy s;
    const auto type = j.at("type").get<std::string>();
    s.name = j.value("name", type);
    if (type == "honest") {
      s.kind = Honest{};
    } else if (type == "pauli") {
      PauliAttack a;
      for (const auto& h : j.at("hits")) a.hits.push_back(parse_hit(h));
      if (a.hits.empty()) throw AdversaryError("pauli strategy without hits");
      s.kind = a;
    } else if (type == "outcome_lie") {
      OutcomeLie a;
      for (const auto& v : j.at("flips")) a.flips[v.get<VertexId>()] = true;
      s.kind = a;
    } else if (type == "otm_inconsistent_opening") {
      OtmInconsistentOpening a;
      for (const auto& f : j.at("flips")) {
        LabelFlip flip;
        flip.vertex = f.at("vertex").get<VertexId>();
        if (f.contains("owner") && !f.at("owner").is_string()) flip.owner = f.at("owner").get<VertexId>();
        else if (f.contains("owner") && f.at("owner") != "random") throw AdversaryError("owner must be a vertex or \"random\"");
        a.flips.push_back(flip);
      }
      s.kind = a;
    } else if (type == "flag_guess") {
      FlagGuess a;
      if (j.contains("owner")) a.owner = j.at("owner").get<VertexId>();
      s.kind = a;
    } else if (type == "input_deviation") {
      InputDeviation a;
      for (const auto& op : j.at("ops")) {
        a.names.push_back(op.get<std::string>());
        a.ops.push_back(named_operator(a.names.back()));
      }
      s.kind = a;
    } else if (type == "trap_hit") {
      s.kind = TrapHit{j.at("location").get<graph::LocationId>()};
    } else if (type == "compose") {
      Compose c;
      for (const auto& part : j.at("parts")) c.parts.push_back(parse_strategy(part));
      s.kind = std::move(c);
    } else {
      throw AdversaryError("unknown strategy type '" + type + "'");
    }
    return s;
  } catch (const json::exception& e) {
    throw AdversaryError(std::string("malformed strategy: ") + e.what());
  }
}

json to_json(const AttackStrategy& s) {
  json j{{"name", s.name}};
  std::visit(overloaded{
                 [&](const Honest&) { j["type"] = "honest"; },
                 [&](const PauliAttack& a) {
                   j["type"] = "pauli";
                   j["hits"] = json::array();
                   for (const auto& h : a.hits) j["hits"].push_back(hit_json(h));
                 },
                 [&](const OutcomeLie& a) {
                   j["type"] = "outcome_lie";
                   j["flips"] = json::array();
                   for (const auto& [v, flip] : a.flips)
                     if (flip) j["flips"].push_back(v);
                 },
                 [&](const OtmInconsistentOpening& a) {
                   j["type"] = "otm_inconsistent_opening";
                   j["flips"] = json::array();
                   for (const auto& f : a.flips)
                     j["flips"].push_back({{"vertex", f.vertex}, {"owner", f.owner ? json(*f.owner) : json("random")}});
                 },
                 [&](const FlagGuess& a) {
                   j["type"] = "flag_guess";
                   if (a.owner) j["owner"] = *a.owner;
                 },
                 [&](const InputDeviation& a) {
                   j["type"] = "input_deviation";
                   j["ops"] = a.names;
                 },
                 [&](const TrapHit& a) {
                   j["type"] = "trap_hit";
                   j["location"] = a.location;
                 },
                 [&](const Compose& c) {
                   j["type"] = "compose";
                   j["parts"] = json::array();
                   for (const auto& part : c.parts) j["parts"].push_back(to_json(part));
                 },
             },
             s.kind);
  return j;
}

}  // namespace qyao::adversary
