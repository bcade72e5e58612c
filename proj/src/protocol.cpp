// Copyright 2026 The qyao-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "qyao/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qyao::protocol {

const char* mode_name(Mode m) { return m == Mode::interactive ? "interactive" : "noninteractive"; }

Mode parse_mode(const std::string& text) {
  if (text == "interactive") return Mode::interactive;
  if (text == "noninteractive" || text == "non-interactive") return Mode::noninteractive;
  throw ProtocolError("unknown mode '" + text + "'");
}

Setup make_setup(pattern::MeasurementPattern p, std::vector<int> client_wires, std::vector<int> server_wires) {
  Setup s;
  s.server_owned.assign(p.wires, 0);
  std::vector<int> seen(p.wires, 0);
  for (int w : client_wires) {
    if (w < 0 || w >= p.wires) throw ProtocolError("client wire " + std::to_string(w) + " out of range");
    ++seen[w];
  }
  for (int w : server_wires) {
    if (w < 0 || w >= p.wires) throw ProtocolError("server wire " + std::to_string(w) + " out of range");
    ++seen[w];
    s.server_owned[w] = 1;
  }
  for (int w = 0; w < p.wires; ++w)
    if (seen[w] != 1) throw ProtocolError("wire " + std::to_string(w) + " must belong to exactly one party");

  s.dtg = graph::dotted_triple_graph(p.base);
  if (s.dtg.num_locations() != p.dotted.size()) throw ProtocolError("pattern and DT(G) disagree");
  s.extended_past.resize(s.dtg.size());
  for (VertexId q = 0; q < s.dtg.size(); ++q) s.extended_past[q] = graph::extended_past(s.dtg, p.deps, q);
  s.pattern = std::move(p);
  s.client_wires = std::move(client_wires);
  s.server_wires = std::move(server_wires);
  return s;
}

namespace {

using qsim::cplx;

qsim::Vec2 named_state(const std::string& name) {
  const double h = 1.0 / std::sqrt(2.0);
  if (name == "0") return {1, 0};
  if (name == "1") return {0, 1};
  if (name == "+") return {h, h};
  if (name == "-") return {h, -h};
  if (name == "+i") return {h, cplx(0, h)};
  if (name == "-i") return {h, cplx(0, -h)};
  if (name == "t") {
    const double a = std::numbers::pi / 8;
    return {std::cos(a), std::polar(std::sin(a), std::numbers::pi / 4)};
  }
  if (name.starts_with("angle:")) {
    try {
      return qsim::plus_state(Angle(std::stoi(name.substr(6))));
    } catch (const std::logic_error&) {
    }
  }
  throw ProtocolError("unknown input state '" + name + "'");
}

int qubit_count(const Eigen::VectorXcd& v) {
  const auto n = static_cast<std::size_t>(v.size());
  if (n == 0 || (n & (n - 1)) != 0) throw ProtocolError("state dimension is not a power of two");
  int k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

}  // namespace

PartyInput named_input(std::span<const std::string> names) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(1);
  for (const auto& name : names) {
    const auto s = named_state(name);
    Eigen::VectorXcd next(v.size() * 2);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      next[2 * i] = v[i] * s[0];
      next[2 * i + 1] = v[i] * s[1];
    }
    v = std::move(next);
  }
  return {v, 0};
}

PartyInput entangled_input(int wires) {
  const std::size_t dim = std::size_t{1} << (2 * wires);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  const double a = 1.0 / std::sqrt(static_cast<double>(std::size_t{1} << wires));
  for (std::size_t w = 0; w < (std::size_t{1} << wires); ++w) v[static_cast<Eigen::Index>((w << wires) | w)] = a;
  return {v, wires};
}

Eigen::VectorXcd joint_input(const Setup& setup, const PartyInput& client, const PartyInput& server) {
  const int W = setup.wires();
  const int nc = static_cast<int>(setup.client_wires.size()), ns = static_cast<int>(setup.server_wires.size());
  if (qubit_count(client.amplitudes) != nc + client.references)
    throw ProtocolError("client input has the wrong number of qubits");
  if (qubit_count(server.amplitudes) != ns + server.references)
    throw ProtocolError("server input has the wrong number of qubits");
  const int cr = client.references, sr = server.references;
  const int total = W + cr + sr;
  Eigen::VectorXcd out(static_cast<Eigen::Index>(std::size_t{1} << total));
  auto bit = [total](std::size_t idx, int pos) { return (idx >> (total - 1 - pos)) & 1U; };
  for (std::size_t idx = 0; idx < (std::size_t{1} << total); ++idx) {
    std::size_t ci = 0, si = 0;
    for (int w : setup.client_wires) ci = (ci << 1) | bit(idx, w);
    for (int k = 0; k < cr; ++k) ci = (ci << 1) | bit(idx, W + k);
    for (int w : setup.server_wires) si = (si << 1) | bit(idx, w);
    for (int k = 0; k < sr; ++k) si = (si << 1) | bit(idx, W + cr + k);
    out[static_cast<Eigen::Index>(idx)] =
        client.amplitudes[static_cast<Eigen::Index>(ci)] * server.amplitudes[static_cast<Eigen::Index>(si)];
  }
  return out;
}

Eigen::VectorXcd apply_on_wires(const Eigen::MatrixXcd& u, const Eigen::VectorXcd& joint, int wires) {
  const Eigen::Index dw = Eigen::Index{1} << wires;
  if (u.rows() != dw || u.cols() != dw) throw ProtocolError("unitary does not match the wire count");
  if (joint.size() % dw != 0) throw ProtocolError("state smaller than the wires");
  const Eigen::Index rest = joint.size() / dw;
  // joint index = wire_index * rest + reference_index
  const Eigen::Map<const Eigen::MatrixXcd> m(joint.data(), rest, dw);
  Eigen::MatrixXcd applied = m * u.transpose();
  return Eigen::Map<Eigen::VectorXcd>(applied.data(), joint.size());
}

// ---------------------------------------------------------------------------

ClientSecrets sample_secrets(const Setup& setup, Rng& rng) {
  const auto& dtg = setup.dtg;
  ClientSecrets s;
  s.colouring = graph::sample_trap_colouring(dtg, rng);
  const auto n = static_cast<std::size_t>(dtg.size());
  s.theta.resize(n);
  for (auto& t : s.theta) t = Angle(static_cast<int>(uniform_below(rng, 8)));
  s.r.resize(n);
  for (auto& b : s.r) b = random_bit(rng);
  s.d.resize(n);
  for (auto& b : s.d) b = random_bit(rng);
  s.x.resize(n);
  for (auto& b : s.x) b = random_bit(rng);
  s.order = pattern::dtg_measurement_order(dtg, setup.pattern, rng);
  finalize_secrets(setup, s);
  return s;
}

void finalize_secrets(const Setup& setup, ClientSecrets& s) {
  const auto& dtg = setup.dtg;
  const auto n = static_cast<std::size_t>(dtg.size());
  if (s.theta.size() != n || s.r.size() != n || s.d.size() != n || s.x.size() != n)
    throw ProtocolError("secrets do not cover every vertex");
  if (!graph::validate_colouring(dtg, s.colouring).empty()) throw ProtocolError("invalid trap-colouring");
  s.computation = graph::computation_vertices(s.colouring, dtg);
  s.dummy.assign(n, 0);
  s.trap.assign(n, 0);
  for (VertexId q = 0; q < dtg.size(); ++q) {
    s.dummy[q] = graph::is_dummy(dtg, s.colouring, q);
    s.trap[q] = graph::is_trap(dtg, s.colouring, q);
  }
  if (s.s.size() != n) s.s.assign(n, -1);
}

}  // namespace qyao::protocol
