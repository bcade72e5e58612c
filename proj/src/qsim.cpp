// Copyright 2026 The qyao-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "qyao/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qyao::qsim {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

cplx phase(Angle a) { return std::polar(1.0, a.radians()); }

std::string qstr(Qubit q) { return std::to_string(q); }

}  // namespace

PauliPad PauliPad::then(const PauliPad& next) const {
  if (next.phase != Angle::zero() && x)
    throw SimError("pad composition with a phase after an X is not a Pauli pad");
  return {x != next.x, z != next.z, phase + next.phase};
}

Mat2 pauli_x() { return {0, 1, 1, 0}; }
Mat2 pauli_y() { return {0, cplx(0, -1), cplx(0, 1), 0}; }
Mat2 pauli_z() { return {1, 0, 0, -1}; }
Mat2 hadamard() { return {kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2}; }
Mat2 z_rotation(Angle a) { return {1, 0, 0, phase(a)}; }
Vec2 plus_state(Angle theta) { return {kInvSqrt2, kInvSqrt2 * phase(theta)}; }

QuantumState::Slot& QuantumState::slot(Qubit q) {
  if (q < 0) throw SimError("negative qubit id " + qstr(q));
  if (q >= static_cast<Qubit>(slots_.size())) slots_.resize(q + 1);
  return slots_[q];
}

const QuantumState::Slot& QuantumState::slot(Qubit q) const {
  static const Slot unused{};
  if (q < 0 || q >= static_cast<Qubit>(slots_.size())) return unused;
  return slots_[q];
}

QuantumState::Slot& QuantumState::require_live(Qubit q, const char* op) {
  Slot& s = slot(q);
  if (s.mode != Mode::pending && s.mode != Mode::active)
    throw SimError(std::string(op) + ": qubit " + qstr(q) + " is not active");
  return s;
}

int QuantumState::classical_value(const Vec2& v) {
  if (v[1] == cplx(0.0, 0.0)) return 0;
  if (v[0] == cplx(0.0, 0.0)) return 1;
  return -1;
}

void QuantumState::prepare(Qubit q, Vec2 v) {
  Slot& s = slot(q);
  if (s.mode != Mode::unused) throw SimError("qubit " + qstr(q) + " already allocated");
  const double n = std::sqrt(std::norm(v[0]) + std::norm(v[1]));
  if (n < kEngineTol) throw SimError("zero vector for qubit " + qstr(q));
  s.mode = Mode::pending;
  s.vec = {v[0] / n, v[1] / n};
}

void QuantumState::prepare_dummy(Qubit q, bool d) { prepare(q, d ? Vec2{0, 1} : Vec2{1, 0}); }

void QuantumState::prepare_joint(std::span<const Qubit> qs, std::span<const cplx> amplitudes) {
  const int m = static_cast<int>(qs.size());
  if (amplitudes.size() != (std::size_t{1} << m)) throw SimError("joint state has the wrong dimension");
  if (register_size() + m > capacity_) throw SimError("register capacity exceeded");
  double n2 = 0;
  for (cplx a : amplitudes) n2 += std::norm(a);
  if (n2 < kEngineTol) throw SimError("zero joint state");
  for (Qubit q : qs)
    if (slot(q).mode != Mode::unused) throw SimError("qubit " + qstr(q) + " already allocated");

  const int base = register_size();
  const std::size_t old_size = amps_.size();
  std::vector<cplx> next(old_size << m);
  const double inv = 1.0 / std::sqrt(n2);
  for (std::size_t j = 0; j < amplitudes.size(); ++j) {
    // qs[t] is tensor factor t (most significant first) -> register bit base + t
    std::size_t hi = 0;
    for (int t = 0; t < m; ++t)
      if ((j >> (m - 1 - t)) & 1U) hi |= std::size_t{1} << t;
    for (std::size_t i = 0; i < old_size; ++i) next[i | (hi << base)] = amps_[i] * amplitudes[j] * inv;
  }
  amps_ = std::move(next);
  for (int t = 0; t < m; ++t) {
    Slot& s = slot(qs[t]);
    s.mode = Mode::active;
    s.position = base + t;
    reg_qubits_.push_back(qs[t]);
  }
  high_water_ = std::max(high_water_, register_size());
}

void QuantumState::activate(Qubit q) {
  Slot& s = slot(q);
  if (s.mode == Mode::active) return;
  if (register_size() + 1 > capacity_)
    throw SimError("register capacity " + std::to_string(capacity_) + " exceeded");
  const std::size_t old_size = amps_.size();
  amps_.resize(old_size * 2);
  for (std::size_t i = 0; i < old_size; ++i) {
    amps_[i + old_size] = amps_[i] * s.vec[1];
    amps_[i] *= s.vec[0];
  }
  s.mode = Mode::active;
  s.position = register_size();
  reg_qubits_.push_back(q);
  high_water_ = std::max(high_water_, register_size());
}

void QuantumState::apply(Qubit q, const Mat2& m) {
  Slot& s = require_live(q, "apply");
  if (s.mode == Mode::pending) {
    const Vec2 v = s.vec;
    s.vec = {m[0] * v[0] + m[1] * v[1], m[2] * v[0] + m[3] * v[1]};
    return;
  }
  const std::size_t bit = std::size_t{1} << s.position;
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    if (i & bit) continue;
    const cplx a0 = amps_[i], a1 = amps_[i | bit];
    amps_[i] = m[0] * a0 + m[1] * a1;
    amps_[i | bit] = m[2] * a0 + m[3] * a1;
  }
}

void QuantumState::apply_pad(Qubit q, const PauliPad& pad) {
  if (pad.phase != Angle::zero()) apply(q, z_rotation(pad.phase));
  if (pad.z) apply(q, pauli_z());
  if (pad.x) apply(q, pauli_x());
}

void QuantumState::cz(Qubit a, Qubit b) {
  if (a == b) throw SimError("cz needs two distinct qubits");
  Slot& sa = require_live(a, "cz");
  Slot& sb = require_live(b, "cz");
  if (sa.mode == Mode::pending) {
    if (const int c = classical_value(sa.vec); c >= 0) {
      if (c == 1) apply(b, pauli_z());
      return;
    }
  }
  if (sb.mode == Mode::pending) {
    if (const int c = classical_value(sb.vec); c >= 0) {
      if (c == 1) apply(a, pauli_z());
      return;
    }
  }
  activate(a);
  activate(b);
  const std::size_t mask = (std::size_t{1} << slot(a).position) | (std::size_t{1} << slot(b).position);
  for (std::size_t i = 0; i < amps_.size(); ++i)
    if ((i & mask) == mask) amps_[i] = -amps_[i];
}

double QuantumState::probability_zero(Qubit q, Angle delta) const {
  const Slot& s = slot(q);
  const cplx e = std::conj(phase(delta));
  if (s.mode == Mode::pending) return std::norm((s.vec[0] + e * s.vec[1]) * kInvSqrt2);
  if (s.mode != Mode::active) throw SimError("measure: qubit " + qstr(q) + " is not active");
  const std::size_t bit = std::size_t{1} << s.position;
  double p0 = 0;
  for (std::size_t i = 0; i < amps_.size(); ++i)
    if (!(i & bit)) p0 += std::norm((amps_[i] + e * amps_[i | bit]) * kInvSqrt2);
  return p0;
}

bool QuantumState::measure(Qubit q, Angle delta, Rng& rng) {
  Slot& s = require_live(q, "measure");
  double p0 = probability_zero(q, delta);
  const double u = uniform01(rng);
  bool b;
  if (p0 > 1.0 - kEngineTol) b = false;
  else if (p0 < kEngineTol) b = true;
  else b = u >= p0;

  if (s.mode == Mode::active) {
    const cplx e = std::conj(phase(delta));
    const cplx sign = b ? cplx(-1.0, 0.0) : cplx(1.0, 0.0);
    const std::size_t bit = std::size_t{1} << s.position;
    std::vector<cplx> kept;
    kept.reserve(amps_.size() / 2);
    double n2 = 0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      if (i & bit) continue;
      const cplx c = (amps_[i] + sign * e * amps_[i | bit]) * kInvSqrt2;
      kept.push_back(c);
      n2 += std::norm(c);
    }
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& c : kept) c *= inv;
    remove_from_register(q, kept);
  }
  s.mode = Mode::retired;
  s.outcome = b;
  s.position = -1;
  return b;
}

void QuantumState::discard(Qubit q) {
  Slot& s = require_live(q, "discard");
  if (s.mode == Mode::active) throw SimError("discard: qubit " + qstr(q) + " is entangled");
  s.mode = Mode::retired;
}

void QuantumState::remove_from_register(Qubit q, std::span<const cplx> kept) {
  const int k = slot(q).position;
  amps_.assign(kept.begin(), kept.end());
  reg_qubits_.erase(reg_qubits_.begin() + k);
  for (int p = k; p < register_size(); ++p) slots_[reg_qubits_[p]].position = p;
}

bool QuantumState::is_live(Qubit q) const {
  const Mode m = slot(q).mode;
  return m == Mode::pending || m == Mode::active;
}

bool QuantumState::is_retired(Qubit q) const { return slot(q).mode == Mode::retired; }
bool QuantumState::in_register(Qubit q) const { return slot(q).mode == Mode::active; }

bool QuantumState::outcome(Qubit q) const {
  if (!is_retired(q)) throw SimError("qubit " + qstr(q) + " has not been measured");
  return slot(q).outcome;
}

std::vector<Qubit> QuantumState::live_qubits() const {
  std::vector<Qubit> out;
  for (Qubit q = 0; q < static_cast<Qubit>(slots_.size()); ++q)
    if (is_live(q)) out.push_back(q);
  return out;
}

double QuantumState::norm() const {
  double n2 = 0;
  for (cplx a : amps_) n2 += std::norm(a);
  for (const auto& s : slots_)
    if (s.mode == Mode::pending) n2 *= std::norm(s.vec[0]) + std::norm(s.vec[1]);
  return std::sqrt(n2);
}

Eigen::VectorXcd QuantumState::pure_state(std::span<const Qubit> qs) const {
  const auto live = live_qubits();
  std::vector<Qubit> sorted(qs.begin(), qs.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw SimError("repeated qubit");
  if (sorted != live) throw SimError("pure_state must list exactly the live qubits");
  const int m = static_cast<int>(qs.size());
  if (m > 24) throw SimError("pure_state too large");
  Eigen::VectorXcd out(std::size_t{1} << m);
  for (std::size_t x = 0; x < (std::size_t{1} << m); ++x) {
    std::size_t reg = 0;
    cplx amp(1.0, 0.0);
    for (int t = 0; t < m; ++t) {
      const int bit = static_cast<int>((x >> (m - 1 - t)) & 1U);
      const Slot& s = slot(qs[t]);
      if (s.mode == Mode::active) reg |= static_cast<std::size_t>(bit) << s.position;
      else amp *= s.vec[bit];
    }
    out[static_cast<Eigen::Index>(x)] = amp * amps_[reg];
  }
  return out;
}

Eigen::MatrixXcd QuantumState::reduced_density(std::span<const Qubit> qs) const {
  const int m = static_cast<int>(qs.size());
  if (m > 10) throw SimError("reduced_density limited to 10 qubits");
  for (Qubit q : qs)
    if (!is_live(q)) throw SimError("reduced_density: qubit " + qstr(q) + " is not active");

  // Register part: kept register bits vs traced register bits.
  std::size_t keep_mask = 0;
  for (Qubit q : qs)
    if (slot(q).mode == Mode::active) keep_mask |= std::size_t{1} << slot(q).position;
  const std::size_t dim = std::size_t{1} << m;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);

  auto reg_index = [&](std::size_t x) {
    std::size_t reg = 0;
    for (int t = 0; t < m; ++t) {
      const Slot& s = slot(qs[t]);
      if (s.mode == Mode::active && ((x >> (m - 1 - t)) & 1U)) reg |= std::size_t{1} << s.position;
    }
    return reg;
  };
  auto pending_amp = [&](std::size_t x) {
    cplx amp(1.0, 0.0);
    for (int t = 0; t < m; ++t) {
      const Slot& s = slot(qs[t]);
      if (s.mode == Mode::pending) amp *= s.vec[(x >> (m - 1 - t)) & 1U];
    }
    return amp;
  };

  std::vector<std::size_t> reg_of(dim);
  std::vector<cplx> pend_of(dim);
  for (std::size_t x = 0; x < dim; ++x) {
    reg_of[x] = reg_index(x);
    pend_of[x] = pending_amp(x);
  }
  for (std::size_t o = 0; o < amps_.size(); ++o) {
    if (o & keep_mask) continue;  // o enumerates the traced-out register bits
    for (std::size_t x = 0; x < dim; ++x) {
      const cplx ax = amps_[o | reg_of[x]] * pend_of[x];
      if (ax == cplx(0.0, 0.0)) continue;
      for (std::size_t y = 0; y < dim; ++y)
        rho(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) +=
            ax * std::conj(amps_[o | reg_of[y]] * pend_of[y]);
    }
  }
  return rho;
}

double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw SimError("trace_distance: shape mismatch");
  const Eigen::MatrixXcd diff = a - b;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(diff, Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

double fidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  if (a.size() != b.size()) throw SimError("fidelity: dimension mismatch");
  return std::norm(a.dot(b)) / (a.squaredNorm() * b.squaredNorm());
}

double fidelity(const Eigen::MatrixXcd& rho, const Eigen::VectorXcd& psi) {
  if (rho.rows() != psi.size()) throw SimError("fidelity: dimension mismatch");
  return (psi.adjoint() * rho * psi)(0, 0).real() / psi.squaredNorm();
}

Eigen::MatrixXcd to_eigen(const Mat2& m) {
  Eigen::MatrixXcd out(2, 2);
  out << m[0], m[1], m[2], m[3];
  return out;
}

}  // namespace qyao::qsim
