// Copyright 2026 The qyao-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "qyao/angle.hpp"
#include "qyao/random.hpp"

namespace qyao::qsim {

using cplx = std::complex<double>;
using Qubit = int;
using Vec2 = std::array<cplx, 2>;
using Mat2 = std::array<cplx, 4>;  // row-major

inline constexpr double kEngineTol = 1e-12;
inline constexpr int kDefaultCapacity = 22;

class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// X^x Z^z Z(phase): the phase rotation acts first.
struct PauliPad {
  bool x = false;
  bool z = false;
  Angle phase{};

  /// Pad equivalent to applying `*this` and then `next`, ignoring global phase.
  /// Only defined when `next.phase` is zero or `*this` has no X part.
  [[nodiscard]] PauliPad then(const PauliPad& next) const;
};

Mat2 pauli_x();
Mat2 pauli_y();
Mat2 pauli_z();
Mat2 hadamard();
/// diag(1, e^{i a})
Mat2 z_rotation(Angle a);
Vec2 plus_state(Angle theta);

/// Pure state over a set of qubit ids. A qubit is either unused, pending
/// (an unentangled single-qubit vector), in the dense register, or retired
/// with a recorded outcome. Pending qubits enter the register only when an
/// entangling gate needs them; a pending qubit in a basis state acts as a
/// classical control for cz and never enters at all.
class QuantumState {
 public:
  explicit QuantumState(int capacity = kDefaultCapacity) : capacity_(capacity) {}

  void prepare(Qubit q, Vec2 v);
  void prepare_plus_theta(Qubit q, Angle theta) { prepare(q, plus_state(theta)); }
  void prepare_dummy(Qubit q, bool d);
  /// Joint pure state for `qs`; qs[0] is the most significant tensor factor.
  void prepare_joint(std::span<const Qubit> qs, std::span<const cplx> amplitudes);

  void apply(Qubit q, const Mat2& m);
  void apply_pad(Qubit q, const PauliPad& pad);
  void apply_z_rotation(Qubit q, Angle a) { apply(q, z_rotation(a)); }
  void cz(Qubit a, Qubit b);

  /// Projects onto |+_delta> (outcome 0) or |-_delta> (outcome 1). Exactly
  /// one uniform draw per call.
  bool measure(Qubit q, Angle delta, Rng& rng);
  /// Drops an unentangled qubit without measuring it.
  void discard(Qubit q);
  /// Probability of outcome 0 without collapsing.
  [[nodiscard]] double probability_zero(Qubit q, Angle delta) const;

  [[nodiscard]] bool is_live(Qubit q) const;
  [[nodiscard]] bool is_retired(Qubit q) const;
  [[nodiscard]] bool in_register(Qubit q) const;
  [[nodiscard]] bool outcome(Qubit q) const;
  [[nodiscard]] std::vector<Qubit> live_qubits() const;
  [[nodiscard]] int register_size() const { return static_cast<int>(reg_qubits_.size()); }
  [[nodiscard]] int high_water() const { return high_water_; }
  [[nodiscard]] int capacity() const { return capacity_; }
  [[nodiscard]] double norm() const;

  /// State vector of `qs` (qs[0] most significant). Every live qubit must be
  /// listed.
  [[nodiscard]] Eigen::VectorXcd pure_state(std::span<const Qubit> qs) const;
  /// Reduced density matrix of `qs` (at most 10 qubits), qs[0] most significant.
  [[nodiscard]] Eigen::MatrixXcd reduced_density(std::span<const Qubit> qs) const;

 private:
  enum class Mode : std::uint8_t { unused, pending, active, retired };
  struct Slot {
    Mode mode = Mode::unused;
    Vec2 vec{};
    int position = -1;
    bool outcome = false;
  };

  Slot& slot(Qubit q);
  [[nodiscard]] const Slot& slot(Qubit q) const;
  Slot& require_live(Qubit q, const char* op);
  void activate(Qubit q);
  void remove_from_register(Qubit q, std::span<const cplx> kept);
  [[nodiscard]] static int classical_value(const Vec2& v);

  int capacity_;
  std::vector<Slot> slots_;
  std::vector<Qubit> reg_qubits_;
  std::vector<cplx> amps_{cplx(1.0, 0.0)};
  int high_water_ = 0;
};

double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);
/// |<a|b>|^2
double fidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);
/// <psi|rho|psi>
double fidelity(const Eigen::MatrixXcd& rho, const Eigen::VectorXcd& psi);
Eigen::MatrixXcd to_eigen(const Mat2& m);

}  // namespace qyao::qsim
