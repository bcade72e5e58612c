// Copyright 2026 The qyao-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "qyao/qsim.hpp"
#include "support/oracles.hpp"

using namespace qyao;
using namespace qyao::qsim;

namespace {

Eigen::VectorXcd plus_phi(int k) {
  Eigen::VectorXcd v(2);
  v << oracle::kS, std::polar(oracle::kS, k * std::numbers::pi / 4);
  return v;
}

Vec2 to_vec2(const Eigen::VectorXcd& v) { return {v(0), v(1)}; }

}  // namespace

TEST_CASE("angles wrap modulo 2 pi") {
  CHECK(Angle(9) == Angle(1));
  CHECK(Angle(-1) == Angle(7));
  CHECK((Angle(5) + Angle(6)).eighths() == 3);
  CHECK(Angle(3).signed_by(true) == Angle(5));
  CHECK(Angle(3).plus_pi_if(true) == Angle(7));
  CHECK(Angle(2).radians() == doctest::Approx(std::numbers::pi / 2));
}

TEST_CASE("single qubit gates match literal matrices") {
  const Eigen::MatrixXcd x = oracle::mat2(0, 1, 1, 0), y = oracle::mat2(0, oracle::cplx(0, -1), oracle::cplx(0, 1), 0),
                         z = oracle::mat2(1, 0, 0, -1);
  CHECK((to_eigen(pauli_x()) - x).norm() < 1e-12);
  CHECK((to_eigen(pauli_y()) - y).norm() < 1e-12);
  CHECK((to_eigen(pauli_z()) - z).norm() < 1e-12);
  CHECK((to_eigen(hadamard()) - oracle::had()).norm() < 1e-12);
  CHECK((to_eigen(z_rotation(Angle(1))) - oracle::tgate()).norm() < 1e-12);
  for (int k = 0; k < 8; ++k) {
    const auto p = plus_state(Angle(k));
    CHECK(std::abs(p[0] - plus_phi(k)(0)) < 1e-12);
    CHECK(std::abs(p[1] - plus_phi(k)(1)) < 1e-12);
  }
}

TEST_CASE("two qubit register against dense kron products") {
  QuantumState st;
  const auto a = oracle::ket("t"), b = oracle::ket("+i");
  st.prepare(0, to_vec2(a));
  st.prepare(1, to_vec2(b));
  st.apply(0, hadamard());
  st.cz(0, 1);
  st.apply(1, z_rotation(Angle(1)));
  const std::vector<Qubit> qs{0, 1};
  const auto got = st.pure_state(qs);
  const Eigen::VectorXcd want = oracle::on_wire(oracle::tgate(), 1, 2) * oracle::cz(0, 1, 2) *
                                oracle::on_wire(oracle::had(), 0, 2) * oracle::kron(a, b);
  CHECK(oracle::overlap(got, want) == doctest::Approx(1.0));
  const std::vector<Qubit> rev{1, 0};
  const Eigen::VectorXcd swapped = st.pure_state(rev);
  CHECK(std::abs(swapped(1) - got(2)) < 1e-12);
  CHECK(st.norm() == doctest::Approx(1.0));
}

TEST_CASE("measurement probabilities follow the Born rule") {
  for (int k = 0; k < 8; ++k) {
    QuantumState st;
    st.prepare(0, to_vec2(oracle::ket("t")));
    const double want = std::norm(plus_phi(k).dot(oracle::ket("t")));
    CHECK(st.probability_zero(0, Angle(k)) == doctest::Approx(want));
  }
  // frequency check
  Rng rng(3);
  int zeros = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    QuantumState st;
    st.prepare_plus_theta(0, Angle(2));
    zeros += !st.measure(0, Angle(0), rng);
  }
  CHECK(oracle::within_sigma(static_cast<double>(zeros) / n, 0.5, n, 5));
}

TEST_CASE("measurement collapses an entangled partner") {
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    QuantumState st;
    st.prepare_plus_theta(0, Angle(0));
    st.prepare_plus_theta(1, Angle(0));
    st.cz(0, 1);
    const bool b = st.measure(0, Angle(0), rng);
    // qubit 1 is left in |b>
    const std::vector<Qubit> q1{1};
    const auto rho = st.reduced_density(q1);
    CHECK(std::abs(rho(b ? 1 : 0, b ? 1 : 0) - 1.0) < 1e-12);
    CHECK(st.is_retired(0));
    CHECK(st.outcome(0) == b);
    CHECK(st.is_live(1));
  }
}

TEST_CASE("pads compose") {
  const PauliPad a{true, false, Angle(3)}, b{false, true, Angle(0)};
  const auto c = a.then(b);
  QuantumState s1, s2;
  s1.prepare(0, to_vec2(oracle::ket("t")));
  s2.prepare(0, to_vec2(oracle::ket("t")));
  s1.apply_pad(0, a);
  s1.apply_pad(0, b);
  s2.apply_pad(0, c);
  const std::vector<Qubit> q{0};
  CHECK(fidelity(s1.pure_state(q), s2.pure_state(q)) == doctest::Approx(1.0));
}

TEST_CASE("dummies stay out of the register") {
  QuantumState st;
  st.prepare_plus_theta(0, Angle(1));
  st.prepare_dummy(1, true);
  st.cz(0, 1);
  CHECK_FALSE(st.in_register(1));
  const std::vector<Qubit> q{0};
  Rng rng(1);
  st.discard(1);
  // Z applied by the |1> dummy: |+_{pi/4}> -> |+_{5pi/4}>
  CHECK(st.probability_zero(0, Angle(5)) == doctest::Approx(1.0));
  CHECK_FALSE(st.measure(0, Angle(5), rng));
}

TEST_CASE("misuse raises errors") {
  QuantumState st(3);
  Rng rng(1);
  st.prepare_plus_theta(0, Angle(0));
  CHECK_THROWS_AS(st.prepare_plus_theta(0, Angle(0)), SimError);
  st.measure(0, Angle(0), rng);
  CHECK_THROWS_AS(st.measure(0, Angle(0), rng), SimError);
  CHECK_THROWS_AS(st.cz(5, 6), SimError);
  for (int q = 1; q <= 4; ++q) st.prepare_plus_theta(q, Angle(1));
  st.cz(1, 2);
  st.cz(2, 3);
  CHECK_THROWS_AS(st.cz(3, 4), SimError);
}

TEST_CASE("trace distance and fidelity") {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2, 2), b = Eigen::MatrixXcd::Zero(2, 2);
  a(0, 0) = 1;
  b(1, 1) = 1;
  CHECK(trace_distance(a, b) == doctest::Approx(1.0));
  CHECK(trace_distance(a, a) == doctest::Approx(0.0));
  const Eigen::MatrixXcd mixed = Eigen::MatrixXcd::Identity(2, 2) / 2.0;
  CHECK(trace_distance(a, mixed) == doctest::Approx(0.5));
  CHECK(fidelity(oracle::ket("+"), oracle::ket("0")) == doctest::Approx(0.5));
  CHECK(fidelity(mixed, oracle::ket("t")) == doctest::Approx(0.5));
}
