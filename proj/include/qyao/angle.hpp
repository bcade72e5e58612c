// Copyright 2026 The qyao-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <numbers>
#include <ostream>

namespace qyao {

/// Multiple of pi/4, stored exactly as eighth-turns in [0, 8).
///
/// Every protocol-visible angle (phi, theta, delta) lives in this group so
/// that wire values are bit-exact; radians only appear inside the simulator.
class Angle {
 public:
  constexpr Angle() = default;
  constexpr explicit Angle(int eighths) : eighths_(static_cast<std::uint8_t>(((eighths % 8) + 8) % 8)) {}

  static constexpr Angle zero() { return Angle(0); }
  static constexpr Angle pi() { return Angle(4); }
  static constexpr Angle half_pi() { return Angle(2); }
  static constexpr Angle quarter_pi() { return Angle(1); }

  [[nodiscard]] constexpr int eighths() const { return eighths_; }
  [[nodiscard]] double radians() const { return eighths_ * (std::numbers::pi / 4.0); }

  [[nodiscard]] constexpr Angle operator+(Angle o) const { return Angle(eighths_ + o.eighths_); }
  [[nodiscard]] constexpr Angle operator-(Angle o) const { return Angle(eighths_ - o.eighths_); }
  [[nodiscard]] constexpr Angle operator-() const { return Angle(-static_cast<int>(eighths_)); }
  constexpr Angle& operator+=(Angle o) { return *this = *this + o; }

  /// (-1)^bit * a
  [[nodiscard]] constexpr Angle signed_by(bool bit) const { return bit ? -*this : *this; }
  /// a + bit * pi
  [[nodiscard]] constexpr Angle plus_pi_if(bool bit) const { return bit ? *this + pi() : *this; }

  constexpr bool operator==(const Angle&) const = default;

 private:
  std::uint8_t eighths_ = 0;
};

constexpr Angle angle_add(Angle a, Angle b) { return a + b; }
constexpr Angle angle_negate(Angle a) { return -a; }
constexpr Angle angle_add_pi(Angle a) { return a + Angle::pi(); }

inline std::ostream& operator<<(std::ostream& os, Angle a) { return os << a.eighths() << "pi/4"; }

}  // namespace qyao
