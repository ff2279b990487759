// Copyright 2026 The crowdqf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <numbers>

namespace crowdqf {

/// Plain 2D vector in metres (positions) or metres per second (velocities).
struct Vec2 {
  double x{0.0};
  double y{0.0};

  constexpr Vec2& operator+=(const Vec2& o) noexcept {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(const Vec2& o) noexcept {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(double s) noexcept {
    x *= s;
    y *= s;
    return *this;
  }

  friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) noexcept { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) noexcept { return a -= b; }
  friend constexpr Vec2 operator-(const Vec2& a) noexcept { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) noexcept { return a *= s; }
  friend constexpr Vec2 operator*(double s, Vec2 a) noexcept { return a *= s; }
  friend constexpr Vec2 operator/(const Vec2& a, double s) noexcept { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

[[nodiscard]] constexpr double dot(const Vec2& a, const Vec2& b) noexcept { return a.x * b.x + a.y * b.y; }
[[nodiscard]] constexpr double cross(const Vec2& a, const Vec2& b) noexcept { return a.x * b.y - a.y * b.x; }
[[nodiscard]] inline double norm(const Vec2& a) noexcept { return std::hypot(a.x, a.y); }
[[nodiscard]] constexpr double squared_norm(const Vec2& a) noexcept { return dot(a, a); }
[[nodiscard]] inline double distance(const Vec2& a, const Vec2& b) noexcept { return norm(b - a); }

/// Unit vector along `a`, or the zero vector when `a` is shorter than `eps`.
[[nodiscard]] inline Vec2 normalized(const Vec2& a, double eps = 1e-12) noexcept {
  const double n = norm(a);
  return n < eps ? Vec2{} : a / n;
}

[[nodiscard]] inline Vec2 rotated(const Vec2& a, double angle) noexcept {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * a.x - s * a.y, s * a.x + c * a.y};
}

[[nodiscard]] inline bool is_finite(const Vec2& a) noexcept { return std::isfinite(a.x) && std::isfinite(a.y); }

/// Wraps an angle difference into (-pi, pi].
[[nodiscard]] inline double wrap_angle(double a) noexcept {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  a = std::remainder(a, kTwoPi);
  if (a <= -std::numbers::pi) a += kTwoPi;
  return a;
}

/// Unsigned angle between two vectors in [0, pi]; 0 if either is degenerate.
[[nodiscard]] inline double unsigned_angle(const Vec2& a, const Vec2& b) noexcept {
  if (squared_norm(a) == 0.0 || squared_norm(b) == 0.0) return 0.0;
  return std::abs(std::atan2(cross(a, b), dot(a, b)));
}

}  // namespace crowdqf
