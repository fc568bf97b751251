#pragma once

#include <cmath>
#include <numbers>

namespace idea_islands {

// Ground-plane vector, meters.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  friend constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

inline Vec2 rotate(Vec2 v, double radians) {
  const double c = std::cos(radians);
  const double s = std::sin(radians);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

inline Vec2 unit_at(double radians) { return {std::cos(radians), std::sin(radians)}; }

inline double bearing(Vec2 from, Vec2 to) { return std::atan2(to.y - from.y, to.x - from.x); }

// Wraps into (-pi, pi].
inline double wrap_angle(double radians) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::remainder(radians, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  return r;
}

inline double angle_between(double a, double b) { return std::abs(wrap_angle(a - b)); }

constexpr double degrees(double deg) { return deg * std::numbers::pi / 180.0; }

// Position plus facing direction.
struct Pose2 {
  Vec2 position;
  double rotation = 0.0;

  friend bool operator==(const Pose2&, const Pose2&) = default;
};

// Rotation about the origin followed by translation.
struct Rigid2 {
  double rotation = 0.0;
  Vec2 translation;

  Vec2 apply(Vec2 p) const { return rotate(p, rotation) + translation; }
  double apply_heading(double heading) const { return wrap_angle(heading + rotation); }
  Pose2 apply(const Pose2& p) const { return {apply(p.position), apply_heading(p.rotation)}; }

  static Rigid2 identity() { return {}; }

  friend bool operator==(const Rigid2&, const Rigid2&) = default;
};

}  // namespace idea_islands
