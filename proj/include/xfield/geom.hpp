#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace xf {

inline constexpr double kPi = std::numbers::pi;

using Complex = std::complex<double>;

/// Error type thrown on contract violations (bad input, degenerate geometry, ...).
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(Vec2 o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
};

using Point2 = Vec2;

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Vec2 v) { return v.x * v.x + v.y * v.y; }
inline double norm(Vec2 v) { return std::sqrt(norm2(v)); }
inline double dist(Point2 a, Point2 b) { return norm(a - b); }

inline Vec2 normalized(Vec2 v) {
  double n = norm(v);
  return {v.x / n, v.y / n};
}

inline double angle_of(Vec2 v) { return std::atan2(v.y, v.x); }
inline Vec2 dir_of(double a) { return {std::cos(a), std::sin(a)}; }
inline Vec2 rot90(Vec2 v) { return {-v.y, v.x}; }

inline Complex to_complex(Vec2 v) { return {v.x, v.y}; }
inline Vec2 from_complex(Complex c) { return {c.real(), c.imag()}; }

/// Wrap an angle to the principal interval (-pi, pi].
inline double wrap_pi(double a) {
  double r = std::remainder(a, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

/// Unsigned angle between two unit-ish vectors.
inline double angle_between(Vec2 a, Vec2 b) {
  return std::abs(wrap_pi(angle_of(b) - angle_of(a)));
}

/// Proper intersection of segments [a0,a1] and [b0,b1].
/// On hit fills s, t (parameters along each segment in [0,1]) and the point.
inline bool segment_intersect(Point2 a0, Point2 a1, Point2 b0, Point2 b1,
                              double& s, double& t, Point2& p) {
  Vec2 da = a1 - a0;
  Vec2 db = b1 - b0;
  double den = cross(da, db);
  double scale = norm(da) * norm(db);
  if (std::abs(den) < 1e-14 * (scale > 0 ? scale : 1.0)) return false;
  Vec2 r = b0 - a0;
  s = cross(r, db) / den;
  t = cross(r, da) / den;
  const double tol = 1e-12;
  if (s < -tol || s > 1.0 + tol || t < -tol || t > 1.0 + tol) return false;
  s = std::clamp(s, 0.0, 1.0);
  t = std::clamp(t, 0.0, 1.0);
  p = a0 + s * da;
  return true;
}

inline double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  Vec2 ab = b - a;
  double L2 = norm2(ab);
  if (L2 < 1e-300) return dist(p, a);
  double t = std::clamp(dot(p - a, ab) / L2, 0.0, 1.0);
  return dist(p, a + t * ab);
}

}  // namespace xf
