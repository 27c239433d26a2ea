#pragma once

#include <array>
#include <cmath>
#include <span>
#include <sstream>

#include "anchorguard/errors.hpp"

namespace anchorguard {

/// Planar position in metres.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point2 operator+(Point2 a, Point2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2 operator*(double s, Point2 p) noexcept { return {s * p.x, s * p.y}; }
  friend constexpr bool operator==(Point2 a, Point2 b) noexcept = default;

  double norm() const noexcept { return std::hypot(x, y); }
  bool finite() const noexcept { return std::isfinite(x) && std::isfinite(y); }
};

inline double distance(Point2 a, Point2 b) noexcept { return (a - b).norm(); }

inline double cross(Point2 a, Point2 b) noexcept { return a.x * b.y - a.y * b.x; }

inline double triangle_area(Point2 a, Point2 b, Point2 c) noexcept { return 0.5 * std::abs(cross(b - a, c - a)); }

/// Triangles smaller than this (m^2) are treated as collinear.
inline constexpr double kDegenerateArea = 1e-6;

/// Rigid frame placing anchor 1 at the origin and anchor 2 on the +x axis.
/// Anchor 3 lands at (i, j); j keeps its sign so the frame stays proper.
struct CanonicalFrame {
  Point2 origin;
  // world -> frame, row major
  std::array<double, 4> rotation{1.0, 0.0, 0.0, 1.0};
  double D = 0.0;
  double i = 0.0;
  double j = 0.0;

  Point2 to_frame(Point2 world) const noexcept {
    const Point2 d = world - origin;
    return {rotation[0] * d.x + rotation[1] * d.y, rotation[2] * d.x + rotation[3] * d.y};
  }

  Point2 to_world(Point2 local) const noexcept {
    // inverse of an orthonormal matrix is its transpose
    return origin + Point2{rotation[0] * local.x + rotation[2] * local.y, rotation[1] * local.x + rotation[3] * local.y};
  }
};

struct TrilaterationResult {
  Point2 position;
  /// Magnitude of the out-of-plane root, sqrt(max(0, radicand)).
  double a3_residual = 0.0;
  /// L1^2 - A1^2 - A2^2 before clamping; negative when the three circles
  /// miss each other (noisy ranges).
  double radicand = 0.0;
};

inline CanonicalFrame to_canonical(Point2 p1, Point2 p2, Point2 p3) {
  if (!p1.finite() || !p2.finite() || !p3.finite()) throw DegenerateGeometry("non-finite anchor coordinate");
  const double area = triangle_area(p1, p2, p3);
  if (!(area >= kDegenerateArea)) {
    std::ostringstream os;
    os << "anchors collinear or coincident (area " << area << " m^2)";
    throw DegenerateGeometry(os.str());
  }
  CanonicalFrame f;
  f.origin = p1;
  const Point2 axis = p2 - p1;
  f.D = axis.norm();
  const double c = axis.x / f.D;
  const double s = axis.y / f.D;
  f.rotation = {c, s, -s, c};
  const Point2 q3 = f.to_frame(p3);
  f.i = q3.x;
  f.j = q3.y;
  return f;
}

/// Closed-form intersection in the canonical frame: anchors at (0,0), (D,0)
/// and (i,j) with ranges L1, L2, L3.
inline TrilaterationResult solve_canonical(double D, double i, double j, double L1, double L2, double L3) {
  const double a1 = (L1 * L1 - L2 * L2 + D * D) / (2.0 * D);
  const double a2 = (L1 * L1 - L3 * L3 + i * i + j * j) / (2.0 * j) - (i / j) * a1;
  TrilaterationResult r;
  r.position = {a1, a2};
  r.radicand = L1 * L1 - a1 * a1 - a2 * a2;
  r.a3_residual = r.radicand > 0.0 ? std::sqrt(r.radicand) : 0.0;
  return r;
}

inline TrilaterationResult trilaterate(std::span<const Point2, 3> anchors, std::span<const double, 3> ranges) {
  const CanonicalFrame f = to_canonical(anchors[0], anchors[1], anchors[2]);
  TrilaterationResult r = solve_canonical(f.D, f.i, f.j, ranges[0], ranges[1], ranges[2]);
  r.position = f.to_world(r.position);
  return r;
}

inline TrilaterationResult trilaterate(const std::array<Point2, 3>& anchors, const std::array<double, 3>& ranges) {
  return trilaterate(std::span<const Point2, 3>(anchors), std::span<const double, 3>(ranges));
}

}  // namespace anchorguard
