#pragma once

#include <array>
#include <cmath>

namespace smtlab {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point a, Point b) { return a.x == b.x && a.y == b.y; }
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }

using TrianglePoints = std::array<Point, 3>;

inline double signed_area(const TrianglePoints& t) { return 0.5 * cross(t[1] - t[0], t[2] - t[0]); }

/// Point from barycentric weights (b1, b2) relative to vertices 1 and 2.
inline Point barycentric_point(const TrianglePoints& t, double b1, double b2) {
  return t[0] + b1 * (t[1] - t[0]) + b2 * (t[2] - t[0]);
}

/// Integral of |x|^(-2 beta) over the signed triangle (0, p, q); negative for
/// clockwise orientation. Exact up to adaptive 1-D quadrature (rel. 1e-14).
double origin_triangle_weight(Point p, Point q, double beta);

/// Integral of |x|^(-2 beta) over the part of triangle t inside the disc of
/// radius rho centered at the origin. beta = 0 gives the plain area.
double disc_clipped_weight(const TrianglePoints& t, double rho, double beta);

/// Integral of |x|^(-2 beta) over triangle t; the origin may be a vertex.
double triangle_weight(const TrianglePoints& t, double beta);

}  // namespace smtlab
