#include "smtlab/geometry.hpp"

#include <algorithm>
#include <vector>

#include "smtlab/numerics.hpp"

namespace smtlab {

double origin_triangle_weight(Point p, Point q, double beta) {
  double c = cross(p, q);
  if (c == 0.0) return 0.0;
  if (beta == 0.0) return 0.5 * c;
  Point d = q - p;
  auto g = [&](double t) {
    Point y = p + t * d;
    return std::pow(dot(y, y), -beta);
  };
  // Closest approach to the origin is the only place the integrand peaks.
  double tstar = std::clamp(-dot(p, d) / dot(d, d), 0.0, 1.0);
  double integral = 0.0;
  if (tstar > 0.0) integral += integrate_adaptive(g, 0.0, tstar);
  if (tstar < 1.0) integral += integrate_adaptive(g, tstar, 1.0);
  return c * integral / (2.0 - 2.0 * beta);
}

namespace {

double clipped_edge(Point a, Point b, double rho, double beta) {
  Point d = b - a;
  double A = dot(d, d);
  if (A == 0.0) return 0.0;
  double B = 2.0 * dot(a, d);
  double C = dot(a, a) - rho * rho;
  std::vector<double> cuts{0.0};
  double disc = B * B - 4.0 * A * C;
  if (disc > 0.0) {
    double sq = std::sqrt(disc);
    // Stable root pair.
    double qv = -0.5 * (B + std::copysign(sq, B));
    double r1 = qv / A, r2 = (qv != 0.0) ? C / qv : -B / (2.0 * A);
    if (r1 > r2) std::swap(r1, r2);
    if (r1 > 0.0 && r1 < 1.0) cuts.push_back(r1);
    if (r2 > 0.0 && r2 < 1.0) cuts.push_back(r2);
  }
  cuts.push_back(1.0);
  double total = 0.0;
  const double sector_scale = std::pow(rho, 2.0 - 2.0 * beta) / (2.0 - 2.0 * beta);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Point P = a + cuts[i] * d, Q = a + cuts[i + 1] * d;
    Point mid = 0.5 * (P + Q);
    if (dot(mid, mid) <= rho * rho) {
      total += origin_triangle_weight(P, Q, beta);
    } else {
      total += sector_scale * std::atan2(cross(P, Q), dot(P, Q));
    }
  }
  return total;
}

}  // namespace

double disc_clipped_weight(const TrianglePoints& t, double rho, double beta) {
  if (!(rho > 0.0)) return 0.0;
  if (std::isinf(rho)) return triangle_weight(t, beta);
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) sum += clipped_edge(t[i], t[(i + 1) % 3], rho, beta);
  return sum;
}

double triangle_weight(const TrianglePoints& t, double beta) {
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) sum += origin_triangle_weight(t[i], t[(i + 1) % 3], beta);
  return sum;
}

}  // namespace smtlab
