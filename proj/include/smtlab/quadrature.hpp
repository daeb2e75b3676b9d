#pragma once

#include <cstddef>
#include <functional>
#include <variant>
#include <vector>

#include "smtlab/geometry.hpp"
#include "smtlab/mesh.hpp"

namespace smtlab {

struct QuadratureOptions {
  int subdivision_depth = 30;       // dyadic rings toward the origin on singular triangles
  int ring_radial_points = 6;       // Gauss points per ring, radial direction
  int ring_angular_points = 16;     // Gauss points per ring, along the opposite edge
  double regular_rel_tol = 1e-10;   // per-triangle accuracy for |x|^(-2 beta) on regular triangles
  int max_regular_subdivision = 6;
};

/// One weighted node: the weight already contains |x|^(-2 beta) and the area
/// element, so sum(weight * f(x)) approximates the singular integral of f.
struct QuadPoint {
  int triangle = 0;
  double b1 = 0.0;  // barycentric coordinate of triangle vertex 1
  double b2 = 0.0;  // barycentric coordinate of triangle vertex 2
  double weight = 0.0;
};

struct QuadratureRule {
  double beta = 0.0;
  int subdivision_depth = 0;
  std::vector<QuadPoint> points;
  std::vector<std::size_t> offsets;  // points of triangle t are [offsets[t], offsets[t+1])
  std::vector<char> singular;        // triangle has the origin as a vertex

  double total_weight() const;
};

/// beta = 0 is accepted here and gives an unweighted rule.
QuadratureRule build_quadrature(const Mesh& mesh, double beta, const QuadratureOptions& opts = {});

struct SingularQuadratureResult {
  double value = 0.0;
  int depth_used = 0;
  double error_estimate = 0.0;
  bool accuracy_warning = false;  // tolerance not met within the configured depth
};

/// Integral of |x|^(-2 beta) f(x) over one triangle. Triangles with a vertex at
/// the origin are split into dyadic rings toward 0; the innermost remainder is
/// closed with its exact weighted mass. Other triangles use adaptive subdivision.
SingularQuadratureResult singular_quadrature(const TrianglePoints& tri, double beta,
                                             const std::function<double(Point)>& f,
                                             const QuadratureOptions& opts = {}, double rel_tol = 1e-10);

struct WholeDomain {};

/// Disc of the given radius centered at the origin; intersected exactly.
struct Ball {
  double radius = 1.0;
};

/// Arbitrary region given by a membership test; cut triangles are refined
/// adaptively up to max_depth levels.
struct PointPredicate {
  std::function<bool(Point)> contains;
  int max_depth = 10;
};

using Region = std::variant<WholeDomain, Ball, PointPredicate>;

/// Integral of |x|^(-2 beta) over region intersected with the meshed domain.
double weighted_measure(const Mesh& mesh, double beta, const Region& region = WholeDomain{});

void require_beta(double beta);

}  // namespace smtlab
