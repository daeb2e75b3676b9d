#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "smtlab/error.hpp"
#include "smtlab/mesh.hpp"
#include "smtlab/quadrature.hpp"
#include "smtlab/space.hpp"

using namespace smtlab;
using std::numbers::pi;

namespace {

double half_ball_weight(double beta, double l) { return pi / (2.0 * (1.0 - beta)) * std::pow(l, 2.0 * (1.0 - beta)); }

Mesh half_disc(int level, double grading = 2.0, double radius = 1.0) {
  DomainSpec spec;
  spec.shape = HalfDisc{radius};
  spec.refinement_level = level;
  spec.grading_exponent = grading;
  return build_mesh(spec);
}

}  // namespace

TEST_CASE("half-disc meshes keep the origin on the flat boundary") {
  Mesh m = half_disc(0, 1.0);
  CHECK(m.vertices[m.origin_vertex] == Point{0.0, 0.0});
  CHECK(std::abs(mesh_area(m) - pi / 2) < 0.05 * pi / 2);
  bool on_flat = false;
  for (const auto& e : m.boundary_edges)
    if ((e.a == m.origin_vertex || e.b == m.origin_vertex) && e.marker == kFlatBoundary) on_flat = true;
  CHECK(on_flat);
  CHECK_NOTHROW(check_mesh(m));
}

TEST_CASE("rectangle meshes are exact") {
  DomainSpec spec;
  spec.shape = Rectangle{2.0, 1.0};
  spec.refinement_level = 3;
  Mesh m = build_mesh(spec);
  CHECK(mesh_area(m) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(flat_radius(m) == doctest::Approx(1.0));
}

TEST_CASE("half-disc area converges under refinement") {
  Mesh m = half_disc(6);
  CHECK(std::abs(mesh_area(m) / (pi / 2) - 1.0) < 1e-3);
  double prev = 1.0;
  for (int level = 2; level <= 6; ++level) {
    double err = std::abs(mesh_area(half_disc(level)) - pi / 2);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("graded meshes cluster vertices at the origin") {
  double h1 = origin_mesh_size(half_disc(4, 1.0));
  double h2 = origin_mesh_size(half_disc(4, 2.0));
  double h3 = origin_mesh_size(half_disc(4, 3.0));
  CHECK(h2 < h1);
  CHECK(h3 < h2);
}

TEST_CASE("mesh construction is deterministic and round-trips through text") {
  Mesh a = half_disc(3);
  Mesh b = half_disc(3);
  std::ostringstream sa, sb;
  write_mesh(sa, a);
  write_mesh(sb, b);
  CHECK(sa.str() == sb.str());
  std::istringstream in(sa.str());
  Mesh c = read_mesh(in);
  CHECK(c.vertices.size() == a.vertices.size());
  CHECK(c.triangles == a.triangles);
  CHECK(c.origin_vertex == a.origin_vertex);
  for (std::size_t i = 0; i < a.vertices.size(); ++i) CHECK(c.vertices[i] == a.vertices[i]);
}

TEST_CASE("node budget is enforced") {
  DomainSpec spec;
  spec.refinement_level = 12;
  spec.node_budget = 10000;
  try {
    build_mesh(spec);
    FAIL("expected resource error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::resource);
    CHECK(std::string(e.what()).find("10000") != std::string::npos);
  }
}

TEST_CASE("degenerate triangles are rejected") {
  Mesh m = half_disc(1);
  m.vertices[m.triangles[3][0]] = m.vertices[m.triangles[3][1]];
  CHECK_THROWS_AS(check_mesh(m), Error);
}

TEST_CASE("weighted measure of half balls") {
  // inside a larger half-disc the ball is clipped exactly
  Mesh big = half_disc(3, 2.0, 2.0);
  for (double beta : {0.25, 0.5, 0.75})
    for (double l : {0.1, 1.0})
      CHECK(weighted_measure(big, beta, Ball{l}) == doctest::Approx(half_ball_weight(beta, l)).epsilon(1e-10));
  // l = radius: limited by the polygonal boundary
  Mesh fine = half_disc(6);
  for (double beta : {0.25, 0.5, 0.75})
    CHECK(weighted_measure(fine, beta, Ball{1.0}) == doctest::Approx(half_ball_weight(beta, 1.0)).epsilon(1e-5));
  Mesh m = half_disc(4);
  CHECK(weighted_measure(half_disc(8), 0.5, Ball{1.0}) == doctest::Approx(pi).epsilon(1e-6));
  CHECK(weighted_measure(m, 0.25, Ball{0.1}) == doctest::Approx(0.066231).epsilon(1e-5));
  CHECK(std::abs(weighted_measure(half_disc(6), 1e-6) - pi / 2) < 1e-4);
  CHECK_THROWS_AS(weighted_measure(m, 0.0), Error);
  CHECK_THROWS_AS(weighted_measure(m, 1.0), Error);
}

TEST_CASE("weighted measure converges monotonically for the half-disc family") {
  double prev = 1e300;
  for (int level = 2; level <= 6; ++level) {
    double err = std::abs(weighted_measure(half_disc(level), 0.5) - pi);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("weighted measure is additive over partitions") {
  Mesh m = half_disc(4);
  const double beta = 0.3;
  double whole = weighted_measure(m, beta);
  auto left = PointPredicate{[](Point p) { return p.x < 0.123; }};
  auto right = PointPredicate{[](Point p) { return !(p.x < 0.123); }};
  double sum = weighted_measure(m, beta, left) + weighted_measure(m, beta, right);
  CHECK(std::abs(sum - whole) <= 1e-12 * whole);
  auto in_ring = PointPredicate{[](Point p) { return norm(p) < 0.5 && p.y > 0.2; }};
  auto out_ring = PointPredicate{[](Point p) { return !(norm(p) < 0.5 && p.y > 0.2); }};
  sum = weighted_measure(m, beta, in_ring) + weighted_measure(m, beta, out_ring);
  CHECK(std::abs(sum - whole) <= 1e-12 * whole);
}

TEST_CASE("quadrature rule weights are positive and sum to the weighted area") {
  Mesh m = half_disc(4);
  QuadratureRule q = build_quadrature(m, 0.5);
  double min_weight = 1.0;
  for (const auto& p : q.points) min_weight = std::min(min_weight, p.weight);
  CHECK(min_weight > 0.0);
  CHECK(q.total_weight() == doctest::Approx(weighted_measure(m, 0.5)).epsilon(1e-9));
}

TEST_CASE("regular triangles integrate quadratics exactly without the weight") {
  // beta tiny makes the weight ~1; use a far triangle and a quadratic integrand
  TrianglePoints t{Point{1.0, 1.0}, Point{2.0, 1.5}, Point{1.2, 2.0}};
  auto f = [](Point p) { return 1.0 + p.x * p.x - 2.0 * p.x * p.y + 0.5 * p.y; };
  // reference: degree-2 exact via edge-midpoint rule
  double a = signed_area(t);
  Point m01 = 0.5 * (t[0] + t[1]), m12 = 0.5 * (t[1] + t[2]), m20 = 0.5 * (t[2] + t[0]);
  double exact = a / 3.0 * (f(m01) + f(m12) + f(m20));
  auto r = singular_quadrature(t, 1e-12, f);
  CHECK(r.value == doctest::Approx(exact).epsilon(1e-10));
}

TEST_CASE("singular quadrature") {
  TrianglePoints far{Point{0.5, 0.2}, Point{0.9, 0.3}, Point{0.6, 0.7}};
  auto one = [](Point) { return 1.0; };
  auto r = singular_quadrature(far, 0.5, one);
  CHECK(r.value == doctest::Approx(triangle_weight(far, 0.5)).epsilon(1e-8));
  CHECK_FALSE(r.accuracy_warning);

  TrianglePoints corner{Point{0.0, 0.0}, Point{0.3, 0.0}, Point{0.1, 0.25}};
  for (double beta : {0.1, 0.5, 0.9}) {
    auto s = singular_quadrature(corner, beta, one);
    CHECK(s.value == doctest::Approx(triangle_weight(corner, beta)).epsilon(1e-8));
  }
  CHECK(singular_quadrature(corner, 0.5, [](Point) { return 0.0; }).value == 0.0);

  QuadratureOptions shallow;
  shallow.subdivision_depth = 2;
  auto w = singular_quadrature(corner, 0.9, [](Point p) { return std::cos(40.0 * norm(p)); }, shallow, 1e-12);
  CHECK(w.accuracy_warning);
}

TEST_CASE("singular quadrature sums to the whole-domain measure") {
  Mesh m = half_disc(3);
  double total = 0.0;
  for (std::size_t t = 0; t < m.num_triangles(); ++t)
    total += singular_quadrature(m.corners(t), 0.4, [](Point) { return 1.0; }).value;
  CHECK(total == doctest::Approx(weighted_measure(m, 0.4)).epsilon(1e-9));
}

TEST_CASE("stiffness and mass forms") {
  auto space = FeSpace::create(half_disc(5));
  const auto n = static_cast<Eigen::Index>(space->size());
  Eigen::VectorXd one = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd x1(n);
  for (Eigen::Index i = 0; i < n; ++i) x1[i] = space->mesh().vertices[i].x;
  CHECK((space->stiffness() * one).norm() < 1e-12);
  CHECK(x1.dot(space->stiffness() * x1) == doctest::Approx(pi / 2).epsilon(1e-3));
  CHECK(one.dot(space->mass() * one) == doctest::Approx(space->area()).epsilon(1e-13));
  CHECK(space->lumped().sum() == doctest::Approx(space->area()).epsilon(1e-13));
  Eigen::SparseMatrix<double> asym = space->stiffness() - Eigen::SparseMatrix<double>(space->stiffness().transpose());
  CHECK(asym.norm() < 1e-12);
}

TEST_CASE("stiffness kernel is exactly the constants") {
  auto space = FeSpace::create(half_disc(1));
  Eigen::MatrixXd K(space->stiffness());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
  auto ev = eig.eigenvalues();
  CHECK(std::abs(ev[0]) < 1e-12);
  CHECK(ev[1] > 1e-6);
}
