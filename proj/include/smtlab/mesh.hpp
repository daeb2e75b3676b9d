#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "smtlab/geometry.hpp"

namespace smtlab {

/// Upper half-disc {|x| < radius, x2 > 0}; the origin is the midpoint of the flat side.
struct HalfDisc {
  double radius = 1.0;
};

/// [-width/2, width/2] x [0, height]; the origin is the midpoint of the bottom edge.
struct Rectangle {
  double width = 2.0;
  double height = 1.0;
};

struct DomainSpec {
  std::variant<HalfDisc, Rectangle> shape = HalfDisc{};
  int refinement_level = 0;
  double grading_exponent = 2.0;  // 1 = uniform; larger clusters vertices at the origin
  std::size_t node_budget = 2'000'000;
};

void validate(const DomainSpec& spec);
double exact_area(const DomainSpec& spec);
std::string describe(const DomainSpec& spec);

enum BoundaryMarker : int {
  kFlatBoundary = 1,   // on the line x2 = 0
  kOuterBoundary = 2,  // arc or remaining rectangle sides
};

struct BoundaryEdge {
  int a = 0;
  int b = 0;
  int marker = kOuterBoundary;
};

struct Mesh {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<BoundaryEdge> boundary_edges;
  int origin_vertex = 0;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_triangles() const { return triangles.size(); }
  TrianglePoints corners(std::size_t t) const {
    const auto& tri = triangles[t];
    return {vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]};
  }
};

Mesh build_mesh(const DomainSpec& spec);

/// Throws on inverted/degenerate triangles, a missing origin vertex or an
/// origin that is not on a boundary edge.
void check_mesh(const Mesh& mesh);

double mesh_area(const Mesh& mesh);

/// Longest edge incident to the origin vertex.
double origin_mesh_size(const Mesh& mesh);

/// Distance from the origin to the non-flat part of the boundary: the radius
/// of the largest half-ball around 0 contained in the mesh.
double flat_radius(const Mesh& mesh);

std::vector<char> boundary_vertex_flags(const Mesh& mesh);

// ASCII exchange format: "NV NT NB", NV lines "x y boundary_flag",
// NT lines "i j k", NB lines "i j marker". 0-based indices.
void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);
void save_mesh(const std::string& path, const Mesh& mesh);
Mesh load_mesh(const std::string& path);

}  // namespace smtlab
