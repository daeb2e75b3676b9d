#include "smtlab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "smtlab/error.hpp"

namespace smtlab {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

struct Builder {
  Mesh mesh;
  bool curved_outer = false;
  double radius = 0.0;

  int midpoint(int a, int b, std::unordered_map<std::uint64_t, int>& cache,
               const std::unordered_map<std::uint64_t, int>& markers) {
    auto key = edge_key(a, b);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    Point m = 0.5 * (mesh.vertices[a] + mesh.vertices[b]);
    if (curved_outer) {
      auto mk = markers.find(key);
      if (mk != markers.end() && mk->second == kOuterBoundary) m = (radius / norm(m)) * m;
    }
    int idx = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(m);
    cache.emplace(key, idx);
    return idx;
  }

  void refine() {
    std::unordered_map<std::uint64_t, int> markers;
    for (const auto& e : mesh.boundary_edges) markers[edge_key(e.a, e.b)] = e.marker;
    std::unordered_map<std::uint64_t, int> cache;
    cache.reserve(mesh.triangles.size() * 2);
    std::vector<std::array<int, 3>> tris;
    tris.reserve(mesh.triangles.size() * 4);
    for (const auto& t : mesh.triangles) {
      int a = t[0], b = t[1], c = t[2];
      int ab = midpoint(a, b, cache, markers);
      int bc = midpoint(b, c, cache, markers);
      int ca = midpoint(c, a, cache, markers);
      tris.push_back({a, ab, ca});
      tris.push_back({ab, b, bc});
      tris.push_back({ca, bc, c});
      tris.push_back({ab, bc, ca});
    }
    std::vector<BoundaryEdge> edges;
    edges.reserve(mesh.boundary_edges.size() * 2);
    for (const auto& e : mesh.boundary_edges) {
      int m = cache.at(edge_key(e.a, e.b));
      edges.push_back({e.a, m, e.marker});
      edges.push_back({m, e.b, e.marker});
    }
    mesh.triangles = std::move(tris);
    mesh.boundary_edges = std::move(edges);
  }
};

void grade(Mesh& mesh, double reach, double exponent) {
  if (exponent == 1.0) return;
  for (auto& v : mesh.vertices) {
    double r = norm(v);
    if (r == 0.0 || r >= reach) continue;
    v = std::pow(r / reach, exponent - 1.0) * v;
  }
}

}  // namespace

void validate(const DomainSpec& spec) {
  if (const auto* hd = std::get_if<HalfDisc>(&spec.shape)) {
    if (!(hd->radius > 0.0) || !std::isfinite(hd->radius))
      fail(ErrorCode::domain, "half_disc radius must be a positive finite number");
  } else {
    const auto& r = std::get<Rectangle>(spec.shape);
    if (!(r.width > 0.0) || !(r.height > 0.0) || !std::isfinite(r.width) || !std::isfinite(r.height))
      fail(ErrorCode::domain, "rectangle width and height must be positive finite numbers");
  }
  if (spec.refinement_level < 0) fail(ErrorCode::domain, "refinement_level must be nonnegative");
  if (!(spec.grading_exponent >= 1.0) || !std::isfinite(spec.grading_exponent))
    fail(ErrorCode::domain, "grading_exponent must be >= 1");
}

double exact_area(const DomainSpec& spec) {
  if (const auto* hd = std::get_if<HalfDisc>(&spec.shape))
    return 0.5 * std::numbers::pi * hd->radius * hd->radius;
  const auto& r = std::get<Rectangle>(spec.shape);
  return r.width * r.height;
}

std::string describe(const DomainSpec& spec) {
  char buf[160];
  if (const auto* hd = std::get_if<HalfDisc>(&spec.shape)) {
    std::snprintf(buf, sizeof buf, "half_disc(radius=%.17g) level=%d grading=%.17g", hd->radius,
                  spec.refinement_level, spec.grading_exponent);
  } else {
    const auto& r = std::get<Rectangle>(spec.shape);
    std::snprintf(buf, sizeof buf, "rectangle(width=%.17g, height=%.17g) level=%d grading=%.17g", r.width,
                  r.height, spec.refinement_level, spec.grading_exponent);
  }
  return buf;
}

Mesh build_mesh(const DomainSpec& spec) {
  validate(spec);
  Builder b;
  double reach = 0.0;
  if (const auto* hd = std::get_if<HalfDisc>(&spec.shape)) {
    constexpr int kArcSegments = 8;
    b.curved_outer = true;
    b.radius = reach = hd->radius;
    b.mesh.vertices.push_back({0.0, 0.0});
    for (int k = 0; k <= kArcSegments; ++k) {
      double th = std::numbers::pi * k / kArcSegments;
      b.mesh.vertices.push_back({hd->radius * std::cos(th), hd->radius * std::sin(th)});
    }
    for (int k = 0; k < kArcSegments; ++k) {
      b.mesh.triangles.push_back({0, k + 1, k + 2});
      b.mesh.boundary_edges.push_back({k + 1, k + 2, kOuterBoundary});
    }
    b.mesh.boundary_edges.push_back({kArcSegments + 1, 0, kFlatBoundary});
    b.mesh.boundary_edges.push_back({0, 1, kFlatBoundary});
  } else {
    const auto& r = std::get<Rectangle>(spec.shape);
    double hw = 0.5 * r.width, h = r.height;
    reach = std::min(hw, h);
    b.mesh.vertices = {{0, 0}, {hw, 0}, {hw, h}, {0, h}, {-hw, h}, {-hw, 0}};
    b.mesh.triangles = {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 5}};
    b.mesh.boundary_edges = {{5, 0, kFlatBoundary}, {0, 1, kFlatBoundary}, {1, 2, kOuterBoundary},
                             {2, 3, kOuterBoundary}, {3, 4, kOuterBoundary}, {4, 5, kOuterBoundary}};
  }
  b.mesh.origin_vertex = 0;

  double projected = static_cast<double>(b.mesh.triangles.size()) *
                     std::pow(4.0, spec.refinement_level) / 2.0;
  if (projected > static_cast<double>(spec.node_budget)) {
    std::ostringstream msg;
    msg << "refinement_level " << spec.refinement_level << " would create about "
        << static_cast<long long>(projected) << " vertices, exceeding node_budget " << spec.node_budget;
    fail(ErrorCode::resource, msg.str());
  }
  for (int l = 0; l < spec.refinement_level; ++l) b.refine();
  grade(b.mesh, reach, spec.grading_exponent);
  check_mesh(b.mesh);
  return std::move(b.mesh);
}

void check_mesh(const Mesh& mesh) {
  const int nv = static_cast<int>(mesh.vertices.size());
  if (mesh.origin_vertex < 0 || mesh.origin_vertex >= nv)
    fail(ErrorCode::geometry, "origin_vertex index out of range");
  if (!(mesh.vertices[mesh.origin_vertex] == Point{0.0, 0.0}))
    fail(ErrorCode::geometry, "origin vertex is not located at (0,0)");
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    for (int i : mesh.triangles[t])
      if (i < 0 || i >= nv) fail(ErrorCode::geometry, "triangle " + std::to_string(t) + " has invalid index");
    auto c = mesh.corners(t);
    double area = signed_area(c);
    double longest = std::max({dot(c[1] - c[0], c[1] - c[0]), dot(c[2] - c[1], c[2] - c[1]),
                               dot(c[0] - c[2], c[0] - c[2])});
    if (!(area > 1e-12 * longest)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "triangle " << t << " is degenerate or inverted (signed area " << area << ")";
      fail(ErrorCode::mesh_quality, msg.str());
    }
  }
  bool on_boundary = false;
  for (const auto& e : mesh.boundary_edges) {
    if (e.a < 0 || e.a >= nv || e.b < 0 || e.b >= nv)
      fail(ErrorCode::geometry, "boundary edge has invalid index");
    if (e.a == mesh.origin_vertex || e.b == mesh.origin_vertex) on_boundary = true;
  }
  if (!on_boundary) fail(ErrorCode::geometry, "origin vertex does not lie on a boundary edge");
}

double mesh_area(const Mesh& mesh) {
  double a = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) a += signed_area(mesh.corners(t));
  return a;
}

double origin_mesh_size(const Mesh& mesh) {
  double h = 0.0;
  const Point o = mesh.vertices[mesh.origin_vertex];
  for (const auto& t : mesh.triangles)
    for (int i : t)
      if (i == mesh.origin_vertex)
        for (int j : t) h = std::max(h, norm(mesh.vertices[j] - o));
  return h;
}

double flat_radius(const Mesh& mesh) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : mesh.boundary_edges) {
    if (e.marker == kFlatBoundary) continue;
    Point a = mesh.vertices[e.a], b = mesh.vertices[e.b], d = b - a;
    double s = std::clamp(-dot(a, d) / dot(d, d), 0.0, 1.0);
    best = std::min(best, norm(a + s * d));
  }
  return best;
}

std::vector<char> boundary_vertex_flags(const Mesh& mesh) {
  std::vector<char> flags(mesh.vertices.size(), 0);
  for (const auto& e : mesh.boundary_edges) flags[e.a] = flags[e.b] = 1;
  return flags;
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
  auto flags = boundary_vertex_flags(mesh);
  char buf[96];
  os << mesh.vertices.size() << ' ' << mesh.triangles.size() << ' ' << mesh.boundary_edges.size() << '\n';
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %d\n", mesh.vertices[i].x, mesh.vertices[i].y, flags[i]);
    os << buf;
  }
  for (const auto& t : mesh.triangles) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& e : mesh.boundary_edges) os << e.a << ' ' << e.b << ' ' << e.marker << '\n';
}

Mesh read_mesh(std::istream& is) {
  std::size_t nv = 0, nt = 0, nb = 0;
  if (!(is >> nv >> nt >> nb)) fail(ErrorCode::io, "mesh file: cannot read header 'NV NT NB'");
  Mesh mesh;
  mesh.vertices.resize(nv);
  mesh.triangles.resize(nt);
  mesh.boundary_edges.resize(nb);
  int origin = -1;
  for (std::size_t i = 0; i < nv; ++i) {
    int flag = 0;
    if (!(is >> mesh.vertices[i].x >> mesh.vertices[i].y >> flag))
      fail(ErrorCode::io, "mesh file: truncated vertex block at vertex " + std::to_string(i));
    if (origin < 0 && mesh.vertices[i] == Point{0.0, 0.0}) origin = static_cast<int>(i);
  }
  for (std::size_t t = 0; t < nt; ++t)
    if (!(is >> mesh.triangles[t][0] >> mesh.triangles[t][1] >> mesh.triangles[t][2]))
      fail(ErrorCode::io, "mesh file: truncated triangle block at triangle " + std::to_string(t));
  for (std::size_t e = 0; e < nb; ++e)
    if (!(is >> mesh.boundary_edges[e].a >> mesh.boundary_edges[e].b >> mesh.boundary_edges[e].marker))
      fail(ErrorCode::io, "mesh file: truncated boundary block at edge " + std::to_string(e));
  if (origin < 0) fail(ErrorCode::geometry, "mesh file: no vertex at the origin");
  mesh.origin_vertex = origin;
  check_mesh(mesh);
  return mesh;
}

void save_mesh(const std::string& path, const Mesh& mesh) {
  std::ofstream os(path);
  if (!os) fail(ErrorCode::io, "cannot open " + path + " for writing");
  write_mesh(os, mesh);
}

Mesh load_mesh(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::io, "cannot open " + path);
  return read_mesh(is);
}

}  // namespace smtlab
