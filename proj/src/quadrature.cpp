#include "smtlab/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "smtlab/error.hpp"
#include "smtlab/numerics.hpp"

namespace smtlab {

namespace {

// Degree-5, 7-point rule on the reference triangle (barycentrics, weight fractions).
struct TriNode {
  double l0, l1, l2, w;
};

constexpr double kA1 = 0.0597158717897698, kB1 = 0.4701420641051151, kW1 = 0.1323941527885062;
constexpr double kA2 = 0.7974269853530873, kB2 = 0.1012865073234563, kW2 = 0.1259391805448271;
constexpr std::array<TriNode, 7> kDunavant5{{
    {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.225},
    {kA1, kB1, kB1, kW1},
    {kB1, kA1, kB1, kW1},
    {kB1, kB1, kA1, kW1},
    {kA2, kB2, kB2, kW2},
    {kB2, kA2, kB2, kW2},
    {kB2, kB2, kA2, kW2},
}};

using Bary2 = std::array<double, 2>;  // (b1, b2) in the parent triangle
using SubTri = std::array<Bary2, 3>;

Bary2 sub_point(const SubTri& s, double l0, double l1, double l2) {
  return {l0 * s[0][0] + l1 * s[1][0] + l2 * s[2][0], l0 * s[0][1] + l1 * s[1][1] + l2 * s[2][1]};
}

double sub_area_fraction(const SubTri& s) {
  return std::abs((s[1][0] - s[0][0]) * (s[2][1] - s[0][1]) - (s[2][0] - s[0][0]) * (s[1][1] - s[0][1]));
}

std::array<SubTri, 4> split(const SubTri& s) {
  auto mid = [](const Bary2& a, const Bary2& b) { return Bary2{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])}; };
  Bary2 ab = mid(s[0], s[1]), bc = mid(s[1], s[2]), ca = mid(s[2], s[0]);
  return {{{s[0], ab, ca}, {ab, s[1], bc}, {ca, bc, s[2]}, {ab, bc, ca}}};
}

constexpr SubTri kWhole{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}};

double weight_at(Point x, double beta) { return std::pow(dot(x, x), -beta); }

// Weighted rule estimate of integral of |x|^(-2b) f over a sub-triangle.
template <class F>
double sub_estimate(const TrianglePoints& tri, double area, const SubTri& s, double beta, F&& f) {
  double sum = 0.0, frac = sub_area_fraction(s);
  for (const auto& n : kDunavant5) {
    Bary2 b = sub_point(s, n.l0, n.l1, n.l2);
    Point x = barycentric_point(tri, b[0], b[1]);
    sum += n.w * weight_at(x, beta) * f(x);
  }
  return sum * area * frac;
}

void emit_regular(const TrianglePoints& tri, double area, const SubTri& s, double beta, int t,
                  std::vector<QuadPoint>& out) {
  double frac = sub_area_fraction(s);
  for (const auto& n : kDunavant5) {
    Bary2 b = sub_point(s, n.l0, n.l1, n.l2);
    Point x = barycentric_point(tri, b[0], b[1]);
    out.push_back({t, b[0], b[1], n.w * area * frac * weight_at(x, beta)});
  }
}

void build_regular(const TrianglePoints& tri, double area, const SubTri& s, double estimate, double tol,
                   double beta, int t, int depth, std::vector<QuadPoint>& out) {
  auto kids = split(s);
  std::array<double, 4> est{};
  double sum = 0.0;
  auto one = [](Point) { return 1.0; };
  for (int i = 0; i < 4; ++i) sum += est[i] = sub_estimate(tri, area, kids[i], beta, one);
  if (std::abs(sum - estimate) <= tol || depth <= 0) {
    for (const auto& k : kids) emit_regular(tri, area, k, beta, t, out);
    return;
  }
  for (int i = 0; i < 4; ++i) build_regular(tri, area, kids[i], est[i], 0.25 * tol, beta, t, depth - 1, out);
}

int origin_corner(const TrianglePoints& tri) {
  for (int i = 0; i < 3; ++i)
    if (tri[i] == Point{0.0, 0.0}) return i;
  return -1;
}

// Gauss nodes mapped to [a, b].
struct Mapped {
  std::vector<double> x, w;
};
Mapped mapped_gauss(int n, double a, double b) {
  const GaussRule& g = gauss_legendre(n);
  Mapped m;
  for (int i = 0; i < n; ++i) {
    m.x.push_back(0.5 * (a + b) + 0.5 * (b - a) * g.nodes[i]);
    m.w.push_back(0.5 * (b - a) * g.weights[i]);
  }
  return m;
}

}  // namespace

void require_beta(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) {
    std::ostringstream msg;
    msg << "beta must lie in (0,1), got " << beta;
    fail(ErrorCode::domain, msg.str());
  }
}

double QuadratureRule::total_weight() const {
  return ordered_sum(points.size(), [&](std::size_t i) { return points[i].weight; });
}

QuadratureRule build_quadrature(const Mesh& mesh, double beta, const QuadratureOptions& opts) {
  if (beta != 0.0) require_beta(beta);
  QuadratureRule rule;
  rule.beta = beta;
  rule.subdivision_depth = opts.subdivision_depth;
  const std::size_t nt = mesh.num_triangles();
  rule.offsets.assign(nt + 1, 0);
  rule.singular.assign(nt, 0);

  const Mapped tnodes = mapped_gauss(opts.ring_angular_points, 0.0, 1.0);
  std::vector<std::vector<QuadPoint>> per_tri(nt);
  parallel_for(nt, [&](std::size_t t) {
    auto tri = mesh.corners(t);
    auto& out = per_tri[t];
    int oc = origin_corner(tri);
    if (oc < 0) {
      double area = signed_area(tri);
      auto one = [](Point) { return 1.0; };
      double est = sub_estimate(tri, area, kWhole, beta, one);
      build_regular(tri, area, kWhole, est, opts.regular_rel_tol * est, beta, static_cast<int>(t),
                    opts.max_regular_subdivision, out);
      return;
    }
    rule.singular[t] = 1;
    const int ip = (oc + 1) % 3, iq = (oc + 2) % 3;
    const Point P = tri[ip], Q = tri[iq];
    const double jac = cross(P, Q);
    auto push = [&](double bo, double bp, double bq, double w) {
      std::array<double, 3> b{};
      b[oc] = bo;
      b[ip] = bp;
      b[iq] = bq;
      out.push_back({static_cast<int>(t), b[1], b[2], w});
    };
    for (int k = 0; k < opts.subdivision_depth; ++k) {
      Mapped s = mapped_gauss(opts.ring_radial_points, std::ldexp(1.0, -(k + 1)), std::ldexp(1.0, -k));
      for (std::size_t i = 0; i < s.x.size(); ++i)
        for (std::size_t j = 0; j < tnodes.x.size(); ++j) {
          double sv = s.x[i], tv = tnodes.x[j];
          Point x = sv * (P + tv * (Q - P));
          push(1.0 - sv, sv * (1.0 - tv), sv * tv, jac * sv * s.w[i] * tnodes.w[j] * weight_at(x, beta));
        }
    }
    // Innermost similar triangle closed with its exact weighted mass at the origin node.
    double remainder = origin_triangle_weight(P, Q, beta) *
                       std::pow(2.0, -opts.subdivision_depth * (2.0 - 2.0 * beta));
    push(1.0, 0.0, 0.0, remainder);
  });
  for (std::size_t t = 0; t < nt; ++t) rule.offsets[t + 1] = rule.offsets[t] + per_tri[t].size();
  rule.points.reserve(rule.offsets[nt]);
  for (auto& v : per_tri) rule.points.insert(rule.points.end(), v.begin(), v.end());
  return rule;
}

namespace {

double adaptive_regular(const TrianglePoints& tri, double area, const SubTri& s, double estimate, double tol,
                        double beta, const std::function<double(Point)>& f, int depth, int& max_used,
                        int level, bool& warn) {
  auto kids = split(s);
  std::array<double, 4> est{};
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) sum += est[i] = sub_estimate(tri, area, kids[i], beta, f);
  max_used = std::max(max_used, level + 1);
  if (std::abs(sum - estimate) <= tol) return sum;
  if (depth <= 0) {
    warn = true;
    return sum;
  }
  double total = 0.0;
  for (int i = 0; i < 4; ++i)
    total += adaptive_regular(tri, area, kids[i], est[i], 0.25 * tol, beta, f, depth - 1, max_used, level + 1, warn);
  return total;
}

}  // namespace

SingularQuadratureResult singular_quadrature(const TrianglePoints& tri, double beta,
                                             const std::function<double(Point)>& f,
                                             const QuadratureOptions& opts, double rel_tol) {
  require_beta(beta);
  SingularQuadratureResult res;
  int oc = origin_corner(tri);
  if (oc < 0) {
    double area = std::abs(signed_area(tri));
    double est = sub_estimate(tri, area, kWhole, beta, f);
    // Tolerance anchored to the weight magnitude so f == 0 terminates immediately.
    auto absf = [&](Point x) { return std::abs(f(x)); };
    double scale = sub_estimate(tri, area, kWhole, beta, absf);
    bool warn = false;
    int used = 0;
    res.value = adaptive_regular(tri, area, kWhole, est, rel_tol * scale, beta, f, opts.subdivision_depth, used,
                                 0, warn);
    res.depth_used = used;
    res.accuracy_warning = warn;
    res.error_estimate = warn ? std::abs(res.value - est) : rel_tol * scale;
    return res;
  }
  Point P = tri[(oc + 1) % 3], Q = tri[(oc + 2) % 3];
  double jac = cross(P, Q);
  double sign = jac < 0.0 ? -1.0 : 1.0;
  jac = std::abs(jac);
  const double full_mass = std::abs(origin_triangle_weight(P, Q, beta));
  const double decay = std::pow(2.0, -(2.0 - 2.0 * beta));
  const double f0 = f(Point{0.0, 0.0});
  const Mapped tn = mapped_gauss(opts.ring_angular_points, 0.0, 1.0);
  double accum = 0.0, mass = full_mass;
  int k = 0;
  for (;; ++k) {
    double scale = std::ldexp(1.0, -k);
    Point Pk = scale * P, Qk = scale * Q;
    double osc = std::max({std::abs(f(Pk) - f0), std::abs(f(Qk) - f0), std::abs(f(0.5 * (Pk + Qk)) - f0)});
    double bound = mass * osc;
    double total = accum + mass * f0;
    if (bound <= rel_tol * std::max(std::abs(total), 1e-300) || bound == 0.0) {
      res.error_estimate = bound;
      break;
    }
    if (k >= opts.subdivision_depth) {
      res.error_estimate = bound;
      res.accuracy_warning = true;
      break;
    }
    Mapped s = mapped_gauss(opts.ring_radial_points, 0.5 * scale, scale);
    for (std::size_t i = 0; i < s.x.size(); ++i)
      for (std::size_t j = 0; j < tn.x.size(); ++j) {
        Point x = s.x[i] * (P + tn.x[j] * (Q - P));
        accum += jac * s.x[i] * s.w[i] * tn.w[j] * weight_at(x, beta) * f(x);
      }
    mass *= decay;
  }
  res.depth_used = k;
  res.value = sign * (accum + mass * f0);
  return res;
}

namespace {

struct Split {
  double inside = 0.0;
  double total = 0.0;
};

// Approximate split of the weighted mass of a sub-triangle between inside/outside.
void predicate_split(const TrianglePoints& tri, double area, const SubTri& s, double beta,
                     const PointPredicate& pred, int depth, Split& acc) {
  auto point = [&](const Bary2& b) { return barycentric_point(tri, b[0], b[1]); };
  bool any_in = false, any_out = false;
  auto probe = [&](Point x) { (pred.contains(x) ? any_in : any_out) = true; };
  for (const auto& c : s) probe(point(c));
  for (const auto& n : kDunavant5) probe(point(sub_point(s, n.l0, n.l1, n.l2)));
  for (int i = 0; i < 3; ++i) {
    const auto& a = s[i];
    const auto& b = s[(i + 1) % 3];
    probe(point({0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])}));
  }
  TrianglePoints sub{point(s[0]), point(s[1]), point(s[2])};
  bool touches_origin = origin_corner(sub) >= 0;
  auto mass_of = [&]() {
    if (touches_origin) return triangle_weight(sub, beta);
    auto one = [](Point) { return 1.0; };
    return sub_estimate(tri, area, s, beta, one);
  };
  if (!(any_in && any_out)) {
    double m = mass_of();
    acc.total += m;
    if (any_in) acc.inside += m;
    return;
  }
  if (depth <= 0) {
    double m = mass_of();
    double in = 0.0, all = 0.0;
    for (const auto& n : kDunavant5) {
      Point x = point(sub_point(s, n.l0, n.l1, n.l2));
      double w = n.w * weight_at(x, beta);
      all += w;
      if (pred.contains(x)) in += w;
    }
    acc.total += m;
    acc.inside += m * in / all;
    return;
  }
  for (const auto& k : split(s)) predicate_split(tri, area, k, beta, pred, depth - 1, acc);
}

}  // namespace

double weighted_measure(const Mesh& mesh, double beta, const Region& region) {
  require_beta(beta);
  const std::size_t nt = mesh.num_triangles();
  if (std::holds_alternative<WholeDomain>(region))
    return ordered_sum(nt, [&](std::size_t t) { return triangle_weight(mesh.corners(t), beta); });
  if (const auto* ball = std::get_if<Ball>(&region)) {
    if (!(ball->radius >= 0.0)) fail(ErrorCode::domain, "ball radius must be nonnegative");
    return ordered_sum(nt, [&](std::size_t t) { return disc_clipped_weight(mesh.corners(t), ball->radius, beta); });
  }
  const auto& pred = std::get<PointPredicate>(region);
  if (!pred.contains) fail(ErrorCode::domain, "region predicate is empty");
  return ordered_sum(nt, [&](std::size_t t) {
    auto tri = mesh.corners(t);
    double area = signed_area(tri);
    Split acc;
    predicate_split(tri, area, kWhole, beta, pred, pred.max_depth, acc);
    if (acc.inside == 0.0) return 0.0;
    double exact = triangle_weight(tri, beta);
    if (acc.inside == acc.total) return exact;
    // Distribute the exact triangle mass by the approximate split so that
    // complementary regions add up to the whole.
    return exact * (acc.inside / acc.total);
  });
}

}  // namespace smtlab
