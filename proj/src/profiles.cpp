#include "smtlab/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "smtlab/error.hpp"
#include "smtlab/functional.hpp"
#include "smtlab/io.hpp"
#include "smtlab/numerics.hpp"

namespace smtlab {

using std::numbers::pi;

namespace {

double bubble_a(double beta) { return pi / (2.0 * (1.0 - beta)); }
double bubble_k(double beta) { return 1.0 / (2.0 * pi * (1.0 - beta)); }

// r with pi/(2(1-beta)) r^(2-2beta) = s
double radius_for_s(double beta, double s) { return std::pow(s / bubble_a(beta), 1.0 / (2.0 - 2.0 * beta)); }

double halve(double full, BallNormalization n) { return n == BallNormalization::full ? full : 0.5 * full; }

}  // namespace

double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * (3.0 - 2.0 * t);
}

// ---- Moser ---------------------------------------------------------------

double moser_profile(double r, double l, double delta, double C_l) {
  const double L = std::log(delta / l);
  double v;
  if (r <= l)
    v = std::sqrt(L);
  else if (r <= delta)
    v = std::log(delta / r) / std::sqrt(L);
  else
    v = C_l * smoothstep((r - delta) / delta);
  return v / std::sqrt(pi);
}

MoserField moser_function(const MoserParams& p, SpacePtr space) {
  std::ostringstream msg;
  if (!(p.l > 0.0 && p.l < p.delta)) {
    msg << "Moser function needs 0 < l < delta, got l=" << p.l << ", delta=" << p.delta;
    fail(ErrorCode::geometry, msg.str());
  }
  // The continuum half-ball B_{2 delta} must fit; curved boundary vertices lie on the true boundary,
  // so the polygon's chord sag is not held against it.
  double outer_radius = std::numeric_limits<double>::infinity();
  for (const auto& e : space->mesh().boundary_edges)
    if (e.marker != kFlatBoundary)
      outer_radius = std::min({outer_radius, norm(space->mesh().vertices[e.a]), norm(space->mesh().vertices[e.b])});
  if (2.0 * p.delta > outer_radius * (1.0 + 1e-12)) {
    msg << "Moser cutoff needs the half-ball of radius 2 delta = " << 2.0 * p.delta
        << " inside the domain (boundary radius " << outer_radius << ")";
    fail(ErrorCode::geometry, msg.str());
  }
  const auto& verts = space->mesh().vertices;
  const auto n = static_cast<Eigen::Index>(verts.size());
  Eigen::VectorXd core(n), outer(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double r = norm(verts[i]);
    core[i] = r <= p.delta ? moser_profile(r, p.l, p.delta, 0.0) : 0.0;
    outer[i] = r <= p.delta ? 0.0 : moser_profile(r, p.l, p.delta, 1.0);
  }
  MoserField out;
  out.C_l = -space->lumped().dot(core) / space->lumped().dot(outer);
  out.u = make_field(space, core + out.C_l * outer);
  // phi'(r) = 6 t (1 - t) / delta with t = (r - delta) / delta; half annulus
  out.cutoff_energy = pi * integrate_adaptive(
                               [&](double r) {
                                 double t = (r - p.delta) / p.delta;
                                 double d = 6.0 * t * (1.0 - t) / p.delta;
                                 return d * d * r;
                               },
                               p.delta, 2.0 * p.delta);
  out.predicted_energy = 1.0 + out.C_l * out.C_l / pi * out.cutoff_energy;
  return out;
}

// ---- Bubble --------------------------------------------------------------

const char* to_string(BallNormalization n) { return n == BallNormalization::full ? "full" : "half"; }

double bubble_radial(double beta, double r) {
  return -bubble_k(beta) * std::log1p(bubble_a(beta) * std::pow(r, 2.0 - 2.0 * beta));
}

double bubble_value(double beta, Point x) { return bubble_radial(beta, norm(x)); }

BubbleMass bubble_mass(double beta, BallNormalization n, double truncation_radius) {
  require_beta(beta);
  const double a = bubble_a(beta), p = 2.0 - 2.0 * beta;
  const double r_max = truncation_radius > 0.0 ? truncation_radius : radius_for_s(beta, 1e6);
  const double r_min = radius_for_s(beta, 1e-14);
  BubbleMass m;
  m.truncation_radius = r_max;
  // integrand in t = log r: 2 pi r^(2-2beta) (1 + a r^(2-2beta))^-2
  auto g = [&](double t) {
    double rp = std::exp(p * t);
    double q = 1.0 + a * rp;
    return 2.0 * pi * rp / (q * q);
  };
  double inner = 2.0 * pi * std::pow(r_min, p) / p;  // weight ~ 1 on [0, r_min]
  m.quadrature_part = inner + (r_max > r_min ? integrate_adaptive(g, std::log(r_min), std::log(r_max), 1e-13) : 0.0);
  // beyond r_max the integrand is 2 pi r^(1-2beta) / (a r^(2-2beta))^2 (1 + O(1/s))
  const double S = a * std::pow(r_max, p);
  m.tail = 2.0 / S;
  m.tail_error_bound = 4.0 / (S * S);
  if (m.tail_error_bound > 1e-7) {
    std::ostringstream msg;
    msg << "bubble mass tail beyond radius " << r_max << " cannot be certified to 1e-6 (bound "
        << m.tail_error_bound << "); use a larger truncation radius";
    fail(ErrorCode::accuracy, msg.str());
  }
  m.value = halve(m.quadrature_part + m.tail, n);
  m.quadrature_part = halve(m.quadrature_part, n);
  m.tail = halve(m.tail, n);
  m.tail_error_bound = halve(m.tail_error_bound, n);
  return m;
}

double bubble_energy(double beta, double R, BallNormalization n) {
  require_beta(beta);
  if (!(R > 0.0)) fail(ErrorCode::domain, "bubble energy radius must be positive");
  const double a = bubble_a(beta), p = 2.0 - 2.0 * beta;
  const double c = 1.0 / pi;
  // |phi0'| r = s / (pi (1 + s)), s = a r^(2-2beta); full-ball integrand in log r is 2 pi (|phi0'| r)^2
  auto g = [&](double t) {
    double s = a * std::exp(p * t);
    double v = c * s / (1.0 + s);
    return 2.0 * pi * v * v;
  };
  const double r_min = radius_for_s(beta, 1e-10);
  double full = 0.0;
  if (R > r_min) full = integrate_adaptive(g, std::log(r_min), std::log(R), 1e-13);
  double lo = std::min(R, r_min);
  full += 2.0 * pi * c * c * std::pow(a * std::pow(lo, p), 2) / (2.0 * p);  // s^2 regime below r_min
  return halve(full, n);
}

double bubble_energy_expansion(double beta, double R) {
  const double k = bubble_k(beta);
  return std::log(R) / pi + k * std::log(bubble_a(beta)) - k;
}

// ---- Threshold -----------------------------------------------------------

double threshold_bubble_term(double beta, double A0) {
  require_beta(beta);
  return bubble_a(beta) * std::exp(1.0 + 2.0 * pi * (1.0 - beta) * A0);
}

ThresholdReport threshold(double beta, double A0, const FeSpace& space) {
  ThresholdReport t;
  t.weighted_volume = space.quadrature(beta).total_weight();
  t.bubble_term = threshold_bubble_term(beta, A0);
  t.total = t.weighted_volume + t.bubble_term;
  return t;
}

// ---- Test family ---------------------------------------------------------

TestFunction test_function(double eps, double beta, double delta, const GreenReport& green, double A0) {
  require_beta(beta);
  std::ostringstream msg;
  if (!(eps > 0.0 && eps < 1.0)) {
    msg << "test family needs 0 < eps < 1, got " << eps;
    fail(ErrorCode::parameter, msg.str());
  }
  const double k = bubble_k(beta), a = bubble_a(beta), p = 2.0 - 2.0 * beta;
  TestFunctionParams tp;
  tp.eps = eps;
  tp.beta = beta;
  tp.delta = delta;
  tp.A0 = A0;
  tp.R = std::pow(-std::log(eps), 1.0 / (1.0 - beta));
  tp.inner_radius = tp.R * eps;
  if (!(tp.inner_radius < 0.5 * delta)) {
    msg << "R*eps = " << tp.inner_radius << " must be below delta/2 = " << 0.5 * delta << "; use a smaller eps";
    fail(ErrorCode::parameter, msg.str());
  }
  tp.c2 = -std::log(eps) / pi + k * std::log(a) - k + A0;
  if (!(tp.c2 > 0.0)) {
    msg << "c^2 = " << tp.c2 << " is not positive for eps=" << eps << "; use a smaller eps";
    fail(ErrorCode::parameter, msg.str());
  }
  tp.c = std::sqrt(tp.c2);
  const double log_bubble_edge = std::log1p(a * std::pow(tp.R, p));
  const double outer_edge = -std::log(tp.inner_radius) / pi + A0;
  tp.b = outer_edge - tp.c2 + k * log_bubble_edge;
  tp.b_asymptotic = k;
  const double inner_edge = tp.c + (-k * log_bubble_edge + tp.b) / tp.c;
  tp.jump = std::abs(inner_edge - outer_edge / tp.c);

  const SpacePtr& space = green.G.space;
  const auto& verts = space->mesh().vertices;
  const auto n = static_cast<Eigen::Index>(verts.size());
  const double re = tp.inner_radius;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = norm(verts[i]);
    const double G = green.G.values[i];
    if (r < re) {
      v[i] = tp.c + (-k * std::log1p(a * std::pow(r / eps, p)) + tp.b) / tp.c;
    } else if (r < 2.0 * re) {
      const double eta = 1.0 - smoothstep((r - re) / re);
      const double psi = G + std::log(r) / pi - A0;
      v[i] = (G - eta * psi) / tp.c;
    } else {
      v[i] = G / tp.c;
    }
  }
  ScalarField raw = make_field(space, std::move(v));
  tp.mean_removed = mean(raw);
  TestFunction out{mean_zero_project(raw), tp};
  out.params.energy = dirichlet_energy(out.field);
  return out;
}

TestFamilyMargin test_family_margin(double eps, double beta, double delta, const GreenReport& green,
                                    std::optional<double> A0) {
  const double a0 = A0.value_or(green.A0);
  TestFamilyMargin m;
  m.test = test_function(eps, beta, delta, green, a0);
  const auto params = FunctionalParams::with_alpha(beta, critical_alpha(beta));
  auto raw = mt_functional(m.test.field, params);
  auto normalized = mt_functional(normalize(m.test.field), params);
  m.J_raw = raw.value;
  m.J = normalized.value;
  m.saturated = raw.saturated || normalized.saturated;
  m.threshold = threshold(beta, a0, *green.G.space);
  m.margin = m.J - m.threshold.total;
  m.margin_raw = m.J_raw - m.threshold.total;
  m.green_moment = weighted_integral(green.G, beta, [](double g) { return g * g; });
  m.predicted_surplus = critical_alpha(beta) / m.test.params.c2 * m.green_moment;
  return m;
}

// ---- Sweep ---------------------------------------------------------------

std::string profile_sweep_csv(const std::vector<ProfileSweepRow>& rows) {
  std::string out = "beta,param,value,energy,margin,notes\n";
  for (const auto& r : rows)
    out += fmt17(r.beta) + ',' + fmt17(r.param) + ',' + fmt17(r.value) + ',' + fmt17(r.energy) + ',' +
           fmt17(r.margin) + ',' + r.notes + '\n';
  return out;
}

}  // namespace smtlab
