#include "smtlab/functional.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "smtlab/error.hpp"
#include "smtlab/numerics.hpp"

namespace smtlab {

FunctionalParams FunctionalParams::with_alpha(double beta, double alpha) {
  FunctionalParams p;
  p.beta = beta;
  p.mode = Mode::explicit_alpha;
  p.alpha_value = alpha;
  validate(p);
  return p;
}

FunctionalParams FunctionalParams::subcritical_eps(double beta, double eps) {
  FunctionalParams p;
  p.beta = beta;
  p.mode = Mode::subcritical;
  p.eps = eps;
  validate(p);
  return p;
}

double FunctionalParams::alpha() const {
  return mode == Mode::subcritical ? critical_alpha(beta + eps) : alpha_value;
}

void validate(const FunctionalParams& p) {
  require_beta(p.beta);
  std::ostringstream msg;
  if (p.mode == FunctionalParams::Mode::subcritical) {
    if (!(p.eps > 0.0 && p.eps < 1.0 - p.beta)) {
      msg << "eps must lie in (0, 1-beta) = (0, " << 1.0 - p.beta << "), got " << p.eps;
      fail(ErrorCode::domain, msg.str());
    }
  } else if (!(p.alpha_value > 0.0) || !std::isfinite(p.alpha_value)) {
    msg << "alpha must be positive, got " << p.alpha_value;
    fail(ErrorCode::domain, msg.str());
  }
}

double critical_alpha(double beta) { return 2.0 * std::numbers::pi * (1.0 - beta); }

namespace {

struct TriangleSums {
  double j = 0.0;
  double lambda = 0.0;
  std::array<double, 3> load{};
};

ExpMoments evaluate_moments(const ScalarField& u, double beta, double alpha, bool want_load) {
  validate(u);
  const FeSpace& space = *u.space;
  const Mesh& mesh = space.mesh();
  const QuadratureRule& rule = space.quadrature(beta);
  const std::size_t nt = mesh.num_triangles();

  ExpMoments out;
  const double umax = u.values.cwiseAbs().maxCoeff();
  out.functional.max_exponent = alpha * umax * umax;
  out.functional.saturated = out.functional.max_exponent > kSaturationExponent;

  std::vector<TriangleSums> sums(nt);
  parallel_for(nt, [&](std::size_t t) {
    const auto& tri = mesh.triangles[t];
    const double u0 = u.values[tri[0]], u1 = u.values[tri[1]], u2 = u.values[tri[2]];
    TriangleSums s;
    for (std::size_t k = rule.offsets[t]; k < rule.offsets[t + 1]; ++k) {
      const QuadPoint& q = rule.points[k];
      const double b0 = 1.0 - q.b1 - q.b2;
      const double v = b0 * u0 + q.b1 * u1 + q.b2 * u2;
      const double e = q.weight * std::exp(std::min(alpha * v * v, kSaturationExponent));
      s.j += e;
      if (want_load) {
        const double f = e * v;
        s.lambda += f * v;
        s.load[0] += f * b0;
        s.load[1] += f * q.b1;
        s.load[2] += f * q.b2;
      }
    }
    sums[t] = s;
  });
  out.functional.value = ordered_sum(nt, [&](std::size_t t) { return sums[t].j; });
  if (want_load) {
    out.lambda = ordered_sum(nt, [&](std::size_t t) { return sums[t].lambda; });
    out.load = Eigen::VectorXd::Zero(u.values.size());
    for (std::size_t t = 0; t < nt; ++t)
      for (int i = 0; i < 3; ++i) out.load[mesh.triangles[t][i]] += sums[t].load[i];
  }
  return out;
}

}  // namespace

FunctionalValue mt_functional(const ScalarField& u, const FunctionalParams& p) {
  validate(p);
  return evaluate_moments(u, p.beta, p.alpha(), false).functional;
}

FunctionalValue exp_integral(const ScalarField& u, double beta, double alpha) {
  if (!(beta >= 0.0 && beta < 1.0)) fail(ErrorCode::domain, "weight exponent must lie in [0,1)");
  return evaluate_moments(u, beta, alpha, false).functional;
}

ExpMoments exp_moments(const ScalarField& u, double beta, double alpha) {
  require_beta(beta);
  return evaluate_moments(u, beta, alpha, true);
}

double weighted_integral(const ScalarField& u, double beta, const std::function<double(double)>& g) {
  validate(u);
  require_beta(beta);
  const Mesh& mesh = u.space->mesh();
  const QuadratureRule& rule = u.space->quadrature(beta);
  const std::size_t nt = mesh.num_triangles();
  std::vector<double> sums(nt, 0.0);
  parallel_for(nt, [&](std::size_t t) {
    const auto& tri = mesh.triangles[t];
    double s = 0.0;
    for (std::size_t k = rule.offsets[t]; k < rule.offsets[t + 1]; ++k) {
      const QuadPoint& q = rule.points[k];
      s += q.weight * g((1.0 - q.b1 - q.b2) * u.values[tri[0]] + q.b1 * u.values[tri[1]] + q.b2 * u.values[tri[2]]);
    }
    sums[t] = s;
  });
  return ordered_sum(nt, [&](std::size_t t) { return sums[t]; });
}

double dirichlet_energy(const FeSpace& space, const Eigen::VectorXd& values) {
  return values.dot(space.stiffness() * values);
}

double dirichlet_energy(const ScalarField& u) {
  validate(u);
  return std::max(0.0, dirichlet_energy(*u.space, u.values));
}

double integral(const ScalarField& u) { return u.space->lumped().dot(u.values); }

double mean(const ScalarField& u) { return integral(u) / u.space->area(); }

ScalarField mean_zero_project(const ScalarField& u) {
  validate(u);
  ScalarField out = u;
  out.values.array() -= mean(u);
  // a second pass removes the rounding left by the first
  out.values.array() -= mean(out);
  return out;
}

ScalarField normalize(const ScalarField& u) {
  ScalarField out = mean_zero_project(u);
  const double scale = u.values.cwiseAbs().maxCoeff();
  const double energy = dirichlet_energy(*out.space, out.values);
  if (!(scale > 0.0) || !(energy > 1e-24 * scale * scale))
    fail(ErrorCode::degenerate_input, "cannot normalize a constant field (zero Dirichlet energy)");
  out.values /= std::sqrt(energy);
  out.values /= std::sqrt(dirichlet_energy(*out.space, out.values));
  return out;
}

}  // namespace smtlab
