#include "smtlab/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "smtlab/error.hpp"
#include "smtlab/functional.hpp"
#include "smtlab/io.hpp"
#include "smtlab/numerics.hpp"

namespace smtlab {

using std::numbers::pi;

void validate(const SolverOptions& o) {
  std::ostringstream msg;
  if (!(o.damping > 0.0 && o.damping <= 1.0)) msg << "damping must lie in (0,1], got " << o.damping;
  else if (o.max_iterations < 1) msg << "max_iterations must be positive, got " << o.max_iterations;
  else if (!(o.el_tolerance > 0.0)) msg << "el_tolerance must be positive, got " << o.el_tolerance;
  else if (o.init != SolverOptions::Init::moser && !o.initial)
    msg << "initial field required for previous_solution/custom initialization";
  else return;
  fail(ErrorCode::parameter, msg.str());
}

BlowupScales blowup_scales(double lambda, double c, double eps, double beta) {
  BlowupScales s;
  s.r_eps = std::sqrt(lambda) / c * std::exp(-pi * (1.0 - beta - eps) * c * c);
  s.t_eps = std::pow(s.r_eps, 1.0 / (1.0 - beta));
  return s;
}

namespace {

struct ElStep {
  ExpMoments moments;
  Eigen::VectorXd w;
  double residual = 0.0;
  double mean_f = 0.0;
};

ElStep el_step(const ScalarField& u, double beta, double alpha) {
  const FeSpace& space = *u.space;
  ElStep s;
  s.moments = exp_moments(u, beta, alpha);
  if (s.moments.functional.saturated) {
    std::ostringstream msg;
    msg << "exponential saturated: alpha * max u^2 = " << s.moments.functional.max_exponent << " > "
        << kSaturationExponent << "; use a finer mesh near the origin or a larger eps";
    fail(ErrorCode::saturation, msg.str());
  }
  if (!(s.moments.lambda > 0.0)) fail(ErrorCode::solver, "lambda is not positive; the iterate vanished");
  s.mean_f = s.moments.load.sum() / space.area();
  Eigen::VectorXd rhs = (s.moments.load - s.mean_f * space.lumped()) / s.moments.lambda;
  s.w = space.neumann().solve(rhs).solution;
  Eigen::VectorXd d = u.values - s.w;
  s.residual = std::sqrt(std::max(0.0, dirichlet_energy(space, d)));
  return s;
}

struct Run {
  ScalarField u;
  double J = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> residuals, Js;
};

Run iterate(const ScalarField& init, double beta, double alpha, const SolverOptions& opts) {
  Run run;
  ScalarField u = normalize(init);
  ScalarField best = u;
  double best_J = -1.0, best_res = 0.0;
  for (int it = 0; it <= opts.max_iterations; ++it) {
    ElStep s = el_step(u, beta, alpha);
    const double J = s.moments.functional.value;
    run.residuals.push_back(s.residual);
    run.Js.push_back(J);
    if (J >= best_J) {
      best = u;
      best_J = J;
      best_res = s.residual;
    }
    run.iterations = it;
    if (s.residual < opts.el_tolerance) {
      run.converged = true;
      best = u;
      best_J = J;
      best_res = s.residual;
      break;
    }
    if (it == opts.max_iterations) break;
    ScalarField next = u;
    next.values = (1.0 - opts.damping) * u.values + opts.damping * s.w;
    u = normalize(next);
  }
  run.u = std::move(best);
  run.J = best_J;
  run.residual = best_res;
  return run;
}

void normalize_sign(ScalarField& u) {
  if (u.values.maxCoeff() < -u.values.minCoeff()) u.values = -u.values;
}

}  // namespace

ExtremalReport maximize_subcritical(SpacePtr space, double beta, double eps, const SolverOptions& opts) {
  const auto params = FunctionalParams::subcritical_eps(beta, eps);
  validate(opts);
  const double alpha = params.alpha();

  std::vector<std::pair<std::string, ScalarField>> starts;
  auto moser_start = [&] {
    MoserParams mp;
    mp.delta = opts.moser_delta > 0.0 ? opts.moser_delta : 0.25 * space->flat_radius();
    mp.l = opts.moser_l > 0.0 ? opts.moser_l : 10.0 * space->origin_mesh_size();
    mp.l = std::min(mp.l, 0.5 * mp.delta);
    return moser_function(mp, space).u;
  };
  const char* given_name = opts.init == SolverOptions::Init::custom ? "custom" : "previous_solution";
  if (opts.init == SolverOptions::Init::moser) {
    starts.emplace_back("moser", moser_start());
    if (opts.best_of_restarts && opts.initial) starts.emplace_back("previous_solution", *opts.initial);
  } else {
    if (opts.initial->space != space) fail(ErrorCode::parameter, "initial field lives on a different mesh");
    starts.emplace_back(given_name, *opts.initial);
    if (opts.best_of_restarts) starts.emplace_back("moser", moser_start());
  }

  std::optional<Run> best;
  std::string best_name;
  for (auto& [name, field] : starts) {
    if (field.space != space) fail(ErrorCode::parameter, "initial field lives on a different mesh");
    Run run = iterate(field, beta, alpha, opts);
    bool better = !best || (run.converged && !best->converged) ||
                  (run.converged == best->converged && run.J > best->J);
    if (better) {
      best = std::move(run);
      best_name = name;
    }
  }

  ExtremalReport rep;
  rep.u = std::move(best->u);
  normalize_sign(rep.u);
  rep.beta = beta;
  rep.eps = eps;
  rep.alpha = alpha;
  rep.iterations = best->iterations;
  rep.converged = best->converged;
  rep.init_used = best_name;
  rep.residual_history = std::move(best->residuals);
  rep.J_history = std::move(best->Js);

  ElStep s = el_step(rep.u, beta, alpha);
  rep.J = s.moments.functional.value;
  rep.lambda_eps = s.moments.lambda;
  rep.mean_f = s.mean_f;
  rep.el_residual = s.residual;
  Eigen::Index imax;
  rep.c_eps = rep.u.values.maxCoeff(&imax);
  rep.x_eps = space->mesh().vertices[imax];
  auto scales = blowup_scales(rep.lambda_eps, rep.c_eps, eps, beta);
  rep.r_eps = scales.r_eps;
  rep.t_eps = scales.t_eps;
  rep.lambda_over_c2 = rep.lambda_eps / (rep.c_eps * rep.c_eps);
  rep.energy = dirichlet_energy(rep.u);
  rep.mean = mean(rep.u);
  rep.concentration = concentration_profile(rep.u, default_concentration_radii(*space));
  return rep;
}

double el_residual(const ScalarField& u, double beta, double eps) {
  const auto params = FunctionalParams::subcritical_eps(beta, eps);
  return el_step(u, beta, params.alpha()).residual;
}

// ---------------------------------------------------------------------------

std::vector<double> default_concentration_radii(const FeSpace& space) {
  double extent = 0.0;
  for (const auto& v : space.mesh().vertices) extent = std::max(extent, norm(v));
  std::vector<double> radii;
  for (double r = 1e-4; r < extent; r *= 10.0) {
    radii.push_back(r);
    if (3.0 * r < extent) radii.push_back(3.0 * r);
  }
  radii.push_back(extent);
  return radii;
}

std::vector<ConcentrationSample> concentration_profile(const ScalarField& u, const std::vector<double>& radii) {
  validate(u);
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] > radii[i - 1])))
      fail(ErrorCode::domain, "concentration radii must be positive and strictly increasing");
  const FeSpace& space = *u.space;
  const Mesh& mesh = space.mesh();
  const std::size_t nt = mesh.num_triangles();
  std::vector<double> density(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    Point g = space.gradient(t, u.values);
    density[t] = dot(g, g);
  }
  std::vector<ConcentrationSample> out;
  for (double rho : radii) {
    std::vector<double> part(nt, 0.0);
    parallel_for(nt, [&](std::size_t t) {
      if (density[t] != 0.0) part[t] = density[t] * disc_clipped_weight(mesh.corners(t), rho, 0.0);
    });
    out.push_back({rho, ordered_sum(nt, [&](std::size_t t) { return part[t]; })});
  }
  return out;
}

namespace {

// Area of the part of triangle p where the linear function with vertex values v is negative.
double negative_area(const TrianglePoints& p, const std::array<double, 3>& v) {
  std::array<Point, 4> poly;
  int n = 0;
  for (int i = 0; i < 3; ++i) {
    int j = (i + 1) % 3;
    if (v[i] < 0.0) poly[n++] = p[i];
    if ((v[i] < 0.0) != (v[j] < 0.0)) {
      double s = v[i] / (v[i] - v[j]);
      poly[n++] = p[i] + s * (p[j] - p[i]);
    }
  }
  double a = 0.0;
  for (int i = 0; i < n; ++i) a += cross(poly[i], poly[(i + 1) % n]);
  return 0.5 * a;
}

}  // namespace

EnergySplit truncation_energy_split(const ScalarField& u, double gamma, double c) {
  validate(u);
  if (!(gamma > 0.0 && gamma < 1.0)) {
    std::ostringstream msg;
    msg << "gamma must lie in (0,1), got " << gamma;
    fail(ErrorCode::domain, msg.str());
  }
  const FeSpace& space = *u.space;
  const Mesh& mesh = space.mesh();
  const std::size_t nt = mesh.num_triangles();
  const double level = gamma * c;
  std::vector<double> low(nt), high(nt);
  parallel_for(nt, [&](std::size_t t) {
    Point g = space.gradient(t, u.values);
    const double d = dot(g, g);
    const auto& tri = mesh.triangles[t];
    auto corners = mesh.corners(t);
    const double area = signed_area(corners);
    std::array<double, 3> v{u.values[tri[0]] - level, u.values[tri[1]] - level, u.values[tri[2]] - level};
    double a_low = std::clamp(negative_area(corners, v), 0.0, area);
    low[t] = d * a_low;
    high[t] = d * (area - a_low);
  });
  EnergySplit s;
  s.e_low = ordered_sum(nt, [&](std::size_t t) { return low[t]; });
  s.e_high = ordered_sum(nt, [&](std::size_t t) { return high[t]; });
  return s;
}

BubbleComparison compare_bubble(const ExtremalReport& report, double beta, double window_R, int radial_samples,
                                int angular_samples) {
  if (!(window_R > 0.0) || radial_samples < 1 || angular_samples < 1)
    fail(ErrorCode::parameter, "bubble comparison needs a positive window and sample counts");
  const ScalarField& u = report.u;
  const double c = report.c_eps;
  BubbleComparison out;
  auto sample = [&](Point x) {
    Point y = report.x_eps + report.t_eps * x;
    y.y = std::abs(y.y);
    auto v = evaluate(u, y);
    if (!v) {
      ++out.clipped;
      return;
    }
    double rescaled = c * (*v - c);
    if (x == Point{}) out.center_value = rescaled;
    out.sup_error = std::max(out.sup_error, std::abs(rescaled - bubble_value(beta, x)));
    ++out.samples;
  };
  sample(Point{});
  for (int i = 1; i <= radial_samples; ++i) {
    double r = window_R * i / radial_samples;
    for (int j = 0; j < angular_samples; ++j) {
      double th = 2.0 * pi * j / angular_samples;
      sample(Point{r * std::cos(th), r * std::sin(th)});
    }
  }
  out.clipped_warning = out.clipped > 0;
  out.fraction_01 = concentration_profile(u, {0.1}).front().fraction;
  out.concentrated = out.fraction_01 >= 0.5;
  return out;
}

double surplus_check(const ExtremalReport& report, const ThresholdReport& thresh) {
  return report.lambda_over_c2 - thresh.bubble_term;
}

std::string extremal_report_json(const ExtremalReport& r, const std::string& field_csv_path) {
  nlohmann::ordered_json j;
  j["beta"] = r.beta;
  j["eps"] = r.eps;
  j["alpha"] = r.alpha;
  j["J"] = r.J;
  j["c_eps"] = r.c_eps;
  j["x_eps"] = {r.x_eps.x, r.x_eps.y};
  j["lambda_eps"] = r.lambda_eps;
  j["mean_f"] = r.mean_f;
  j["r_eps"] = r.r_eps;
  j["t_eps"] = r.t_eps;
  j["lambda_over_c2"] = r.lambda_over_c2;
  j["el_residual"] = r.el_residual;
  j["energy"] = r.energy;
  j["mean"] = r.mean;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["init"] = r.init_used;
  auto& conc = j["concentration"] = nlohmann::ordered_json::array();
  for (const auto& s : r.concentration) conc.push_back({s.radius, s.fraction});
  j["residual_history"] = r.residual_history;
  j["field_csv"] = field_csv_path;
  return j.dump(2) + "\n";
}

std::string extremal_sweep_csv(const std::vector<ExtremalReport>& reports) {
  std::string out = "beta,eps,J,c_eps,lambda_eps,r_eps,t_eps,lambda_over_c2,el_residual,iterations,converged\n";
  for (const auto& r : reports)
    out += fmt17(r.beta) + ',' + fmt17(r.eps) + ',' + fmt17(r.J) + ',' + fmt17(r.c_eps) + ',' + fmt17(r.lambda_eps) +
           ',' + fmt17(r.r_eps) + ',' + fmt17(r.t_eps) + ',' + fmt17(r.lambda_over_c2) + ',' + fmt17(r.el_residual) +
           ',' + std::to_string(r.iterations) + ',' + (r.converged ? "true" : "false") + '\n';
  return out;
}

}  // namespace smtlab
