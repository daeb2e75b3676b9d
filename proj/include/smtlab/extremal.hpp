#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "smtlab/field.hpp"
#include "smtlab/profiles.hpp"

namespace smtlab {

struct SolverOptions {
  enum class Init { moser, previous_solution, custom };

  double damping = 0.5;
  int max_iterations = 3000;
  double el_tolerance = 1e-8;
  Init init = Init::moser;
  double moser_l = 0.0;      // <= 0: 10 x the mesh size at the origin
  double moser_delta = 0.0;  // <= 0: a quarter of the flat radius
  std::optional<ScalarField> initial;  // previous solution or custom field
  // Also start from the other available guess (Moser field or the given
  // field) and keep the better result.
  bool best_of_restarts = true;
};

void validate(const SolverOptions& o);

struct ConcentrationSample {
  double radius = 0.0;
  double fraction = 0.0;
};

struct ExtremalReport {
  ScalarField u;  // mean 0, energy 1, max u = c_eps > 0
  double beta = 0.0;
  double eps = 0.0;
  double alpha = 0.0;
  double J = 0.0;
  double c_eps = 0.0;
  Point x_eps;
  double lambda_eps = 0.0;
  double mean_f = 0.0;
  double r_eps = 0.0;
  double t_eps = 0.0;
  double lambda_over_c2 = 0.0;
  double el_residual = 0.0;
  double energy = 0.0;
  double mean = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string init_used;
  std::vector<double> residual_history;
  std::vector<double> J_history;
  std::vector<ConcentrationSample> concentration;
};

struct BlowupScales {
  double r_eps = 0.0;
  double t_eps = 0.0;
};

/// r = sqrt(lambda) / c * exp(-pi (1 - beta - eps) c^2), t = r^(1/(1-beta)).
BlowupScales blowup_scales(double lambda, double c, double eps, double beta);

/// Damped fixed point on the Euler-Lagrange system under the mean-zero,
/// unit-energy constraint. Throws a saturation error if the exponent exceeds
/// the representable range; non-convergence is reported via converged=false.
ExtremalReport maximize_subcritical(SpacePtr space, double beta, double eps, const SolverOptions& opts = {});

/// Energy-norm size of the Euler-Lagrange defect: |u - w|, where w is the
/// mean-zero Neumann solution with load lambda^-1 (f - mean f).
double el_residual(const ScalarField& u, double beta, double eps);

/// Fraction of the Dirichlet energy inside B_rho(0) for each radius; the
/// triangle/disc intersections are exact.
std::vector<ConcentrationSample> concentration_profile(const ScalarField& u, const std::vector<double>& radii);

/// Radii used for the report: 1e-4, 3e-4, 1e-3, ... below the largest |x| in
/// the mesh, then that largest |x| itself.
std::vector<double> default_concentration_radii(const FeSpace& space);

struct EnergySplit {
  double e_low = 0.0;   // energy of min(u, gamma c)
  double e_high = 0.0;  // energy of (u - gamma c)^+
};

/// Exact split along the level line u = gamma c of the P1 field.
EnergySplit truncation_energy_split(const ScalarField& u, double gamma, double c);

struct BubbleComparison {
  double sup_error = 0.0;
  std::size_t samples = 0;
  std::size_t clipped = 0;  // sample points outside the domain (skipped)
  bool clipped_warning = false;
  double center_value = 0.0;  // rescaled field at x = 0
  double fraction_01 = 0.0;   // energy fraction in B_0.1
  bool concentrated = false;  // fraction_01 >= 0.5; otherwise the comparison is only indicative
};

/// Samples c (u(x_eps + t_eps x) - c) on a polar grid |x| <= window_R, with
/// points below the flat boundary reflected evenly, against the bubble.
BubbleComparison compare_bubble(const ExtremalReport& report, double beta, double window_R, int radial_samples = 40,
                                int angular_samples = 64);

/// lambda_eps / c_eps^2 - bubble_term.
double surplus_check(const ExtremalReport& report, const ThresholdReport& thresh);

std::string extremal_report_json(const ExtremalReport& report, const std::string& field_csv_path);

/// CSV with header
/// `beta,eps,J,c_eps,lambda_eps,r_eps,t_eps,lambda_over_c2,el_residual,iterations,converged`.
std::string extremal_sweep_csv(const std::vector<ExtremalReport>& reports);

}  // namespace smtlab
