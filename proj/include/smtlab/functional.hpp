#pragma once

#include <functional>

#include "smtlab/field.hpp"

namespace smtlab {

struct FunctionalParams {
  enum class Mode { explicit_alpha, subcritical };

  double beta = 0.5;
  Mode mode = Mode::explicit_alpha;
  double alpha_value = 0.0;  // used in explicit_alpha mode
  double eps = 0.0;          // used in subcritical mode

  static FunctionalParams with_alpha(double beta, double alpha);
  static FunctionalParams subcritical_eps(double beta, double eps);

  /// Effective exponent; 2 pi (1 - beta - eps) in subcritical mode.
  double alpha() const;
};

/// Throws a domain error for beta outside (0,1), nonpositive alpha, or eps
/// outside (0, 1 - beta).
void validate(const FunctionalParams& p);

/// The critical exponent 2 pi (1 - beta).
double critical_alpha(double beta);

/// Exponents above this are not evaluated; the integrand is clamped instead.
inline constexpr double kSaturationExponent = 700.0;

struct FunctionalValue {
  double value = 0.0;
  bool saturated = false;     // value is a clamped lower bound
  double max_exponent = 0.0;  // alpha * max u^2
};

/// Integral of |x|^(-2 beta) exp(alpha u^2) with u interpolated at the nodes of
/// the singular quadrature rule.
FunctionalValue mt_functional(const ScalarField& u, const FunctionalParams& p);

/// Same integrand without the weight-domain restriction on beta: beta = 0
/// gives the unweighted integral of exp(alpha u^2).
FunctionalValue exp_integral(const ScalarField& u, double beta, double alpha);

/// Quantities of the Euler-Lagrange system for f = |x|^(-2 beta) u exp(alpha u^2):
/// load_i = integral of f * phi_i, lambda = integral of u f = u . load.
struct ExpMoments {
  FunctionalValue functional;
  double lambda = 0.0;
  Eigen::VectorXd load;
};

ExpMoments exp_moments(const ScalarField& u, double beta, double alpha);

/// Integral of |x|^(-2 beta) g(u) with the same quadrature as mt_functional.
double weighted_integral(const ScalarField& u, double beta, const std::function<double(double)>& g);

double dirichlet_energy(const ScalarField& u);
double dirichlet_energy(const FeSpace& space, const Eigen::VectorXd& values);

/// Integral of u over the domain (exact for P1 fields).
double integral(const ScalarField& u);
double mean(const ScalarField& u);

ScalarField mean_zero_project(const ScalarField& u);

/// Mean-zero, unit-energy multiple of u. Throws degenerate_input for constant u.
ScalarField normalize(const ScalarField& u);

}  // namespace smtlab
