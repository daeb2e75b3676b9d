#pragma once

#include <optional>
#include <string>
#include <vector>

#include "smtlab/field.hpp"
#include "smtlab/green.hpp"

namespace smtlab {

/// Cubic Hermite step: 0 for t <= 0, 1 for t >= 1, 3t^2 - 2t^3 between.
double smoothstep(double t);

// ---- Moser family --------------------------------------------------------

struct MoserParams {
  double l = 0.1;
  double delta = 0.4;
};

struct MoserField {
  ScalarField u;               // not normalized; mean zero
  double C_l = 0.0;
  double cutoff_energy = 0.0;  // integral of |grad phi|^2 over the half annulus delta < r < 2 delta
  double predicted_energy = 0.0;  // 1 + C_l^2 / pi * cutoff_energy
};

/// Radial Moser profile with outer value C_l phi / sqrt(pi).
double moser_profile(double r, double l, double delta, double C_l);

/// Requires 0 < l < delta and 2 delta within the flat half-ball of the mesh.
MoserField moser_function(const MoserParams& p, SpacePtr space);

// ---- Bubble --------------------------------------------------------------

/// Whether a radial integral is taken over the whole ball or over the half
/// ball above the flat boundary (half of the former).
enum class BallNormalization { full, half };

const char* to_string(BallNormalization n);

/// -(1/(2 pi (1-beta))) log(1 + pi/(2(1-beta)) |x|^(2(1-beta))).
double bubble_radial(double beta, double r);
double bubble_value(double beta, Point x);

struct BubbleMass {
  double value = 0.0;
  double quadrature_part = 0.0;
  double tail = 0.0;
  double tail_error_bound = 0.0;
  double truncation_radius = 0.0;
};

/// Integral of |x|^(-2 beta) exp(4 pi (1-beta) phi0) by radial quadrature on
/// [0, truncation_radius] plus the leading-order tail beyond it. Throws an
/// accuracy error if the tail bound exceeds 1e-7 (1/10 of the certified 1e-6).
/// truncation_radius <= 0 selects one automatically.
BubbleMass bubble_mass(double beta, BallNormalization norm, double truncation_radius = 0.0);

/// Integral of |grad phi0|^2 over the ball of radius R by radial quadrature.
double bubble_energy(double beta, double R, BallNormalization norm);

/// Large-R expansion of the half-ball energy with the o(1) term dropped:
/// (1/pi) log R + log(pi/(2(1-beta))) / (2 pi (1-beta)) - 1 / (2 pi (1-beta)).
double bubble_energy_expansion(double beta, double R);

// ---- Threshold -----------------------------------------------------------

struct ThresholdReport {
  double weighted_volume = 0.0;
  double bubble_term = 0.0;
  double total = 0.0;
};

/// weighted_volume from the mesh; bubble_term = pi/(2(1-beta)) e^(1 + 2 pi (1-beta) A0).
ThresholdReport threshold(double beta, double A0, const FeSpace& space);
double threshold_bubble_term(double beta, double A0);

// ---- Glued test family ---------------------------------------------------

struct TestFunctionParams {
  double eps = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  double R = 0.0;             // (-log eps)^(1/(1-beta))
  double inner_radius = 0.0;  // R eps
  double A0 = 0.0;
  double c2 = 0.0;
  double c = 0.0;
  double b = 0.0;
  double b_asymptotic = 0.0;  // 1/(2 pi (1-beta)), the leading value of b
  double jump = 0.0;          // |inner - outer| at |x| = R eps
  double mean_removed = 0.0;  // mean subtracted by the projection
  double energy = 0.0;        // Dirichlet energy of the returned field
};

struct TestFunction {
  ScalarField field;  // mean zero, not rescaled
  TestFunctionParams params;
};

/// Glued bubble / Green field. c^2 drops the O-terms of its expansion; b is
/// fixed by exact continuity at |x| = R eps with that c. Requires R eps < delta / 2.
TestFunction test_function(double eps, double beta, double delta, const GreenReport& green, double A0);

struct TestFamilyMargin {
  TestFunction test;
  double J = 0.0;            // functional of the normalized field at the critical exponent
  double J_raw = 0.0;        // functional of the field as constructed
  bool saturated = false;
  ThresholdReport threshold;
  double margin = 0.0;       // J - threshold.total
  double margin_raw = 0.0;   // J_raw - threshold.total
  double green_moment = 0.0; // integral of |x|^(-2 beta) G^2
  double predicted_surplus = 0.0;  // 2 pi (1-beta) / c^2 * green_moment
};

/// A0 defaults to the fitted value in the report.
TestFamilyMargin test_family_margin(double eps, double beta, double delta, const GreenReport& green,
                                    std::optional<double> A0 = std::nullopt);

// ---- Sweep output --------------------------------------------------------

struct ProfileSweepRow {
  double beta = 0.0;
  double param = 0.0;
  double value = 0.0;
  double energy = 0.0;
  double margin = 0.0;
  std::string notes;
};

/// CSV with header `beta,param,value,energy,margin,notes`.
std::string profile_sweep_csv(const std::vector<ProfileSweepRow>& rows);

}  // namespace smtlab
