#pragma once

#include <string>
#include <utility>

#include "smtlab/field.hpp"

namespace smtlab {

struct FitWindow {
  double r_min = 0.0;
  double r_max = 0.0;
  // also drop vertices closer to the origin than 3x their own longest edge
  bool local_mesh_size = true;
};

struct GreenReport {
  ScalarField G;
  double A0 = 0.0;
  double log_coefficient_fit = 0.0;
  FitWindow fit_window;
  std::size_t fit_points = 0;
  double fit_rms = 0.0;         // rms deviation of G from the fitted a log r + b
  double residual_norm = 0.0;   // relative residual of the linear solve
  double mean_value = 0.0;
  int refinement_steps = 0;
};

/// Mean-zero Neumann Green function with unit point load at the origin vertex
/// and uniform compensating sink. The fit fields stay empty until extract_A0.
GreenReport solve_green(SpacePtr space);

/// Default window [3 h, rho / 4]: h is the mesh size at the origin and rho the
/// radius of the flat half-ball around it.
FitWindow default_fit_window(const FeSpace& space);

/// Least-squares fit of G - r^2 / (4 |Omega|) against a log r + b over the
/// vertices in the window. The subtracted term is the particular solution of
/// -Delta psi = -1/|Omega| with zero flux across the flat boundary; without it
/// the quadratic part of psi biases b by several percent. Stores b as A0 and a
/// as the log coefficient in the report and returns A0.
double extract_A0(GreenReport& report, const FitWindow& window);
double extract_A0(GreenReport& report);

/// Closed form on the half-disc of radius delta:
/// G = -(1/pi) log r + r^2 / (2 pi delta^2) + (log delta) / pi - 3 / (4 pi).
double half_disc_green(double delta, Point x);
double half_disc_A0(double delta);

std::string green_report_json(const GreenReport& report, const std::string& field_csv_path);

}  // namespace smtlab
