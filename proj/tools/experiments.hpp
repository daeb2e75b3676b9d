#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "json.hpp"
#include "smtlab/smtlab.h"

namespace cli {

struct Tolerances {
  double green_A0_rel = 0.02;
  double green_log_rel = 0.05;
  double bubble_mass = 1e-6;
  double bubble_energy = 5e-3;
  double sharpness_growth = 10.0;
  double sharpness_flat = 1.2;
  double constraint = 1e-10;
  double threshold_slack = 0.05;
  double energy_band = 0.02;
  double glue_jump = 1e-6;
};

struct Settings {
  std::string experiment;
  smtlab_domain domain{};
  std::vector<double> betas;
  std::string output_dir;
  long seed = 0;
  bool closed_form_A0 = false;  // threshold from the half-disc formula instead of the fit

  smtlab_solver_options solver{};
  std::vector<double> sweep_eps;
  int moser_grid = 10;
  double window_R = 1.0;

  std::vector<double> family_eps;
  double family_delta = 1.0;
  int family_level = 7;
  double family_grading = 3.0;

  double bubble_R = 1000.0;
  std::vector<double> expansion_betas;  // where the energy expansion is checked

  double sharpness_delta = 0.4;
  std::vector<double> sharpness_l;

  Tolerances tol;
};

const std::vector<std::string>& experiment_names();

// Reads the known keys of the config (after command-line overrides) into settings.
Settings make_settings(const std::string& experiment, const Config& config);

// Runs the experiment, writes its files and manifest.json into settings.output_dir
// and returns the manifest. Library failures propagate as ModuleError.
nlohmann::ordered_json run_experiment(const Settings& settings, const Config& config);

}  // namespace cli
