#include "experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "handles.hpp"

namespace cli {

using json = nlohmann::ordered_json;
using std::numbers::pi;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Short label for file names, e.g. 0.3 -> "0.3", 1e-4 -> "0.0001".
std::string label(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "domain.shape",          "domain.radius",          "domain.width",
      "domain.height",         "domain.level",           "domain.grading",
      "domain.node_budget",    "run.experiment",         "run.beta",
      "run.output_dir",        "run.seed",               "run.threshold_A0",
      "solver.damping",        "solver.max_iterations",  "solver.el_tolerance",
      "solver.moser_l",        "solver.moser_delta",     "solver.best_of_restarts",
      "sweep.eps_list",        "sweep.moser_grid",       "sweep.window_R",
      "test_family.eps_list",  "test_family.delta",      "test_family.level",
      "test_family.grading",   "bubble.R",               "bubble.expansion_beta", "sharpness.delta",
      "sharpness.l_list",      "tolerances.green_A0_rel", "tolerances.green_log_rel",
      "tolerances.bubble_mass", "tolerances.bubble_energy", "tolerances.sharpness_growth",
      "tolerances.sharpness_flat", "tolerances.constraint", "tolerances.threshold_slack",
      "tolerances.energy_band", "tolerances.glue_jump"};
  return keys;
}

class Run {
 public:
  explicit Run(const Settings& s) : s_(s) {
    std::filesystem::create_directories(s.output_dir);
  }

  std::string path(const std::string& name) const { return (std::filesystem::path(s_.output_dir) / name).string(); }

  void write(const std::string& name, const std::string& content) {
    std::ofstream f(path(name), std::ios::binary);
    if (!f) throw ModuleError(SMTLAB_ERR_IO, "cannot write " + path(name));
    f << content;
    outputs_.push_back(name);
  }

  void save_field(smtlab_field* f, const std::string& name) {
    check(smtlab_field_save_csv(f, path(name).c_str()));
    outputs_.push_back(name);
  }

  void add_check(const std::string& name, bool pass, double value, double limit, const std::string& relation) {
    json c;
    c["name"] = name;
    c["pass"] = pass;
    c["value"] = value;
    c["limit"] = limit;
    c["relation"] = relation;
    checks_.push_back(c);
    all_pass_ = all_pass_ && pass;
  }

  template <class F>
  auto timed(const std::string& stage, F&& body) {
    auto t0 = std::chrono::steady_clock::now();
    auto finish = [&] {
      timings_[stage] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    if constexpr (std::is_void_v<decltype(body())>) {
      body();
      finish();
    } else {
      auto r = body();
      finish();
      return r;
    }
  }

  json finish(const Config& config, json results) {
    json m;
    m["experiment"] = s_.experiment;
    m["library_version"] = smtlab_version();
    json cfg;
    for (const auto& [k, v] : config.values()) cfg[k] = v;
    m["config"] = cfg;
    m["seed"] = s_.seed;
    m["results"] = std::move(results);
    m["checks"] = checks_;
    m["outputs"] = outputs_;
    m["timings_seconds"] = timings_;
    m["pass"] = all_pass_;
    std::ofstream f(path("manifest.json"), std::ios::binary);
    if (!f) throw ModuleError(SMTLAB_ERR_IO, "cannot write " + path("manifest.json"));
    f << m.dump(2) << '\n';
    return m;
  }

 private:
  const Settings& s_;
  json checks_ = json::array();
  std::vector<std::string> outputs_;
  json timings_ = json::object();
  bool all_pass_ = true;
};

Space make_space(const smtlab_domain& d) {
  Space s;
  check(smtlab_space_create(&d, s.out()));
  return s;
}

json domain_json(const smtlab_domain& d, smtlab_space* s) {
  smtlab_space_info info;
  check(smtlab_space_get_info(s, &info));
  json j;
  j["shape"] = d.shape == SMTLAB_HALF_DISC ? "half_disc" : "rectangle";
  if (d.shape == SMTLAB_HALF_DISC)
    j["radius"] = d.radius;
  else {
    j["width"] = d.width;
    j["height"] = d.height;
  }
  j["level"] = d.level;
  j["grading"] = d.grading;
  j["vertices"] = info.vertices;
  j["triangles"] = info.triangles;
  j["area"] = info.area;
  j["origin_mesh_size"] = info.origin_mesh_size;
  j["flat_radius"] = info.flat_radius;
  return j;
}

// ---- green ----------------------------------------------------------------

struct GreenStage {
  Green green;
  smtlab_green_info info{};
};

GreenStage green_stage(Run& run, const Settings& s, smtlab_space* space, const std::string& prefix, json& results) {
  GreenStage g;
  run.timed(prefix + "green", [&] { check(smtlab_green_solve(space, g.green.out())); });
  check(smtlab_green_get_info(g.green, &g.info));
  Field field;
  check(smtlab_green_field(g.green, field.out()));
  run.save_field(field, prefix + "green_field.csv");
  char* js = nullptr;
  check(smtlab_green_json(g.green, (prefix + "green_field.csv").c_str(), &js));
  run.write(prefix + "green.json", take_string(js) + "\n");
  json r;
  r["A0"] = g.info.A0;
  r["log_coefficient"] = g.info.log_coefficient;
  r["fit_points"] = g.info.fit_points;
  r["residual_norm"] = g.info.residual_norm;
  r["mean"] = g.info.mean;
  if (s.domain.shape == SMTLAB_HALF_DISC) {
    const double A0 = smtlab_half_disc_A0(s.domain.radius);
    r["A0_closed_form"] = A0;
    double rel = std::abs(g.info.A0 - A0) / std::abs(A0);
    double log_rel = std::abs(g.info.log_coefficient + 1.0 / pi) * pi;
    r["A0_relative_error"] = rel;
    run.add_check(prefix + "green_A0_vs_closed_form", rel <= s.tol.green_A0_rel, rel, s.tol.green_A0_rel, "<=");
    run.add_check(prefix + "green_log_coefficient", log_rel <= s.tol.green_log_rel, log_rel, s.tol.green_log_rel,
                  "<=");
  }
  run.add_check(prefix + "green_mean_zero", std::abs(g.info.mean) <= s.tol.constraint, std::abs(g.info.mean),
                s.tol.constraint, "<=");
  results[prefix + "green"] = r;
  return g;
}

double threshold_A0(const Settings& s, const smtlab_green_info& info) {
  return s.closed_form_A0 ? smtlab_half_disc_A0(s.domain.radius) : info.A0;
}

// ---- bubble ---------------------------------------------------------------

json bubble_check(Run& run, const Settings& s) {
  json rows = json::array();
  std::string csv = "beta,mass_full,mass_half,energy_half,energy_expansion,energy_difference\n";
  run.timed("bubble", [&] {
    for (double beta : s.betas) {
      double full = 0, half = 0, e = 0, ex = 0;
      check(smtlab_bubble_mass(beta, 0, &full));
      check(smtlab_bubble_mass(beta, 1, &half));
      check(smtlab_bubble_energy(beta, s.bubble_R, 1, &e));
      check(smtlab_bubble_energy_expansion(beta, s.bubble_R, &ex));
      csv += num(beta) + ',' + num(full) + ',' + num(half) + ',' + num(e) + ',' + num(ex) + ',' + num(e - ex) + '\n';
      json r;
      r["beta"] = beta;
      r["mass"] = full;
      r["mass_half"] = half;
      r["energy_half"] = e;
      r["energy_expansion"] = ex;
      rows.push_back(r);
      const std::string b = "beta=" + label(beta);
      run.add_check("bubble_mass_" + b, std::abs(full - 2.0) <= s.tol.bubble_mass, std::abs(full - 2.0),
                    s.tol.bubble_mass, "<=");
      // the expansion drops an o(1) term that is only small once pi/(2(1-beta)) R^(2-2beta) is large
      if (std::find(s.expansion_betas.begin(), s.expansion_betas.end(), beta) != s.expansion_betas.end())
        run.add_check("bubble_energy_expansion_" + b, std::abs(e - ex) <= s.tol.bubble_energy, std::abs(e - ex),
                      s.tol.bubble_energy, "<=");
    }
  });
  run.write("bubble.csv", csv);
  json r;
  r["R"] = s.bubble_R;
  r["rows"] = rows;
  return r;
}

// ---- sharpness ------------------------------------------------------------

json sharpness(Run& run, const Settings& s, smtlab_space* space) {
  std::vector<smtlab_profile_row> rows;
  std::vector<std::string> notes;
  json out = json::array();
  run.timed("sharpness", [&] {
    for (double beta : s.betas) {
      const double crit = 2.0 * pi * (1.0 - beta);
      std::vector<double> energy;
      std::vector<Field> fields;
      for (double l : s.sharpness_l) {
        Field m, u;
        check(smtlab_moser_field(space, l, s.sharpness_delta, m.out(), nullptr));
        double e = 0.0;
        check(smtlab_field_energy(m, &e));
        check(smtlab_field_normalize(m, u.out()));
        energy.push_back(e);
        fields.push_back(std::move(u));
      }
      for (double factor : {0.8, 1.2}) {
        std::vector<double> J;
        for (std::size_t i = 0; i < fields.size(); ++i) {
          double v = 0.0;
          int sat = 0;
          check(smtlab_mt_functional(fields[i], beta, factor * crit, &v, &sat));
          J.push_back(v);
          rows.push_back({beta, s.sharpness_l[i], v, energy[i], 0.0, nullptr});
          notes.push_back("alpha=" + label(factor) + "x_critical" + (sat ? ";saturated" : ""));
        }
        for (std::size_t i = 0; i < J.size(); ++i) rows[rows.size() - J.size() + i].margin = J[i] / J.front();
        const double ratio = J.back() / J.front();
        const double spread = *std::max_element(J.begin(), J.end()) / *std::min_element(J.begin(), J.end());
        json r;
        r["beta"] = beta;
        r["alpha_factor"] = factor;
        r["l"] = s.sharpness_l;
        r["J"] = J;
        r["ratio_last_to_first"] = ratio;
        out.push_back(r);
        const std::string b = "beta=" + label(beta);
        if (factor > 1.0)
          run.add_check("sharpness_growth_above_critical_" + b, ratio >= s.tol.sharpness_growth, ratio,
                        s.tol.sharpness_growth, ">=");
        else
          run.add_check("sharpness_flat_below_critical_" + b, spread <= s.tol.sharpness_flat, spread,
                        s.tol.sharpness_flat, "<=");
      }
    }
  });
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].notes = notes[i].c_str();
  char* csv = nullptr;
  check(smtlab_profile_sweep_csv(rows.data(), rows.size(), &csv));
  run.write("sharpness.csv", take_string(csv));
  return out;
}

// ---- subcritical sweep ----------------------------------------------------

struct SweepOptions {
  bool trend_checks = true;  // lambda/c^2, bubble error, concentration and truncation trends
};

json subcritical_sweep(Run& run, const Settings& s, smtlab_space* space, double A0, const SweepOptions& so) {
  std::vector<double> eps = s.sweep_eps;
  std::sort(eps.begin(), eps.end(), std::greater<>());
  smtlab_space_info sinfo;
  check(smtlab_space_get_info(space, &sinfo));
  const double moser_delta = s.solver.moser_delta > 0.0 ? s.solver.moser_delta : 0.25 * sinfo.flat_radius;

  std::vector<Extremal> reports;
  json out = json::array();
  std::string diag = "beta,eps,fraction_01,e_low_05,e_high_05,bubble_sup_error,bubble_samples,bubble_clipped,"
                     "concentrated,surplus\n";
  for (double beta : s.betas) {
    smtlab_threshold thr;
    check(smtlab_threshold_compute(space, beta, A0, &thr));
    const std::string b = "beta=" + label(beta);
    std::vector<smtlab_extremal_info> infos;
    std::vector<double> bubble_err, frac, elow;
    Field previous;
    for (double e : eps) {
      const std::string tag = b + "_eps=" + label(e);
      Extremal rep;
      run.timed("solve_" + tag, [&] {
        check(smtlab_maximize(space, beta, e, &s.solver, previous.get(), rep.out()));
      });
      smtlab_extremal_info info;
      check(smtlab_extremal_get_info(rep, &info));
      Field u;
      check(smtlab_extremal_field(rep, u.out()));
      const std::string field_name = "field_beta" + label(beta) + "_eps" + label(e) + ".csv";
      run.save_field(u, field_name);
      char* js = nullptr;
      check(smtlab_extremal_json(rep, field_name.c_str(), &js));
      run.write("extremal_beta" + label(beta) + "_eps" + label(e) + ".json", take_string(js) + "\n");

      double r01 = 0.1, f01 = 0.0, lo = 0.0, hi = 0.0, surplus = 0.0;
      check(smtlab_concentration(u, &r01, 1, &f01));
      check(smtlab_truncation_split(u, 0.5, info.c_eps, &lo, &hi));
      smtlab_bubble_comparison cmp;
      check(smtlab_compare_bubble(rep, s.window_R, &cmp));
      check(smtlab_surplus_check(rep, &thr, &surplus));
      diag += num(beta) + ',' + num(e) + ',' + num(f01) + ',' + num(lo) + ',' + num(hi) + ',' + num(cmp.sup_error) +
              ',' + std::to_string(cmp.samples) + ',' + std::to_string(cmp.clipped) + ',' +
              (cmp.concentrated ? "true" : "false") + ',' + num(surplus) + '\n';

      run.add_check("converged_" + tag, info.converged && info.el_residual < s.solver.el_tolerance, info.el_residual,
                    s.solver.el_tolerance, "<");
      run.add_check("unit_energy_" + tag, std::abs(info.energy - 1.0) <= s.tol.constraint,
                    std::abs(info.energy - 1.0), s.tol.constraint, "<=");
      run.add_check("mean_zero_" + tag, std::abs(info.mean) <= s.tol.constraint, std::abs(info.mean),
                    s.tol.constraint, "<=");
      run.add_check("lambda_positive_" + tag, info.lambda_eps > 0.0, info.lambda_eps, 0.0, ">");
      run.add_check("threshold_bound_" + tag, info.J <= thr.total * (1.0 + s.tol.threshold_slack), info.J,
                    thr.total * (1.0 + s.tol.threshold_slack), "<=");

      // Moser competitors on a log grid between 1e-4 and delta/2
      double worst = -1e300;
      const double alpha = 2.0 * pi * (1.0 - beta - e);
      for (int i = 0; i < s.moser_grid; ++i) {
        double t = s.moser_grid == 1 ? 0.0 : static_cast<double>(i) / (s.moser_grid - 1);
        double l = std::exp(std::log(0.5 * moser_delta) + t * (std::log(1e-4) - std::log(0.5 * moser_delta)));
        Field m, mu;
        check(smtlab_moser_field(space, l, moser_delta, m.out(), nullptr));
        check(smtlab_field_normalize(m, mu.out()));
        double v = 0.0;
        check(smtlab_mt_functional(mu, beta, alpha, &v, nullptr));
        worst = std::max(worst, v);
      }
      run.add_check("dominates_moser_grid_" + tag, info.J >= worst, info.J, worst, ">=");

      json r;
      r["beta"] = beta;
      r["eps"] = e;
      r["J"] = info.J;
      r["c_eps"] = info.c_eps;
      r["lambda_eps"] = info.lambda_eps;
      r["lambda_over_c2"] = info.lambda_over_c2;
      r["r_eps"] = info.r_eps;
      r["t_eps"] = info.t_eps;
      r["el_residual"] = info.el_residual;
      r["iterations"] = info.iterations;
      r["fraction_01"] = f01;
      r["e_low_05"] = lo;
      r["bubble_sup_error"] = cmp.sup_error;
      r["bubble_concentrated"] = static_cast<bool>(cmp.concentrated);
      r["surplus"] = surplus;
      r["threshold_total"] = thr.total;
      r["best_moser_competitor"] = worst;
      out.push_back(r);

      infos.push_back(info);
      bubble_err.push_back(cmp.sup_error);
      frac.push_back(f01);
      elow.push_back(lo);
      previous = std::move(u);
      reports.push_back(std::move(rep));
    }
    for (std::size_t i = 1; i < infos.size(); ++i) {
      const std::string step = b + "_eps=" + label(eps[i - 1]) + "->" + label(eps[i]);
      run.add_check("J_nondecreasing_" + step, infos[i].J >= infos[i - 1].J, infos[i].J, infos[i - 1].J, ">=");
      if (so.trend_checks) {
        run.add_check("lambda_over_c2_decreasing_" + step, infos[i].lambda_over_c2 < infos[i - 1].lambda_over_c2,
                      infos[i].lambda_over_c2, infos[i - 1].lambda_over_c2, "<");
        run.add_check("bubble_error_decreasing_" + step, bubble_err[i] < bubble_err[i - 1], bubble_err[i],
                      bubble_err[i - 1], "<");
      }
    }
    if (so.trend_checks && infos.size() >= 2) {
      run.add_check("concentration_grows_" + b, frac.back() > frac.front(), frac.back(), frac.front(), ">");
      const double first = std::abs(elow.front() - 0.5), last = std::abs(elow.back() - 0.5);
      run.add_check("truncation_trend_" + b, last < first, last, first, "<");
    }
  }
  std::vector<const smtlab_extremal*> ptrs;
  for (auto& r : reports) ptrs.push_back(r);
  char* csv = nullptr;
  check(smtlab_extremal_sweep_csv(ptrs.data(), ptrs.size(), &csv));
  run.write("sweep.csv", take_string(csv));
  run.write("diagnostics.csv", diag);
  return out;
}

// ---- test family ----------------------------------------------------------

json test_family(Run& run, const Settings& s, json& results) {
  smtlab_domain d = s.domain;
  d.level = s.family_level;
  d.grading = s.family_grading;
  Space space = run.timed("family_mesh", [&] { return make_space(d); });
  results["test_family_domain"] = domain_json(d, space);
  GreenStage g = green_stage(run, s, space, "family_", results);
  const double A0 = threshold_A0(s, g.info);
  std::vector<double> eps = s.family_eps;
  std::sort(eps.begin(), eps.end(), std::greater<>());

  std::vector<smtlab_profile_row> rows;
  std::vector<std::string> notes;
  json out = json::array();
  run.timed("test_family", [&] {
    for (double beta : s.betas) {
      const std::string b = "beta=" + label(beta);
      double last_margin = 0.0;
      for (double e : eps) {
        smtlab_test_family tf;
        Field f;
        check(smtlab_test_family_margin(g.green, e, beta, s.family_delta, &A0, &tf, f.out()));
        const std::string tag = b + "_eps=" + label(e);
        rows.push_back({beta, e, tf.J, tf.energy, tf.margin, nullptr});
        notes.push_back("c2=" + num(tf.c2) + ";jump=" + num(tf.jump) + (tf.saturated ? ";saturated" : ""));
        json r;
        for (auto [k, v] : {std::pair<const char*, double>{"eps", tf.eps}, {"beta", tf.beta}, {"delta", tf.delta},
                            {"R", tf.R}, {"inner_radius", tf.inner_radius}, {"A0", tf.A0}, {"c2", tf.c2},
                            {"b", tf.b}, {"b_asymptotic", tf.b_asymptotic}, {"jump", tf.jump},
                            {"mean_removed", tf.mean_removed}, {"energy", tf.energy}, {"J", tf.J},
                            {"J_raw", tf.J_raw}, {"threshold_total", tf.threshold.total}, {"margin", tf.margin},
                            {"margin_raw", tf.margin_raw}, {"green_moment", tf.green_moment},
                            {"predicted_surplus", tf.predicted_surplus}})
          r[k] = v;
        r["saturated"] = static_cast<bool>(tf.saturated);
        out.push_back(r);
        run.add_check("family_energy_" + tag, std::abs(tf.energy - 1.0) <= s.tol.energy_band,
                      std::abs(tf.energy - 1.0), s.tol.energy_band, "<=");
        run.add_check("family_glue_jump_" + tag, tf.jump <= s.tol.glue_jump * tf.c, tf.jump, s.tol.glue_jump * tf.c,
                      "<=");
        last_margin = tf.margin;
      }
      if (!eps.empty())
        run.add_check("family_margin_positive_" + b + "_eps=" + label(eps.back()), last_margin > 0.0, last_margin,
                      0.0, ">");
    }
  });
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].notes = notes[i].c_str();
  char* csv = nullptr;
  check(smtlab_profile_sweep_csv(rows.data(), rows.size(), &csv));
  run.write("test_family.csv", take_string(csv));
  run.write("test_family.json", out.dump(2) + "\n");
  return out;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"sharpness",   "subcritical_sweep", "green",
                                              "bubble_check", "test_family",       "full_pipeline"};
  return names;
}

Settings make_settings(const std::string& experiment, const Config& c) {
  c.check_known(known_keys());
  Settings s;
  s.experiment = experiment;
  const std::string named = c.get_string("run.experiment", experiment);
  if (named != experiment)
    throw ConfigError("field 'run.experiment': config is for '" + named + "' but '" + experiment + "' was requested");

  smtlab_domain_default(&s.domain);
  const std::string shape = c.get_string("domain.shape", "half_disc");
  if (shape == "half_disc")
    s.domain.shape = SMTLAB_HALF_DISC;
  else if (shape == "rectangle")
    s.domain.shape = SMTLAB_RECTANGLE;
  else
    throw ConfigError("field 'domain.shape': expected half_disc or rectangle, got '" + shape + "'");
  s.domain.radius = c.get_double("domain.radius", 1.0);
  s.domain.width = c.get_double("domain.width", 2.0);
  s.domain.height = c.get_double("domain.height", 1.0);
  s.domain.level = c.get_int("domain.level", 6);
  s.domain.grading = c.get_double("domain.grading", 2.0);
  const int budget = c.get_int("domain.node_budget", static_cast<int>(s.domain.node_budget));
  if (budget <= 0) throw ConfigError("field 'domain.node_budget': must be positive");
  s.domain.node_budget = static_cast<size_t>(budget);

  s.betas = c.get_list("run.beta", {0.5});
  for (double b : s.betas)
    if (!(b > 0.0 && b < 1.0)) throw ConfigError("field 'run.beta': values must lie in (0,1), got " + num(b));
  s.output_dir = c.get_string("run.output_dir", "out/" + experiment);
  s.seed = c.get_int("run.seed", 0);
  const std::string a0 = c.get_string("run.threshold_A0", "fitted");
  if (a0 != "fitted" && a0 != "closed_form")
    throw ConfigError("field 'run.threshold_A0': expected fitted or closed_form, got '" + a0 + "'");
  s.closed_form_A0 = a0 == "closed_form";
  if (s.closed_form_A0 && s.domain.shape != SMTLAB_HALF_DISC)
    throw ConfigError("field 'run.threshold_A0': closed_form is only available on the half-disc");

  smtlab_solver_options_default(&s.solver);
  s.solver.damping = c.get_double("solver.damping", s.solver.damping);
  s.solver.max_iterations = c.get_int("solver.max_iterations", s.solver.max_iterations);
  s.solver.el_tolerance = c.get_double("solver.el_tolerance", s.solver.el_tolerance);
  s.solver.moser_l = c.get_double("solver.moser_l", s.solver.moser_l);
  s.solver.moser_delta = c.get_double("solver.moser_delta", s.solver.moser_delta);
  s.solver.best_of_restarts = c.get_bool("solver.best_of_restarts", true) ? 1 : 0;
  s.solver.init = SMTLAB_INIT_MOSER;

  s.sweep_eps = c.get_list("sweep.eps_list", {0.3, 0.2, 0.1});
  s.moser_grid = c.get_int("sweep.moser_grid", 10);
  if (s.moser_grid < 1) throw ConfigError("field 'sweep.moser_grid': must be at least 1");
  s.window_R = c.get_double("sweep.window_R", 1.0);

  s.family_eps = c.get_list("test_family.eps_list", {1e-3, 1e-4});
  s.family_delta = c.get_double("test_family.delta", 1.0);
  s.family_level = c.get_int("test_family.level", 7);
  s.family_grading = c.get_double("test_family.grading", 3.0);

  s.bubble_R = c.get_double("bubble.R", 1000.0);
  s.expansion_betas = c.get_list("bubble.expansion_beta", {0.25});
  s.sharpness_delta = c.get_double("sharpness.delta", 0.4);
  s.sharpness_l = c.get_list("sharpness.l_list", {1e-2, 3e-3, 1e-3, 3e-4, 1e-4});

  auto& t = s.tol;
  t.green_A0_rel = c.get_double("tolerances.green_A0_rel", t.green_A0_rel);
  t.green_log_rel = c.get_double("tolerances.green_log_rel", t.green_log_rel);
  t.bubble_mass = c.get_double("tolerances.bubble_mass", t.bubble_mass);
  t.bubble_energy = c.get_double("tolerances.bubble_energy", t.bubble_energy);
  t.sharpness_growth = c.get_double("tolerances.sharpness_growth", t.sharpness_growth);
  t.sharpness_flat = c.get_double("tolerances.sharpness_flat", t.sharpness_flat);
  t.constraint = c.get_double("tolerances.constraint", t.constraint);
  t.threshold_slack = c.get_double("tolerances.threshold_slack", t.threshold_slack);
  t.energy_band = c.get_double("tolerances.energy_band", t.energy_band);
  t.glue_jump = c.get_double("tolerances.glue_jump", t.glue_jump);
  return s;
}

json run_experiment(const Settings& s, const Config& config) {
  Run run(s);
  json results;
  const std::string& e = s.experiment;
  if (e == "bubble_check") {
    results["bubble"] = bubble_check(run, s);
    return run.finish(config, results);
  }
  if (e == "test_family") {
    results["test_family"] = test_family(run, s, results);
    return run.finish(config, results);
  }

  Space space = run.timed("mesh", [&] { return make_space(s.domain); });
  results["domain"] = domain_json(s.domain, space);
  if (e == "green") {
    green_stage(run, s, space, "", results);
  } else if (e == "sharpness") {
    results["sharpness"] = sharpness(run, s, space);
  } else if (e == "subcritical_sweep") {
    GreenStage g = green_stage(run, s, space, "", results);
    results["sweep"] = subcritical_sweep(run, s, space, threshold_A0(s, g.info), {});
  } else if (e == "full_pipeline") {
    GreenStage g = green_stage(run, s, space, "", results);
    const double A0 = threshold_A0(s, g.info);
    json thresholds = json::array();
    for (double beta : s.betas) {
      smtlab_threshold t;
      check(smtlab_threshold_compute(space, beta, A0, &t));
      thresholds.push_back({{"beta", beta}, {"weighted_volume", t.weighted_volume}, {"bubble_term", t.bubble_term},
                            {"total", t.total}});
    }
    results["threshold"] = thresholds;
    SweepOptions so;
    so.trend_checks = false;
    json sweep = subcritical_sweep(run, s, space, A0, so);
    results["sweep"] = sweep;
    json family = test_family(run, s, results);
    results["test_family"] = family;

    json summary;
    summary["domain"] = results["domain"];
    summary["A0"] = A0;
    summary["threshold"] = thresholds;
    json js = json::array();
    for (const auto& r : sweep)
      js.push_back({{"beta", r["beta"]}, {"eps", r["eps"]}, {"J", r["J"]}, {"threshold_total", r["threshold_total"]},
                    {"lambda_over_c2", r["lambda_over_c2"]}});
    summary["subcritical"] = js;
    json fm = json::array();
    for (const auto& r : family)
      fm.push_back({{"beta", r["beta"]}, {"eps", r["eps"]}, {"J", r["J"]}, {"threshold_total", r["threshold_total"]},
                    {"margin", r["margin"]}});
    summary["test_family"] = fm;
    bool beats = !family.empty() && family.back()["margin"].get<double>() > 0.0;
    summary["test_family_beats_threshold"] = beats;
    run.write("summary.json", summary.dump(2) + "\n");
    results["summary_file"] = "summary.json";
  } else {
    throw ConfigError("unknown experiment '" + e + "'");
  }
  return run.finish(config, results);
}

}  // namespace cli
