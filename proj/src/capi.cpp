#include "smtlab/smtlab.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "smtlab/error.hpp"
#include "smtlab/extremal.hpp"
#include "smtlab/functional.hpp"
#include "smtlab/green.hpp"
#include "smtlab/mesh.hpp"
#include "smtlab/profiles.hpp"
#include "smtlab/quadrature.hpp"

struct smtlab_space {
  smtlab::SpacePtr space;
};
struct smtlab_field {
  smtlab::ScalarField field;
};
struct smtlab_green {
  smtlab::GreenReport report;
};
struct smtlab_extremal {
  smtlab::ExtremalReport report;
};

namespace {

thread_local std::string last_error;

smtlab_status set_error(smtlab_status s, const char* what) {
  last_error = what;
  return s;
}

struct InvalidArgument {
  const char* what;
};

template <class... P>
void require(const char* what, const P*... ptrs) {
  if (((ptrs == nullptr) || ...)) throw InvalidArgument{what};
}

// Runs body, mapping exceptions onto status codes; nothing escapes the C boundary.
template <class F>
smtlab_status call(F&& body) {
  try {
    body();
    last_error.clear();
    return SMTLAB_OK;
  } catch (const InvalidArgument& e) {
    return set_error(SMTLAB_ERR_INVALID_ARGUMENT, e.what);
  } catch (const smtlab::Error& e) {
    return set_error(static_cast<smtlab_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(SMTLAB_ERR_RESOURCE, "out of memory");
  } catch (const std::exception& e) {
    return set_error(SMTLAB_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(SMTLAB_ERR_INTERNAL, "unknown exception");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

smtlab_field* wrap(smtlab::ScalarField f) { return new smtlab_field{std::move(f)}; }

}  // namespace

extern "C" {

const char* smtlab_version(void) { return "1.0.0"; }

const char* smtlab_status_name(smtlab_status status) {
  if (status == SMTLAB_ERR_INVALID_ARGUMENT) return "invalid_argument";
  return smtlab::to_string(static_cast<smtlab::ErrorCode>(static_cast<int>(status)));
}

const char* smtlab_last_error(void) { return last_error.c_str(); }

void smtlab_string_free(char* s) { std::free(s); }

void smtlab_domain_default(smtlab_domain* d) {
  if (!d) return;
  smtlab::DomainSpec spec;
  d->shape = SMTLAB_HALF_DISC;
  d->radius = 1.0;
  d->width = 2.0;
  d->height = 1.0;
  d->level = spec.refinement_level;
  d->grading = spec.grading_exponent;
  d->node_budget = spec.node_budget;
}

smtlab_status smtlab_space_create(const smtlab_domain* d, smtlab_space** out) {
  return call([&] {
    require("domain and output must not be null", d, out);
    smtlab::DomainSpec spec;
    if (d->shape == SMTLAB_HALF_DISC)
      spec.shape = smtlab::HalfDisc{d->radius};
    else if (d->shape == SMTLAB_RECTANGLE)
      spec.shape = smtlab::Rectangle{d->width, d->height};
    else
      smtlab::fail(smtlab::ErrorCode::parameter, "unknown domain shape");
    spec.refinement_level = d->level;
    spec.grading_exponent = d->grading;
    spec.node_budget = d->node_budget;
    *out = new smtlab_space{smtlab::FeSpace::create(smtlab::build_mesh(spec))};
  });
}

smtlab_status smtlab_space_load(const char* mesh_path, smtlab_space** out) {
  return call([&] {
    require("path and output must not be null", mesh_path, out);
    *out = new smtlab_space{smtlab::FeSpace::create(smtlab::load_mesh(mesh_path))};
  });
}

smtlab_status smtlab_space_save(const smtlab_space* s, const char* mesh_path) {
  return call([&] {
    require("space and path must not be null", s, mesh_path);
    smtlab::save_mesh(mesh_path, s->space->mesh());
  });
}

void smtlab_space_free(smtlab_space* s) { delete s; }

smtlab_status smtlab_space_get_info(const smtlab_space* s, smtlab_space_info* out) {
  return call([&] {
    require("space and output must not be null", s, out);
    const auto& sp = *s->space;
    *out = {sp.mesh().num_vertices(), sp.mesh().num_triangles(), sp.area(), sp.origin_mesh_size(), sp.flat_radius()};
  });
}

smtlab_status smtlab_weighted_measure(const smtlab_space* s, double beta, double rho, double* out) {
  return call([&] {
    require("space and output must not be null", s, out);
    smtlab::Region region = smtlab::WholeDomain{};
    if (rho > 0.0) region = smtlab::Ball{rho};
    *out = smtlab::weighted_measure(s->space->mesh(), beta, region);
  });
}

smtlab_status smtlab_field_create(const smtlab_space* s, const double* values, size_t n, smtlab_field** out) {
  return call([&] {
    require("space, values and output must not be null", s, values, out);
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(values, static_cast<Eigen::Index>(n));
    *out = wrap(smtlab::make_field(s->space, std::move(v)));
  });
}

void smtlab_field_free(smtlab_field* f) { delete f; }

size_t smtlab_field_size(const smtlab_field* f) { return f ? f->field.size() : 0; }

smtlab_status smtlab_field_values(const smtlab_field* f, double* buf, size_t n) {
  return call([&] {
    require("field and buffer must not be null", f, buf);
    if (n < f->field.size()) throw InvalidArgument{"buffer shorter than the field"};
    std::memcpy(buf, f->field.values.data(), f->field.size() * sizeof(double));
  });
}

smtlab_status smtlab_field_save_csv(const smtlab_field* f, const char* path) {
  return call([&] {
    require("field and path must not be null", f, path);
    smtlab::save_field_csv(path, f->field);
  });
}

smtlab_status smtlab_field_normalize(const smtlab_field* f, smtlab_field** out) {
  return call([&] {
    require("field and output must not be null", f, out);
    *out = wrap(smtlab::normalize(f->field));
  });
}

smtlab_status smtlab_field_energy(const smtlab_field* f, double* out) {
  return call([&] {
    require("field and output must not be null", f, out);
    *out = smtlab::dirichlet_energy(f->field);
  });
}

smtlab_status smtlab_field_mean(const smtlab_field* f, double* out) {
  return call([&] {
    require("field and output must not be null", f, out);
    *out = smtlab::mean(f->field);
  });
}

smtlab_status smtlab_mt_functional(const smtlab_field* f, double beta, double alpha, double* value, int* saturated) {
  return call([&] {
    require("field and output must not be null", f, value);
    auto v = smtlab::mt_functional(f->field, smtlab::FunctionalParams::with_alpha(beta, alpha));
    *value = v.value;
    if (saturated) *saturated = v.saturated ? 1 : 0;
  });
}

smtlab_status smtlab_moser_field(const smtlab_space* s, double l, double delta, smtlab_field** out,
                                 smtlab_moser_info* info) {
  return call([&] {
    require("space and output must not be null", s, out);
    auto m = smtlab::moser_function({l, delta}, s->space);
    if (info) *info = {m.C_l, m.cutoff_energy, m.predicted_energy};
    *out = wrap(std::move(m.u));
  });
}

namespace {
smtlab::BallNormalization normalization(int half) {
  return half ? smtlab::BallNormalization::half : smtlab::BallNormalization::full;
}
}  // namespace

smtlab_status smtlab_bubble_value(double beta, double x, double y, double* out) {
  return call([&] {
    require("output must not be null", out);
    smtlab::require_beta(beta);
    *out = smtlab::bubble_value(beta, {x, y});
  });
}

smtlab_status smtlab_bubble_mass(double beta, int half, double* out) {
  return call([&] {
    require("output must not be null", out);
    *out = smtlab::bubble_mass(beta, normalization(half)).value;
  });
}

smtlab_status smtlab_bubble_energy(double beta, double R, int half, double* out) {
  return call([&] {
    require("output must not be null", out);
    *out = smtlab::bubble_energy(beta, R, normalization(half));
  });
}

smtlab_status smtlab_bubble_energy_expansion(double beta, double R, double* out) {
  return call([&] {
    require("output must not be null", out);
    smtlab::require_beta(beta);
    *out = smtlab::bubble_energy_expansion(beta, R);
  });
}

namespace {
smtlab_threshold to_c(const smtlab::ThresholdReport& t) { return {t.weighted_volume, t.bubble_term, t.total}; }
}  // namespace

smtlab_status smtlab_threshold_compute(const smtlab_space* s, double beta, double A0, smtlab_threshold* out) {
  return call([&] {
    require("space and output must not be null", s, out);
    *out = to_c(smtlab::threshold(beta, A0, *s->space));
  });
}

smtlab_status smtlab_test_family_margin(const smtlab_green* g, double eps, double beta, double delta, const double* A0,
                                        smtlab_test_family* out, smtlab_field** field) {
  return call([&] {
    require("green report and output must not be null", g, out);
    std::optional<double> a0;
    if (A0) a0 = *A0;
    auto m = smtlab::test_family_margin(eps, beta, delta, g->report, a0);
    const auto& p = m.test.params;
    *out = {p.eps,  p.beta,   p.delta,      p.R,          p.inner_radius,   p.A0,          p.c2,
            p.c,    p.b,      p.b_asymptotic, p.jump,     p.mean_removed,   p.energy,      m.J,
            m.J_raw, m.margin, m.margin_raw, m.green_moment, m.predicted_surplus, m.saturated ? 1 : 0,
            to_c(m.threshold)};
    if (field) *field = wrap(std::move(m.test.field));
  });
}

smtlab_status smtlab_profile_sweep_csv(const smtlab_profile_row* rows, size_t n, char** out) {
  return call([&] {
    require("output must not be null", out);
    if (n > 0) require("rows must not be null", rows);
    std::vector<smtlab::ProfileSweepRow> v;
    for (size_t i = 0; i < n; ++i)
      v.push_back({rows[i].beta, rows[i].param, rows[i].value, rows[i].energy, rows[i].margin,
                   rows[i].notes ? rows[i].notes : ""});
    *out = dup_string(smtlab::profile_sweep_csv(v));
  });
}

smtlab_status smtlab_green_solve(const smtlab_space* s, smtlab_green** out) {
  return call([&] {
    require("space and output must not be null", s, out);
    auto rep = smtlab::solve_green(s->space);
    smtlab::extract_A0(rep);
    *out = new smtlab_green{std::move(rep)};
  });
}

void smtlab_green_free(smtlab_green* g) { delete g; }

smtlab_status smtlab_green_get_info(const smtlab_green* g, smtlab_green_info* out) {
  return call([&] {
    require("green report and output must not be null", g, out);
    const auto& r = g->report;
    *out = {r.A0,       r.log_coefficient_fit, r.fit_window.r_min, r.fit_window.r_max,
            r.fit_points, r.fit_rms,           r.residual_norm,    r.mean_value};
  });
}

smtlab_status smtlab_green_field(const smtlab_green* g, smtlab_field** out) {
  return call([&] {
    require("green report and output must not be null", g, out);
    *out = wrap(g->report.G);
  });
}

smtlab_status smtlab_green_json(const smtlab_green* g, const char* field_csv_path, char** out) {
  return call([&] {
    require("green report and output must not be null", g, out);
    *out = dup_string(smtlab::green_report_json(g->report, field_csv_path ? field_csv_path : ""));
  });
}

double smtlab_half_disc_A0(double delta) { return smtlab::half_disc_A0(delta); }

void smtlab_solver_options_default(smtlab_solver_options* o) {
  if (!o) return;
  smtlab::SolverOptions d;
  o->damping = d.damping;
  o->max_iterations = d.max_iterations;
  o->el_tolerance = d.el_tolerance;
  o->init = SMTLAB_INIT_MOSER;
  o->moser_l = d.moser_l;
  o->moser_delta = d.moser_delta;
  o->best_of_restarts = d.best_of_restarts ? 1 : 0;
}

smtlab_status smtlab_maximize(const smtlab_space* s, double beta, double eps, const smtlab_solver_options* opts,
                              const smtlab_field* initial, smtlab_extremal** out) {
  return call([&] {
    require("space and output must not be null", s, out);
    smtlab::SolverOptions o;
    if (opts) {
      o.damping = opts->damping;
      o.max_iterations = opts->max_iterations;
      o.el_tolerance = opts->el_tolerance;
      switch (opts->init) {
        case SMTLAB_INIT_MOSER: o.init = smtlab::SolverOptions::Init::moser; break;
        case SMTLAB_INIT_PREVIOUS: o.init = smtlab::SolverOptions::Init::previous_solution; break;
        case SMTLAB_INIT_CUSTOM: o.init = smtlab::SolverOptions::Init::custom; break;
        default: smtlab::fail(smtlab::ErrorCode::parameter, "unknown solver initialization");
      }
      o.moser_l = opts->moser_l;
      o.moser_delta = opts->moser_delta;
      o.best_of_restarts = opts->best_of_restarts != 0;
    }
    if (initial) {
      if (initial->field.space != s->space) throw InvalidArgument{"initial field lives on a different mesh"};
      o.initial = initial->field;
    }
    *out = new smtlab_extremal{smtlab::maximize_subcritical(s->space, beta, eps, o)};
  });
}

void smtlab_extremal_free(smtlab_extremal* r) { delete r; }

smtlab_status smtlab_extremal_get_info(const smtlab_extremal* r, smtlab_extremal_info* out) {
  return call([&] {
    require("report and output must not be null", r, out);
    const auto& e = r->report;
    *out = {e.beta,  e.eps,        e.alpha,  e.J,          e.c_eps,          e.x_eps.x,   e.x_eps.y,
            e.lambda_eps, e.mean_f, e.r_eps, e.t_eps,      e.lambda_over_c2, e.el_residual, e.energy,
            e.mean,  e.iterations, e.converged ? 1 : 0};
  });
}

smtlab_status smtlab_extremal_field(const smtlab_extremal* r, smtlab_field** out) {
  return call([&] {
    require("report and output must not be null", r, out);
    *out = wrap(r->report.u);
  });
}

smtlab_status smtlab_extremal_json(const smtlab_extremal* r, const char* field_csv_path, char** out) {
  return call([&] {
    require("report and output must not be null", r, out);
    *out = dup_string(smtlab::extremal_report_json(r->report, field_csv_path ? field_csv_path : ""));
  });
}

smtlab_status smtlab_extremal_sweep_csv(const smtlab_extremal* const* reports, size_t n, char** out) {
  return call([&] {
    require("output must not be null", out);
    if (n > 0) require("reports must not be null", reports);
    std::vector<smtlab::ExtremalReport> v;
    for (size_t i = 0; i < n; ++i) {
      require("report must not be null", reports[i]);
      v.push_back(reports[i]->report);
    }
    *out = dup_string(smtlab::extremal_sweep_csv(v));
  });
}

smtlab_status smtlab_el_residual(const smtlab_field* f, double beta, double eps, double* out) {
  return call([&] {
    require("field and output must not be null", f, out);
    *out = smtlab::el_residual(f->field, beta, eps);
  });
}

smtlab_status smtlab_concentration(const smtlab_field* f, const double* radii, size_t n, double* fractions) {
  return call([&] {
    require("field, radii and output must not be null", f, radii, fractions);
    auto prof = smtlab::concentration_profile(f->field, std::vector<double>(radii, radii + n));
    for (size_t i = 0; i < n; ++i) fractions[i] = prof[i].fraction;
  });
}

smtlab_status smtlab_truncation_split(const smtlab_field* f, double gamma, double c, double* e_low, double* e_high) {
  return call([&] {
    require("field and outputs must not be null", f, e_low, e_high);
    auto sp = smtlab::truncation_energy_split(f->field, gamma, c);
    *e_low = sp.e_low;
    *e_high = sp.e_high;
  });
}

smtlab_status smtlab_compare_bubble(const smtlab_extremal* r, double window_R, smtlab_bubble_comparison* out) {
  return call([&] {
    require("report and output must not be null", r, out);
    auto c = smtlab::compare_bubble(r->report, r->report.beta, window_R);
    *out = {c.sup_error,   c.samples,      c.clipped, c.clipped_warning ? 1 : 0,
            c.center_value, c.fraction_01, c.concentrated ? 1 : 0};
  });
}

smtlab_status smtlab_surplus_check(const smtlab_extremal* r, const smtlab_threshold* t, double* out) {
  return call([&] {
    require("report, threshold and output must not be null", r, t, out);
    *out = smtlab::surplus_check(r->report, {t->weighted_volume, t->bubble_term, t->total});
  });
}

}  // extern "C"
