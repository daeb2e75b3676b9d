#ifndef SMTLAB_H
#define SMTLAB_H

#include <stddef.h>

#if defined(_WIN32)
#if defined(SMTLAB_BUILDING)
#define SMTLAB_API __declspec(dllexport)
#else
#define SMTLAB_API __declspec(dllimport)
#endif
#else
#define SMTLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Every function returning smtlab_status stores a message for
   the calling thread, readable with smtlab_last_error(), when it fails. */
typedef enum smtlab_status {
  SMTLAB_OK = 0,
  SMTLAB_ERR_DOMAIN = 1,
  SMTLAB_ERR_GEOMETRY = 2,
  SMTLAB_ERR_RESOURCE = 3,
  SMTLAB_ERR_MESH_QUALITY = 4,
  SMTLAB_ERR_SOLVER = 5,
  SMTLAB_ERR_DEGENERATE_INPUT = 6,
  SMTLAB_ERR_FIT_WINDOW = 7,
  SMTLAB_ERR_ACCURACY = 8,
  SMTLAB_ERR_PARAMETER = 9,
  SMTLAB_ERR_CONFIG = 10,
  SMTLAB_ERR_SATURATION = 11,
  SMTLAB_ERR_IO = 12,
  SMTLAB_ERR_INVALID_ARGUMENT = 13, /* null handle or output pointer, mismatched meshes */
  SMTLAB_ERR_INTERNAL = 99
} smtlab_status;

SMTLAB_API const char* smtlab_version(void);
SMTLAB_API const char* smtlab_status_name(smtlab_status status);
/* Message of the last failure on this thread; "" after a success. */
SMTLAB_API const char* smtlab_last_error(void);

/* Strings returned through char** are owned by the caller. */
SMTLAB_API void smtlab_string_free(char* s);

/* ---- domain and mesh ---------------------------------------------------- */

typedef struct smtlab_space smtlab_space;
typedef struct smtlab_field smtlab_field;
typedef struct smtlab_green smtlab_green;
typedef struct smtlab_extremal smtlab_extremal;

typedef enum smtlab_shape { SMTLAB_HALF_DISC = 0, SMTLAB_RECTANGLE = 1 } smtlab_shape;

typedef struct smtlab_domain {
  smtlab_shape shape;
  double radius; /* half-disc */
  double width;  /* rectangle */
  double height;
  int level;
  double grading; /* 1 = uniform */
  size_t node_budget;
} smtlab_domain;

SMTLAB_API void smtlab_domain_default(smtlab_domain* d);
SMTLAB_API smtlab_status smtlab_space_create(const smtlab_domain* d, smtlab_space** out);
SMTLAB_API smtlab_status smtlab_space_load(const char* mesh_path, smtlab_space** out);
SMTLAB_API smtlab_status smtlab_space_save(const smtlab_space* s, const char* mesh_path);
SMTLAB_API void smtlab_space_free(smtlab_space* s);

typedef struct smtlab_space_info {
  size_t vertices;
  size_t triangles;
  double area;
  double origin_mesh_size;
  double flat_radius;
} smtlab_space_info;

SMTLAB_API smtlab_status smtlab_space_get_info(const smtlab_space* s, smtlab_space_info* out);
/* Integral of |x|^(-2 beta) over the domain intersected with B_rho(0); rho <= 0 means the whole domain. */
SMTLAB_API smtlab_status smtlab_weighted_measure(const smtlab_space* s, double beta, double rho, double* out);

/* ---- fields ------------------------------------------------------------- */

SMTLAB_API smtlab_status smtlab_field_create(const smtlab_space* s, const double* values, size_t n, smtlab_field** out);
SMTLAB_API void smtlab_field_free(smtlab_field* f);
SMTLAB_API size_t smtlab_field_size(const smtlab_field* f);
SMTLAB_API smtlab_status smtlab_field_values(const smtlab_field* f, double* buf, size_t n);
SMTLAB_API smtlab_status smtlab_field_save_csv(const smtlab_field* f, const char* path);
SMTLAB_API smtlab_status smtlab_field_normalize(const smtlab_field* f, smtlab_field** out);
SMTLAB_API smtlab_status smtlab_field_energy(const smtlab_field* f, double* out);
SMTLAB_API smtlab_status smtlab_field_mean(const smtlab_field* f, double* out);
/* Integral of |x|^(-2 beta) exp(alpha u^2); saturated (nullable) is set to 1 if the value is a clamped bound. */
SMTLAB_API smtlab_status smtlab_mt_functional(const smtlab_field* f, double beta, double alpha, double* value,
                                              int* saturated);

/* ---- analytic profiles -------------------------------------------------- */

typedef struct smtlab_moser_info {
  double C_l;
  double cutoff_energy;
  double predicted_energy;
} smtlab_moser_info;

/* info may be null. */
SMTLAB_API smtlab_status smtlab_moser_field(const smtlab_space* s, double l, double delta, smtlab_field** out,
                                            smtlab_moser_info* info);

/* half = 0: integral over the whole plane or ball; half = 1: over the half-ball. */
SMTLAB_API smtlab_status smtlab_bubble_value(double beta, double x, double y, double* out);
SMTLAB_API smtlab_status smtlab_bubble_mass(double beta, int half, double* out);
SMTLAB_API smtlab_status smtlab_bubble_energy(double beta, double R, int half, double* out);
SMTLAB_API smtlab_status smtlab_bubble_energy_expansion(double beta, double R, double* out);

typedef struct smtlab_threshold {
  double weighted_volume;
  double bubble_term;
  double total;
} smtlab_threshold;

SMTLAB_API smtlab_status smtlab_threshold_compute(const smtlab_space* s, double beta, double A0, smtlab_threshold* out);

typedef struct smtlab_test_family {
  double eps, beta, delta, R, inner_radius, A0, c2, c, b, b_asymptotic, jump, mean_removed, energy;
  double J, J_raw, margin, margin_raw, green_moment, predicted_surplus;
  int saturated;
  smtlab_threshold threshold;
} smtlab_test_family;

/* A0 null: the fitted value of the Green report. field (nullable) receives the glued test field. */
SMTLAB_API smtlab_status smtlab_test_family_margin(const smtlab_green* g, double eps, double beta, double delta,
                                                   const double* A0, smtlab_test_family* out, smtlab_field** field);

typedef struct smtlab_profile_row {
  double beta, param, value, energy, margin;
  const char* notes;
} smtlab_profile_row;

SMTLAB_API smtlab_status smtlab_profile_sweep_csv(const smtlab_profile_row* rows, size_t n, char** out);

/* ---- Green function ----------------------------------------------------- */

typedef struct smtlab_green_info {
  double A0;
  double log_coefficient;
  double fit_r_min;
  double fit_r_max;
  size_t fit_points;
  double fit_rms;
  double residual_norm;
  double mean;
} smtlab_green_info;

/* Solves and fits A0 over the default window. */
SMTLAB_API smtlab_status smtlab_green_solve(const smtlab_space* s, smtlab_green** out);
SMTLAB_API void smtlab_green_free(smtlab_green* g);
SMTLAB_API smtlab_status smtlab_green_get_info(const smtlab_green* g, smtlab_green_info* out);
SMTLAB_API smtlab_status smtlab_green_field(const smtlab_green* g, smtlab_field** out);
SMTLAB_API smtlab_status smtlab_green_json(const smtlab_green* g, const char* field_csv_path, char** out);
SMTLAB_API double smtlab_half_disc_A0(double delta);

/* ---- subcritical extremals ---------------------------------------------- */

typedef enum smtlab_init { SMTLAB_INIT_MOSER = 0, SMTLAB_INIT_PREVIOUS = 1, SMTLAB_INIT_CUSTOM = 2 } smtlab_init;

typedef struct smtlab_solver_options {
  double damping;
  int max_iterations;
  double el_tolerance;
  smtlab_init init;
  double moser_l;     /* <= 0: automatic */
  double moser_delta; /* <= 0: automatic */
  int best_of_restarts;
} smtlab_solver_options;

SMTLAB_API void smtlab_solver_options_default(smtlab_solver_options* o);

typedef struct smtlab_extremal_info {
  double beta, eps, alpha, J, c_eps, x_eps_x, x_eps_y, lambda_eps, mean_f, r_eps, t_eps, lambda_over_c2;
  double el_residual, energy, mean;
  int iterations;
  int converged;
} smtlab_extremal_info;

/* initial may be null unless init is PREVIOUS or CUSTOM. */
SMTLAB_API smtlab_status smtlab_maximize(const smtlab_space* s, double beta, double eps,
                                         const smtlab_solver_options* opts, const smtlab_field* initial,
                                         smtlab_extremal** out);
SMTLAB_API void smtlab_extremal_free(smtlab_extremal* r);
SMTLAB_API smtlab_status smtlab_extremal_get_info(const smtlab_extremal* r, smtlab_extremal_info* out);
SMTLAB_API smtlab_status smtlab_extremal_field(const smtlab_extremal* r, smtlab_field** out);
SMTLAB_API smtlab_status smtlab_extremal_json(const smtlab_extremal* r, const char* field_csv_path, char** out);
SMTLAB_API smtlab_status smtlab_extremal_sweep_csv(const smtlab_extremal* const* reports, size_t n, char** out);

SMTLAB_API smtlab_status smtlab_el_residual(const smtlab_field* f, double beta, double eps, double* out);
/* fractions[i] = energy of f inside B_radii[i](0). */
SMTLAB_API smtlab_status smtlab_concentration(const smtlab_field* f, const double* radii, size_t n, double* fractions);
SMTLAB_API smtlab_status smtlab_truncation_split(const smtlab_field* f, double gamma, double c, double* e_low,
                                                 double* e_high);

typedef struct smtlab_bubble_comparison {
  double sup_error;
  size_t samples;
  size_t clipped;
  int clipped_warning;
  double center_value;
  double fraction_01;
  int concentrated;
} smtlab_bubble_comparison;

SMTLAB_API smtlab_status smtlab_compare_bubble(const smtlab_extremal* r, double window_R,
                                               smtlab_bubble_comparison* out);
SMTLAB_API smtlab_status smtlab_surplus_check(const smtlab_extremal* r, const smtlab_threshold* t, double* out);

#ifdef __cplusplus
}
#endif

#endif
