/* kgeo — geodesics in the space of Kahler potentials via degenerate
 * Monge-Ampere power series.
 *
 * C interface to the solver library: opaque handles, integer status codes,
 * thread-local error messages. Every *_create / *_solve function returns a
 * status and writes the new handle through an out-parameter; handles are
 * released with the matching *_destroy (NULL is tolerated).
 */
#ifndef KGEO_H
#define KGEO_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kgeo_status {
  KGEO_OK = 0,
  KGEO_ERR_INVALID_ARGUMENT = 1,
  KGEO_ERR_POSITIVITY = 2,
  KGEO_ERR_ALIASING = 3,
  KGEO_ERR_NOT_INVARIANT = 4,
  KGEO_ERR_CONFIG = 5,
  KGEO_ERR_INTERNAL = 6
} kgeo_status;

/* Message describing the last failure on this thread ("" when none). The
 * pointer stays valid until the next failing call on the same thread. */
const char* kgeo_last_error(void);

typedef struct kgeo_surface kgeo_surface;
typedef struct kgeo_field kgeo_field;
typedef struct kgeo_metric kgeo_metric;
typedef struct kgeo_series kgeo_series;
typedef struct kgeo_bidegree kgeo_bidegree;
typedef struct kgeo_path kgeo_path;

/* --- surfaces ------------------------------------------------------------ */

kgeo_status kgeo_surface_create_torus(int resolution, kgeo_surface** out);
kgeo_status kgeo_surface_create_radial_cp1(int resolution, double radial_cutoff,
                                           kgeo_surface** out);
void kgeo_surface_destroy(kgeo_surface* s);
size_t kgeo_surface_node_count(const kgeo_surface* s);

/* --- fields --------------------------------------------------------------- */

kgeo_status kgeo_field_constant(const kgeo_surface* s, double value, kgeo_field** out);
/* Named analytic presets; see the CLI documentation for the list
 * ("constant", "cosine", "cosine_xy" on the torus; "constant", "rotation",
 * "bump" on the radial grid). */
kgeo_status kgeo_field_preset(const kgeo_surface* s, const char* preset, double amplitude,
                              int mode, kgeo_field** out);
kgeo_status kgeo_field_values(const kgeo_field* f, double* buffer, size_t buffer_len);
double kgeo_field_sup_norm(const kgeo_field* f);
void kgeo_field_destroy(kgeo_field* f);

/* --- metrics -------------------------------------------------------------- */

kgeo_status kgeo_metric_default(const kgeo_surface* s, kgeo_metric** out);
kgeo_status kgeo_metric_flat(const kgeo_surface* s, kgeo_metric** out);
kgeo_status kgeo_metric_fubini_study(const kgeo_surface* s, kgeo_metric** out);
/* KGEO_ERR_POSITIVITY when omega_phi fails to be a metric; *out untouched. */
kgeo_status kgeo_metric_from_potential(const kgeo_metric* base, const kgeo_field* phi,
                                       kgeo_metric** out);
void kgeo_metric_destroy(kgeo_metric* m);

/* integral of f against the metric volume form */
kgeo_status kgeo_integrate(const kgeo_field* f, const kgeo_metric* m, double* out);

/* --- initial-value series -------------------------------------------------- */

kgeo_status kgeo_series_solve(const kgeo_metric* base, const kgeo_field* psi0, int order,
                              kgeo_series** out);
int kgeo_series_order(const kgeo_series* s);
kgeo_status kgeo_series_theta(const kgeo_series* s, int k, kgeo_field** out);
/* deriv: 0 = value, 1 = d/dt, 2 = d^2/dt^2 */
kgeo_status kgeo_series_evaluate(const kgeo_series* s, double t, int deriv, kgeo_field** out);
kgeo_status kgeo_series_hcma_residual(const kgeo_series* s, double t, double* sup_norm);
/* method: 0 = ratio test, 1 = root test; +inf when the tail vanishes */
kgeo_status kgeo_series_radius(const kgeo_series* s, int method, double* out);
/* *found = 0 and *t_fail untouched when positivity holds on [0, t_max] */
kgeo_status kgeo_series_positivity_horizon(const kgeo_series* s, double t_max, int steps,
                                           double* t_fail, int* found);
void kgeo_series_destroy(kgeo_series* s);

/* --- divisor (bidegree) series --------------------------------------------- */

kgeo_status kgeo_bidegree_solve(const kgeo_metric* base, const kgeo_field* h, int order,
                                kgeo_bidegree** out);
/* max sup-norm over the S^a S̄^b coefficients of omega^2 with a+b <= k */
kgeo_status kgeo_bidegree_residual(const kgeo_bidegree* b, int k, double* out);
kgeo_status kgeo_bidegree_equivariance(const kgeo_bidegree* b, int phases, double* out);
kgeo_status kgeo_bidegree_theta(const kgeo_bidegree* b, int i, int j, kgeo_field** re,
                                kgeo_field** im);
/* Ray extraction S = e^{-x}; fails with KGEO_ERR_NOT_INVARIANT on
 * non-invariant series. trust_x_min may be NULL. */
kgeo_status kgeo_bidegree_ray(const kgeo_bidegree* b, double x0, double x1, int samples,
                              kgeo_path** out, double* trust_x_min);
void kgeo_bidegree_destroy(kgeo_bidegree* b);

/* --- paths and ray diagnostics --------------------------------------------- */

kgeo_status kgeo_path_from_series(const kgeo_series* s, kgeo_path** out);
kgeo_status kgeo_path_rotation_ray(const kgeo_surface* cp1, kgeo_path** out);
kgeo_status kgeo_path_energy(const kgeo_path* p, double t, double* out);
kgeo_status kgeo_path_length(const kgeo_path* p, double t0, double t1, double* out);
kgeo_status kgeo_path_geodesic_residual(const kgeo_path* p, double t, double* sup_norm);
kgeo_status kgeo_path_c0(const kgeo_path* p, double t, double* out);
void kgeo_path_destroy(kgeo_path* p);

/* --- scenario runner -------------------------------------------------------- */

/* Execute a scenario from a JSON config text. problem_override may be NULL or
 * one of "ivp", "divisor", "ray", "validate". Writes CSV/JSON outputs under
 * out_dir. *exit_code receives 0 (success), 2 (validation failure) or
 * 3 (config error); *report receives a malloc'd table for stdout, released
 * with kgeo_string_free. */
kgeo_status kgeo_run_scenario(const char* config_json, const char* problem_override,
                              const char* out_dir, uint64_t seed, double tolerance_scale,
                              int* exit_code, char** report);
void kgeo_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* KGEO_H */
