#ifndef ROA_ROA_H
#define ROA_ROA_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define ROA_API __declspec(dllexport)
#else
#define ROA_API __attribute__((visibility("default")))
#endif

/* Status codes. Every call that can fail returns one; the message of the
   most recent failure on the calling thread is available from roa_last_error. */
typedef enum roa_status {
  ROA_OK = 0,
  ROA_E_SCHEMA = 1,
  ROA_E_DOMAIN = 2,
  ROA_E_NOT_FOUND = 3,
  ROA_E_FOLD_SUSPECTED = 4,
  ROA_E_PRECONDITION = 5,
  ROA_E_INTEGRATION = 6,
  ROA_E_EVENT_LOCALIZATION = 7,
  ROA_E_NO_SEP = 8,
  ROA_E_DEGENERATE_START = 9,
  ROA_E_PARITY = 10,
  ROA_E_BRACKET = 11,
  ROA_E_INCONSISTENT_POLICY = 12,
  ROA_E_INVALID_ARGUMENT = 13,
  ROA_E_INTERNAL = 14
} roa_status;

ROA_API const char* roa_version(void);
ROA_API const char* roa_status_name(roa_status status);
ROA_API const char* roa_last_error(void);

/* ---- systems ---------------------------------------------------------- */

typedef struct roa_system roa_system;
typedef struct roa_params roa_params;

ROA_API size_t roa_system_catalog_size(void);
ROA_API const char* roa_system_catalog_id(size_t index);

ROA_API roa_status roa_system_create(const char* id, roa_system** out);
ROA_API void roa_system_destroy(roa_system* system);
ROA_API const char* roa_system_id(const roa_system* system);
ROA_API size_t roa_system_dim(const roa_system* system);
ROA_API size_t roa_system_param_count(const roa_system* system);
/* Returns 1 and fills index/period when one coordinate is an angle. */
ROA_API int roa_system_angle(const roa_system* system, size_t* index, double* period);
ROA_API roa_status roa_system_param_info(const roa_system* system, size_t index,
                                         const char** name, double* default_value,
                                         double* lo, double* hi);

/* Parameter point at the schema defaults. */
ROA_API roa_status roa_params_create(const roa_system* system, roa_params** out);
ROA_API roa_status roa_params_copy(const roa_params* params, roa_params** out);
ROA_API void roa_params_destroy(roa_params* params);
ROA_API roa_status roa_params_set(roa_params* params, const char* name, double value);
/* "name=value" */
ROA_API roa_status roa_params_assign(roa_params* params, const char* assignment);
ROA_API roa_status roa_params_get(const roa_params* params, const char* name, double* out);
ROA_API size_t roa_params_count(const roa_params* params);
ROA_API const char* roa_params_name(const roa_params* params, size_t index);
ROA_API double roa_params_value(const roa_params* params, size_t index);
ROA_API roa_status roa_params_validate(const roa_system* system, const roa_params* params);

ROA_API roa_status roa_field(const roa_system* system, const roa_params* params,
                             const double* x, double* out);
/* Row-major dim x dim. */
ROA_API roa_status roa_jacobian(const roa_system* system, const roa_params* params,
                                const double* x, double* out);
ROA_API roa_status roa_jacobian_fd(const roa_system* system, const roa_params* params,
                                   const double* x, double* out);

/* ---- integration ------------------------------------------------------ */

typedef struct roa_trajectory roa_trajectory;

ROA_API roa_status roa_flow(const roa_system* system, const roa_params* params,
                            const double* x0, double t0, double t1, double rtol,
                            double atol, roa_trajectory** out);
ROA_API void roa_trajectory_destroy(roa_trajectory* traj);
ROA_API double roa_trajectory_t_end(const roa_trajectory* traj);
/* "completed", "stopped", "diverged" or "failed" */
ROA_API const char* roa_trajectory_status(const roa_trajectory* traj);
ROA_API roa_status roa_trajectory_eval(const roa_trajectory* traj, double t, double* out);
ROA_API void roa_trajectory_final(const roa_trajectory* traj, double* out);
ROA_API size_t roa_trajectory_steps(const roa_trajectory* traj, size_t* rejected);
ROA_API roa_status roa_trajectory_write_csv(const roa_trajectory* traj, const char* path,
                                            double stride);

/* Pendulum disturbance initial condition (fault flow from the SEP for c4). */
ROA_API roa_status roa_disturbance_ic(const roa_params* params, double* out);
ROA_API roa_status roa_disturbance_ic_closed_form(const roa_params* params, double* out);

/* ---- equilibria ------------------------------------------------------- */

typedef struct roa_equilibrium roa_equilibrium;
typedef struct roa_branch roa_branch;

ROA_API roa_status roa_equilibrium_find(const roa_system* system, const roa_params* params,
                                        const double* guess, double newton_tol,
                                        roa_equilibrium** out);
ROA_API void roa_equilibrium_destroy(roa_equilibrium* eq);
ROA_API void roa_equilibrium_state(const roa_equilibrium* eq, double* out);
ROA_API double roa_equilibrium_residual(const roa_equilibrium* eq);
ROA_API size_t roa_equilibrium_eigen_count(const roa_equilibrium* eq);
ROA_API void roa_equilibrium_eigenvalue(const roa_equilibrium* eq, size_t index, double* re,
                                        double* im);
/* "StableHyperbolic", "Saddle(k)" or "NonHyperbolic" */
ROA_API const char* roa_equilibrium_classification(const roa_equilibrium* eq);
ROA_API int roa_equilibrium_unstable_dim(const roa_equilibrium* eq);

ROA_API roa_status roa_branch_continue(const roa_system* system, const roa_equilibrium* start,
                                       const char* p_name, double p_lo, double p_hi,
                                       double step, roa_branch** out);
ROA_API void roa_branch_destroy(roa_branch* branch);
ROA_API size_t roa_branch_size(const roa_branch* branch);
ROA_API const roa_equilibrium* roa_branch_point(const roa_branch* branch, size_t index);
ROA_API double roa_branch_param(const roa_branch* branch, size_t index);
ROA_API int roa_branch_has_fold(const roa_branch* branch);
ROA_API void roa_branch_fold(const roa_branch* branch, double* p_fold, double* min_abs_real,
                             double* x_fold);
ROA_API int roa_branch_incomplete(const roa_branch* branch);
ROA_API const char* roa_branch_note(const roa_branch* branch);

/* ---- membership and boundaries ---------------------------------------- */

typedef struct roa_membership_policy {
  double delta;
  double t_max;
  double r_escape;
  double check_horizon;
  double rtol;
  double atol;
} roa_membership_policy;

ROA_API roa_membership_policy roa_membership_policy_default(void);

typedef enum roa_verdict {
  ROA_RECOVERED = 0,
  ROA_ESCAPED = 1,
  ROA_UNRESOLVED = 2
} roa_verdict;

ROA_API const char* roa_verdict_name(roa_verdict verdict);

/* final_state may be NULL. */
ROA_API roa_status roa_classify_point(const roa_system* system, const roa_params* params,
                                      const double* x, const double* sep,
                                      const roa_membership_policy* policy,
                                      roa_verdict* verdict, double* t, double* final_state);

typedef struct roa_boundary roa_boundary;

ROA_API roa_status roa_boundary_trace_2d(const roa_system* system, const roa_equilibrium* saddle,
                                         const roa_params* params, double eps,
                                         const double* window_lo, const double* window_hi,
                                         double stride, double arclength_budget,
                                         roa_boundary** out);
ROA_API roa_status roa_boundary_1d(const roa_system* system, const roa_equilibrium* sep,
                                   const roa_params* params, double window_lo, double window_hi,
                                   double tol, const roa_membership_policy* policy,
                                   roa_boundary** out);
ROA_API void roa_boundary_destroy(roa_boundary* boundary);
ROA_API size_t roa_boundary_dim(const roa_boundary* boundary);
ROA_API size_t roa_boundary_size(const roa_boundary* boundary);
ROA_API void roa_boundary_point(const roa_boundary* boundary, size_t index, double* out);
/* Signed arclength from the saddle; NaN for 1-D boundaries. */
ROA_API double roa_boundary_arclength(const roa_boundary* boundary, size_t index);
ROA_API int roa_boundary_partial(const roa_boundary* boundary);
ROA_API const char* roa_boundary_note(const roa_boundary* boundary);

/* ---- time in a neighborhood ------------------------------------------- */

typedef struct roa_tau_policy {
  double delta;
  double t_max;
  double saddle_capture;
  double margin_tol;
  double r_escape;
  double rtol;
  double atol;
} roa_tau_policy;

ROA_API roa_tau_policy roa_tau_policy_default(void);

typedef struct roa_tau_result roa_tau_result;

/* saddles: n_saddles states, concatenated. */
ROA_API roa_status roa_tau(const roa_system* system, const roa_params* params, const double* y,
                           const double* center, double radius, const double* sep,
                           const double* saddles, size_t n_saddles,
                           const roa_tau_policy* policy, roa_tau_result** out);
ROA_API void roa_tau_destroy(roa_tau_result* result);
/* +inf when the orbit never leaves the ball. */
ROA_API double roa_tau_total(const roa_tau_result* result);
ROA_API int roa_tau_diverged(const roa_tau_result* result);
ROA_API int roa_tau_recovered(const roa_tau_result* result);
ROA_API int roa_tau_truncated(const roa_tau_result* result);
ROA_API int roa_tau_no_sep(const roa_tau_result* result);
ROA_API int roa_tau_transversality_warning(const roa_tau_result* result);
ROA_API double roa_tau_min_margin(const roa_tau_result* result);
ROA_API double roa_tau_min_saddle_distance(const roa_tau_result* result);
ROA_API double roa_tau_t_stop(const roa_tau_result* result);
ROA_API const char* roa_tau_stop_reason(const roa_tau_result* result);
ROA_API size_t roa_tau_interval_count(const roa_tau_result* result);
ROA_API void roa_tau_interval(const roa_tau_result* result, size_t index, double* t_in,
                              double* t_out);
ROA_API size_t roa_tau_crossing_count(const roa_tau_result* result);
ROA_API void roa_tau_crossing(const roa_tau_result* result, size_t index, double* t,
                              int* direction, double* margin);

/* ---- recovery ---------------------------------------------------------- */

typedef struct roa_scenario roa_scenario;

/* Pendulum with the disturbance initial condition. free[i] ranges over
   [box_lo[i], box_hi[i]]. */
ROA_API roa_status roa_scenario_fault(const roa_params* base, size_t n_free,
                                      const char* const* free, const double* box_lo,
                                      const double* box_hi, roa_scenario** out);
ROA_API void roa_scenario_destroy(roa_scenario* scenario);
ROA_API void roa_scenario_set_policy(roa_scenario* scenario,
                                     const roa_membership_policy* policy);
ROA_API size_t roa_scenario_dim(const roa_scenario* scenario);
ROA_API const char* roa_scenario_free_name(const roa_scenario* scenario, size_t index);
/* Parameter point with the free coordinates set to q. */
ROA_API roa_status roa_scenario_at(const roa_scenario* scenario, const double* q,
                                   roa_params** out);

/* y and sep may be NULL; they are left untouched when no SEP exists. */
ROA_API roa_status roa_classify_param(const roa_scenario* scenario, const roa_params* params,
                                      roa_verdict* verdict, int* no_sep, double* y,
                                      double* sep);
ROA_API roa_status roa_scenario_sep(const roa_scenario* scenario, const roa_params* params,
                                    roa_equilibrium** out);
/* First continued saddle. */
ROA_API roa_status roa_scenario_saddle(const roa_scenario* scenario, const roa_params* params,
                                       roa_equilibrium** out);
ROA_API roa_status roa_controlling_element(const roa_scenario* scenario,
                                           const roa_params* params, size_t* index, double* x,
                                           double* min_distance);

typedef struct roa_bisect_result roa_bisect_result;

ROA_API roa_status roa_bisect(const roa_scenario* scenario, const roa_params* p_a,
                              const roa_params* p_b, double tol, roa_bisect_result** out);
ROA_API void roa_bisect_destroy(roa_bisect_result* result);
/* Full parameter vectors in schema order. */
ROA_API void roa_bisect_p_star(const roa_bisect_result* result, double* out);
ROA_API void roa_bisect_bracket(const roa_bisect_result* result, double* lo, double* hi);
ROA_API double roa_bisect_width(const roa_bisect_result* result);
ROA_API int roa_bisect_iterations(const roa_bisect_result* result);
ROA_API int roa_bisect_unresolved_seen(const roa_bisect_result* result);
ROA_API size_t roa_bisect_warning_count(const roa_bisect_result* result);
ROA_API const char* roa_bisect_warning(const roa_bisect_result* result, size_t index);

ROA_API roa_status roa_tau_at(const roa_scenario* scenario, const roa_params* params,
                              const double* center, double radius,
                              const roa_tau_policy* policy, roa_tau_result** out);

typedef struct roa_threshold_result roa_threshold_result;

ROA_API roa_status roa_threshold_search(const roa_scenario* scenario,
                                        const roa_params* p_start, const roa_params* p_end,
                                        const double* center, double radius,
                                        double threshold, double initial_ds, double s_tol,
                                        const roa_tau_policy* policy,
                                        roa_threshold_result** out);
ROA_API void roa_threshold_destroy(roa_threshold_result* result);
/* "threshold-reached", "diverged" or "resolution-limited" */
ROA_API const char* roa_threshold_status(const roa_threshold_result* result);
ROA_API double roa_threshold_s(const roa_threshold_result* result);
ROA_API void roa_threshold_p(const roa_threshold_result* result, double* out);
ROA_API double roa_threshold_tau(const roa_threshold_result* result);
ROA_API double roa_threshold_max_tau(const roa_threshold_result* result);
ROA_API int roa_threshold_evaluations(const roa_threshold_result* result);
ROA_API size_t roa_threshold_warning_count(const roa_threshold_result* result);
ROA_API const char* roa_threshold_warning(const roa_threshold_result* result, size_t index);

typedef struct roa_recovery roa_recovery;

/* directions: n_dirs vectors of scenario dimension, concatenated. */
ROA_API roa_status roa_recover(const roa_scenario* scenario, const double* p0,
                               const double* directions, size_t n_dirs, double tol,
                               size_t workers, roa_recovery** out);
ROA_API void roa_recovery_destroy(roa_recovery* recovery);
ROA_API size_t roa_recovery_ray_count(const roa_recovery* recovery);
ROA_API int roa_recovery_ray_hit(const roa_recovery* recovery, size_t index);
/* direction and p_star have scenario dimension; p_star is untouched on a miss. */
ROA_API void roa_recovery_ray(const roa_recovery* recovery, size_t index, double* direction,
                              double* p_star, double* distance, double* bracket,
                              double* edge_distance, int* straddle_ok, int* unresolved_seen);
/* Index of the nearest hit, or -1. */
ROA_API long roa_recovery_nearest(const roa_recovery* recovery);

/* ---- set distances ----------------------------------------------------- */

typedef struct roa_cloud roa_cloud;

ROA_API roa_status roa_cloud_create(size_t dim, int includes_infinity, roa_cloud** out);
ROA_API void roa_cloud_destroy(roa_cloud* cloud);
ROA_API roa_status roa_cloud_add(roa_cloud* cloud, const double* point);
ROA_API roa_status roa_cloud_add_boundary(roa_cloud* cloud, const roa_boundary* boundary);
ROA_API void roa_cloud_set_infinity(roa_cloud* cloud, int includes_infinity);
ROA_API size_t roa_cloud_size(const roa_cloud* cloud);

ROA_API roa_status roa_hausdorff(const roa_cloud* x, const roa_cloud* y, double* out);
ROA_API roa_status roa_chabauty_distance(const roa_cloud* x, const roa_cloud* y, double* out);
/* out has dim + 1 entries; x == NULL embeds the point at infinity. */
ROA_API void roa_chabauty_embed(const double* x, size_t dim, double* out);

typedef enum roa_metric { ROA_METRIC_HAUSDORFF = 0, ROA_METRIC_CHABAUTY = 1 } roa_metric;

/* Fills `out` (an empty cloud of the right dimension) for parameter point p.
   May be called concurrently from several threads. */
typedef roa_status (*roa_cloud_sampler)(const roa_params* p, roa_cloud* out, void* user);

typedef struct roa_metric_report roa_metric_report;

ROA_API roa_status roa_continuity_sweep(roa_cloud_sampler sampler, void* user, size_t dim,
                                        const roa_params* p0, const roa_params* const* grid,
                                        size_t n_grid, roa_metric metric, size_t workers,
                                        roa_metric_report** out);
ROA_API void roa_metric_report_destroy(roa_metric_report* report);
ROA_API size_t roa_metric_report_rows(const roa_metric_report* report);
ROA_API size_t roa_metric_report_ref_size(const roa_metric_report* report);
/* values: full parameter vector in schema order. */
ROA_API void roa_metric_report_row(const roa_metric_report* report, size_t index,
                                   double* values, double* offset, double* distance,
                                   size_t* n_x, size_t* n_y, int* ok);
ROA_API const char* roa_metric_report_error(const roa_metric_report* report, size_t index);
ROA_API roa_status roa_metric_report_write_csv(const roa_metric_report* report,
                                               const char* path);

#ifdef __cplusplus
}
#endif

#endif
