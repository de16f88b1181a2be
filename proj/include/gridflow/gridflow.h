#ifndef GRIDFLOW_GRIDFLOW_H
#define GRIDFLOW_GRIDFLOW_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  ifdef GRIDFLOW_BUILDING
#    define GF_API __declspec(dllexport)
#  else
#    define GF_API __declspec(dllimport)
#  endif
#else
#  define GF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. GF_ERR_VALIDATION and GF_ERR_NUMERICAL match the CLI exit codes. */
typedef enum gf_status {
  GF_OK = 0,
  GF_ERR_VALIDATION = 1, /* bad input, bad parameters, missing upstream artifact */
  GF_ERR_NUMERICAL = 2,  /* CFL violation, stagnation, residual or bounds failure */
  GF_ERR_IO = 3,
  GF_ERR_ARGUMENT = 4, /* null handle or pointer */
  GF_ERR_INTERNAL = 5
} gf_status;

typedef struct gf_scenario gf_scenario;
typedef struct gf_network gf_network;
typedef struct gf_line gf_line;

GF_API const char* gf_version(void);
/* Message of the last failed call on this thread; "" when none. */
GF_API const char* gf_last_error(void);
GF_API const char* gf_status_name(gf_status s);

/* ---- scenarios and stages ---- */

GF_API gf_status gf_scenario_load(const char* path, gf_scenario** out);
/* JSON text; relative paths resolve against base_dir (may be NULL). */
GF_API gf_status gf_scenario_parse(const char* json_text, const char* base_dir, gf_scenario** out);
GF_API gf_status gf_scenario_benchmark(gf_scenario** out);
GF_API gf_status gf_scenario_set_output(gf_scenario* s, const char* dir);
GF_API gf_status gf_scenario_set_seed(gf_scenario* s, uint64_t seed);
GF_API gf_status gf_scenario_output(const gf_scenario* s, const char** dir);
GF_API void gf_scenario_free(gf_scenario* s);

/* stage: "generate-grid", "reconstruct", "transform", "simulate", "report", or "run" for all. */
GF_API gf_status gf_run_stage(const gf_scenario* s, const char* stage);

/* ---- networks ---- */

GF_API gf_status gf_network_generate(int rows, int cols, double side_m, double noise_sigma_m, uint64_t seed,
                                     double speed_ms, gf_network** out);
GF_API gf_status gf_network_load(const char* path, gf_network** out);
GF_API gf_status gf_network_save(const gf_network* n, const char* path);
GF_API gf_status gf_network_counts(const gf_network* n, size_t* nodes, size_t* roads);
GF_API void gf_network_free(gf_network* n);

/* ---- one-dimensional lines ---- */

/* Greenshields demand, supply and Godunov interface flux. */
GF_API gf_status gf_demand(double rho, double v_max, double rho_max, double* out);
GF_API gf_status gf_supply(double rho, double v_max, double rho_max, double* out);
GF_API gf_status gf_interface_flux(double rho_l, double v_l, double rhomax_l, double rho_r, double v_r,
                                   double rhomax_r, double* out);

/* n cells of equal width on [xi0, xi1] with a uniform diagram; densities start at 0, ghost outflow. */
GF_API gf_status gf_line_create(size_t n, double xi0, double xi1, double v_max, double rho_max, gf_line** out);
GF_API gf_status gf_line_set_density(gf_line* l, const double* rho, size_t n);
GF_API gf_status gf_line_get_density(const gf_line* l, double* rho, size_t n);
GF_API gf_status gf_line_set_inflow(gf_line* l, double demand);
GF_API gf_status gf_line_set_outflow_ghost(gf_line* l);
GF_API gf_status gf_line_set_outflow_supply(gf_line* l, double supply);
GF_API gf_status gf_line_stable_dt(const gf_line* l, double cfl, double* dt);
GF_API gf_status gf_line_step(gf_line* l, double dt);
GF_API gf_status gf_line_run(gf_line* l, double horizon, double cfl);
/* fluxes of the most recent step, n + 1 values */
GF_API gf_status gf_line_get_fluxes(const gf_line* l, double* flux, size_t n_plus_1);
GF_API gf_status gf_line_mass(const gf_line* l, double* mass);
GF_API gf_status gf_line_time(const gf_line* l, double* t);
GF_API void gf_line_free(gf_line* l);

#ifdef __cplusplus
}
#endif

#endif
