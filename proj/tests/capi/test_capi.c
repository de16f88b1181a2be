/* Plain C client of the shared library. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "gridflow/gridflow.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static void test_diagram(void) {
  double d = -1, s = -1, f = -1;
  EXPECT(gf_demand(0.75, 1.0, 1.0, &d) == GF_OK && d == 0.25);
  EXPECT(gf_supply(0.75, 1.0, 1.0, &s) == GF_OK && fabs(s - 0.1875) < 1e-15);
  EXPECT(gf_interface_flux(0.2, 1.0, 1.0, 0.2, 1.0, 1.0, &f) == GF_OK && fabs(f - 0.16) < 1e-15);
  EXPECT(gf_demand(2.0, 1.0, 1.0, &d) == GF_ERR_NUMERICAL);
  EXPECT(strlen(gf_last_error()) > 0);
  EXPECT(gf_demand(0.5, -1.0, 1.0, &d) == GF_ERR_VALIDATION);
  EXPECT(gf_demand(0.5, 1.0, 1.0, NULL) == GF_ERR_ARGUMENT);
  EXPECT(gf_demand(0.5, 1.0, 1.0, &d) == GF_OK && gf_last_error()[0] == '\0');
  EXPECT(strcmp(gf_status_name(GF_ERR_NUMERICAL), "numerical failure") == 0);
}

static void test_line(void) {
  gf_line* l = NULL;
  double rho[10], flux[11], m0, m1, dt, t;
  size_t i;
  int k;
  EXPECT(gf_line_create(10, 0.0, 1.0, 1.0, 1.0, &l) == GF_OK && l);
  for (i = 0; i < 10; ++i) rho[i] = 0.1 * (double)i;
  EXPECT(gf_line_set_density(l, rho, 10) == GF_OK);
  EXPECT(gf_line_set_density(l, rho, 9) == GF_ERR_VALIDATION);
  rho[3] = 1.5;
  EXPECT(gf_line_set_density(l, rho, 10) == GF_ERR_VALIDATION);
  EXPECT(gf_line_set_inflow(l, 0.2) == GF_OK);
  EXPECT(gf_line_set_outflow_supply(l, 0.1) == GF_OK);
  EXPECT(gf_line_stable_dt(l, 0.9, &dt) == GF_OK && fabs(dt - 0.09) < 1e-15);
  EXPECT(gf_line_mass(l, &m0) == GF_OK);
  for (k = 0; k < 5; ++k) {
    EXPECT(gf_line_step(l, dt) == GF_OK);
    EXPECT(gf_line_get_fluxes(l, flux, 11) == GF_OK);
    EXPECT(gf_line_mass(l, &m1) == GF_OK);
    EXPECT(fabs(m1 - m0 - dt * (flux[0] - flux[10])) < 1e-14);
    m0 = m1;
  }
  EXPECT(gf_line_step(l, 0.2) == GF_ERR_NUMERICAL);
  EXPECT(gf_line_run(l, 1.0, 0.9) == GF_OK);
  EXPECT(gf_line_time(l, &t) == GF_OK && fabs(t - 1.45) < 1e-12);
  EXPECT(gf_line_get_density(l, rho, 10) == GF_OK);
  for (i = 0; i < 10; ++i) EXPECT(rho[i] >= 0.0 && rho[i] <= 1.0);
  EXPECT(gf_line_set_outflow_ghost(l) == GF_OK);
  EXPECT(gf_line_run(l, 1.0, 0.9) == GF_OK);
  gf_line_free(l);
  EXPECT(gf_line_create(0, 0.0, 1.0, 1.0, 1.0, &l) == GF_ERR_VALIDATION && l == NULL);
  EXPECT(gf_line_step(NULL, 0.1) == GF_ERR_ARGUMENT);
}

static void test_network(const char* dir) {
  gf_network *n = NULL, *back = NULL;
  size_t nodes = 0, roads = 0, nodes2 = 0, roads2 = 0;
  char path[1024];
  EXPECT(gf_network_generate(4, 5, 400.0, 5.0, 3, 8.0, &n) == GF_OK);
  EXPECT(gf_network_counts(n, &nodes, &roads) == GF_OK && nodes == 20 && roads > 0);
  snprintf(path, sizeof path, "%s/capi_net.json", dir);
  EXPECT(gf_network_save(n, path) == GF_OK);
  EXPECT(gf_network_load(path, &back) == GF_OK);
  EXPECT(gf_network_counts(back, &nodes2, &roads2) == GF_OK && nodes2 == nodes && roads2 == roads);
  gf_network_free(n);
  gf_network_free(back);
  EXPECT(gf_network_generate(1, 5, 400.0, 5.0, 3, 8.0, &n) == GF_ERR_VALIDATION);
  EXPECT(gf_network_load("/nonexistent/net.json", &n) == GF_ERR_IO);
}

static void test_scenario(const char* dir) {
  gf_scenario* s = NULL;
  const char* out = NULL;
  char sub[1024];
  EXPECT(gf_scenario_parse("{", NULL, &s) == GF_ERR_VALIDATION && s == NULL);
  EXPECT(gf_scenario_parse("{\"format\": \"gridflow-scenario\", \"version\": 1, \"bogus\": 1}", NULL, &s) ==
         GF_ERR_VALIDATION);
  EXPECT(strstr(gf_last_error(), "bogus") != NULL);
  EXPECT(gf_scenario_benchmark(&s) == GF_OK);
  snprintf(sub, sizeof sub, "%s/capi_run", dir);
  EXPECT(gf_scenario_set_output(s, sub) == GF_OK);
  EXPECT(gf_scenario_set_output(s, "") == GF_ERR_VALIDATION);
  EXPECT(gf_scenario_output(s, &out) == GF_OK && strcmp(out, sub) == 0);
  EXPECT(gf_scenario_set_seed(s, 5) == GF_OK);
  EXPECT(gf_run_stage(s, "simulate") == GF_ERR_VALIDATION);
  EXPECT(strstr(gf_last_error(), "transform") != NULL);
  EXPECT(gf_run_stage(s, "bogus") == GF_ERR_VALIDATION);
  EXPECT(gf_run_stage(s, "generate-grid") == GF_OK);
  gf_scenario_free(s);
}

int main(int argc, char** argv) {
  const char* dir = argc > 1 ? argv[1] : ".";
  EXPECT(gf_version() && strlen(gf_version()) > 0);
  test_diagram();
  test_line();
  test_network(dir);
  test_scenario(dir);
  if (failures) {
    fprintf(stderr, "%d failure(s)\n", failures);
    return 1;
  }
  printf("capi: all checks passed\n");
  return 0;
}
