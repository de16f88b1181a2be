#include "gridflow/gridflow.h"

#include <new>
#include <string>

#include "godunov.hpp"
#include "network.hpp"
#include "pipeline.hpp"
#include "scenario.hpp"

struct gf_scenario {
  gridflow::Scenario s;
};
struct gf_network {
  gridflow::RoadNetwork net;
};
struct gf_line {
  gridflow::LineState state;
};

namespace {

thread_local std::string last_error;

gf_status fail(gf_status code, const std::string& msg) {
  last_error = msg;
  return code;
}

template <typename Fn>
gf_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return GF_OK;
  } catch (const gridflow::Error& e) {
    switch (e.kind()) {
      case gridflow::ErrorKind::Validation: return fail(GF_ERR_VALIDATION, e.what());
      case gridflow::ErrorKind::Numerical: return fail(GF_ERR_NUMERICAL, e.what());
      case gridflow::ErrorKind::Io: return fail(GF_ERR_IO, e.what());
    }
    return fail(GF_ERR_INTERNAL, e.what());
  } catch (const std::bad_alloc&) {
    return fail(GF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(GF_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(GF_ERR_INTERNAL, "unknown error");
  }
}

#define GF_REQUIRE(p) \
  if (!(p)) return fail(GF_ERR_ARGUMENT, "null argument: " #p)

}  // namespace

extern "C" {

const char* gf_version(void) { return gridflow::kToolVersion; }
const char* gf_last_error(void) { return last_error.c_str(); }

const char* gf_status_name(gf_status s) {
  switch (s) {
    case GF_OK: return "ok";
    case GF_ERR_VALIDATION: return "validation error";
    case GF_ERR_NUMERICAL: return "numerical failure";
    case GF_ERR_IO: return "i/o error";
    case GF_ERR_ARGUMENT: return "invalid argument";
    case GF_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

gf_status gf_scenario_load(const char* path, gf_scenario** out) {
  GF_REQUIRE(path);
  GF_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new gf_scenario{gridflow::load_scenario(path)}; });
}

gf_status gf_scenario_parse(const char* json_text, const char* base_dir, gf_scenario** out) {
  GF_REQUIRE(json_text);
  GF_REQUIRE(out);
  *out = nullptr;
  return guarded(
      [&] { *out = new gf_scenario{gridflow::parse_scenario(json_text, "<scenario>", base_dir ? base_dir : "")}; });
}

gf_status gf_scenario_benchmark(gf_scenario** out) {
  GF_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new gf_scenario{gridflow::benchmark_scenario()}; });
}

gf_status gf_scenario_set_output(gf_scenario* s, const char* dir) {
  GF_REQUIRE(s);
  GF_REQUIRE(dir);
  return guarded([&] {
    if (!*dir) throw gridflow::ValidationError("output directory must not be empty");
    s->s.output_dir = dir;
  });
}

gf_status gf_scenario_set_seed(gf_scenario* s, uint64_t seed) {
  GF_REQUIRE(s);
  s->s.seed = seed;
  last_error.clear();
  return GF_OK;
}

gf_status gf_scenario_output(const gf_scenario* s, const char** dir) {
  GF_REQUIRE(s);
  GF_REQUIRE(dir);
  *dir = s->s.output_dir.c_str();
  return GF_OK;
}

void gf_scenario_free(gf_scenario* s) { delete s; }

gf_status gf_run_stage(const gf_scenario* s, const char* stage) {
  GF_REQUIRE(s);
  GF_REQUIRE(stage);
  return guarded([&] {
    const std::string name = stage;
    if (name == "run") {
      gridflow::run_pipeline(s->s);
      return;
    }
    const auto st = gridflow::parse_stage(name);
    if (!st) throw gridflow::ValidationError("unknown stage '" + name + "'");
    gridflow::run_stage(s->s, *st);
  });
}

gf_status gf_network_generate(int rows, int cols, double side_m, double noise_sigma_m, uint64_t seed,
                              double speed_ms, gf_network** out) {
  GF_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    gridflow::ManhattanOptions o;
    o.rows = rows;
    o.cols = cols;
    o.side = side_m;
    o.noise_sigma = noise_sigma_m;
    o.seed = seed;
    o.default_speed = speed_ms;
    *out = new gf_network{gridflow::generate_manhattan_grid(o)};
  });
}

gf_status gf_network_load(const char* path, gf_network** out) {
  GF_REQUIRE(path);
  GF_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new gf_network{gridflow::load_network(path)}; });
}

gf_status gf_network_save(const gf_network* n, const char* path) {
  GF_REQUIRE(n);
  GF_REQUIRE(path);
  return guarded([&] { gridflow::save_network(n->net, path); });
}

gf_status gf_network_counts(const gf_network* n, size_t* nodes, size_t* roads) {
  GF_REQUIRE(n);
  if (nodes) *nodes = n->net.nodes.size();
  if (roads) *roads = n->net.roads.size();
  return GF_OK;
}

void gf_network_free(gf_network* n) { delete n; }

gf_status gf_demand(double rho, double v_max, double rho_max, double* out) {
  GF_REQUIRE(out);
  return guarded([&] {
    const gridflow::FdParams fd{v_max, rho_max};
    gridflow::validate(fd);
    *out = gridflow::demand(rho, fd);
  });
}

gf_status gf_supply(double rho, double v_max, double rho_max, double* out) {
  GF_REQUIRE(out);
  return guarded([&] {
    const gridflow::FdParams fd{v_max, rho_max};
    gridflow::validate(fd);
    *out = gridflow::supply(rho, fd);
  });
}

gf_status gf_interface_flux(double rho_l, double v_l, double rhomax_l, double rho_r, double v_r, double rhomax_r,
                            double* out) {
  GF_REQUIRE(out);
  return guarded([&] {
    const gridflow::FdParams l{v_l, rhomax_l}, r{v_r, rhomax_r};
    gridflow::validate(l);
    gridflow::validate(r);
    *out = gridflow::interface_flux(rho_l, l, rho_r, r);
  });
}

gf_status gf_line_create(size_t n, double xi0, double xi1, double v_max, double rho_max, gf_line** out) {
  GF_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    if (n == 0) throw gridflow::ValidationError("a line needs at least one cell");
    if (!(xi1 > xi0)) throw gridflow::ValidationError("line extent must be positive");
    const gridflow::FdParams fd{v_max, rho_max};
    gridflow::validate(fd);
    auto* l = new gf_line;
    const double dxi = (xi1 - xi0) / static_cast<double>(n);
    l->state.cells.resize(n);
    for (size_t i = 0; i < n; ++i) l->state.cells[i] = {xi0 + (static_cast<double>(i) + 0.5) * dxi, dxi, fd, 0.0};
    *out = l;
  });
}

gf_status gf_line_set_density(gf_line* l, const double* rho, size_t n) {
  GF_REQUIRE(l);
  GF_REQUIRE(rho);
  return guarded([&] {
    if (n != l->state.cells.size()) throw gridflow::ValidationError("density array has the wrong length");
    auto next = l->state;
    for (size_t i = 0; i < n; ++i) {
      if (!(rho[i] >= 0.0 && rho[i] <= next.cells[i].fd.rho_max))
        throw gridflow::ValidationError("density " + std::to_string(rho[i]) + " of cell " + std::to_string(i) +
                                        " lies outside [0, rho_max]");
      next.cells[i].rho = rho[i];
    }
    gridflow::validate(next);
    next.ghost_flux.reset();
    l->state = std::move(next);
  });
}

gf_status gf_line_get_density(const gf_line* l, double* rho, size_t n) {
  GF_REQUIRE(l);
  GF_REQUIRE(rho);
  if (n != l->state.cells.size()) return fail(GF_ERR_VALIDATION, "density array has the wrong length");
  for (size_t i = 0; i < n; ++i) rho[i] = l->state.cells[i].rho;
  return GF_OK;
}

gf_status gf_line_set_inflow(gf_line* l, double demand) {
  GF_REQUIRE(l);
  if (!(demand >= 0.0)) return fail(GF_ERR_VALIDATION, "inflow demand must be non-negative");
  l->state.inflow_demand = demand;
  return GF_OK;
}

gf_status gf_line_set_outflow_ghost(gf_line* l) {
  GF_REQUIRE(l);
  l->state.outflow = gridflow::GhostCell{};
  l->state.ghost_flux.reset();
  return GF_OK;
}

gf_status gf_line_set_outflow_supply(gf_line* l, double supply) {
  GF_REQUIRE(l);
  if (!(supply >= 0.0)) return fail(GF_ERR_VALIDATION, "outflow supply must be non-negative");
  l->state.outflow = gridflow::SuppliedControl{supply};
  l->state.ghost_flux.reset();
  return GF_OK;
}

gf_status gf_line_stable_dt(const gf_line* l, double cfl, double* dt) {
  GF_REQUIRE(l);
  GF_REQUIRE(dt);
  return guarded([&] { *dt = gridflow::cfl_time_step(l->state, cfl); });
}

gf_status gf_line_step(gf_line* l, double dt) {
  GF_REQUIRE(l);
  return guarded([&] { l->state = gridflow::step(l->state, dt); });
}

gf_status gf_line_run(gf_line* l, double horizon, double cfl) {
  GF_REQUIRE(l);
  return guarded([&] {
    gridflow::RunOptions o;
    o.cfl = cfl;
    l->state = gridflow::run(l->state, horizon, o);
  });
}

gf_status gf_line_get_fluxes(const gf_line* l, double* flux, size_t n_plus_1) {
  GF_REQUIRE(l);
  GF_REQUIRE(flux);
  return guarded([&] {
    if (n_plus_1 != l->state.cells.size() + 1) throw gridflow::ValidationError("flux array has the wrong length");
    const auto f = l->state.fluxes.empty() ? gridflow::compute_fluxes(l->state) : l->state.fluxes;
    for (size_t i = 0; i < n_plus_1; ++i) flux[i] = f[i];
  });
}

gf_status gf_line_mass(const gf_line* l, double* mass) {
  GF_REQUIRE(l);
  GF_REQUIRE(mass);
  *mass = gridflow::total_mass(l->state);
  return GF_OK;
}

gf_status gf_line_time(const gf_line* l, double* t) {
  GF_REQUIRE(l);
  GF_REQUIRE(t);
  *t = l->state.time;
  return GF_OK;
}

void gf_line_free(gf_line* l) { delete l; }

}  // extern "C"
