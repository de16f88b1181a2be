// gridflow command line: thin shell over the C API.
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "gridflow/gridflow.h"

namespace {

int exit_code(gf_status s) {
  switch (s) {
    case GF_OK: return 0;
    case GF_ERR_VALIDATION:
    case GF_ERR_IO:
    case GF_ERR_ARGUMENT: return 1;
    default: return 2;
  }
}

int report_failure(gf_status s) {
  std::fprintf(stderr, "gridflow: %s: %s\n", gf_status_name(s), gf_last_error());
  return exit_code(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gridflow: continuum boundary control of urban traffic networks"};
  app.set_version_flag("--version", gf_version());
  app.require_subcommand(1);

  std::string scenario_path, out_dir;
  long long seed = -1;
  const char* stages[][2] = {
      {"generate-grid", "generate or load the road network"},
      {"reconstruct", "reconstruct theta, rho_max and v_max rasters from the network"},
      {"transform", "solve the scaling fields and trace the curvilinear atlas"},
      {"simulate", "build the control plan and run every line"},
      {"report", "recompute convergence diagnostics from the stored time series"},
      {"run", "all stages in order"},
  };
  for (auto& st : stages) {
    auto* sub = app.add_subcommand(st[0], st[1]);
    sub->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides the scenario)");
    sub->add_option("--seed", seed, "random seed (overrides the scenario)")->check(CLI::NonNegativeNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  const std::string stage = app.get_subcommands().front()->get_name();
  gf_scenario* sc = nullptr;
  gf_status s = gf_scenario_load(scenario_path.c_str(), &sc);
  if (s != GF_OK) return report_failure(s);
  if (!out_dir.empty() && (s = gf_scenario_set_output(sc, out_dir.c_str())) != GF_OK) {
    gf_scenario_free(sc);
    return report_failure(s);
  }
  if (seed >= 0) gf_scenario_set_seed(sc, static_cast<uint64_t>(seed));

  s = gf_run_stage(sc, stage.c_str());
  const char* dir = "";
  gf_scenario_output(sc, &dir);
  if (s == GF_OK) std::printf("%s: ok (%s)\n", stage.c_str(), dir);
  gf_scenario_free(sc);
  return s == GF_OK ? 0 : report_failure(s);
}
