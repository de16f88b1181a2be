#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "fields.hpp"
#include "network.hpp"
#include "transform.hpp"

namespace gridflow {

struct NetworkSource {
  std::optional<ManhattanOptions> generate;  // seed is taken from Scenario::seed
  std::string file;                          // used when generate is empty; absolute after loading
};

enum class InitialCondition { Congested, Empty, Desired, Fraction };
enum class OutflowMode { Controlled, Ghost };

struct SimulationSpec {
  int n_cells = 200;
  InitialCondition initial = InitialCondition::Congested;
  double initial_fraction = 1.0;  // of rho_max, for InitialCondition::Fraction
  std::optional<double> inflow;   // veh/s; empty means the capacity of the first cell
  OutflowMode outflow = OutflowMode::Controlled;
  double epsilon = 1e-5;
  double horizon = 1800.0;  // s
  double cfl = 0.9;
  double report_interval = 60.0;  // s
  double tail_fraction = 0.5;
};

struct Scenario {
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  NetworkSource network;
  double grid_resolution = 10.0;  // meters
  IdwParams idw;
  KernelParams kernel;
  ScalingOptions scaling;
  TraceOptions trace;
  SimulationSpec sim;
};

void validate(const Scenario& s);

/// Relative paths resolve against `base_dir`.
Scenario parse_scenario(const std::string& text, const std::string& source_name, const std::string& base_dir);
Scenario load_scenario(const std::string& path);

/// Canonical document of all effective settings (used for the manifest input hash).
nlohmann::json scenario_to_json(const Scenario& s);

/// 10x10 grid on 1 km^2, fully congested start, maximal inflow, controlled outflow.
Scenario benchmark_scenario();

const char* to_string(InitialCondition c);
const char* to_string(OutflowMode m);

}  // namespace gridflow
