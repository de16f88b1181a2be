#pragma once

#include <optional>
#include <string>
#include <vector>

#include "control.hpp"
#include "diagnostics.hpp"
#include "scenario.hpp"
#include "transform.hpp"

namespace gridflow {

inline constexpr const char* kToolVersion = "0.1.0";

enum class Stage { GenerateGrid, Reconstruct, Transform, Simulate, Report };
inline constexpr Stage kAllStages[] = {Stage::GenerateGrid, Stage::Reconstruct, Stage::Transform, Stage::Simulate,
                                       Stage::Report};

const char* stage_name(Stage s);
std::optional<Stage> parse_stage(const std::string& name);

/// Artifact paths inside one output directory.
struct RunLayout {
  std::string root;

  std::string path(const std::string& rel) const;
  std::string network() const { return path("network.json"); }
  std::string theta() const { return path("fields/theta.txt"); }
  std::string rho_max() const { return path("fields/rho_max.txt"); }
  std::string v_max() const { return path("fields/v_max.txt"); }
  std::string alpha() const { return path("transform/alpha.txt"); }
  std::string beta() const { return path("transform/beta.txt"); }
  std::string atlas() const { return path("transform/atlas.txt"); }
  std::string chart_check() const { return path("transform/chart_check.json"); }
  std::string control_plan() const { return path("control_plan.txt"); }
  std::string timeseries_dir() const { return path("timeseries"); }
  std::string timeseries_index() const { return path("timeseries/index.txt"); }
  std::string line_series(std::size_t k) const;
  std::string convergence() const { return path("report/convergence.csv"); }
  std::string convergence_per_eta() const { return path("report/convergence_per_eta.csv"); }
  std::string decay() const { return path("report/decay.csv"); }
  std::string summary() const { return path("report/summary.json"); }
  std::string manifest() const { return path("manifest.json"); }
};

struct TransformResult {
  ScalingFields scaling;
  CurvilinearAtlas atlas;
  TransportResidual transport;
  IntegrabilityResidual chart;
};

/// One 1D problem ready to run, plus its desired state.
struct PreparedLine {
  LineState state;
  ControlEntry entry;
};

/// Resamples every atlas path and applies the initial, inflow and outflow specs.
std::vector<PreparedLine> build_lines(const CurvilinearAtlas& atlas, const SimulationSpec& spec,
                                      std::vector<std::string>* warnings = nullptr);

/// Runs one line and records rho and interface fluxes at every report time.
LineSeries simulate_line(PreparedLine& line, const SimulationSpec& spec);

std::string serialize_line_series(const LineSeries& s, const PreparedLine& line, std::size_t index);
struct StoredLine {
  LineSeries series;
  double inflow = 0.0;
  OutflowMode outflow = OutflowMode::Controlled;
  double u = 0.0;
};
StoredLine parse_line_series(const std::string& text, const std::string& source_name);

struct SimulationResult {
  ControlPlan plan;
  std::size_t lines = 0;
};

struct RunSummary {
  std::size_t lines = 0;
  OutflowMode outflow = OutflowMode::Controlled;
  double l2_initial = 0.0;
  double l2_final = 0.0;
  double l2_ratio = 0.0;
  /// L2 is nonincreasing (1e-6 relative slack) once it first drops below 10% of the start.
  bool l2_tail_monotone = false;
  double max_outflow_deviation = 0.0;  // max over lines of |F_out - u| / u at the final time
  double max_flux_spread = 0.0;        // max over lines of (max F - min F) / max F at the final time
  std::size_t lyapunov_decreasing = 0;
};

struct ReportResult {
  ConvergenceReport report;
  ControlPlan plan;
  std::vector<StoredLine> lines;
  RunSummary summary;
};

RunSummary summarize(const ConvergenceReport& r, const std::vector<StoredLine>& lines);

/// Stage functions read upstream artifacts from the output directory and
/// write their own. They throw Error subclasses prefixed with the stage name.
RoadNetwork stage_generate_grid(const Scenario& s);
ContinuumFields stage_reconstruct(const Scenario& s);
TransformResult stage_transform(const Scenario& s);
SimulationResult stage_simulate(const Scenario& s);
ReportResult stage_report(const Scenario& s);

/// Runs one stage and records it in manifest.json (also on failure, marking
/// the run incomplete). Rethrows the stage error.
void run_stage(const Scenario& s, Stage stage);
/// All stages in order.
void run_pipeline(const Scenario& s);

std::string sha256_hex(const std::string& bytes);

}  // namespace gridflow
