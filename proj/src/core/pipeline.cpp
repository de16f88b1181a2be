#include "pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <sstream>

#include "parallel.hpp"
#include "text_io.hpp"

namespace gridflow {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Artifacts and warnings produced by one stage, for the manifest.
struct StageLog {
  std::vector<std::pair<std::string, std::string>> artifacts;  // relative path, sha256
  std::vector<std::string> warnings;
  std::mutex mutex;
};

thread_local StageLog* active_log = nullptr;

void emit(const RunLayout& layout, const std::string& rel, const std::string& contents, StageLog* log) {
  write_text_file(layout.path(rel), contents);
  if (log) {
    const auto digest = sha256_hex(contents);
    std::lock_guard lock(log->mutex);
    log->artifacts.emplace_back(rel, digest);
  }
}

void warn(StageLog* log, const std::string& w) {
  if (!log) return;
  std::lock_guard lock(log->mutex);
  log->warnings.push_back(w);
}

[[noreturn]] void rethrow_in_stage(const char* stage, const Error& e) {
  const std::string msg = std::string(stage) + ": " + e.what();
  switch (e.kind()) {
    case ErrorKind::Validation: throw ValidationError(msg);
    case ErrorKind::Numerical: throw NumericalError(msg);
    case ErrorKind::Io: throw IoError(msg);
  }
  throw NumericalError(msg);
}

template <typename Fn>
auto in_stage(Stage st, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    rethrow_in_stage(stage_name(st), e);
  }
}

void need(const std::string& path, Stage upstream) {
  if (!fs::exists(path))
    throw ValidationError("missing upstream artifact " + path + "; run '" + std::string(stage_name(upstream)) +
                          "' first");
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string line_file_name(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "line_%04zu.txt", k);
  return buf;
}

}  // namespace

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::GenerateGrid: return "generate-grid";
    case Stage::Reconstruct: return "reconstruct";
    case Stage::Transform: return "transform";
    case Stage::Simulate: return "simulate";
    case Stage::Report: return "report";
  }
  return "?";
}

std::optional<Stage> parse_stage(const std::string& name) {
  for (Stage s : kAllStages)
    if (name == stage_name(s)) return s;
  return std::nullopt;
}

std::string RunLayout::path(const std::string& rel) const { return (fs::path(root) / rel).string(); }
std::string RunLayout::line_series(std::size_t k) const { return path("timeseries/" + line_file_name(k)); }

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw IoError("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

// ---- lines -----------------------------------------------------------------

std::vector<PreparedLine> build_lines(const CurvilinearAtlas& atlas, const SimulationSpec& spec,
                                      std::vector<std::string>* warnings) {
  if (atlas.paths.empty()) throw ValidationError("atlas has no paths");
  std::vector<PreparedLine> lines;
  lines.reserve(atlas.paths.size());
  for (std::size_t k = 0; k < atlas.paths.size(); ++k) {
    const auto& p = atlas.paths[k];
    PreparedLine line;
    auto& st = line.state;
    st.eta = p.eta;
    st.d_eta = atlas.d_eta;
    st.cells = resample_path(p, spec.n_cells);
    line.entry = desired_density_profile(st, spec.epsilon);
    for (std::size_t i = 0; i < st.cells.size(); ++i) {
      auto& c = st.cells[i];
      switch (spec.initial) {
        case InitialCondition::Congested: c.rho = c.fd.rho_max; break;
        case InitialCondition::Empty: c.rho = 0.0; break;
        case InitialCondition::Desired: c.rho = line.entry.rho_d[i]; break;
        case InitialCondition::Fraction: c.rho = spec.initial_fraction * c.fd.rho_max; break;
      }
    }
    st.inflow_demand = spec.inflow ? *spec.inflow : st.cells.front().fd.phi_max();
    if (st.inflow_demand < line.entry.bottleneck.capacity && warnings)
      warnings->push_back("line " + std::to_string(k) + ": inflow demand " + format_double(st.inflow_demand) +
                          " is below the bottleneck capacity " + format_double(line.entry.bottleneck.capacity));
    if (spec.outflow == OutflowMode::Controlled) apply_control(st, line.entry);
    else st.outflow = GhostCell{};
    validate(st);
    lines.push_back(std::move(line));
  }
  return lines;
}

LineSeries simulate_line(PreparedLine& line, const SimulationSpec& spec) {
  LineSeries ls;
  ls.eta = line.state.eta;
  ls.d_eta = line.state.d_eta;
  ls.cells = line.state.cells;
  RunOptions ro;
  ro.cfl = spec.cfl;
  ro.observe_interval = spec.report_interval;
  ro.observer = [&](const LineState& s) {
    ls.times.push_back(s.time);
    std::vector<double> rho;
    rho.reserve(s.cells.size());
    for (const auto& c : s.cells) rho.push_back(c.rho);
    ls.rho.push_back(std::move(rho));
    ls.flux.push_back(s.fluxes.empty() ? compute_fluxes(s) : s.fluxes);
  };
  run_in_place(line.state, spec.horizon, ro);
  return ls;
}

std::string serialize_line_series(const LineSeries& s, const PreparedLine& line, std::size_t index) {
  std::ostringstream out;
  out << "# gridflow timeseries v1\n";
  out << "line " << index << " eta " << format_double(s.eta) << " d_eta " << format_double(s.d_eta) << "\n";
  out << "inflow " << format_double(line.state.inflow_demand) << "\n";
  if (const auto* c = std::get_if<SuppliedControl>(&line.state.outflow))
    out << "outflow controlled " << format_double(c->supply) << "\n";
  else
    out << "outflow ghost\n";
  out << "cells " << s.cells.size() << "\n";
  for (std::size_t i = 0; i < s.cells.size(); ++i) {
    const auto& c = s.cells[i];
    out << "cell " << i << ' ' << format_double(c.xi) << ' ' << format_double(c.dxi) << ' '
        << format_double(c.fd.v_max) << ' ' << format_double(c.fd.rho_max) << "\n";
  }
  out << "samples " << s.times.size() << "\n";
  for (std::size_t k = 0; k < s.times.size(); ++k) {
    out << "t " << format_double(s.times[k]) << "\nrho";
    for (double r : s.rho[k]) out << ' ' << format_double(r);
    out << "\nflux";
    for (double f : s.flux[k]) out << ' ' << format_double(f);
    out << "\n";
  }
  return out.str();
}

StoredLine parse_line_series(const std::string& text, const std::string& source_name) {
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  auto next = [&](const char* expect) {
    for (;;) {
      if (!std::getline(in, raw)) throw ValidationError(source_name + ": unexpected end of file, expected '" +
                                                        expect + "'");
      ++lineno;
      if (raw.empty() || raw[0] == '#') continue;
      auto toks = split_ws(raw);
      if (toks.empty() || toks[0] != expect)
        throw ValidationError(source_name + ":" + std::to_string(lineno) + ": expected '" + expect + "'");
      return toks;
    }
  };
  auto num = [&](const std::string& t) { return parse_double(t, source_name + ":" + std::to_string(lineno)); };
  auto count = [&](const std::string& t) {
    const double v = num(t);
    if (!(v >= 0.0) || v != std::floor(v))
      throw ValidationError(source_name + ":" + std::to_string(lineno) + ": bad count '" + t + "'");
    return static_cast<std::size_t>(v);
  };

  StoredLine out;
  auto& s = out.series;
  auto head = next("line");
  if (head.size() != 6 || head[2] != "eta" || head[4] != "d_eta")
    throw ValidationError(source_name + ":" + std::to_string(lineno) + ": malformed line header");
  s.eta = num(head[3]);
  s.d_eta = num(head[5]);
  auto inflow = next("inflow");
  if (inflow.size() != 2) throw ValidationError(source_name + ":" + std::to_string(lineno) + ": malformed inflow");
  out.inflow = num(inflow[1]);
  auto outflow = next("outflow");
  if (outflow.size() == 3 && outflow[1] == "controlled") {
    out.outflow = OutflowMode::Controlled;
    out.u = num(outflow[2]);
  } else if (outflow.size() == 2 && outflow[1] == "ghost") {
    out.outflow = OutflowMode::Ghost;
  } else {
    throw ValidationError(source_name + ":" + std::to_string(lineno) + ": malformed outflow");
  }
  const auto n = count(next("cells").at(1));
  if (n == 0) throw ValidationError(source_name + ": line has no cells");
  s.cells.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto t = next("cell");
    if (t.size() != 6 || count(t[1]) != i)
      throw ValidationError(source_name + ":" + std::to_string(lineno) + ": malformed cell record");
    s.cells[i].xi = num(t[2]);
    s.cells[i].dxi = num(t[3]);
    s.cells[i].fd = {num(t[4]), num(t[5])};
  }
  const auto m = count(next("samples").at(1));
  for (std::size_t k = 0; k < m; ++k) {
    auto t = next("t");
    if (t.size() != 2) throw ValidationError(source_name + ":" + std::to_string(lineno) + ": malformed time");
    s.times.push_back(num(t[1]));
    auto r = next("rho");
    if (r.size() != n + 1)
      throw ValidationError(source_name + ":" + std::to_string(lineno) + ": expected " + std::to_string(n) +
                            " densities");
    std::vector<double> rho(n);
    for (std::size_t i = 0; i < n; ++i) rho[i] = num(r[i + 1]);
    s.rho.push_back(std::move(rho));
    auto f = next("flux");
    if (f.size() != n + 2)
      throw ValidationError(source_name + ":" + std::to_string(lineno) + ": expected " + std::to_string(n + 1) +
                            " fluxes");
    std::vector<double> flux(n + 1);
    for (std::size_t i = 0; i <= n; ++i) flux[i] = num(f[i + 1]);
    s.flux.push_back(std::move(flux));
  }
  return out;
}

RunSummary summarize(const ConvergenceReport& r, const std::vector<StoredLine>& lines) {
  RunSummary sum;
  sum.lines = lines.size();
  if (!lines.empty()) sum.outflow = lines.front().outflow;
  sum.l2_initial = r.l2_global.front();
  sum.l2_final = r.l2_global.back();
  sum.l2_ratio = sum.l2_initial > 0.0 ? sum.l2_final / sum.l2_initial : 0.0;

  const double l0 = sum.l2_initial;
  std::size_t first = r.l2_global.size();
  for (std::size_t k = 0; k < r.l2_global.size(); ++k)
    if (r.l2_global[k] < 0.1 * l0) {
      first = k;
      break;
    }
  sum.l2_tail_monotone = first < r.l2_global.size();
  for (std::size_t k = first + 1; k < r.l2_global.size(); ++k)
    if (r.l2_global[k] > r.l2_global[k - 1] * (1.0 + 1e-6) + 1e-12 * l0) sum.l2_tail_monotone = false;

  for (const auto& l : lines) {
    const auto& f = l.series.flux.back();
    if (l.outflow == OutflowMode::Controlled)
      sum.max_outflow_deviation = std::max(sum.max_outflow_deviation, std::abs(f.back() - l.u) / l.u);
    const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
    if (*hi > 0.0) sum.max_flux_spread = std::max(sum.max_flux_spread, (*hi - *lo) / *hi);
  }
  for (bool b : r.lyapunov_decreasing) sum.lyapunov_decreasing += b;
  return sum;
}

// ---- stages ----------------------------------------------------------------

namespace {

RoadNetwork generate_impl(const Scenario& s, StageLog* log) {
  const RunLayout out{s.output_dir};
  RoadNetwork net;
  if (s.network.generate) {
    ManhattanOptions o = *s.network.generate;
    o.seed = s.seed;
    net = generate_manhattan_grid(o);
  } else {
    net = load_network(s.network.file);
  }
  emit(out, "network.json", serialize_network(net), log);
  return net;
}

ContinuumFields reconstruct_impl(const Scenario& s, StageLog* log) {
  const RunLayout out{s.output_dir};
  need(out.network(), Stage::GenerateGrid);
  const RoadNetwork net = load_network(out.network());
  const GridHeader grid = make_grid(net.bbox, s.grid_resolution);
  ContinuumFields f = reconstruct_fields(net, grid, s.idw, s.kernel);
  emit(out, "fields/theta.txt", serialize_raster("theta", "rad", theta_as_scalar(f.theta)), log);
  emit(out, "fields/rho_max.txt", serialize_raster("rho_max", "veh/m^2", f.rho_max), log);
  emit(out, "fields/v_max.txt", serialize_raster("v_max", "m/s", f.v_max), log);
  return f;
}

ContinuumFields load_fields(const RunLayout& out) {
  need(out.theta(), Stage::Reconstruct);
  need(out.rho_max(), Stage::Reconstruct);
  need(out.v_max(), Stage::Reconstruct);
  const Raster theta = load_raster(out.theta());
  const Raster rho = load_raster(out.rho_max());
  const Raster v = load_raster(out.v_max());
  if (!(theta.field.grid == rho.field.grid) || !(theta.field.grid == v.field.grid))
    throw ValidationError("field rasters do not share one grid");
  return {DirectionField(theta.field.grid, theta.field.values), rho.field, v.field};
}

std::string chart_check_json(const TransformResult& r) {
  auto range = [](const ScalarField& f) {
    const auto [lo, hi] = std::minmax_element(f.values.begin(), f.values.end());
    return json::array({*lo, *hi});
  };
  json j;
  j["transport_residual"] = {{"alpha", r.transport.alpha_relative}, {"beta", r.transport.beta_relative}};
  j["integrability_residual"] = {{"xi", r.chart.xi_relative}, {"eta", r.chart.eta_relative}};
  j["alpha_range"] = range(r.scaling.alpha);
  j["beta_range"] = range(r.scaling.beta_scale);
  j["paths"] = r.atlas.paths.size();
  j["d_eta"] = r.atlas.d_eta;
  j["warnings"] = r.atlas.warnings;
  return j.dump(2) + "\n";
}

TransformResult transform_impl(const Scenario& s, StageLog* log) {
  const RunLayout out{s.output_dir};
  const ContinuumFields f = load_fields(out);
  TransformResult r;
  try {
    r.scaling = solve_scaling_fields(f.theta, s.scaling);
  } catch (const ScalingSolveError& e) {
    emit(out, "transform/alpha_residual.txt", serialize_raster("alpha_residual", "1/m", e.alpha_residual), log);
    emit(out, "transform/beta_residual.txt", serialize_raster("beta_residual", "1/m", e.beta_residual), log);
    throw;
  }
  emit(out, "transform/alpha.txt", serialize_raster("alpha", "1", r.scaling.alpha), log);
  emit(out, "transform/beta.txt", serialize_raster("beta", "1", r.scaling.beta_scale), log);
  r.transport = transport_residual(f.theta, r.scaling);
  r.chart = integrability_residual(f.theta, r.scaling);

  r.atlas = trace_eta_paths(f.theta, r.scaling, s.trace);
  for (const auto& w : r.atlas.warnings) warn(log, w);
  std::vector<EtaPath> rescaled(r.atlas.paths.size());
  parallel_for(static_cast<int>(rescaled.size()),
               [&](int k) { rescaled[k] = rescale_line_data(r.atlas.paths[k], f, r.scaling); });
  r.atlas.paths = std::move(rescaled);
  emit(out, "transform/atlas.txt", serialize_atlas(r.atlas), log);
  emit(out, "transform/chart_check.json", chart_check_json(r), log);
  return r;
}

SimulationResult simulate_impl(const Scenario& s, StageLog* log) {
  const RunLayout out{s.output_dir};
  need(out.atlas(), Stage::Transform);
  const CurvilinearAtlas atlas = parse_atlas(read_text_file(out.atlas()), out.atlas());

  std::vector<std::string> warnings;
  auto lines = build_lines(atlas, s.sim, &warnings);
  for (const auto& w : warnings) warn(log, w);

  SimulationResult res;
  res.lines = lines.size();
  for (const auto& l : lines) res.plan.entries.push_back(l.entry);
  emit(out, "control_plan.txt", serialize_control_plan(res.plan), log);

  // Stale line files from an earlier run must not leak into the report.
  std::error_code ec;
  if (fs::is_directory(out.timeseries_dir())) {
    for (const auto& e : fs::directory_iterator(out.timeseries_dir())) {
      const auto name = e.path().filename().string();
      if (name == "index.txt" || (name.rfind("line_", 0) == 0 && e.path().extension() == ".txt"))
        fs::remove(e.path(), ec);
    }
  }

  // Each finished line is flushed on its own, so a failure leaves the others on disk.
  parallel_for(static_cast<int>(lines.size()), [&](int k) {
    try {
      const LineSeries series = simulate_line(lines[k], s.sim);
      emit(out, "timeseries/" + line_file_name(k), serialize_line_series(series, lines[k], k), log);
    } catch (const Error& e) {
      rethrow_in_stage(("line " + std::to_string(k) + " (eta " + format_double(lines[k].state.eta) + ")").c_str(),
                       e);
    }
  });

  std::ostringstream index;
  index << "# gridflow timeseries index v1\nlines " << lines.size() << "\n";
  for (std::size_t k = 0; k < lines.size(); ++k) index << line_file_name(k) << "\n";
  emit(out, "timeseries/index.txt", index.str(), log);
  return res;
}

std::vector<StoredLine> load_series(const RunLayout& out) {
  need(out.timeseries_index(), Stage::Simulate);
  const std::string text = read_text_file(out.timeseries_index());
  std::istringstream in(text);
  std::string raw;
  std::vector<std::string> files;
  std::size_t declared = 0;
  bool have_count = false;
  while (std::getline(in, raw)) {
    auto toks = split_ws(raw);
    if (toks.empty() || toks[0][0] == '#') continue;
    if (toks[0] == "lines" && toks.size() == 2 && !have_count) {
      declared = static_cast<std::size_t>(parse_double(toks[1], out.timeseries_index()));
      have_count = true;
    } else {
      files.push_back(toks[0]);
    }
  }
  if (!have_count || declared != files.size())
    throw ValidationError(out.timeseries_index() + ": line count does not match the listed files");
  if (files.empty()) throw ValidationError("time series is empty; nothing to report");
  std::vector<StoredLine> lines(files.size());
  parallel_for(static_cast<int>(files.size()), [&](int k) {
    const auto path = out.path("timeseries/" + files[k]);
    need(path, Stage::Simulate);
    lines[k] = parse_line_series(read_text_file(path), path);
  });
  for (const auto& l : lines)
    if (l.series.times.size() < 3)
      throw ValidationError("time series has fewer than 3 samples per line; nothing to report");
  return lines;
}

std::string summary_json(const RunSummary& s, const ConvergenceReport& r) {
  json j;
  j["lines"] = s.lines;
  j["outflow"] = to_string(s.outflow);
  j["samples"] = r.times.size();
  j["l2_initial"] = s.l2_initial;
  j["l2_final"] = s.l2_final;
  j["l2_ratio"] = s.l2_ratio;
  j["l2_tail_monotone"] = s.l2_tail_monotone;
  j["max_outflow_deviation"] = s.max_outflow_deviation;
  j["max_flux_spread"] = s.max_flux_spread;
  j["lyapunov_decreasing_lines"] = s.lyapunov_decreasing;
  return j.dump(2) + "\n";
}

ReportResult report_impl(const Scenario& s, StageLog* log) {
  const RunLayout out{s.output_dir};
  ReportResult res;
  res.lines = load_series(out);
  std::vector<LineSeries> series;
  series.reserve(res.lines.size());
  for (std::size_t k = 0; k < res.lines.size(); ++k) {
    const auto& l = res.lines[k];
    ControlEntry e = desired_density_profile(std::span<const Cell>(l.series.cells), s.sim.epsilon);
    e.eta = l.series.eta;
    e.d_eta = l.series.d_eta;
    if (l.outflow == OutflowMode::Controlled && l.u != e.u)
      warn(log, "line " + std::to_string(k) + ": stored control " + format_double(l.u) +
                    " differs from the scenario's " + format_double(e.u));
    res.plan.entries.push_back(std::move(e));
    series.push_back(l.series);
  }
  res.report = decay_report(series, res.plan, LyapunovOptions{}, s.sim.tail_fraction);
  res.summary = summarize(res.report, res.lines);
  emit(out, "report/convergence.csv", serialize_convergence_csv(res.report, false), log);
  emit(out, "report/convergence_per_eta.csv", serialize_convergence_csv(res.report, true), log);
  emit(out, "report/decay.csv", serialize_decay_csv(res.report), log);
  emit(out, "report/summary.json", summary_json(res.summary, res.report), log);
  return res;
}

json read_manifest(const RunLayout& out) {
  if (!fs::exists(out.manifest())) return json::object();
  try {
    auto j = json::parse(read_text_file(out.manifest()));
    if (j.is_object()) return j;
  } catch (const std::exception&) {
  }
  return json::object();
}

void write_manifest(const Scenario& s, Stage stage, const std::string& status, double seconds, StageLog& log,
                    const std::string& error) {
  const RunLayout out{s.output_dir};
  json m = read_manifest(out);
  json inputs = scenario_to_json(s);
  inputs.erase("output");
  m["format"] = "gridflow-manifest";
  m["version"] = 1;
  m["tool_version"] = kToolVersion;
  m["scenario_sha256"] = sha256_hex(inputs.dump());
  m["scenario"] = inputs;
  if (!m.contains("stages") || !m["stages"].is_object()) m["stages"] = json::object();

  // Rerunning a stage invalidates everything downstream of it.
  bool downstream = false;
  for (Stage st : kAllStages) {
    if (downstream) m["stages"].erase(stage_name(st));
    if (st == stage) downstream = true;
  }

  std::sort(log.artifacts.begin(), log.artifacts.end());
  json rec;
  rec["status"] = status;
  rec["seconds"] = seconds;
  rec["artifacts"] = json::array();
  for (const auto& [path, digest] : log.artifacts) rec["artifacts"].push_back({{"path", path}, {"sha256", digest}});
  rec["warnings"] = log.warnings;
  if (!error.empty()) rec["error"] = error;
  m["stages"][stage_name(stage)] = rec;

  bool complete = true;
  for (Stage st : kAllStages) {
    const auto key = stage_name(st);
    if (!m["stages"].contains(key) || m["stages"][key]["status"] != "ok") complete = false;
  }
  m["complete"] = complete;
  m["failed_stage"] = status == "ok" ? json(nullptr) : json(stage_name(stage));
  write_text_file(out.manifest(), m.dump(2) + "\n");
}

}  // namespace

RoadNetwork stage_generate_grid(const Scenario& s) {
  return in_stage(Stage::GenerateGrid, [&] { return generate_impl(s, active_log); });
}
ContinuumFields stage_reconstruct(const Scenario& s) {
  return in_stage(Stage::Reconstruct, [&] { return reconstruct_impl(s, active_log); });
}
TransformResult stage_transform(const Scenario& s) {
  return in_stage(Stage::Transform, [&] { return transform_impl(s, active_log); });
}
SimulationResult stage_simulate(const Scenario& s) {
  return in_stage(Stage::Simulate, [&] { return simulate_impl(s, active_log); });
}
ReportResult stage_report(const Scenario& s) {
  return in_stage(Stage::Report, [&] { return report_impl(s, active_log); });
}

void run_stage(const Scenario& s, Stage stage) {
  validate(s);
  StageLog log;
  active_log = &log;
  const auto t0 = std::chrono::steady_clock::now();
  auto seconds = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  try {
    switch (stage) {
      case Stage::GenerateGrid: stage_generate_grid(s); break;
      case Stage::Reconstruct: stage_reconstruct(s); break;
      case Stage::Transform: stage_transform(s); break;
      case Stage::Simulate: stage_simulate(s); break;
      case Stage::Report: stage_report(s); break;
    }
  } catch (const std::exception& e) {
    active_log = nullptr;
    try {
      write_manifest(s, stage, "failed", seconds(), log, e.what());
    } catch (const std::exception&) {
      // the stage error is the one worth reporting
    }
    throw;
  }
  active_log = nullptr;
  write_manifest(s, stage, "ok", seconds(), log, "");
}

void run_pipeline(const Scenario& s) {
  for (Stage st : kAllStages) run_stage(s, st);
}

}  // namespace gridflow
