#include "scenario.hpp"

#include <cmath>
#include <filesystem>
#include <set>

#include "errors.hpp"
#include "text_io.hpp"

namespace gridflow {

namespace {

using nlohmann::json;

// Typed, path-aware access into one JSON object; rejects keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(where() + " must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  double number(const std::string& key, double fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ValidationError(where(key) + " must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ValidationError(where(key) + " must be finite");
    return d;
  }

  int integer(const std::string& key, int fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) throw ValidationError(where(key) + " must be an integer");
    return v.get<int>();
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      throw ValidationError(where(key) + " must be a non-negative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) throw ValidationError(where(key) + " must be true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_string()) throw ValidationError(where(key) + " must be a string");
    return v.get<std::string>();
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  Section child(const std::string& key) {
    seen_.insert(key);
    static const json empty = json::object();
    return Section(j_.contains(key) ? j_.at(key) : empty, where(key));
  }

  std::string where(const std::string& key = "") const {
    if (key.empty()) return path_.empty() ? "scenario" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ValidationError("unknown setting " + where(it.key()));
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string selector_text(const RoadSelector& s) {
  switch (s.kind) {
    case RoadSelector::Kind::Row: return "row:" + std::to_string(s.index);
    case RoadSelector::Kind::Column: return "col:" + std::to_string(s.index);
    case RoadSelector::Kind::Road: return "road:" + std::to_string(s.index);
  }
  return "";
}

ManhattanOptions parse_generate(Section g) {
  ManhattanOptions o;
  o.rows = g.integer("rows", o.rows);
  o.cols = g.integer("cols", o.cols);
  o.side = g.number("side_m", o.side);
  o.noise_sigma = g.number("noise_sigma_m", o.noise_sigma);
  o.default_speed = kmh_to_ms(g.number("default_speed_kmh", o.default_speed * 3.6));
  o.fast_speed = kmh_to_ms(g.number("fast_speed_kmh", o.fast_speed * 3.6));
  o.lanes = g.integer("lanes", o.lanes);
  if (g.has("fast_roads")) {
    const auto& list = g.raw("fast_roads");
    if (!list.is_array()) throw ValidationError(g.where("fast_roads") + " must be a list of selectors");
    for (const auto& item : list) {
      if (!item.is_string()) throw ValidationError(g.where("fast_roads") + " entries must be strings");
      o.fast_roads.push_back(parse_road_selector(item.get<std::string>()));
    }
  }
  if (g.has("river")) {
    const auto& rj = g.raw("river");
    if (!rj.is_null()) {
      Section r(rj, g.where("river"));
      RiverSpec river;
      river.row = r.integer("row", 0);
      if (r.has("bridge_columns")) {
        const auto& b = r.raw("bridge_columns");
        if (!b.is_array()) throw ValidationError(r.where("bridge_columns") + " must be a list");
        for (const auto& c : b) {
          if (!c.is_number_integer()) throw ValidationError(r.where("bridge_columns") + " entries must be integers");
          river.bridge_columns.push_back(c.get<int>());
        }
      }
      r.finish();
      o.river = river;
    }
  }
  g.finish();
  return o;
}

std::string resolve(const std::string& p, const std::string& base_dir) {
  const std::filesystem::path path(p);
  if (path.is_absolute() || base_dir.empty()) return path.lexically_normal().string();
  return (std::filesystem::path(base_dir) / path).lexically_normal().string();
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

}  // namespace

const char* to_string(InitialCondition c) {
  switch (c) {
    case InitialCondition::Congested: return "congested";
    case InitialCondition::Empty: return "empty";
    case InitialCondition::Desired: return "desired";
    case InitialCondition::Fraction: return "fraction";
  }
  return "?";
}

const char* to_string(OutflowMode m) { return m == OutflowMode::Controlled ? "controlled" : "ghost"; }

void validate(const Scenario& s) {
  if (s.network.generate) {
    const auto& g = *s.network.generate;
    require(g.rows >= 2 && g.cols >= 2, "network.generate: rows and cols must be at least 2");
    require(g.side > 0.0, "network.generate.side_m must be positive");
    require(g.noise_sigma >= 0.0, "network.generate.noise_sigma_m must be non-negative");
    require(g.default_speed > 0.0 && g.fast_speed > 0.0, "network.generate: speeds must be positive");
    require(g.lanes >= 1, "network.generate.lanes must be at least 1");
  } else {
    require(!s.network.file.empty(), "network needs either 'generate' or 'file'");
  }
  require(s.output_dir.size() > 0, "output directory must not be empty");
  require(s.grid_resolution > 0.0, "grid.resolution_m must be positive");
  require(s.idw.sensitivity > 0.0, "fields.idw_sensitivity must be positive");
  require(s.idw.offset > 0.0, "fields.idw_offset_m must be positive");
  require(s.idw.smoothing >= 0.0, "fields.idw_smoothing_m must be non-negative");
  require(s.kernel.vehicle_spacing > 0.0, "fields.vehicle_spacing_m must be positive");
  require(s.kernel.sigma > 0.0, "fields.kernel_sigma_m must be positive");
  require(s.kernel.floor > 0.0, "fields.rho_max_floor must be positive");
  require(s.scaling.step >= 0.0, "transform.step_m must be non-negative");
  require(s.scaling.residual_tolerance > 0.0, "transform.residual_tolerance must be positive");
  require(s.trace.n_paths >= 1, "transform.n_paths must be at least 1");
  require(s.trace.step >= 0.0, "transform.step_m must be non-negative");
  const auto& m = s.sim;
  require(m.n_cells >= 1, "simulation.n_cells must be at least 1");
  require(m.initial_fraction >= 0.0 && m.initial_fraction <= 1.0,
          "simulation.initial_fraction must lie in [0, 1]");
  require(!m.inflow || *m.inflow >= 0.0, "simulation.inflow must be 'max' or a non-negative number");
  require(m.epsilon > 0.0, "simulation.epsilon must be positive");
  require(m.horizon >= 0.0, "simulation.horizon_s must be non-negative");
  require(m.cfl > 0.0 && m.cfl <= 1.0, "simulation.cfl must lie in (0, 1]");
  require(m.report_interval > 0.0, "simulation.report_interval_s must be positive");
  require(m.tail_fraction > 0.0 && m.tail_fraction <= 1.0, "simulation.tail_fraction must lie in (0, 1]");
}

Scenario parse_scenario(const std::string& text, const std::string& source_name, const std::string& base_dir) {
  const json doc = parse_json_document(text, source_name);
  Scenario s;
  try {
    Section top(doc, "");
    const std::string format = top.string("format", "gridflow-scenario");
    require(format == "gridflow-scenario", "scenario format must be 'gridflow-scenario'");
    require(top.integer("version", 1) == 1, "unsupported scenario version");
    s.seed = top.unsigned_integer("seed", s.seed);
    s.output_dir = resolve(top.string("output", s.output_dir), base_dir);

    Section net = top.child("network");
    if (net.has("generate") && net.has("file")) throw ValidationError("network: give either 'generate' or 'file'");
    if (net.has("file")) {
      s.network.file = resolve(net.string("file", ""), base_dir);
    } else {
      s.network.generate = parse_generate(net.child("generate"));
    }
    net.finish();

    Section grid = top.child("grid");
    s.grid_resolution = grid.number("resolution_m", s.grid_resolution);
    grid.finish();

    Section f = top.child("fields");
    s.idw.sensitivity = f.number("idw_sensitivity", s.idw.sensitivity);
    s.idw.offset = f.number("idw_offset_m", s.idw.offset);
    s.idw.smoothing = f.number("idw_smoothing_m", s.idw.smoothing);
    s.idw.speed_weighted = f.boolean("idw_speed_weighted", s.idw.speed_weighted);
    s.kernel.vehicle_spacing = f.number("vehicle_spacing_m", s.kernel.vehicle_spacing);
    s.kernel.sigma = f.number("kernel_sigma_m", s.kernel.sigma);
    s.kernel.floor = f.number("rho_max_floor", s.kernel.floor);
    s.kernel.edge_correction = f.boolean("kernel_edge_correction", s.kernel.edge_correction);
    f.finish();

    Section t = top.child("transform");
    s.trace.n_paths = t.integer("n_paths", s.trace.n_paths);
    s.trace.step = t.number("step_m", s.trace.step);
    s.scaling.step = s.trace.step;
    s.scaling.residual_tolerance = t.number("residual_tolerance", s.scaling.residual_tolerance);
    s.scaling.lower_bound = t.number("scaling_lower_bound", s.scaling.lower_bound);
    s.scaling.upper_bound = t.number("scaling_upper_bound", s.scaling.upper_bound);
    t.finish();

    Section m = top.child("simulation");
    s.sim.n_cells = m.integer("n_cells", s.sim.n_cells);
    const std::string initial = m.string("initial", "congested");
    if (initial == "congested") s.sim.initial = InitialCondition::Congested;
    else if (initial == "empty") s.sim.initial = InitialCondition::Empty;
    else if (initial == "desired") s.sim.initial = InitialCondition::Desired;
    else if (initial == "fraction") s.sim.initial = InitialCondition::Fraction;
    else throw ValidationError("simulation.initial must be congested, empty, desired or fraction");
    s.sim.initial_fraction = m.number("initial_fraction", s.sim.initial_fraction);
    if (m.has("inflow")) {
      const auto& in = m.raw("inflow");
      if (in.is_string() && in.get<std::string>() == "max") {
        s.sim.inflow.reset();
      } else if (in.is_number()) {
        s.sim.inflow = in.get<double>();
      } else {
        throw ValidationError("simulation.inflow must be 'max' or a number");
      }
    }
    const std::string outflow = m.string("outflow", "controlled");
    if (outflow == "controlled") s.sim.outflow = OutflowMode::Controlled;
    else if (outflow == "ghost") s.sim.outflow = OutflowMode::Ghost;
    else throw ValidationError("simulation.outflow must be controlled or ghost");
    s.sim.epsilon = m.number("epsilon", s.sim.epsilon);
    s.sim.horizon = m.number("horizon_s", s.sim.horizon);
    s.sim.cfl = m.number("cfl", s.sim.cfl);
    s.sim.report_interval = m.number("report_interval_s", s.sim.report_interval);
    s.sim.tail_fraction = m.number("tail_fraction", s.sim.tail_fraction);
    m.finish();
    top.finish();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(source_name + ": " + e.what());
  }
  try {
    validate(s);
  } catch (const ValidationError& e) {
    throw ValidationError(source_name + ": " + e.what());
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const IoError& e) {
    throw ValidationError(std::string("scenario: ") + e.what());
  }
  return parse_scenario(text, path, std::filesystem::path(path).parent_path().string());
}

nlohmann::json scenario_to_json(const Scenario& s) {
  json j;
  j["format"] = "gridflow-scenario";
  j["version"] = 1;
  j["seed"] = s.seed;
  j["output"] = s.output_dir;
  if (s.network.generate) {
    const auto& g = *s.network.generate;
    json gj;
    gj["rows"] = g.rows;
    gj["cols"] = g.cols;
    gj["side_m"] = g.side;
    gj["noise_sigma_m"] = g.noise_sigma;
    gj["default_speed_kmh"] = g.default_speed * 3.6;
    gj["fast_speed_kmh"] = g.fast_speed * 3.6;
    gj["lanes"] = g.lanes;
    gj["fast_roads"] = json::array();
    for (const auto& sel : g.fast_roads) gj["fast_roads"].push_back(selector_text(sel));
    if (g.river) gj["river"] = {{"row", g.river->row}, {"bridge_columns", g.river->bridge_columns}};
    j["network"]["generate"] = gj;
  } else {
    j["network"]["file"] = s.network.file;
  }
  j["grid"]["resolution_m"] = s.grid_resolution;
  j["fields"] = {{"idw_sensitivity", s.idw.sensitivity},
                 {"idw_offset_m", s.idw.offset},
                 {"idw_smoothing_m", s.idw.smoothing},
                 {"idw_speed_weighted", s.idw.speed_weighted},
                 {"vehicle_spacing_m", s.kernel.vehicle_spacing},
                 {"kernel_sigma_m", s.kernel.sigma},
                 {"rho_max_floor", s.kernel.floor},
                 {"kernel_edge_correction", s.kernel.edge_correction}};
  j["transform"] = {{"n_paths", s.trace.n_paths},
                    {"step_m", s.trace.step},
                    {"residual_tolerance", s.scaling.residual_tolerance},
                    {"scaling_lower_bound", s.scaling.lower_bound},
                    {"scaling_upper_bound", s.scaling.upper_bound}};
  json m;
  m["n_cells"] = s.sim.n_cells;
  m["initial"] = to_string(s.sim.initial);
  m["initial_fraction"] = s.sim.initial_fraction;
  if (s.sim.inflow) m["inflow"] = *s.sim.inflow;
  else m["inflow"] = "max";
  m["outflow"] = to_string(s.sim.outflow);
  m["epsilon"] = s.sim.epsilon;
  m["horizon_s"] = s.sim.horizon;
  m["cfl"] = s.sim.cfl;
  m["report_interval_s"] = s.sim.report_interval;
  m["tail_fraction"] = s.sim.tail_fraction;
  j["simulation"] = m;
  return j;
}

Scenario benchmark_scenario() {
  Scenario s;
  s.network.generate = benchmark_grid_options();
  return s;
}

}  // namespace gridflow
