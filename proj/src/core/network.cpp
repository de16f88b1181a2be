#include "network.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "errors.hpp"
#include "text_io.hpp"

namespace gridflow {

using nlohmann::json;

const Node& RoadNetwork::node(int id) const {
  if (id >= 0 && static_cast<std::size_t>(id) < nodes.size() && nodes[id].id == id) return nodes[id];
  auto it = std::find_if(nodes.begin(), nodes.end(), [id](const Node& n) { return n.id == id; });
  if (it == nodes.end()) throw ValidationError("unknown node id " + std::to_string(id));
  return *it;
}

void update_road_lengths(RoadNetwork& net) {
  for (auto& r : net.roads) r.length = norm(net.road_end(r) - net.road_start(r));
}

void validate(const RoadNetwork& net) {
  const auto& b = net.bbox;
  if (!(b.xmax > b.xmin) || !(b.ymax > b.ymin)) throw ValidationError("network bbox is empty");
  std::set<int> node_ids;
  for (const auto& n : net.nodes) {
    if (!node_ids.insert(n.id).second) throw ValidationError("duplicate node id " + std::to_string(n.id));
    if (!std::isfinite(n.position.x) || !std::isfinite(n.position.y) || !b.contains(n.position))
      throw ValidationError("node " + std::to_string(n.id) + " lies outside the network bbox");
  }
  if (net.roads.empty()) throw ValidationError("network has no roads");
  std::set<int> road_ids;
  for (const auto& r : net.roads) {
    const std::string tag = "road " + std::to_string(r.id);
    if (!road_ids.insert(r.id).second) throw ValidationError("duplicate " + tag);
    if (!node_ids.count(r.from_node))
      throw ValidationError(tag + " references missing node " + std::to_string(r.from_node));
    if (!node_ids.count(r.to_node))
      throw ValidationError(tag + " references missing node " + std::to_string(r.to_node));
    if (r.from_node == r.to_node) throw ValidationError(tag + " is a self loop");
    if (!(r.speed_limit > 0.0) || !std::isfinite(r.speed_limit))
      throw ValidationError(tag + " has non-positive speed limit");
    if (r.lanes < 1) throw ValidationError(tag + " has no lanes");
    if (!(r.length > 0.0)) throw ValidationError(tag + " has zero length");
  }
}

RoadSelector parse_road_selector(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ValidationError("bad road selector '" + text + "'");
  const std::string kind = text.substr(0, colon);
  RoadSelector sel;
  if (kind == "row")
    sel.kind = RoadSelector::Kind::Row;
  else if (kind == "col")
    sel.kind = RoadSelector::Kind::Column;
  else if (kind == "road")
    sel.kind = RoadSelector::Kind::Road;
  else
    throw ValidationError("bad road selector kind '" + kind + "'");
  try {
    std::size_t used = 0;
    sel.index = std::stoi(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw ValidationError("bad road selector index in '" + text + "'");
  }
  return sel;
}

ManhattanOptions benchmark_grid_options() {
  ManhattanOptions o;
  o.fast_roads = {{RoadSelector::Kind::Row, 2},
                  {RoadSelector::Kind::Row, 7},
                  {RoadSelector::Kind::Column, 3},
                  {RoadSelector::Kind::Column, 6}};
  o.river = RiverSpec{4, {2, 7}};
  return o;
}

RoadNetwork generate_manhattan_grid(const ManhattanOptions& o) {
  if (o.rows < 2 || o.cols < 2) throw ValidationError("manhattan grid needs rows, cols >= 2");
  if (!(o.side > 0.0)) throw ValidationError("manhattan grid side must be positive");
  if (!(o.noise_sigma >= 0.0)) throw ValidationError("noise sigma must be non-negative");
  if (!(o.default_speed > 0.0) || !(o.fast_speed > 0.0)) throw ValidationError("speeds must be positive");
  if (o.lanes < 1) throw ValidationError("lanes must be positive");

  const double hx = o.side / (o.cols - 1);
  const double hy = o.side / (o.rows - 1);
  RoadNetwork net;
  net.bbox = {0.0, 0.0, o.side, o.side};
  net.nodes.resize(static_cast<std::size_t>(o.rows) * o.cols);

  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto at = [&](int i, int j) -> Node& { return net.nodes[static_cast<std::size_t>(j) * o.cols + i]; };

  for (int j = 0; j < o.rows; ++j) {
    for (int i = 0; i < o.cols; ++i) {
      const bool x_fixed = (i == 0 || i == o.cols - 1);
      const bool y_fixed = (j == 0 || j == o.rows - 1);
      const Vec2 base{i * hx, j * hy};
      Vec2 p = base;
      for (int attempt = 0;; ++attempt) {
        if (attempt == 1000) throw ValidationError("noise too large: cannot keep north-east orientation");
        const double nx = gauss(rng) * o.noise_sigma;
        const double ny = gauss(rng) * o.noise_sigma;
        p = {x_fixed ? base.x : base.x + nx, y_fixed ? base.y : base.y + ny};
        if (!net.bbox.contains(p)) continue;
        if (i > 0 && !(p.x > at(i - 1, j).position.x)) continue;
        if (j > 0 && !(p.y > at(i, j - 1).position.y)) continue;
        break;
      }
      at(i, j) = Node{j * o.cols + i, p};
    }
  }

  std::set<int> bridges;
  if (o.river) {
    if (o.river->row < 0 || o.river->row >= o.rows - 1)
      throw ValidationError("river row out of range");
    for (int c : o.river->bridge_columns) {
      if (c < 0 || c >= o.cols) throw ValidationError("bridge column out of range");
      bridges.insert(c);
    }
  }

  // Road layout: per node, the eastbound road then the northbound one.
  struct Slot {
    int i, j;
    bool east;
  };
  std::vector<Slot> slots;
  for (int j = 0; j < o.rows; ++j) {
    for (int i = 0; i < o.cols; ++i) {
      if (i < o.cols - 1) slots.push_back({i, j, true});
      const bool cut = o.river && j == o.river->row && !bridges.count(i);
      if (j < o.rows - 1 && !cut) slots.push_back({i, j, false});
    }
  }

  std::vector<bool> fast(slots.size(), false);
  for (const auto& sel : o.fast_roads) {
    switch (sel.kind) {
      case RoadSelector::Kind::Row:
        if (sel.index < 0 || sel.index >= o.rows)
          throw ValidationError("fast road selector row:" + std::to_string(sel.index) + " does not exist");
        for (std::size_t k = 0; k < slots.size(); ++k)
          if (slots[k].east && slots[k].j == sel.index) fast[k] = true;
        break;
      case RoadSelector::Kind::Column:
        if (sel.index < 0 || sel.index >= o.cols)
          throw ValidationError("fast road selector col:" + std::to_string(sel.index) + " does not exist");
        for (std::size_t k = 0; k < slots.size(); ++k)
          if (!slots[k].east && slots[k].i == sel.index) fast[k] = true;
        break;
      case RoadSelector::Kind::Road:
        if (sel.index < 0 || static_cast<std::size_t>(sel.index) >= slots.size())
          throw ValidationError("fast road selector road:" + std::to_string(sel.index) + " does not exist");
        fast[sel.index] = true;
        break;
    }
  }

  for (std::size_t k = 0; k < slots.size(); ++k) {
    const auto& s = slots[k];
    Road r;
    r.id = static_cast<int>(k);
    r.from_node = at(s.i, s.j).id;
    r.to_node = s.east ? at(s.i + 1, s.j).id : at(s.i, s.j + 1).id;
    r.speed_limit = fast[k] ? o.fast_speed : o.default_speed;
    r.lanes = o.lanes;
    net.roads.push_back(r);
  }
  update_road_lengths(net);
  validate(net);
  return net;
}

namespace {

// Field accessors that name the entity on failure.
template <typename T>
T field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw ValidationError(where + ": missing field '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(where + ": field '" + key + "' has the wrong type");
  }
}

}  // namespace

RoadNetwork parse_network(const std::string& text, const std::string& source_name) {
  const json doc = parse_json_document(text, source_name);
  if (field<std::string>(doc, "format", source_name) != "gridflow-network")
    throw ValidationError(source_name + ": not a gridflow-network document");
  const json& units = doc.contains("units") ? doc.at("units") : json::object();
  const std::string length_unit = units.value("length", "m");
  const std::string speed_unit = units.value("speed", "m/s");
  double length_scale = 1.0;
  if (length_unit == "km")
    length_scale = 1000.0;
  else if (length_unit != "m")
    throw ValidationError(source_name + ": unsupported length unit '" + length_unit + "'");
  double speed_scale = 1.0;
  if (speed_unit == "km/h")
    speed_scale = 1.0 / 3.6;
  else if (speed_unit != "m/s")
    throw ValidationError(source_name + ": unsupported speed unit '" + speed_unit + "'");

  RoadNetwork net;
  const std::string bbox_where = source_name + ": bbox";
  const json& bb = doc.contains("bbox") ? doc.at("bbox") : json();
  net.bbox = {field<double>(bb, "xmin", bbox_where) * length_scale, field<double>(bb, "ymin", bbox_where) * length_scale,
              field<double>(bb, "xmax", bbox_where) * length_scale, field<double>(bb, "ymax", bbox_where) * length_scale};

  if (!doc.contains("nodes") || !doc.at("nodes").is_array())
    throw ValidationError(source_name + ": missing array 'nodes'");
  for (std::size_t k = 0; k < doc.at("nodes").size(); ++k) {
    const json& n = doc.at("nodes")[k];
    const std::string where = source_name + ": node record " + std::to_string(k);
    const int id = field<int>(n, "id", where);
    const std::string named = source_name + ": node " + std::to_string(id);
    net.nodes.push_back(Node{id, {field<double>(n, "x", named) * length_scale, field<double>(n, "y", named) * length_scale}});
  }
  if (!doc.contains("roads") || !doc.at("roads").is_array())
    throw ValidationError(source_name + ": missing array 'roads'");
  for (std::size_t k = 0; k < doc.at("roads").size(); ++k) {
    const json& r = doc.at("roads")[k];
    const std::string where = source_name + ": road record " + std::to_string(k);
    Road road;
    road.id = field<int>(r, "id", where);
    const std::string named = source_name + ": road " + std::to_string(road.id);
    road.from_node = field<int>(r, "from", named);
    road.to_node = field<int>(r, "to", named);
    road.speed_limit = field<double>(r, "speed_limit", named) * speed_scale;
    road.lanes = field<int>(r, "lanes", named);
    net.roads.push_back(road);
  }
  // Endpoints must exist before lengths can be derived.
  std::set<int> ids;
  for (const auto& n : net.nodes) ids.insert(n.id);
  for (const auto& r : net.roads) {
    for (int end : {r.from_node, r.to_node})
      if (!ids.count(end))
        throw ValidationError(source_name + ": road " + std::to_string(r.id) + " references missing node " +
                              std::to_string(end));
  }
  update_road_lengths(net);
  validate(net);
  return net;
}

RoadNetwork load_network(const std::string& path) { return parse_network(read_text_file(path), path); }

std::string serialize_network(const RoadNetwork& net) {
  validate(net);
  json doc;
  doc["format"] = "gridflow-network";
  doc["version"] = 1;
  doc["units"] = {{"length", "m"}, {"speed", "m/s"}};
  doc["bbox"] = {{"xmin", net.bbox.xmin}, {"ymin", net.bbox.ymin}, {"xmax", net.bbox.xmax}, {"ymax", net.bbox.ymax}};
  json nodes = json::array();
  for (const auto& n : net.nodes) nodes.push_back({{"id", n.id}, {"x", n.position.x}, {"y", n.position.y}});
  json roads = json::array();
  for (const auto& r : net.roads)
    roads.push_back({{"id", r.id}, {"from", r.from_node}, {"to", r.to_node}, {"speed_limit", r.speed_limit}, {"lanes", r.lanes}});
  doc["nodes"] = std::move(nodes);
  doc["roads"] = std::move(roads);
  return doc.dump(2) + "\n";
}

void save_network(const RoadNetwork& net, const std::string& path) { write_text_file(path, serialize_network(net)); }

}  // namespace gridflow
