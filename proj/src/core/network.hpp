#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace gridflow {

struct Node {
  int id = 0;
  Vec2 position;  // meters
  friend bool operator==(const Node&, const Node&) = default;
};

/// Unidirectional road segment; traffic flows from `from_node` to `to_node`.
struct Road {
  int id = 0;
  int from_node = 0;
  int to_node = 0;
  double speed_limit = 0.0;  // m/s
  int lanes = 1;
  double length = 0.0;  // meters, derived from endpoints
  friend bool operator==(const Road&, const Road&) = default;
};

struct RoadNetwork {
  std::vector<Node> nodes;
  std::vector<Road> roads;
  BoundingBox bbox;

  const Node& node(int id) const;
  Vec2 road_start(const Road& r) const { return node(r.from_node).position; }
  Vec2 road_end(const Road& r) const { return node(r.to_node).position; }

  friend bool operator==(const RoadNetwork&, const RoadNetwork&) = default;
};

/// Throws ValidationError naming the offending node or road.
void validate(const RoadNetwork& net);

/// Recomputes every road length from its endpoints.
void update_road_lengths(RoadNetwork& net);

inline constexpr double kmh_to_ms(double kmh) { return kmh / 3.6; }

struct RoadSelector {
  enum class Kind { Row, Column, Road };
  Kind kind = Kind::Row;
  int index = 0;
  friend bool operator==(const RoadSelector&, const RoadSelector&) = default;
};

/// Parses "row:J", "col:I" or "road:K".
RoadSelector parse_road_selector(const std::string& text);

/// Removes the northbound roads between `row` and `row + 1`, except at the
/// bridge columns.
struct RiverSpec {
  int row = 0;
  std::vector<int> bridge_columns;
};

struct ManhattanOptions {
  int rows = 10;
  int cols = 10;
  double side = 1000.0;        // meters
  double noise_sigma = 20.0;   // meters
  std::uint64_t seed = 1;
  double default_speed = kmh_to_ms(30.0);
  std::vector<RoadSelector> fast_roads;
  double fast_speed = kmh_to_ms(50.0);
  int lanes = 1;
  std::optional<RiverSpec> river;
};

/// North/East oriented grid on [0, side]^2. Interior nodes receive isotropic
/// Gaussian noise; boundary nodes only move along their boundary edge so the
/// domain stays the square.
RoadNetwork generate_manhattan_grid(const ManhattanOptions& opts);

/// The 10x10, 1 km^2 benchmark with a river band and two bridges.
ManhattanOptions benchmark_grid_options();

RoadNetwork load_network(const std::string& path);
RoadNetwork parse_network(const std::string& text, const std::string& source_name = "<string>");
void save_network(const RoadNetwork& net, const std::string& path);
std::string serialize_network(const RoadNetwork& net);

}  // namespace gridflow
