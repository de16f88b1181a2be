#include <doctest.h>

#include <filesystem>

#include "errors.hpp"
#include "network.hpp"
#include "text_io.hpp"

using namespace gridflow;

namespace {

ManhattanOptions small(int rows, int cols, double side, double noise, std::uint64_t seed) {
  ManhattanOptions o;
  o.rows = rows;
  o.cols = cols;
  o.side = side;
  o.noise_sigma = noise;
  o.seed = seed;
  o.default_speed = 10.0;
  return o;
}

std::string tmp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "gridflow_unit";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

}  // namespace

TEST_CASE("2x2 grid without noise sits on the corners") {
  const auto net = generate_manhattan_grid(small(2, 2, 100.0, 0.0, 0));
  REQUIRE(net.nodes.size() == 4);
  REQUIRE(net.roads.size() == 4);
  CHECK(net.node(0).position == Vec2{0, 0});
  CHECK(net.node(1).position == Vec2{100, 0});
  CHECK(net.node(2).position == Vec2{0, 100});
  CHECK(net.node(3).position == Vec2{100, 100});
  for (const auto& r : net.roads) {
    CHECK(r.length == doctest::Approx(100.0));
    CHECK(r.speed_limit == 10.0);
  }
}

TEST_CASE("generation is deterministic under a seed") {
  const auto a = generate_manhattan_grid(small(3, 3, 300.0, 5.0, 7));
  const auto b = generate_manhattan_grid(small(3, 3, 300.0, 5.0, 7));
  CHECK(a == b);
  CHECK(serialize_network(a) == serialize_network(b));
  const auto c = generate_manhattan_grid(small(3, 3, 300.0, 5.0, 8));
  CHECK_FALSE(a == c);
}

TEST_CASE("generator rejects bad arguments") {
  CHECK_THROWS_AS(generate_manhattan_grid(small(1, 3, 100.0, 0.0, 0)), ValidationError);
  CHECK_THROWS_AS(generate_manhattan_grid(small(3, 1, 100.0, 0.0, 0)), ValidationError);
  auto o = small(3, 3, 300.0, 0.0, 0);
  o.fast_roads = {parse_road_selector("row:5")};
  CHECK_THROWS_WITH_AS(generate_manhattan_grid(o), doctest::Contains("row:5"), ValidationError);
  o.fast_roads = {parse_road_selector("road:9999")};
  CHECK_THROWS_WITH_AS(generate_manhattan_grid(o), doctest::Contains("road:9999"), ValidationError);
  CHECK_THROWS_AS(parse_road_selector("diag:1"), ValidationError);
  CHECK_THROWS_AS(parse_road_selector("row"), ValidationError);
}

TEST_CASE("benchmark grid keeps the north-east orientation and the river") {
  const auto o = benchmark_grid_options();
  const auto net = generate_manhattan_grid(o);
  CHECK(net.nodes.size() == 100);
  int fast = 0, north_across_river = 0;
  for (const auto& r : net.roads) {
    const Vec2 d = net.road_end(r) - net.road_start(r);
    const bool east = std::abs(d.x) > std::abs(d.y);
    CHECK((east ? d.x : d.y) > 0.0);
    if (r.speed_limit > kmh_to_ms(40.0)) ++fast;
    const int j_from = r.from_node / o.cols, j_to = r.to_node / o.cols;
    if (!east && j_from == o.river->row && j_to == o.river->row + 1) ++north_across_river;
  }
  CHECK(north_across_river == static_cast<int>(o.river->bridge_columns.size()));
  CHECK(fast > 0);
  // 9 east roads per row, 9 north roads per column minus the cut ones
  CHECK(net.roads.size() == static_cast<std::size_t>(10 * 9 + 10 * 9 - (10 - 2)));
  for (const auto& n : net.nodes) CHECK(net.bbox.contains(n.position));
}

TEST_CASE("boundary nodes stay on the boundary") {
  const auto o = benchmark_grid_options();
  const auto net = generate_manhattan_grid(o);
  for (const auto& n : net.nodes) {
    const int i = n.id % o.cols, j = n.id / o.cols;
    if (i == 0) CHECK(n.position.x == 0.0);
    if (i == o.cols - 1) CHECK(n.position.x == o.side);
    if (j == 0) CHECK(n.position.y == 0.0);
    if (j == o.rows - 1) CHECK(n.position.y == o.side);
  }
}

TEST_CASE("network files round-trip") {
  const auto net = generate_manhattan_grid(benchmark_grid_options());
  const auto path = tmp_path("bench_net.json");
  save_network(net, path);
  const auto back = load_network(path);
  CHECK(back == net);
  const std::string first = read_text_file(path);
  save_network(back, path);
  CHECK(read_text_file(path) == first);
}

TEST_CASE("four node file loads") {
  const std::string text = R"({"format": "gridflow-network", "version": 1,
    "units": {"length": "m", "speed": "km/h"},
    "bbox": {"xmin": 0, "ymin": 0, "xmax": 10, "ymax": 10},
    "nodes": [{"id": 0, "x": 0, "y": 0}, {"id": 1, "x": 10, "y": 0},
              {"id": 2, "x": 0, "y": 10}, {"id": 3, "x": 10, "y": 10}],
    "roads": [{"id": 0, "from": 0, "to": 1, "speed_limit": 36, "lanes": 2},
              {"id": 1, "from": 2, "to": 3, "speed_limit": 36, "lanes": 1}]})";
  const auto net = parse_network(text, "four.json");
  CHECK(net.nodes.size() == 4);
  CHECK(net.roads.size() == 2);
  CHECK(net.roads[0].speed_limit == doctest::Approx(10.0));
  CHECK(net.roads[0].lanes == 2);
  CHECK(net.roads[0].length == 10.0);
  CHECK(parse_network(serialize_network(net)) == net);
}

TEST_CASE("network file errors name the culprit") {
  const std::string head = R"({"format": "gridflow-network", "version": 1,
    "bbox": {"xmin": 0, "ymin": 0, "xmax": 10, "ymax": 10},
    "nodes": [{"id": 0, "x": 0, "y": 0}, {"id": 1, "x": 10, "y": 0}],)";
  CHECK_THROWS_WITH_AS(parse_network(head + R"("roads": [{"id": 42, "from": 0, "to": 7, "speed_limit": 5, "lanes": 1}]})"),
                       doctest::Contains("road 42"), ValidationError);
  CHECK_THROWS_WITH_AS(parse_network(head + R"("roads": [{"id": 3, "from": 0, "to": 1, "lanes": 1}]})"),
                       doctest::Contains("speed_limit"), ValidationError);
  CHECK_THROWS_WITH_AS(parse_network(head + R"("roads": [{"id": 3, "from": 0, "to": 1, "speed_limit": -1, "lanes": 1}]})"),
                       doctest::Contains("road 3"), ValidationError);
  CHECK_THROWS_WITH_AS(parse_network("{\n  \"format\": \"gridflow-network\",\n  oops\n}", "bad.json"),
                       doctest::Contains("bad.json:3:"), ValidationError);
  CHECK_THROWS_AS(load_network(tmp_path("does_not_exist.json")), IoError);
}

TEST_CASE("a network without roads is not written") {
  RoadNetwork net;
  net.bbox = {0, 0, 1, 1};
  net.nodes = {{0, {0, 0}}};
  const auto path = tmp_path("empty_roads.json");
  std::filesystem::remove(path);
  CHECK_THROWS_AS(save_network(net, path), ValidationError);
  CHECK_FALSE(std::filesystem::exists(path));
}
