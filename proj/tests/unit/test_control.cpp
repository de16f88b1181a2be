#include <doctest.h>

#include <cmath>

#include "control.hpp"
#include "errors.hpp"
#include "oracles/oracle_values.hpp"

using namespace gridflow;

namespace {

// capacities v rho_max / 4
std::vector<Cell> cells_with_capacity(const std::vector<double>& caps) {
  std::vector<Cell> c;
  for (std::size_t i = 0; i < caps.size(); ++i) c.push_back({i + 0.5, 1.0, {4.0 * caps[i], 1.0}, 0.0});
  return c;
}

const FdParams unit{1.0, 1.0};

}  // namespace

TEST_CASE("bottleneck is the left-most minimum") {
  auto b = find_bottleneck(cells_with_capacity({4, 2, 3, 2, 5}));
  CHECK(b.index == 1);
  CHECK(b.xi_star == 1.5);
  CHECK(b.capacity == doctest::Approx(2.0));
  CHECK(find_bottleneck(cells_with_capacity({1, 1, 1})).index == 0);
  CHECK_THROWS_AS(find_bottleneck(std::vector<Cell>{}), ValidationError);
}

TEST_CASE("steady state flow is the smallest of the three limits") {
  const auto c = cells_with_capacity({4, 2, 3});
  CHECK(steady_state_flow(c, 10.0, 10.0) == doctest::Approx(2.0));
  CHECK(steady_state_flow(c, 1.0, 10.0) == 1.0);
  CHECK(steady_state_flow(c, 10.0, 0.5) == 0.5);
  CHECK_THROWS_AS(steady_state_flow(c, -1.0, 1.0), ValidationError);
}

TEST_CASE("congested inverse of the diagram") {
  CHECK(congested_density(0.24, unit) == doctest::Approx(oracle::kUnitRhoD).epsilon(1e-14));
  CHECK(congested_density(0.25, unit) == doctest::Approx(0.5));
  CHECK(congested_density(0.0, unit) == doctest::Approx(1.0));
  CHECK_THROWS_AS(congested_density(0.3, unit), NumericalError);
}

TEST_CASE("desired state on a uniform line") {
  std::vector<Cell> c(8, Cell{0.0, 0.125, unit, 0.0});
  for (int i = 0; i < 8; ++i) c[i].xi = 0.0625 + 0.125 * i;
  const auto e = desired_density_profile(c, 0.01);
  CHECK(e.phi_d == doctest::Approx(0.24));
  CHECK(e.u == e.phi_d);
  REQUIRE(e.rho_d.size() == 8);
  for (double r : e.rho_d) {
    CHECK(r == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(r > unit.rho_c());
    CHECK(unit.flux(r) == doctest::Approx(e.phi_d).epsilon(1e-14));
  }
  CHECK(nu_bound(c, 0.01) == doctest::Approx(0.1));
  CHECK(bottleneck_wave_speed(c, 0.01) == doctest::Approx(0.2));
  CHECK_THROWS_AS(desired_density_profile(c, 0.0), ValidationError);
  CHECK_THROWS_AS(desired_density_profile(c, -1.0), ValidationError);
  CHECK_THROWS_AS(desired_density_profile(c, 0.25), ValidationError);
  CHECK_THROWS_AS(nu_bound(c, 0.0), ValidationError);
}

TEST_CASE("desired state follows a varying diagram") {
  auto c = cells_with_capacity({4, 2, 3, 2, 5});
  const double eps = 0.1;
  const auto e = desired_density_profile(c, eps);
  CHECK(e.phi_d == doctest::Approx(1.9));
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(e.rho_d[i] >= c[i].fd.rho_c());
    CHECK(c[i].fd.flux(e.rho_d[i]) == doctest::Approx(1.9));
  }
  // applying the control makes the desired state a fixed point
  LineState s;
  s.cells = c;
  for (std::size_t i = 0; i < c.size(); ++i) s.cells[i].rho = e.rho_d[i];
  s.inflow_demand = 10.0;
  apply_control(s, e);
  const auto before = s;
  s = run(s, 5.0);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(s.cells[i].rho == doctest::Approx(before.cells[i].rho).epsilon(1e-12));
}

TEST_CASE("benchmark bottleneck identities") {
  Cell b{0.0, 1.0, {oracle::kBenchVmax, oracle::kBenchRhoMax}, 0.0};
  const std::vector<Cell> c{b};
  const auto e = desired_density_profile(c, oracle::kBenchEps);
  CHECK(e.rho_d[0] == doctest::Approx(oracle::kBenchRhoD).epsilon(1e-12));
  CHECK(nu_bound(c, oracle::kBenchEps) == doctest::Approx(oracle::kBenchNu).epsilon(1e-14));
  CHECK(bottleneck_wave_speed(c, oracle::kBenchEps) == doctest::Approx(oracle::kBenchWaveSpeed).epsilon(1e-12));
}

TEST_CASE("control law lists one supply per line") {
  ControlPlan p;
  p.entries.resize(3);
  for (int k = 0; k < 3; ++k) p.entries[k].u = 0.1 * k;
  const auto u = control_law(p);
  CHECK(u == std::vector<double>{0.0, 0.1, 0.2});
  CHECK(serialize_control_plan(p).find('\n') != std::string::npos);
}
