#pragma once

#include <span>
#include <string>
#include <vector>

#include "godunov.hpp"

namespace gridflow {

struct Bottleneck {
  std::size_t index = 0;  // cell of the strongest bottleneck
  double xi_star = 0.0;
  double capacity = 0.0;
};

/// Left-most cell of minimal capacity.
Bottleneck find_bottleneck(std::span<const Cell> cells);

/// min(d_in, smallest capacity along the line, s_out).
double steady_state_flow(std::span<const Cell> cells, double d_in, double s_out);

/// Desired state of one line: flow phi_d = capacity(xi*) - epsilon carried on
/// the congested branch of every cell's diagram.
struct ControlEntry {
  double eta = 0.0;
  double d_eta = 0.0;
  Bottleneck bottleneck;
  double epsilon = 0.0;
  double phi_d = 0.0;
  double u = 0.0;  // outflow supply that holds the desired state
  std::vector<double> rho_d;
};

struct ControlPlan {
  std::vector<ControlEntry> entries;
};

/// Congested-branch inverse of the diagram: the rho > rho_c with Phi(rho) = phi.
double congested_density(double phi, const FdParams& fd);

ControlEntry desired_density_profile(std::span<const Cell> cells, double epsilon);
ControlEntry desired_density_profile(const LineState& line, double epsilon);

/// Per-line outflow supply u(eta) = phi_d(eta).
std::vector<double> control_law(const ControlPlan& plan);

/// Installs SuppliedControl{u} as the outflow of `line`.
void apply_control(LineState& line, const ControlEntry& entry);

/// sqrt(v_max(xi*) epsilon): the reference decay rate of the weighted error functional.
double nu_bound(std::span<const Cell> cells, double epsilon);

/// |Phi'(rho_d)| at the bottleneck, 2 sqrt(v_max epsilon / rho_max), the
/// congested wave speed that carries the control upstream past xi*.
double bottleneck_wave_speed(std::span<const Cell> cells, double epsilon);

std::string serialize_control_plan(const ControlPlan& plan);

}  // namespace gridflow
