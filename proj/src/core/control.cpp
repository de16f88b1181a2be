#include "control.hpp"

#include <cmath>
#include <sstream>

#include "text_io.hpp"

namespace gridflow {

Bottleneck find_bottleneck(std::span<const Cell> cells) {
  if (cells.empty()) throw ValidationError("bottleneck search needs at least one cell");
  Bottleneck b{0, cells[0].xi, cells[0].fd.phi_max()};
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const double cap = cells[i].fd.phi_max();
    if (cap < b.capacity) b = {i, cells[i].xi, cap};  // strict: ties keep the left-most
  }
  return b;
}

double steady_state_flow(std::span<const Cell> cells, double d_in, double s_out) {
  if (!(d_in >= 0.0) || !(s_out >= 0.0)) throw ValidationError("boundary flows must be non-negative");
  return std::min({d_in, find_bottleneck(cells).capacity, s_out});
}

double congested_density(double phi, const FdParams& fd) {
  const double disc = fd.rho_max * fd.rho_max / 4.0 - fd.rho_max / fd.v_max * phi;
  if (disc < 0.0)
    throw NumericalError("flow " + format_double(phi) + " exceeds the cell capacity " + format_double(fd.phi_max()));
  return fd.rho_max / 2.0 + std::sqrt(disc);
}

ControlEntry desired_density_profile(std::span<const Cell> cells, double epsilon) {
  ControlEntry e;
  e.bottleneck = find_bottleneck(cells);
  if (!(epsilon > 0.0) || !(epsilon < e.bottleneck.capacity))
    throw ValidationError("epsilon " + format_double(epsilon) + " must lie in (0, " +
                          format_double(e.bottleneck.capacity) + ")");
  e.epsilon = epsilon;
  e.phi_d = e.bottleneck.capacity - epsilon;
  e.u = e.phi_d;
  e.rho_d.reserve(cells.size());
  for (const auto& c : cells) e.rho_d.push_back(congested_density(e.phi_d, c.fd));
  return e;
}

ControlEntry desired_density_profile(const LineState& line, double epsilon) {
  ControlEntry e = desired_density_profile(std::span<const Cell>(line.cells), epsilon);
  e.eta = line.eta;
  e.d_eta = line.d_eta;
  return e;
}

std::vector<double> control_law(const ControlPlan& plan) {
  std::vector<double> u;
  u.reserve(plan.entries.size());
  for (const auto& e : plan.entries) u.push_back(e.u);
  return u;
}

void apply_control(LineState& line, const ControlEntry& entry) {
  line.outflow = SuppliedControl{entry.u};
  line.ghost_flux.reset();
}

double nu_bound(std::span<const Cell> cells, double epsilon) {
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  const Bottleneck b = find_bottleneck(cells);
  return std::sqrt(cells[b.index].fd.v_max * epsilon);
}

double bottleneck_wave_speed(std::span<const Cell> cells, double epsilon) {
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  const FdParams& fd = cells[find_bottleneck(cells).index].fd;
  return 2.0 * std::sqrt(fd.v_max * epsilon / fd.rho_max);
}

std::string serialize_control_plan(const ControlPlan& plan) {
  std::ostringstream out;
  out << "# gridflow control plan v1\n";
  out << "# eta xi_star phi_d u epsilon bottleneck_cell\n";
  for (const auto& e : plan.entries) {
    out << format_double(e.eta) << ' ' << format_double(e.bottleneck.xi_star) << ' ' << format_double(e.phi_d) << ' '
        << format_double(e.u) << ' ' << format_double(e.epsilon) << ' ' << e.bottleneck.index << "\n";
  }
  return out.str();
}

}  // namespace gridflow
