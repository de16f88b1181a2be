#pragma once

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "transform.hpp"

namespace gridflow {

/// Greenshields fundamental diagram Phi(rho) = v_max rho (1 - rho / rho_max).
struct FdParams {
  double v_max = 1.0;
  double rho_max = 1.0;

  double rho_c() const { return rho_max / 2.0; }
  double phi_max() const { return v_max * rho_max / 4.0; }
  double flux(double rho) const { return v_max * rho * (1.0 - rho / rho_max); }
  /// d Phi / d rho
  double wave_speed(double rho) const { return v_max * (1.0 - 2.0 * rho / rho_max); }

  friend bool operator==(const FdParams&, const FdParams&) = default;
};

void validate(const FdParams& fd);

/// Nondecreasing envelope of the diagram: Phi below critical, capacity above.
double demand(double rho, const FdParams& fd);
/// Nonincreasing envelope: capacity below critical, Phi above.
double supply(double rho, const FdParams& fd);
/// Godunov flux between two cells with possibly different diagrams.
double interface_flux(double rho_left, const FdParams& fd_left, double rho_right, const FdParams& fd_right);

struct Cell {
  double xi = 0.0;   // center
  double dxi = 0.0;  // width
  FdParams fd;
  double rho = 0.0;
};

/// Outflow copies the flux of the last interior interface from the previous step.
struct GhostCell {};
/// Outflow limited by a prescribed downstream supply.
struct SuppliedControl {
  double supply = 0.0;
};
using OutflowSpec = std::variant<GhostCell, SuppliedControl>;

struct LineState {
  double eta = 0.0;
  double d_eta = 0.0;  // quadrature weight across lines
  std::vector<Cell> cells;
  double time = 0.0;
  double inflow_demand = 0.0;
  OutflowSpec outflow = GhostCell{};
  /// Ghost-cell memory; unset until the first step, which uses the flux of
  /// the initial condition.
  std::optional<double> ghost_flux;
  /// Interface fluxes of the most recent step, size cells + 1 (inflow first).
  std::vector<double> fluxes;

  double xi_min() const { return cells.front().xi - 0.5 * cells.front().dxi; }
  double xi_max() const { return cells.back().xi + 0.5 * cells.back().dxi; }
};

void validate(const LineState& s);

double total_mass(const LineState& s);

/// Largest stable step, cfl * min(dxi) / max(v_max).
double cfl_time_step(const LineState& s, double cfl);

/// Interface fluxes for the current densities (does not modify the state).
std::vector<double> compute_fluxes(const LineState& s);

/// One conservative Godunov update in place. Throws NumericalError if dt
/// breaks the CFL bound or a density leaves [0, rho_max].
void advance(LineState& s, double dt);
LineState step(LineState s, double dt);

using Observer = std::function<void(const LineState&)>;

struct RunOptions {
  double cfl = 0.9;
  /// Observer cadence in seconds; 0 reports only the initial and final states.
  double observe_interval = 0.0;
  Observer observer;
};

/// Advances by `horizon` seconds. Steps are shortened to land exactly on every
/// observation time and on the horizon.
LineState run(LineState s, double horizon, const RunOptions& opts = {});
void run_in_place(LineState& s, double horizon, const RunOptions& opts = {});

/// Resamples an atlas path onto `n_cells` cells of equal width in xi.
std::vector<Cell> resample_path(const EtaPath& path, int n_cells);

}  // namespace gridflow
