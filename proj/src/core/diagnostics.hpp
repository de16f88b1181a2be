#pragma once

#include <span>
#include <string>
#include <vector>

#include "control.hpp"

namespace gridflow {

/// rho - rho_d per cell.
std::vector<double> density_error(const LineState& state, const ControlEntry& entry);
std::vector<double> density_error(std::span<const double> rho, std::span<const double> rho_d);

/// One line's contribution to the (xi, eta) error integral.
struct LineError {
  std::span<const double> error;
  std::span<const double> dxi;
  double d_eta = 0.0;
};

/// Midpoint-rule L2 norm over all lines: sqrt(sum d_eta sum dxi err^2).
double l2_norm(std::span<const LineError> lines);

/// The exponential weight uses xi' = (xi - xi_first) / length_scale, measured
/// from the first cell center. `shift = false` uses raw xi (in units of
/// length_scale) and is only usable on small domains.
struct LyapunovOptions {
  bool shift = true;
  double length_scale = 0.0;  // 0 selects the line extent
};

/// 1/2 sum exp(xi') err^2 dxi.
double lyapunov(std::span<const Cell> cells, std::span<const double> error, const LyapunovOptions& opts = {});
double lyapunov(const LineState& state, const ControlEntry& entry, const LyapunovOptions& opts = {});

/// Least-squares slope of ln(values) against time over the tail window.
/// Values <= floor are dropped first (a converged run sits at round-off);
/// the window is the last `tail_fraction` of the remaining time span.
/// Returns NaN when fewer than two samples are left.
double fit_log_slope(std::span<const double> times, std::span<const double> values, double tail_fraction = 0.5,
                     double floor = 0.0);

/// Sign test on the tail: V never grows by more than `tol` between samples and
/// ends below its value at the window start (or at or below `tol`).
bool decreasing_tail(std::span<const double> values, double tail_fraction, double tol);

/// Stored densities of one line at common observation times.
struct LineSeries {
  double eta = 0.0;
  double d_eta = 0.0;
  std::vector<Cell> cells;  // geometry and diagram; densities ignored
  std::vector<double> times;
  std::vector<std::vector<double>> rho;
  std::vector<std::vector<double>> flux;  // interface fluxes, size cells + 1 (may be empty)
};

struct ConvergenceReport {
  std::vector<double> times;
  std::vector<double> l2_global;
  std::vector<std::vector<double>> l2_per_eta;
  std::vector<std::vector<double>> lyapunov_per_eta;
  std::vector<double> eta;
  std::vector<double> nu_per_eta;
  std::vector<double> wave_speed_per_eta;
  std::vector<double> decay_slope_per_eta;
  std::vector<bool> lyapunov_decreasing;
};

/// Round-off floor for the fits and sign tests, relative to each line's largest V.
inline constexpr double kLyapunovFloor = 1e-16;

ConvergenceReport decay_report(std::span<const LineSeries> series, const ControlPlan& plan,
                               const LyapunovOptions& lyap = {}, double tail_fraction = 0.5);

/// Columns t, l2_global, then one l2 column per line when `per_eta` is set.
std::string serialize_convergence_csv(const ConvergenceReport& r, bool per_eta = false);
/// One row per line: eta, nu, fitted slope of ln V, bottleneck wave speed, tail sign test.
std::string serialize_decay_csv(const ConvergenceReport& r);

}  // namespace gridflow
