#include "godunov.hpp"

#include <algorithm>
#include <cmath>

#include "text_io.hpp"

namespace gridflow {

namespace {

constexpr double kRoundOff = 1e-12;

double checked_density(double rho, const FdParams& fd) {
  const double tol = kRoundOff * fd.rho_max;
  if (!(rho >= -tol && rho <= fd.rho_max + tol))
    throw NumericalError("density " + format_double(rho) + " outside [0, " + format_double(fd.rho_max) + "]");
  return std::clamp(rho, 0.0, fd.rho_max);
}

}  // namespace

void validate(const FdParams& fd) {
  if (!(fd.v_max > 0.0) || !std::isfinite(fd.v_max)) throw ValidationError("v_max must be positive");
  if (!(fd.rho_max > 0.0) || !std::isfinite(fd.rho_max)) throw ValidationError("rho_max must be positive");
}

double demand(double rho, const FdParams& fd) {
  rho = checked_density(rho, fd);
  return rho <= fd.rho_c() ? fd.flux(rho) : fd.phi_max();
}

double supply(double rho, const FdParams& fd) {
  rho = checked_density(rho, fd);
  return rho <= fd.rho_c() ? fd.phi_max() : fd.flux(rho);
}

double interface_flux(double rho_left, const FdParams& fd_left, double rho_right, const FdParams& fd_right) {
  return std::min(demand(rho_left, fd_left), supply(rho_right, fd_right));
}

void validate(const LineState& s) {
  if (s.cells.empty()) throw ValidationError("line has no cells");
  double prev = -INFINITY;
  for (const auto& c : s.cells) {
    validate(c.fd);
    if (!(c.dxi > 0.0)) throw ValidationError("cell width must be positive");
    if (!(c.xi > prev)) throw ValidationError("cells must be ordered by increasing xi");
    prev = c.xi;
    checked_density(c.rho, c.fd);
  }
  if (!(s.inflow_demand >= 0.0)) throw ValidationError("inflow demand must be non-negative");
  if (const auto* c = std::get_if<SuppliedControl>(&s.outflow); c && !(c->supply >= 0.0))
    throw ValidationError("outflow supply must be non-negative");
}

double total_mass(const LineState& s) {
  double m = 0.0;
  for (const auto& c : s.cells) m += c.rho * c.dxi;
  return m;
}

double cfl_time_step(const LineState& s, double cfl) {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ValidationError("cfl must lie in (0, 1]");
  double min_dxi = INFINITY, max_v = 0.0;
  for (const auto& c : s.cells) {
    min_dxi = std::min(min_dxi, c.dxi);
    max_v = std::max(max_v, c.fd.v_max);
  }
  return cfl * min_dxi / max_v;
}

std::vector<double> compute_fluxes(const LineState& s) {
  const std::size_t n = s.cells.size();
  std::vector<double> f(n + 1);
  f[0] = std::min(s.inflow_demand, supply(s.cells[0].rho, s.cells[0].fd));
  for (std::size_t i = 1; i < n; ++i)
    f[i] = interface_flux(s.cells[i - 1].rho, s.cells[i - 1].fd, s.cells[i].rho, s.cells[i].fd);
  if (const auto* ctl = std::get_if<SuppliedControl>(&s.outflow)) {
    f[n] = std::min(demand(s.cells[n - 1].rho, s.cells[n - 1].fd), ctl->supply);
  } else {
    f[n] = s.ghost_flux.value_or(f[n - 1]);
  }
  return f;
}

void advance(LineState& s, double dt) {
  if (!(dt > 0.0)) throw ValidationError("time step must be positive");
  const double bound = cfl_time_step(s, 1.0);
  if (dt > bound * (1.0 + kRoundOff))
    throw NumericalError("time step " + format_double(dt) + " violates the CFL bound " + format_double(bound));
  s.fluxes = compute_fluxes(s);
  const std::size_t n = s.cells.size();
  for (std::size_t i = 0; i < n; ++i) {
    auto& c = s.cells[i];
    c.rho -= dt / c.dxi * (s.fluxes[i + 1] - s.fluxes[i]);
    const double tol = kRoundOff * c.fd.rho_max;
    if (!(c.rho >= -tol && c.rho <= c.fd.rho_max + tol))
      throw NumericalError("density left [0, rho_max] in cell " + std::to_string(i) + " at t = " +
                           format_double(s.time + dt) + " (conservation bug)");
  }
  if (std::holds_alternative<GhostCell>(s.outflow)) s.ghost_flux = s.fluxes[n - 1];
  s.time += dt;
}

LineState step(LineState s, double dt) {
  validate(s);
  advance(s, dt);
  return s;
}

void run_in_place(LineState& s, double horizon, const RunOptions& opts) {
  if (!(horizon >= 0.0)) throw ValidationError("horizon must be non-negative");
  if (opts.observe_interval < 0.0) throw ValidationError("observe interval must be non-negative");
  validate(s);
  const double dt = cfl_time_step(s, opts.cfl);
  const double t0 = s.time;
  const double t_end = t0 + horizon;
  if (opts.observer) opts.observer(s);
  if (horizon == 0.0) return;

  int stop_index = 0;
  for (;;) {
    ++stop_index;
    double stop = opts.observe_interval > 0.0 ? t0 + stop_index * opts.observe_interval : t_end;
    if (stop > t_end || t_end - stop < kRoundOff * horizon) stop = t_end;
    const double seg_start = s.time;
    const double remaining = stop - seg_start;
    const auto n = static_cast<long long>(std::ceil(remaining / dt - 1e-9));
    for (long long k = 0; k < n; ++k) {
      const double h = (k + 1 < n) ? dt : remaining - static_cast<double>(n - 1) * dt;
      if (h > 0.0) advance(s, std::min(h, dt));
    }
    s.time = stop;
    if (opts.observer && opts.observe_interval > 0.0) opts.observer(s);
    if (stop == t_end) break;
  }
  if (opts.observer && opts.observe_interval == 0.0) opts.observer(s);
}

LineState run(LineState s, double horizon, const RunOptions& opts) {
  run_in_place(s, horizon, opts);
  return s;
}

std::vector<Cell> resample_path(const EtaPath& path, int n_cells) {
  if (n_cells < 1) throw ValidationError("n_cells must be at least 1");
  if (!path.has_line_data()) throw ValidationError("path has no rescaled line data");
  const double lo = path.xi_min(), hi = path.xi_max();
  if (!(hi > lo)) throw ValidationError("path has zero xi extent");
  const double dxi = (hi - lo) / n_cells;
  std::vector<Cell> cells(n_cells);
  std::size_t q = 0;
  for (int i = 0; i < n_cells; ++i) {
    const double xc = lo + (i + 0.5) * dxi;
    while (q + 2 < path.xi.size() && path.xi[q + 1] < xc) ++q;
    const double span = path.xi[q + 1] - path.xi[q];
    const double t = span > 0.0 ? std::clamp((xc - path.xi[q]) / span, 0.0, 1.0) : 0.0;
    auto lerp = [&](const std::vector<double>& v) { return v[q] + t * (v[q + 1] - v[q]); };
    cells[i].xi = xc;
    cells[i].dxi = dxi;
    cells[i].fd = {lerp(path.v_max_bar), lerp(path.rho_max_bar)};
    cells[i].rho = 0.0;
  }
  return cells;
}

}  // namespace gridflow
