// Acceptance checks: one PASS/FAIL line per criterion, details indented below.
// Usage: acceptance [criterion ...]   (no arguments runs all eight)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>

#include "errors.hpp"
#include "grid.hpp"
#include "pipeline.hpp"
#include "riemann.hpp"
#include "temp_dir.hpp"

using namespace gridflow;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string summary;
};

void detail(const char* fmt, auto... args) {
  std::printf("    ");
  std::printf(fmt, args...);
  std::printf("\n");
}

// ---- benchmark runs, shared between criteria ---------------------------------

struct BenchmarkRun {
  TransformResult transform;
  std::vector<PreparedLine> lines;
  ReportResult report;
  double seconds = 0.0;
};

const BenchmarkRun& benchmark(OutflowMode mode) {
  static std::map<OutflowMode, BenchmarkRun> cache;
  static std::map<OutflowMode, TempDir> dirs;
  if (auto it = cache.find(mode); it != cache.end()) return it->second;
  auto& dir = dirs.try_emplace(mode, mode == OutflowMode::Ghost ? "acc_ghost" : "acc_controlled").first->second;
  Scenario s = benchmark_scenario();
  s.output_dir = dir.str();
  s.sim.outflow = mode;
  BenchmarkRun r;
  const auto t0 = Clock::now();
  run_stage(s, Stage::GenerateGrid);
  run_stage(s, Stage::Reconstruct);
  r.transform = stage_transform(s);
  stage_simulate(s);
  r.report = stage_report(s);
  r.seconds = seconds_since(t0);
  r.lines = build_lines(r.transform.atlas, s.sim);
  return cache.emplace(mode, std::move(r)).first->second;
}

// ---- criteria -------------------------------------------------------------------

Outcome riemann_oracle() {
  const auto t0 = Clock::now();
  struct Case {
    const char* name;
    double rho_l, rho_r, x0;
  };
  // The shock sits inside a cell on every grid; on an interface it is exact.
  const Case cases[] = {{"dam break", 1.0, 0.0, 1.0}, {"shock", 0.2, 0.8, 1.0 + 1.0 / 300.0}};
  bool ok = true;
  std::string summary;
  for (const auto& c : cases) {
    std::vector<double> dx, err;
    for (int n : {200, 400, 800}) {
      dx.push_back(2.0 / n);
      err.push_back(riemann::run_error(c.rho_l, c.rho_r, c.x0, n));
    }
    const double p = riemann::observed_order(dx, err);
    const bool decreasing = err[1] < err[0] && err[2] < err[1];
    ok = ok && decreasing && p >= 0.6 && p <= 1.1;
    detail("%s: L1 %.4e %.4e %.4e, observed order %.3f", c.name, err[0], err[1], err[2], p);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%s order %.3f", summary.empty() ? "" : ", ", c.name, p);
    summary += buf;
  }
  const double t = seconds_since(t0);
  ok = ok && t < 5.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, ", %.2f s", t);
  return {ok, summary + buf};
}

Outcome conservation() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  const int trials = 40;
  for (int trial = 0; trial < trials; ++trial) {
    const int n = 20 + static_cast<int>(180 * u(rng));
    const double scale = trial % 2 ? 1.0 : 2e-3;  // unit and benchmark-like densities
    LineState s;
    s.cells.resize(n);
    for (int i = 0; i < n; ++i) {
      const FdParams fd{1.0 + 9.0 * u(rng), scale * (0.5 + u(rng))};
      const double dxi = 1.0 + 9.0 * u(rng);
      s.cells[i] = {i == 0 ? 0.0 : s.cells[i - 1].xi + 0.5 * (s.cells[i - 1].dxi + dxi), dxi, fd, u(rng) * fd.rho_max};
    }
    s.inflow_demand = u(rng) * s.cells.front().fd.phi_max();
    if (trial % 3) s.outflow = SuppliedControl{u(rng) * s.cells.back().fd.phi_max()};
    const double dt = cfl_time_step(s, 0.9);
    const double m0 = total_mass(s);
    double boundary = 0.0, through = 0.0;
    for (int k = 0; k < 1000; ++k) {
      advance(s, dt);
      boundary += dt * (s.fluxes.front() - s.fluxes.back());
      through += dt * (s.fluxes.front() + s.fluxes.back());
    }
    const double ref = std::max({m0, total_mass(s), through});
    worst = std::max(worst, std::abs(total_mass(s) - m0 - boundary) / ref);
  }
  detail("%d random lines, 1000 steps each, ghost and supplied outflow", trials);
  char buf[64];
  std::snprintf(buf, sizeof buf, "max relative mass defect %.2e (bound 1e-10)", worst);
  return {worst < 1e-10, buf};
}

Outcome transformation_identity() {
  const double side = 1000.0;
  const auto g = make_grid({0, 0, side, side}, 10.0);
  const DirectionField theta(g, std::vector<double>(g.size(), 0.0));
  const auto sc = solve_scaling_fields(theta);
  double scale_dev = 0.0;
  for (double a : sc.alpha.values) scale_dev = std::max(scale_dev, std::abs(a - 1.0));
  for (double b : sc.beta_scale.values) scale_dev = std::max(scale_dev, std::abs(b - 1.0));
  TraceOptions to;
  to.n_paths = 100;
  const auto atlas = trace_eta_paths(theta, sc, to);
  double dxi = 0.0, deta = 0.0;
  for (const auto& p : atlas.paths)
    for (std::size_t j = 0; j < p.points.size(); ++j) {
      dxi = std::max(dxi, std::abs(p.xi[j] - p.points[j].x) / side);
      deta = std::max(deta, std::abs(p.eta - p.points[j].y) / side);
    }
  detail("max |alpha - 1|, |beta - 1| = %.3e over %zu cells", scale_dev, g.size());
  detail("%zu paths, max |xi - x| / L = %.3e, max |eta - y| / L = %.3e", atlas.paths.size(), dxi, deta);
  const bool ok = scale_dev <= 1e-12 && dxi <= 1e-6 && deta <= 1e-6 && atlas.paths.size() == 100;
  char buf[160];
  std::snprintf(buf, sizeof buf, "scaling deviation %.1e, xi %.1e, eta %.1e", scale_dev, dxi, deta);
  return {ok, buf};
}

Outcome integrability() {
  const auto& b = benchmark(OutflowMode::Controlled);
  const auto& c = b.transform.chart;
  detail("transport residual alpha %.4f, beta %.4f", b.transform.transport.alpha_relative,
         b.transform.transport.beta_relative);
  char buf[160];
  std::snprintf(buf, sizeof buf, "mixed-partial residual xi %.4f, eta %.4f (bound 0.01)", c.xi_relative,
                c.eta_relative);
  return {c.xi_relative < 1e-2 && c.eta_relative < 1e-2, buf};
}

Outcome desired_state() {
  const auto& b = benchmark(OutflowMode::Controlled);
  double flux_dev = 0.0, min_margin = INFINITY, offset_err = 0.0, corrected_err = 0.0, ratio_lo = INFINITY,
         ratio_hi = 0.0;
  for (const auto& l : b.lines) {
    const auto& e = l.entry;
    const auto& cells = l.state.cells;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto& fd = cells[i].fd;
      flux_dev = std::max(flux_dev, std::abs(fd.flux(e.rho_d[i]) - e.phi_d) / fd.phi_max());
      min_margin = std::min(min_margin, (e.rho_d[i] - fd.rho_c()) / fd.rho_c());
    }
    const auto& fd = cells[e.bottleneck.index].fd;
    const double offset = e.rho_d[e.bottleneck.index] - fd.rho_max / 2.0;
    const double stated = std::sqrt(e.epsilon / fd.v_max);
    const double corrected = std::sqrt(e.epsilon * fd.rho_max / fd.v_max);
    offset_err = std::max(offset_err, std::abs(offset - stated) / stated);
    corrected_err = std::max(corrected_err, std::abs(offset - corrected) / corrected);
    ratio_lo = std::min(ratio_lo, offset / stated);
    ratio_hi = std::max(ratio_hi, offset / stated);
  }
  detail("max |Phi(rho_d) - phi_d| / phi_max = %.3e", flux_dev);
  detail("min (rho_d - rho_c) / rho_c = %.3e", min_margin);
  detail("rho_d(xi*) - rho_max/2 vs sqrt(eps / v_max): max relative error %.4e (offset / formula in [%.4f, %.4f])",
         offset_err, ratio_lo, ratio_hi);
  detail("rho_d(xi*) - rho_max/2 vs sqrt(eps rho_max / v_max): max relative error %.3e", corrected_err);
  const bool ok = flux_dev <= 1e-12 && min_margin > 0.0 && offset_err <= 1e-9;
  char buf[200];
  std::snprintf(buf, sizeof buf, "flux %.1e, rho_d > rho_c %s, bottleneck offset error %.3e (bound 1e-9)",
                flux_dev, min_margin > 0.0 ? "yes" : "no", offset_err);
  return {ok, buf};
}

Outcome controlled_convergence() {
  const auto& b = benchmark(OutflowMode::Controlled);
  const auto& s = b.report.summary;
  detail("%zu lines x %d cells, horizon %.0f s, pipeline %.2f s", s.lines, benchmark_scenario().sim.n_cells,
         b.report.report.times.back(), b.seconds);
  detail("L2 %.4e -> %.4e (ratio %.3e), tail monotone %s", s.l2_initial, s.l2_final, s.l2_ratio,
         s.l2_tail_monotone ? "yes" : "no");
  const auto& t = b.report.report.times;
  const auto& l2 = b.report.report.l2_global;
  for (std::size_t k = 0; k < t.size(); ++k)
    if (l2[k] < 0.01 * l2.front()) {
      detail("below 1%% of the initial error from t = %.0f s", t[k]);
      break;
    }
  detail("max outflow deviation %.3e (bound 1e-4), max flux spread %.3e (bound 1e-3)", s.max_outflow_deviation,
         s.max_flux_spread);
  const bool ok = s.l2_ratio < 0.01 && s.l2_tail_monotone && s.max_outflow_deviation <= 1e-4 &&
                  s.max_flux_spread <= 1e-3 && b.seconds <= 60.0;
  char buf[200];
  std::snprintf(buf, sizeof buf, "L2 ratio %.2e, outflow %.1e, flux spread %.1e, %.1f s", s.l2_ratio,
                s.max_outflow_deviation, s.max_flux_spread, b.seconds);
  return {ok, buf};
}

Outcome ghost_baseline() {
  const auto& b = benchmark(OutflowMode::Ghost);
  const auto& l2 = b.report.report.l2_global;
  const double lowest = *std::min_element(l2.begin(), l2.end()) / l2.front();
  detail("%zu samples over %.0f s, final ratio %.4f", l2.size(), b.report.report.times.back(),
         b.report.summary.l2_ratio);
  char buf[64];
  std::snprintf(buf, sizeof buf, "lowest L2 / initial %.4f (bound 0.5)", lowest);
  return {lowest > 0.5, buf};
}

Outcome lyapunov_monitoring() {
  const auto& b = benchmark(OutflowMode::Controlled);
  const auto& r = b.report.report;
  const std::size_t n = r.eta.size();
  std::size_t decreasing = 0, fitted = 0;
  double ratio_lo = INFINITY, ratio_hi = -INFINITY;
  for (std::size_t k = 0; k < n; ++k) {
    decreasing += r.lyapunov_decreasing[k];
    if (std::isfinite(r.decay_slope_per_eta[k])) {
      ++fitted;
      const double ratio = r.decay_slope_per_eta[k] / -r.nu_per_eta[k];
      ratio_lo = std::min(ratio_lo, ratio);
      ratio_hi = std::max(ratio_hi, ratio);
    }
  }
  detail("%-8s %-12s %-12s %-14s %s", "eta", "-nu", "slope", "wave speed", "tail decreasing");
  for (std::size_t k = 0; k < n; k += std::max<std::size_t>(1, n / 10))
    detail("%-8.2f %-12.4e %-12.4e %-14.4e %s", r.eta[k], -r.nu_per_eta[k], r.decay_slope_per_eta[k],
           r.wave_speed_per_eta[k], r.lyapunov_decreasing[k] ? "yes" : "no");
  detail("slope fitted on %zu of %zu lines (others reach round-off within one sample), slope / -nu in [%.3g, %.3g]",
         fitted, n, ratio_lo, ratio_hi);
  return {decreasing == n, std::to_string(decreasing) + " of " + std::to_string(n) + " lines decreasing on the tail"};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
  const Criterion all[] = {
      {1, "riemann oracle", riemann_oracle},
      {2, "conservation", conservation},
      {3, "transformation identity", transformation_identity},
      {4, "integrability residual", integrability},
      {5, "desired-state algebra", desired_state},
      {6, "controlled convergence", controlled_convergence},
      {7, "uncontrolled baseline", ghost_baseline},
      {8, "lyapunov monitoring", lyapunov_monitoring},
  };
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) {
    const int id = std::atoi(argv[i]);
    if (id < 1 || id > 8) {
      std::fprintf(stderr, "usage: %s [criterion 1-8 ...]\n", argv[0]);
      return 2;
    }
    wanted.push_back(id);
  }
  int failed = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.summary.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
