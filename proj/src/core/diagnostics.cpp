#include "diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "text_io.hpp"

namespace gridflow {

std::vector<double> density_error(std::span<const double> rho, std::span<const double> rho_d) {
  if (rho.size() != rho_d.size())
    throw ValidationError("density error: state has " + std::to_string(rho.size()) + " cells, desired state has " +
                          std::to_string(rho_d.size()));
  std::vector<double> e(rho.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = rho[i] - rho_d[i];
  return e;
}

std::vector<double> density_error(const LineState& state, const ControlEntry& entry) {
  std::vector<double> rho;
  rho.reserve(state.cells.size());
  for (const auto& c : state.cells) rho.push_back(c.rho);
  return density_error(rho, entry.rho_d);
}

double l2_norm(std::span<const LineError> lines) {
  double acc = 0.0;
  for (const auto& l : lines) {
    if (!(l.d_eta > 0.0)) throw ValidationError("l2 norm: eta weight must be positive");
    if (l.error.size() != l.dxi.size()) throw ValidationError("l2 norm: error and weights differ in length");
    double line = 0.0;
    for (std::size_t i = 0; i < l.error.size(); ++i) {
      if (!(l.dxi[i] > 0.0)) throw ValidationError("l2 norm: xi weight must be positive");
      line += l.error[i] * l.error[i] * l.dxi[i];
    }
    acc += l.d_eta * line;
  }
  return std::sqrt(acc);
}

double lyapunov(std::span<const Cell> cells, std::span<const double> error, const LyapunovOptions& opts) {
  if (cells.size() != error.size()) throw ValidationError("lyapunov: error and cells differ in length");
  if (cells.empty()) return 0.0;
  double scale = opts.length_scale;
  if (scale == 0.0) {
    scale = opts.shift ? (cells.back().xi + 0.5 * cells.back().dxi) - (cells.front().xi - 0.5 * cells.front().dxi)
                       : 1.0;
  }
  if (!(scale > 0.0)) throw ValidationError("lyapunov: length scale must be positive");
  const double origin = opts.shift ? cells.front().xi : 0.0;
  double v = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const double arg = (cells[i].xi - origin) / scale;
    if (arg > 700.0)
      throw NumericalError("lyapunov weight exp(" + format_double(arg) +
                           ") overflows; shift xi or use a larger length scale");
    v += std::exp(arg) * error[i] * error[i] * cells[i].dxi;
  }
  return 0.5 * v;
}

double lyapunov(const LineState& state, const ControlEntry& entry, const LyapunovOptions& opts) {
  const auto err = density_error(state, entry);
  return lyapunov(state.cells, err, opts);
}

double fit_log_slope(std::span<const double> times, std::span<const double> values, double tail_fraction,
                     double floor) {
  if (times.size() != values.size()) throw ValidationError("decay fit: times and values differ in length");
  if (times.size() < 3) throw ValidationError("decay fit needs at least 3 samples");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw ValidationError("tail fraction must lie in (0, 1]");
  std::vector<std::size_t> kept;
  for (std::size_t k = 0; k < times.size(); ++k)
    if (values[k] > floor && values[k] > 0.0) kept.push_back(k);
  if (kept.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double t0 = times[kept.front()], t1 = times[kept.back()];
  const double t_start = t0 + (1.0 - tail_fraction) * (t1 - t0);
  double n = 0, st = 0, sy = 0, stt = 0, sty = 0;
  for (auto k : kept) {
    if (times[k] < t_start) continue;
    const double y = std::log(values[k]);
    n += 1;
    st += times[k];
    sy += y;
    stt += times[k] * times[k];
    sty += times[k] * y;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double den = n * stt - st * st;
  if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (n * sty - st * sy) / den;
}

bool decreasing_tail(std::span<const double> values, double tail_fraction, double tol) {
  if (values.size() < 2) throw ValidationError("sign test needs at least 2 samples");
  const auto first = static_cast<std::size_t>(std::floor((1.0 - tail_fraction) * (values.size() - 1)));
  for (std::size_t k = first + 1; k < values.size(); ++k)
    if (values[k] > values[k - 1] + tol) return false;
  return values.back() < values[first] || values.back() <= tol;
}

ConvergenceReport decay_report(std::span<const LineSeries> series, const ControlPlan& plan,
                               const LyapunovOptions& lyap, double tail_fraction) {
  if (series.empty()) throw ValidationError("convergence report needs at least one line");
  if (series.size() != plan.entries.size()) throw ValidationError("convergence report: plan and series differ in size");
  ConvergenceReport r;
  r.times = series.front().times;
  if (r.times.size() < 3) throw ValidationError("convergence report needs at least 3 samples per line");
  for (const auto& s : series) {
    if (s.times != r.times) throw ValidationError("convergence report: lines are not time-aligned");
    if (s.rho.size() != s.times.size()) throw ValidationError("convergence report: missing density samples");
  }

  const std::size_t nt = r.times.size();
  r.l2_global.assign(nt, 0.0);
  r.l2_per_eta.assign(series.size(), std::vector<double>(nt));
  r.lyapunov_per_eta.assign(series.size(), std::vector<double>(nt));
  std::vector<std::vector<double>> dxi(series.size());
  for (std::size_t l = 0; l < series.size(); ++l)
    for (const auto& c : series[l].cells) dxi[l].push_back(c.dxi);

  for (std::size_t k = 0; k < nt; ++k) {
    std::vector<std::vector<double>> errors(series.size());
    std::vector<LineError> parts;
    for (std::size_t l = 0; l < series.size(); ++l) {
      errors[l] = density_error(series[l].rho[k], plan.entries[l].rho_d);
      const LineError one{errors[l], dxi[l], series[l].d_eta};
      parts.push_back(one);
      r.l2_per_eta[l][k] = l2_norm(std::span<const LineError>(&one, 1));
      r.lyapunov_per_eta[l][k] = lyapunov(series[l].cells, errors[l], lyap);
    }
    r.l2_global[k] = l2_norm(parts);
  }
  for (std::size_t l = 0; l < series.size(); ++l) {
    r.eta.push_back(series[l].eta);
    r.nu_per_eta.push_back(nu_bound(series[l].cells, plan.entries[l].epsilon));
    r.wave_speed_per_eta.push_back(bottleneck_wave_speed(series[l].cells, plan.entries[l].epsilon));
    const auto& v = r.lyapunov_per_eta[l];
    const double floor = kLyapunovFloor * *std::max_element(v.begin(), v.end());
    r.decay_slope_per_eta.push_back(fit_log_slope(r.times, v, tail_fraction, floor));
    r.lyapunov_decreasing.push_back(decreasing_tail(v, tail_fraction, floor));
  }
  return r;
}

std::string serialize_convergence_csv(const ConvergenceReport& r, bool per_eta) {
  std::ostringstream out;
  out << "t,l2_global";
  if (per_eta)
    for (std::size_t l = 0; l < r.eta.size(); ++l) out << ",l2_eta_" << l;
  out << "\n";
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    out << format_double(r.times[k]) << ',' << format_double(r.l2_global[k]);
    if (per_eta)
      for (std::size_t l = 0; l < r.eta.size(); ++l) out << ',' << format_double(r.l2_per_eta[l][k]);
    out << "\n";
  }
  return out.str();
}

std::string serialize_decay_csv(const ConvergenceReport& r) {
  std::ostringstream out;
  out << "eta,nu,minus_nu,fitted_log_v_slope,bottleneck_wave_speed,v_tail_decreasing\n";
  for (std::size_t l = 0; l < r.eta.size(); ++l) {
    out << format_double(r.eta[l]) << ',' << format_double(r.nu_per_eta[l]) << ',' << format_double(-r.nu_per_eta[l])
        << ',' << format_double(r.decay_slope_per_eta[l]) << ',' << format_double(r.wave_speed_per_eta[l]) << ','
        << (l < r.lyapunov_decreasing.size() && r.lyapunov_decreasing[l] ? 1 : 0) << "\n";
  }
  return out.str();
}

}  // namespace gridflow
