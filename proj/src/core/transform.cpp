#include "transform.hpp"

#include <cmath>
#include <sstream>

#include "parallel.hpp"
#include "text_io.hpp"

namespace gridflow {

namespace {

double default_step(const GridHeader& g, double requested) {
  return requested > 0.0 ? requested : 0.5 * std::min(g.dx, g.dy);
}

int default_max_steps(const GridHeader& g, double step, int requested) {
  if (requested > 0) return requested;
  const BoundingBox e = g.extent();
  return static_cast<int>(20.0 * (e.width() + e.height()) / step) + 16;
}

// Largest t in [0, 1] keeping a + t (b - a) inside the box.
double clip_fraction(Vec2 a, Vec2 b, const BoundingBox& box) {
  double t = 1.0;
  auto axis = [&t](double from, double to, double lo, double hi) {
    if (to > hi && to != from) t = std::min(t, (hi - from) / (to - from));
    if (to < lo && to != from) t = std::min(t, (lo - from) / (to - from));
  };
  axis(a.x, b.x, box.xmin, box.xmax);
  axis(a.y, b.y, box.ymin, box.ymax);
  return std::clamp(t, 0.0, 1.0);
}

enum class Family { Streamline, Orthogonal };

Vec2 family_direction(const DirectionField& theta, Vec2 p, Family fam, double sign, double* raw) {
  const Vec2 d = theta.direction(p, raw);
  const Vec2 v = fam == Family::Streamline ? d : Vec2{-d.y, d.x};
  return sign * v;
}

/// Classic RK4 on the unit direction field until the curve leaves the box.
/// The final point is clipped onto the boundary.
std::vector<Vec2> trace_curve(const DirectionField& theta, Vec2 start, Family fam, double sign, double h,
                              int max_steps, const std::string& what) {
  const BoundingBox box = theta.grid.extent();
  std::vector<Vec2> pts{start};
  Vec2 p = start;
  auto vel = [&](Vec2 q) {
    double raw = 0.0;
    const Vec2 v = family_direction(theta, q, fam, sign, &raw);
    if (!(raw > 1e-9)) throw NumericalError(what + ": direction field stagnates near (" + format_double(q.x) +
                                            ", " + format_double(q.y) + ")");
    return v;
  };
  for (int step = 0; step < max_steps; ++step) {
    const Vec2 k1 = vel(p);
    const Vec2 k2 = vel(p + (0.5 * h) * k1);
    const Vec2 k3 = vel(p + (0.5 * h) * k2);
    const Vec2 k4 = vel(p + h * k3);
    const Vec2 next = p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!(norm(next - p) > 1e-9 * h)) throw NumericalError(what + ": step makes no progress");
    if (box.contains(next)) {
      pts.push_back(next);
      p = next;
      continue;
    }
    const double t = clip_fraction(p, next, box);
    const Vec2 exit = p + t * (next - p);
    if (norm(exit - p) > 1e-12 * h) pts.push_back(exit);
    return pts;
  }
  throw NumericalError(what + ": curve did not leave the domain within " + std::to_string(max_steps) + " steps");
}

double integrate_along(const std::vector<Vec2>& pts, const ScalarField& g) {
  double acc = 0.0;
  double prev = g.sample(pts.front());
  for (std::size_t k = 1; k < pts.size(); ++k) {
    const double cur = g.sample(pts[k]);
    acc += 0.5 * (prev + cur) * norm(pts[k] - pts[k - 1]);
    prev = cur;
  }
  return acc;
}

double l2_interior(const ScalarField& f, int margin) {
  const auto& g = f.grid;
  double s = 0.0;
  for (int j = margin; j < g.ny - margin; ++j)
    for (int i = margin; i < g.nx - margin; ++i) s += f.at(i, j) * f.at(i, j);
  return std::sqrt(s * g.dx * g.dy);
}

ScalarField from_values(const GridHeader& g, std::vector<double> v) {
  ScalarField f(g);
  f.values = std::move(v);
  return f;
}

}  // namespace

ThetaGradient theta_gradient(const DirectionField& theta) {
  const GridHeader& g = theta.grid;
  const ScalarField c = from_values(g, theta.cos_theta);
  const ScalarField s = from_values(g, theta.sin_theta);
  const ScalarField cx = diff_x(c), cy = diff_y(c), sx = diff_x(s), sy = diff_y(s);
  ThetaGradient out{ScalarField(g), ScalarField(g)};
  for (std::size_t k = 0; k < g.size(); ++k) {
    out.dx.values[k] = c.values[k] * sx.values[k] - s.values[k] * cx.values[k];
    out.dy.values[k] = c.values[k] * sy.values[k] - s.values[k] * cy.values[k];
  }
  return out;
}

ScalingSources scaling_sources(const DirectionField& theta) {
  const GridHeader& g = theta.grid;
  const ThetaGradient grad = theta_gradient(theta);
  ScalingSources src{ScalarField(g), ScalarField(g)};
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double c = theta.cos_theta[k], s = theta.sin_theta[k];
    src.alpha.values[k] = c * grad.dx.values[k] + s * grad.dy.values[k];
    src.beta.values[k] = s * grad.dx.values[k] - c * grad.dy.values[k];
  }
  return src;
}

ScalingFields solve_scaling_fields(const DirectionField& theta, const ScalingOptions& opts) {
  const GridHeader& g = theta.grid;
  validate(g);
  const double h = default_step(g, opts.step);
  const int max_steps = default_max_steps(g, h, 0);
  const ScalingSources src = scaling_sources(theta);

  ScalingFields out{ScalarField(g, 1.0), ScalarField(g, 1.0)};
  parallel_for(g.ny, [&](int j) {
    for (int i = 0; i < g.nx; ++i) {
      const Vec2 p = g.center(i, j);
      const std::string where = "scaling solve at cell (" + std::to_string(i) + ", " + std::to_string(j) + ")";
      // Walk back to each family's inflow boundary, where the log-scale is zero.
      const auto beta_curve = trace_curve(theta, p, Family::Streamline, -1.0, h, max_steps, where);
      const auto alpha_curve = trace_curve(theta, p, Family::Orthogonal, -1.0, h, max_steps, where);
      out.beta_scale.at(i, j) = std::exp(integrate_along(beta_curve, src.beta));
      out.alpha.at(i, j) = std::exp(integrate_along(alpha_curve, src.alpha));
    }
  });

  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      for (double v : {out.alpha.at(i, j), out.beta_scale.at(i, j)}) {
        if (!std::isfinite(v) || v < opts.lower_bound || v > opts.upper_bound)
          throw NumericalError("scaling factor " + format_double(v) + " at cell (" + std::to_string(i) + ", " +
                               std::to_string(j) + ") leaves [" + format_double(opts.lower_bound) + ", " +
                               format_double(opts.upper_bound) + "]");
      }
    }
  }

  TransportResidual res = transport_residual(theta, out);
  if (res.alpha_relative > opts.residual_tolerance || res.beta_relative > opts.residual_tolerance) {
    throw ScalingSolveError("scaling solve residual too large (alpha " + format_double(res.alpha_relative) +
                                ", beta " + format_double(res.beta_relative) + ")",
                            std::move(res.alpha), std::move(res.beta));
  }
  return out;
}

TransportResidual transport_residual(const DirectionField& theta, const ScalingFields& s, int margin) {
  const GridHeader& g = theta.grid;
  ScalarField la(g), lb(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    la.values[k] = std::log(s.alpha.values[k]);
    lb.values[k] = std::log(s.beta_scale.values[k]);
  }
  const ScalingSources src = scaling_sources(theta);
  const ScalarField lax = diff_x(la), lay = diff_y(la), lbx = diff_x(lb), lby = diff_y(lb);
  TransportResidual r{ScalarField(g), ScalarField(g)};
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double c = theta.cos_theta[k], sn = theta.sin_theta[k];
    r.alpha.values[k] = -sn * lax.values[k] + c * lay.values[k] - src.alpha.values[k];
    r.beta.values[k] = c * lbx.values[k] + sn * lby.values[k] - src.beta.values[k];
  }
  const double floor = 1e-12 / std::min(g.dx, g.dy);
  r.alpha_relative = l2_interior(r.alpha, margin) / std::max(l2_interior(src.alpha, margin), floor);
  r.beta_relative = l2_interior(r.beta, margin) / std::max(l2_interior(src.beta, margin), floor);
  return r;
}

IntegrabilityResidual integrability_residual(const DirectionField& theta, const ScalingFields& s, int margin) {
  const GridHeader& g = theta.grid;
  ScalarField xi_x(g), xi_y(g), eta_x(g), eta_y(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double c = theta.cos_theta[k], sn = theta.sin_theta[k];
    xi_x.values[k] = s.alpha.values[k] * c;
    xi_y.values[k] = s.alpha.values[k] * sn;
    eta_x.values[k] = -s.beta_scale.values[k] * sn;
    eta_y.values[k] = s.beta_scale.values[k] * c;
  }
  auto relative = [&](const ScalarField& fx, const ScalarField& fy) {
    const ScalarField a = diff_y(fx);
    const ScalarField b = diff_x(fy);
    ScalarField d(g);
    for (std::size_t k = 0; k < g.size(); ++k) d.values[k] = a.values[k] - b.values[k];
    const double scale = l2_interior(a, margin) + l2_interior(b, margin);
    const double mismatch = l2_interior(d, margin);
    return scale > 0.0 ? mismatch / scale : mismatch;
  };
  return {relative(xi_x, xi_y), relative(eta_x, eta_y)};
}

InflowBoundary inflow_boundary(const DirectionField& theta, const ScalingFields& s, double step) {
  const BoundingBox b = theta.grid.extent();
  struct Edge {
    Vec2 from, to, normal;
  };
  // Clockwise, so the tangent is the inward normal rotated by +90 degrees.
  const Edge edges[4] = {{{b.xmin, b.ymin}, {b.xmin, b.ymax}, {1, 0}},
                         {{b.xmin, b.ymax}, {b.xmax, b.ymax}, {0, -1}},
                         {{b.xmax, b.ymax}, {b.xmax, b.ymin}, {-1, 0}},
                         {{b.xmax, b.ymin}, {b.xmin, b.ymin}, {0, 1}}};
  struct Interval {
    Vec2 a, mid, c;
    double eta_rate, xi_rate;  // per unit boundary length
    bool inflow;
  };
  std::vector<Interval> cyc;
  for (const auto& e : edges) {
    const double len = norm(e.to - e.from);
    const int m = std::max(1, static_cast<int>(std::ceil(len / step - 1e-9)));
    const Vec2 tangent = (1.0 / len) * (e.to - e.from);
    for (int k = 0; k < m; ++k) {
      Interval iv;
      iv.a = e.from + (static_cast<double>(k) / m) * (e.to - e.from);
      iv.c = e.from + (static_cast<double>(k + 1) / m) * (e.to - e.from);
      iv.mid = 0.5 * (iv.a + iv.c);
      const Vec2 d = theta.direction(iv.mid);
      const double flux = dot(d, e.normal);
      iv.inflow = flux > 1e-12;
      iv.eta_rate = s.beta_scale.sample(iv.mid) * flux;
      iv.xi_rate = s.alpha.sample(iv.mid) * dot(d, tangent);
      cyc.push_back(iv);
    }
  }
  const std::size_t n = cyc.size();
  std::size_t start = n;
  for (std::size_t k = 0; k < n; ++k) {
    if (!cyc[k].inflow && cyc[(k + 1) % n].inflow) {
      start = (k + 1) % n;
      break;
    }
  }
  if (start == n) throw ValidationError("direction field has no proper inflow boundary");
  InflowBoundary out;
  std::size_t k = start;
  out.edge_points.push_back(cyc[k].a);
  out.eta_edge.push_back(0.0);
  out.xi_edge.push_back(0.0);
  while (cyc[k].inflow) {
    const double len = norm(cyc[k].c - cyc[k].a);
    out.points.push_back(cyc[k].mid);
    out.edge_points.push_back(cyc[k].c);
    out.eta_edge.push_back(out.eta_edge.back() + cyc[k].eta_rate * len);
    out.xi_edge.push_back(out.xi_edge.back() + cyc[k].xi_rate * len);
    k = (k + 1) % n;
  }
  for (std::size_t r = 0; r < n; ++r) {
    if (r != start && cyc[r].inflow && !cyc[(r + n - 1) % n].inflow)
      throw ValidationError("inflow boundary is not connected; unsupported direction field");
  }
  return out;
}

CurvilinearAtlas trace_eta_paths(const DirectionField& theta, const ScalingFields& s, const TraceOptions& opts) {
  if (opts.n_paths < 1) throw ValidationError("n_paths must be at least 1");
  if (opts.step < 0.0) throw ValidationError("trace step must be positive");
  const GridHeader& g = theta.grid;
  const double h = default_step(g, opts.step);
  const int max_steps = default_max_steps(g, h, opts.max_steps);
  const InflowBoundary gin = inflow_boundary(theta, s, h);

  CurvilinearAtlas atlas;
  atlas.grid = g;
  atlas.eta_min = 0.0;
  atlas.eta_max = gin.eta_edge.back();
  atlas.d_eta = (atlas.eta_max - atlas.eta_min) / opts.n_paths;

  std::vector<EtaPath> traced(opts.n_paths);
  parallel_for(opts.n_paths, [&](int k) {
    const double target = atlas.eta_min + (k + 0.5) * atlas.d_eta;
    const auto it = std::upper_bound(gin.eta_edge.begin(), gin.eta_edge.end(), target);
    const std::size_t hi = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - gin.eta_edge.begin(), 1),
                                                 gin.eta_edge.size() - 1);
    const std::size_t lo = hi - 1;
    const double span = gin.eta_edge[hi] - gin.eta_edge[lo];
    const double f = span > 0.0 ? (target - gin.eta_edge[lo]) / span : 0.0;
    const Vec2 seed = gin.edge_points[lo] + f * (gin.edge_points[hi] - gin.edge_points[lo]);
    const double xi0 = gin.xi_edge[lo] + f * (gin.xi_edge[hi] - gin.xi_edge[lo]);

    EtaPath path;
    path.eta = target;
    path.points = trace_curve(theta, seed, Family::Streamline, 1.0, h, max_steps, "streamline from seed " +
                                                                                       std::to_string(k));
    path.xi.reserve(path.points.size());
    path.xi.push_back(xi0);
    double prev = s.alpha.sample(path.points.front());
    for (std::size_t q = 1; q < path.points.size(); ++q) {
      const double cur = s.alpha.sample(path.points[q]);
      path.xi.push_back(path.xi.back() + 0.5 * (prev + cur) * norm(path.points[q] - path.points[q - 1]));
      prev = cur;
    }
    traced[k] = std::move(path);
  });

  for (int k = 0; k < opts.n_paths; ++k) {
    auto& p = traced[k];
    if (p.points.size() < 2 || !(p.xi_max() > p.xi_min())) {
      atlas.warnings.push_back("seed " + std::to_string(k) + " (eta " + format_double(p.eta) +
                               ") leaves the domain immediately; path dropped");
      continue;
    }
    atlas.paths.push_back(std::move(p));
  }
  if (atlas.paths.empty()) throw NumericalError("no eta path crosses the domain");
  return atlas;
}

EtaPath rescale_line_data(const EtaPath& path, const ContinuumFields& fields, const ScalingFields& s) {
  EtaPath out = path;
  const std::size_t n = path.points.size();
  out.rho_max_bar.resize(n);
  out.v_max_bar.resize(n);
  out.phi_max_bar.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 p = path.points[k];
    const double a = s.alpha.sample(p), b = s.beta_scale.sample(p);
    const double rho = fields.rho_max.sample(p), v = fields.v_max.sample(p);
    const double phi = v * rho / 4.0;
    out.rho_max_bar[k] = rho / (a * b);
    out.v_max_bar[k] = v * a;
    // Stored in diagram form so a reloaded atlas reproduces it bit for bit.
    out.phi_max_bar[k] = out.v_max_bar[k] * out.rho_max_bar[k] / 4.0;
    if (!(out.rho_max_bar[k] > 0.0) || !(out.v_max_bar[k] > 0.0) || !(out.phi_max_bar[k] > 0.0))
      throw NumericalError("non-positive rescaled quantity on path eta " + format_double(path.eta));
    if (std::abs(phi / b - out.phi_max_bar[k]) > 1e-12 * out.phi_max_bar[k])
      throw NumericalError("rescaled capacity is inconsistent with the rescaled diagram");
  }
  return out;
}

std::string serialize_atlas(const CurvilinearAtlas& atlas) {
  std::ostringstream out;
  const auto& g = atlas.grid;
  out << "# gridflow atlas v1\n";
  for (const auto& w : atlas.warnings) out << "# warning: " << w << "\n";
  out << "grid " << g.nx << ' ' << g.ny << ' ' << format_double(g.dx) << ' ' << format_double(g.dy) << ' '
      << format_double(g.origin.x) << ' ' << format_double(g.origin.y) << "\n";
  out << "eta " << format_double(atlas.eta_min) << ' ' << format_double(atlas.eta_max) << ' '
      << format_double(atlas.d_eta) << "\n";
  out << "paths " << atlas.paths.size() << "\n";
  for (const auto& p : atlas.paths) {
    if (!p.has_line_data()) throw ValidationError("atlas export needs rescaled line data on every path");
    out << "path " << format_double(p.eta) << ' ' << p.points.size() << "\n";
    for (std::size_t k = 0; k < p.points.size(); ++k) {
      out << format_double(p.points[k].x) << ' ' << format_double(p.points[k].y) << ' ' << format_double(p.xi[k])
          << ' ' << format_double(p.rho_max_bar[k]) << ' ' << format_double(p.v_max_bar[k]) << "\n";
    }
  }
  return out.str();
}

CurvilinearAtlas parse_atlas(const std::string& text, const std::string& source_name) {
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  auto next = [&]() -> std::istringstream {
    while (std::getline(lines, line)) {
      ++lineno;
      if (!line.empty() && line[0] != '#') return std::istringstream(line);
    }
    throw ValidationError(source_name + ": unexpected end of atlas");
  };
  auto where = [&] { return source_name + ":" + std::to_string(lineno); };
  auto num = [&](std::istringstream& in) {
    std::string tok;
    if (!(in >> tok)) throw ValidationError(where() + ": missing value");
    return parse_double(tok, where());
  };
  auto keyword = [&](std::istringstream& in, const char* key) {
    std::string tok;
    if (!(in >> tok) || tok != key) throw ValidationError(where() + ": expected '" + key + "'");
  };

  CurvilinearAtlas atlas;
  {
    auto in = next();
    keyword(in, "grid");
    atlas.grid.nx = static_cast<int>(num(in));
    atlas.grid.ny = static_cast<int>(num(in));
    atlas.grid.dx = num(in);
    atlas.grid.dy = num(in);
    atlas.grid.origin.x = num(in);
    atlas.grid.origin.y = num(in);
    validate(atlas.grid);
  }
  {
    auto in = next();
    keyword(in, "eta");
    atlas.eta_min = num(in);
    atlas.eta_max = num(in);
    atlas.d_eta = num(in);
  }
  std::size_t n_paths = 0;
  {
    auto in = next();
    keyword(in, "paths");
    n_paths = static_cast<std::size_t>(num(in));
  }
  for (std::size_t k = 0; k < n_paths; ++k) {
    EtaPath p;
    auto in = next();
    keyword(in, "path");
    p.eta = num(in);
    const auto m = static_cast<std::size_t>(num(in));
    for (std::size_t q = 0; q < m; ++q) {
      auto row = next();
      const double x = num(row), y = num(row);
      p.points.push_back({x, y});
      p.xi.push_back(num(row));
      p.rho_max_bar.push_back(num(row));
      p.v_max_bar.push_back(num(row));
      p.phi_max_bar.push_back(p.v_max_bar.back() * p.rho_max_bar.back() / 4.0);
    }
    if (m < 2) throw ValidationError(where() + ": path needs at least two samples");
    atlas.paths.push_back(std::move(p));
  }
  return atlas;
}

}  // namespace gridflow
