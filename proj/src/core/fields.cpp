#include "fields.hpp"

#include <cmath>
#include <limits>

#include "errors.hpp"
#include "parallel.hpp"

namespace gridflow {

namespace {

struct Segment {
  Vec2 a, b, unit;
  double speed;
  int lanes;
  double length;
};

std::vector<Segment> segments_of(const RoadNetwork& net) {
  std::vector<Segment> segs;
  segs.reserve(net.roads.size());
  for (const auto& r : net.roads) {
    const Vec2 a = net.road_start(r), b = net.road_end(r);
    const double len = norm(b - a);
    if (!(len > 0.0)) throw ValidationError("road " + std::to_string(r.id) + " has zero length");
    segs.push_back({a, b, (1.0 / len) * (b - a), r.speed_limit, r.lanes, len});
  }
  return segs;
}

void check_cover(const RoadNetwork& net, const GridHeader& grid) {
  validate(grid);
  const BoundingBox e = grid.extent();
  const double tol = 1e-9 * std::max(e.width(), e.height());
  if (e.xmin > net.bbox.xmin + tol || e.ymin > net.bbox.ymin + tol || e.xmax < net.bbox.xmax - tol ||
      e.ymax < net.bbox.ymax - tol)
    throw ValidationError("grid does not cover the network bbox");
}

void check_idw(const IdwParams& idw) {
  if (!(idw.sensitivity > 0.0)) throw ValidationError("idw sensitivity must be positive");
  if (!(idw.offset > 0.0)) throw ValidationError("idw offset must be positive");
  if (!(idw.smoothing >= 0.0)) throw ValidationError("idw smoothing must be non-negative");
}

// Normalized weights: the largest is exactly 1, so nothing underflows as a group.
void idw_weights(Vec2 p, const std::vector<Segment>& segs, const IdwParams& idw, std::vector<double>& w) {
  w.resize(segs.size());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < segs.size(); ++k) {
    const double d = std::hypot(point_segment_distance(p, segs[k].a, segs[k].b), idw.smoothing);
    w[k] = -idw.sensitivity * std::log(d + idw.offset);
    best = std::max(best, w[k]);
  }
  for (auto& x : w) x = std::exp(x - best);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

DirectionField reconstruct_direction(const RoadNetwork& net, const GridHeader& grid, const IdwParams& idw) {
  check_cover(net, grid);
  check_idw(idw);
  const auto segs = segments_of(net);
  if (segs.empty()) throw ValidationError("direction field needs at least one road");
  std::vector<double> theta(grid.size());
  parallel_for(grid.ny, [&](int j) {
    std::vector<double> w;
    for (int i = 0; i < grid.nx; ++i) {
      idw_weights(grid.center(i, j), segs, idw, w);
      Vec2 acc;
      double mass = 0.0;
      for (std::size_t k = 0; k < segs.size(); ++k) {
        const double s = w[k] * (idw.speed_weighted ? segs[k].speed : 1.0);
        acc = acc + s * segs[k].unit;
        mass += s;
      }
      if (!(norm(acc) > 1e-12 * mass))
        throw NumericalError("direction field is degenerate at cell (" + std::to_string(i) + ", " +
                             std::to_string(j) + ")");
      theta[grid.index(i, j)] = std::atan2(acc.y, acc.x);
    }
  });
  return DirectionField(grid, std::move(theta));
}

ScalarField reconstruct_v_max(const RoadNetwork& net, const GridHeader& grid, const IdwParams& idw) {
  check_cover(net, grid);
  check_idw(idw);
  const auto segs = segments_of(net);
  if (segs.empty()) throw ValidationError("speed field needs at least one road");
  ScalarField out(grid);
  parallel_for(grid.ny, [&](int j) {
    std::vector<double> w;
    for (int i = 0; i < grid.nx; ++i) {
      idw_weights(grid.center(i, j), segs, idw, w);
      double num = 0.0, den = 0.0;
      for (std::size_t k = 0; k < segs.size(); ++k) {
        num += w[k] * segs[k].speed;
        den += w[k];
      }
      out.at(i, j) = num / den;
    }
  });
  return out;
}

ScalarField reconstruct_rho_max(const RoadNetwork& net, const GridHeader& grid, const KernelParams& kp) {
  check_cover(net, grid);
  if (!(kp.vehicle_spacing > 0.0)) throw ValidationError("vehicle spacing must be positive");
  if (!(kp.sigma > 0.0)) throw ValidationError("kernel sigma must be positive");
  if (!(kp.floor > 0.0)) throw ValidationError("density floor must be positive");

  struct Vehicle {
    Vec2 p;
    double weight;  // vehicles represented, divided by the in-domain kernel mass
  };
  std::vector<Vehicle> vehicles;
  const BoundingBox& b = net.bbox;
  for (const auto& s : segments_of(net)) {
    const double count = s.length / kp.vehicle_spacing;
    const int n = std::max(1, static_cast<int>(std::ceil(count - 1e-9)));
    const double mass = count * s.lanes / n;
    for (int k = 0; k < n; ++k) {
      const Vec2 p = s.a + ((k + 0.5) / n) * (s.b - s.a);
      double inside = 1.0;
      if (kp.edge_correction) {
        inside = (normal_cdf((b.xmax - p.x) / kp.sigma) - normal_cdf((b.xmin - p.x) / kp.sigma)) *
                 (normal_cdf((b.ymax - p.y) / kp.sigma) - normal_cdf((b.ymin - p.y) / kp.sigma));
      }
      vehicles.push_back({p, mass / inside});
    }
  }

  const double norm2d = 1.0 / (2.0 * M_PI * kp.sigma * kp.sigma);
  const double inv2s2 = 1.0 / (2.0 * kp.sigma * kp.sigma);
  const double cutoff2 = 64.0 * kp.sigma * kp.sigma;  // 8 sigma
  ScalarField out(grid);
  parallel_for(grid.ny, [&](int j) {
    for (int i = 0; i < grid.nx; ++i) {
      const Vec2 c = grid.center(i, j);
      double sum = 0.0;
      for (const auto& v : vehicles) {
        const Vec2 d = c - v.p;
        const double r2 = dot(d, d);
        if (r2 < cutoff2) sum += v.weight * std::exp(-r2 * inv2s2);
      }
      out.at(i, j) = std::max(sum * norm2d, kp.floor);
    }
  });
  return out;
}

ContinuumFields reconstruct_fields(const RoadNetwork& net, const GridHeader& grid, const IdwParams& idw,
                                   const KernelParams& kernel) {
  return {reconstruct_direction(net, grid, idw), reconstruct_rho_max(net, grid, kernel),
          reconstruct_v_max(net, grid, idw)};
}

ScalarField capacity(const ContinuumFields& f) {
  ScalarField out(f.rho_max.grid);
  for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] = f.v_max.values[k] * f.rho_max.values[k] / 4.0;
  return out;
}

}  // namespace gridflow
