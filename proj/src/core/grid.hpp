#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace gridflow {

/// Uniform cell-centered raster. Cell (i, j) has center
/// origin + ((i + 1/2) dx, (j + 1/2) dy); storage is row-major with j outer.
struct GridHeader {
  int nx = 0;
  int ny = 0;
  double dx = 0.0;
  double dy = 0.0;
  Vec2 origin;

  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
  Vec2 center(int i, int j) const { return {origin.x + (i + 0.5) * dx, origin.y + (j + 0.5) * dy}; }
  BoundingBox extent() const { return {origin.x, origin.y, origin.x + nx * dx, origin.y + ny * dy}; }

  friend bool operator==(const GridHeader&, const GridHeader&) = default;
};

/// Smallest grid with cells of at most `resolution` that tiles `bbox` exactly.
GridHeader make_grid(const BoundingBox& bbox, double resolution);
void validate(const GridHeader& g);

struct ScalarField {
  GridHeader grid;
  std::vector<double> values;

  ScalarField() = default;
  ScalarField(GridHeader g, double fill = 0.0) : grid(g), values(g.size(), fill) {}

  double& at(int i, int j) { return values[grid.index(i, j)]; }
  double at(int i, int j) const { return values[grid.index(i, j)]; }
  /// Bilinear interpolation between cell centers, constant beyond the outer centers.
  double sample(Vec2 p) const;

  friend bool operator==(const ScalarField&, const ScalarField&) = default;
};

/// Direction angles plus their unit vectors; interpolation happens on the
/// vectors so angle wrap never matters.
struct DirectionField {
  GridHeader grid;
  std::vector<double> theta;
  std::vector<double> cos_theta;
  std::vector<double> sin_theta;

  DirectionField() = default;
  DirectionField(GridHeader g, std::vector<double> angles);

  double at(int i, int j) const { return theta[grid.index(i, j)]; }
  Vec2 unit(int i, int j) const {
    const auto k = grid.index(i, j);
    return {cos_theta[k], sin_theta[k]};
  }
  /// Interpolated unit vector; returns the raw interpolant norm through `raw_norm`.
  Vec2 direction(Vec2 p, double* raw_norm = nullptr) const;

  friend bool operator==(const DirectionField& a, const DirectionField& b) {
    return a.grid == b.grid && a.theta == b.theta;
  }
};

/// Central differences in the interior, one-sided at the edges.
ScalarField diff_x(const ScalarField& f);
ScalarField diff_y(const ScalarField& f);

struct Raster {
  std::string name;
  std::string units;
  ScalarField field;
};

std::string serialize_raster(const std::string& name, const std::string& units, const ScalarField& f);
Raster parse_raster(const std::string& text, const std::string& source_name);
void save_raster(const std::string& path, const std::string& name, const std::string& units, const ScalarField& f);
Raster load_raster(const std::string& path);

ScalarField theta_as_scalar(const DirectionField& d);

}  // namespace gridflow
