#include "grid.hpp"

#include <cmath>
#include <sstream>

#include "errors.hpp"
#include "text_io.hpp"

namespace gridflow {

GridHeader make_grid(const BoundingBox& bbox, double resolution) {
  if (!(resolution > 0.0)) throw ValidationError("grid resolution must be positive");
  if (!(bbox.width() > 0.0) || !(bbox.height() > 0.0)) throw ValidationError("grid extent is empty");
  GridHeader g;
  g.nx = std::max(1, static_cast<int>(std::ceil(bbox.width() / resolution - 1e-9)));
  g.ny = std::max(1, static_cast<int>(std::ceil(bbox.height() / resolution - 1e-9)));
  g.dx = bbox.width() / g.nx;
  g.dy = bbox.height() / g.ny;
  g.origin = {bbox.xmin, bbox.ymin};
  return g;
}

void validate(const GridHeader& g) {
  if (g.nx < 1 || g.ny < 1) throw ValidationError("grid must have at least one cell");
  if (!(g.dx > 0.0) || !(g.dy > 0.0)) throw ValidationError("grid cell size must be positive");
}

namespace {

struct Stencil {
  int i0, i1, j0, j1;
  double tx, ty;
};

Stencil locate(const GridHeader& g, Vec2 p) {
  auto axis = [](double coord, double origin, double h, int n, int& a, int& b, double& t) {
    double f = (coord - origin) / h - 0.5;
    if (n == 1 || f <= 0.0) {
      a = b = 0;
      t = 0.0;
      return;
    }
    if (f >= n - 1) {
      a = b = n - 1;
      t = 0.0;
      return;
    }
    a = static_cast<int>(std::floor(f));
    b = a + 1;
    t = f - a;
  };
  Stencil s{};
  axis(p.x, g.origin.x, g.dx, g.nx, s.i0, s.i1, s.tx);
  axis(p.y, g.origin.y, g.dy, g.ny, s.j0, s.j1, s.ty);
  return s;
}

double blend(const std::vector<double>& v, const GridHeader& g, const Stencil& s) {
  const double a = v[g.index(s.i0, s.j0)];
  const double b = v[g.index(s.i1, s.j0)];
  const double c = v[g.index(s.i0, s.j1)];
  const double d = v[g.index(s.i1, s.j1)];
  return (1 - s.ty) * ((1 - s.tx) * a + s.tx * b) + s.ty * ((1 - s.tx) * c + s.tx * d);
}

}  // namespace

double ScalarField::sample(Vec2 p) const { return blend(values, grid, locate(grid, p)); }

DirectionField::DirectionField(GridHeader g, std::vector<double> angles)
    : grid(g), theta(std::move(angles)), cos_theta(theta.size()), sin_theta(theta.size()) {
  if (theta.size() != grid.size()) throw ValidationError("direction field size does not match its grid");
  for (std::size_t k = 0; k < theta.size(); ++k) {
    cos_theta[k] = std::cos(theta[k]);
    sin_theta[k] = std::sin(theta[k]);
  }
}

Vec2 DirectionField::direction(Vec2 p, double* raw_norm) const {
  const Stencil s = locate(grid, p);
  const Vec2 v{blend(cos_theta, grid, s), blend(sin_theta, grid, s)};
  const double n = norm(v);
  if (raw_norm) *raw_norm = n;
  if (n == 0.0) return {0.0, 0.0};
  return (1.0 / n) * v;
}

ScalarField diff_x(const ScalarField& f) {
  const auto& g = f.grid;
  ScalarField out(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.nx == 1) {
        out.at(i, j) = 0.0;
      } else if (i == 0) {
        out.at(i, j) = (f.at(1, j) - f.at(0, j)) / g.dx;
      } else if (i == g.nx - 1) {
        out.at(i, j) = (f.at(i, j) - f.at(i - 1, j)) / g.dx;
      } else {
        out.at(i, j) = (f.at(i + 1, j) - f.at(i - 1, j)) / (2.0 * g.dx);
      }
    }
  }
  return out;
}

ScalarField diff_y(const ScalarField& f) {
  const auto& g = f.grid;
  ScalarField out(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.ny == 1) {
        out.at(i, j) = 0.0;
      } else if (j == 0) {
        out.at(i, j) = (f.at(i, 1) - f.at(i, 0)) / g.dy;
      } else if (j == g.ny - 1) {
        out.at(i, j) = (f.at(i, j) - f.at(i, j - 1)) / g.dy;
      } else {
        out.at(i, j) = (f.at(i, j + 1) - f.at(i, j - 1)) / (2.0 * g.dy);
      }
    }
  }
  return out;
}

std::string serialize_raster(const std::string& name, const std::string& units, const ScalarField& f) {
  const auto& g = f.grid;
  std::ostringstream out;
  out << "# gridflow raster v1\n";
  out << "name " << name << "\n";
  out << "units " << units << "\n";
  out << "nx " << g.nx << " ny " << g.ny << "\n";
  out << "dx " << format_double(g.dx) << " dy " << format_double(g.dy) << "\n";
  out << "origin " << format_double(g.origin.x) << " " << format_double(g.origin.y) << "\n";
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (i) out << ' ';
      out << format_double(f.at(i, j));
    }
    out << '\n';
  }
  return out.str();
}

namespace {

std::string expect_key(std::istringstream& in, const char* key, const std::string& where) {
  std::string tok;
  if (!(in >> tok) || tok != key) throw ValidationError(where + ": expected '" + key + "'");
  if (!(in >> tok)) throw ValidationError(where + ": missing value for '" + key + "'");
  return tok;
}

}  // namespace

Raster parse_raster(const std::string& text, const std::string& source_name) {
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  auto next_line = [&]() -> std::string {
    while (std::getline(lines, line)) {
      ++lineno;
      if (!line.empty() && line[0] != '#') return line;
    }
    throw ValidationError(source_name + ": unexpected end of raster");
  };
  auto where = [&] { return source_name + ":" + std::to_string(lineno); };

  Raster r;
  {
    std::istringstream in(next_line());
    r.name = expect_key(in, "name", where());
  }
  {
    std::istringstream in(next_line());
    r.units = expect_key(in, "units", where());
  }
  GridHeader g;
  {
    std::istringstream in(next_line());
    g.nx = static_cast<int>(parse_double(expect_key(in, "nx", where()), where()));
    g.ny = static_cast<int>(parse_double(expect_key(in, "ny", where()), where()));
  }
  {
    std::istringstream in(next_line());
    g.dx = parse_double(expect_key(in, "dx", where()), where());
    g.dy = parse_double(expect_key(in, "dy", where()), where());
  }
  {
    std::istringstream in(next_line());
    g.origin.x = parse_double(expect_key(in, "origin", where()), where());
    std::string tok;
    if (!(in >> tok)) throw ValidationError(where() + ": origin needs two values");
    g.origin.y = parse_double(tok, where());
  }
  validate(g);
  r.field = ScalarField(g);
  for (int j = 0; j < g.ny; ++j) {
    std::istringstream in(next_line());
    std::string tok;
    for (int i = 0; i < g.nx; ++i) {
      if (!(in >> tok)) throw ValidationError(where() + ": raster row too short");
      r.field.at(i, j) = parse_double(tok, where());
    }
    if (in >> tok) throw ValidationError(where() + ": raster row too long");
  }
  return r;
}

void save_raster(const std::string& path, const std::string& name, const std::string& units, const ScalarField& f) {
  write_text_file(path, serialize_raster(name, units, f));
}

Raster load_raster(const std::string& path) { return parse_raster(read_text_file(path), path); }

ScalarField theta_as_scalar(const DirectionField& d) {
  ScalarField f(d.grid);
  f.values = d.theta;
  return f;
}

}  // namespace gridflow
