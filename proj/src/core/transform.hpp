#pragma once

#include <string>
#include <vector>

#include "errors.hpp"
#include "fields.hpp"
#include "grid.hpp"

namespace gridflow {

/// Diagonal metric factors of the (xi, eta) chart. alpha scales the metric
/// along the flow, beta_scale across it.
struct ScalingFields {
  ScalarField alpha;
  ScalarField beta_scale;
};

struct ScalingOptions {
  double step = 0.0;  // characteristic step in meters; 0 selects min(dx, dy) / 2
  double lower_bound = 1e-3;
  double upper_bound = 1e3;
  /// Relative transport-equation residual above which the solve is rejected.
  double residual_tolerance = 0.25;
};

/// Raised when the scaling solve leaves its residual budget; carries the
/// per-cell residual of both transport equations.
class ScalingSolveError : public NumericalError {
 public:
  ScalingSolveError(const std::string& what, ScalarField alpha_residual, ScalarField beta_residual)
      : NumericalError(what), alpha_residual(std::move(alpha_residual)), beta_residual(std::move(beta_residual)) {}
  ScalarField alpha_residual;
  ScalarField beta_residual;
};

/// Angular derivatives of the direction field, computed from the unit vectors.
struct ThetaGradient {
  ScalarField dx;
  ScalarField dy;
};
ThetaGradient theta_gradient(const DirectionField& theta);

/// Source terms of the transport equations for ln(alpha) (along (-sin, cos))
/// and ln(beta) (along (cos, sin)).
struct ScalingSources {
  ScalarField alpha;  // cos * theta_x + sin * theta_y
  ScalarField beta;   // sin * theta_x - cos * theta_y
};
ScalingSources scaling_sources(const DirectionField& theta);

/// Integrates ln(alpha) and ln(beta) along their characteristics from the
/// inflow boundary of each family, where both are normalized to 1.
ScalingFields solve_scaling_fields(const DirectionField& theta, const ScalingOptions& opts = {});

struct TransportResidual {
  ScalarField alpha;  // (-sin d/dx + cos d/dy) ln(alpha) - source
  ScalarField beta;   // (cos d/dx + sin d/dy) ln(beta) - source
  double alpha_relative = 0.0;
  double beta_relative = 0.0;
};
/// Finite-difference residual of both transport equations on interior cells
/// (a margin of `margin` cells is excluded from the relative norms).
TransportResidual transport_residual(const DirectionField& theta, const ScalingFields& s, int margin = 2);

/// Mixed-partial mismatch of the chart. With grad(xi) = alpha (cos, sin) and
/// grad(eta) = beta (-sin, cos), reports
///   |d/dy xi_x - d/dx xi_y| / (|d/dy xi_x| + |d/dx xi_y|)
/// in the L2 sense over interior cells, and the same for eta.
struct IntegrabilityResidual {
  double xi_relative = 0.0;
  double eta_relative = 0.0;
};
IntegrabilityResidual integrability_residual(const DirectionField& theta, const ScalingFields& s, int margin = 2);

/// One traced flow line: constant eta, strictly increasing xi.
struct EtaPath {
  double eta = 0.0;
  std::vector<Vec2> points;
  std::vector<double> xi;
  std::vector<double> rho_max_bar;
  std::vector<double> v_max_bar;
  std::vector<double> phi_max_bar;

  double xi_min() const { return xi.front(); }
  double xi_max() const { return xi.back(); }
  bool has_line_data() const { return rho_max_bar.size() == points.size() && !points.empty(); }
};

struct CurvilinearAtlas {
  GridHeader grid;
  double eta_min = 0.0;
  double eta_max = 0.0;
  double d_eta = 0.0;  // eta spacing between seeds (the quadrature weight)
  std::vector<EtaPath> paths;
  std::vector<std::string> warnings;
};

struct TraceOptions {
  int n_paths = 100;
  double step = 0.0;  // 0 selects min(dx, dy) / 2
  int max_steps = 0;  // 0 selects a bound from the domain perimeter
};

/// Boundary point set where the flow enters the domain, walked clockwise
/// (the direction of increasing eta).
struct InflowBoundary {
  std::vector<Vec2> points;      // sample midpoints
  std::vector<double> eta_edge;  // cumulative eta at sample interval ends (size points + 1)
  std::vector<double> xi_edge;   // cumulative xi along the boundary, same layout
  std::vector<Vec2> edge_points; // interval end coordinates (size points + 1)
};
InflowBoundary inflow_boundary(const DirectionField& theta, const ScalingFields& s, double step);

CurvilinearAtlas trace_eta_paths(const DirectionField& theta, const ScalingFields& s, const TraceOptions& opts);

/// Attaches rho_bar_max = rho_max / (alpha beta), v_bar_max = v_max alpha and
/// phi_bar_max = phi_max / beta at every sample.
EtaPath rescale_line_data(const EtaPath& path, const ContinuumFields& fields, const ScalingFields& s);

std::string serialize_atlas(const CurvilinearAtlas& atlas);
/// Reads paths with their line data; phi_bar_max is recomputed from the stored columns.
CurvilinearAtlas parse_atlas(const std::string& text, const std::string& source_name);

}  // namespace gridflow
