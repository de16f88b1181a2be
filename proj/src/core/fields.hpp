#pragma once

#include "grid.hpp"
#include "network.hpp"

namespace gridflow {

/// Inverse-distance weights are (d + offset)^-sensitivity with d the distance
/// from the cell center to the road segment.
struct IdwParams {
  double sensitivity = 20.0;
  double offset = 1000.0;  // meters
  /// Distances enter as sqrt(d^2 + smoothing^2); rounds off the kink of the
  /// distance function on the road itself.
  double smoothing = 100.0;  // meters
  bool speed_weighted = true;
};

struct KernelParams {
  double vehicle_spacing = 6.0;  // meters per vehicle per lane
  double sigma = 100.0;          // meters
  double floor = 1e-6;           // veh/m^2
  bool edge_correction = true;   // renormalize each kernel to unit mass inside the bbox
};

struct ContinuumFields {
  DirectionField theta;
  ScalarField rho_max;  // veh/m^2
  ScalarField v_max;    // m/s
};

DirectionField reconstruct_direction(const RoadNetwork& net, const GridHeader& grid, const IdwParams& idw);
ScalarField reconstruct_v_max(const RoadNetwork& net, const GridHeader& grid, const IdwParams& idw);
ScalarField reconstruct_rho_max(const RoadNetwork& net, const GridHeader& grid, const KernelParams& kernel);

ContinuumFields reconstruct_fields(const RoadNetwork& net, const GridHeader& grid, const IdwParams& idw,
                                   const KernelParams& kernel);

/// Greenshields capacity v_max * rho_max / 4.
ScalarField capacity(const ContinuumFields& f);

}  // namespace gridflow
