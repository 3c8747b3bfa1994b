#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "geobern/bernstein.hpp"
#include "geobern/cost_surface.hpp"

namespace geobern {

/// Axis-aligned lattice samples of a 2D field for plotting. Columns: x, y, f,
/// g, and for single-obstacle fields the Gaussian-curvature diagnostic.
std::string surface_grid_csv(const GaussianField& field, const Eigen::Vector2d& lower,
                             const Eigen::Vector2d& upper, int resolution);

/// Level-set polylines of a 2D field at level, extracted by marching squares
/// on a resolution x resolution lattice. Each polyline is a list of points.
std::vector<std::vector<Eigen::Vector2d>> extract_level_set(const GaussianField& field,
                                                            double level,
                                                            const Eigen::Vector2d& lower,
                                                            const Eigen::Vector2d& upper,
                                                            int resolution);

/// SVG plot of a planned 2D trajectory: one <path> for the trajectory, one
/// <circle> per obstacle (radius r), <rect> knot markers, and <polyline>
/// segments tracing the f = rho level set.
std::string trajectory_svg(const Trajectory& trajectory, const GaussianField& field, double rho);

/// Trajectory CSV: t, position, velocity, and the field value along the path.
std::string trajectory_csv(const Trajectory& trajectory, const GaussianField& field);

}  // namespace geobern
