#pragma once

#include "mpgm/slam/grid_world.hpp"

#include <optional>
#include <vector>

namespace mpgm::oracle {

/// Exact Bayes filtering over the enumerated pose space of a known map.
/// Self-contained: raycasting and the motion/sensor likelihoods are written
/// here from scratch rather than calling the filter module's helpers.
struct GridFilterResult {
    std::vector<std::vector<double>> per_step;  // posterior over pose indices
};

GridFilterResult exact_grid_filter(const slam::GridWorld& world,
                                   const std::vector<slam::MoveAction>& actions,
                                   const std::vector<slam::RangeObservation>& observations,
                                   double eps_move, double eps_sense,
                                   std::optional<slam::Pose> start = std::nullopt);

}  // namespace mpgm::oracle
