#pragma once

#include "mpgm/core/distributions.hpp"
#include "mpgm/core/rng.hpp"
#include "mpgm/slam/grid_world.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace mpgm::slam {

/// Deterministic action effect: forward moves one cell unless blocked, turns
/// rotate in place. The noisy motion model keeps the pose unchanged with
/// probability eps_move.
Pose apply_action(const GridWorld& world, const Pose& pose, MoveAction action);

/// Unit vector of an absolute direction obtained from heading + relative dir.
std::pair<int, int> direction_delta(Heading heading, int relative_dir);

/// Free cells ahead of the pose in relative direction (0 front, 1 right,
/// 2 back, 3 left) before the first occupied cell of the true map.
int true_range(const GridWorld& world, const Pose& pose, int relative_dir);
RangeObservation observe_true(const GridWorld& world, const Pose& pose);

/// Sensor model per direction: the true range with probability 1 - eps_sense,
/// otherwise uniform over {0, ..., max_range}.
double log_range_likelihood(int reading, int true_range, double eps_sense, int max_range);

/// Sample a noisy observation of the pose in the world.
RangeObservation sample_observation(const GridWorld& world, const Pose& pose, double eps_sense,
                                    RngStream& rng);
/// Sample the noisy motion outcome (action fails with probability eps_move).
Pose sample_motion(const GridWorld& world, const Pose& pose, MoveAction action, double eps_move,
                   RngStream& rng);

struct RbpfConfig {
    int n_particles = 100;
    double eps_move = 0.0;
    double eps_sense = 0.0;
    double beta_occupied0 = 1.0;  // per-cell Beta prior
    double beta_free0 = 1.0;
    bool use_observations = true;           // false = dead reckoning
    std::optional<Pose> start_pose;         // unset = uniform over free cells
};

/// Rao-Blackwellized particle filter over (pose, map): poses are sampled,
/// per-cell occupancy is carried analytically as independent Beta posteriors
/// per particle. Pass a known world as `known_map` for pure localization.
class RbpfState {
public:
    RbpfState(const GridWorld& world_geometry, RbpfConfig config,
              std::optional<GridWorld> known_map = std::nullopt);

    /// One filter step: motion update, observation weighting, map update,
    /// systematic resampling when ESS < P/2. Throws on zero total weight.
    void step(MoveAction action, const RangeObservation& obs, RngStream& rng);

    /// Weight-averaged per-cell occupancy probabilities.
    Eigen::MatrixXd map_estimate() const;

    /// Normalized weighted histogram over poses (cells x headings).
    CategoricalDist pose_belief() const;

    double effective_sample_size() const;
    int n_particles() const { return config_.n_particles; }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<Pose>& poses() const { return poses_; }

    /// Weighted mean Manhattan distance of particle cells to a reference.
    double expected_cell_error(const Pose& truth) const;

private:
    double obs_log_likelihood(int particle, const Pose& pose, const RangeObservation& obs) const;
    void map_update(int particle, const Pose& pose, const RangeObservation& obs);
    void resample(RngStream& rng);
    double cell_occupancy(int particle, int x, int y) const;

    GridWorld geometry_;  // walls/extent only (border); map content is estimated
    RbpfConfig config_;
    std::optional<GridWorld> known_map_;
    int max_range_ = 0;
    std::vector<Pose> poses_;
    std::vector<double> weights_;
    // per-particle Beta counts over cells, flattened [particle][cell]
    std::vector<Eigen::ArrayXd> beta_occ_;
    std::vector<Eigen::ArrayXd> beta_free_;
};

}  // namespace mpgm::slam
