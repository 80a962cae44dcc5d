#include "mpgm/slam/rbpf.hpp"

#include <cmath>

namespace mpgm::slam {

Pose apply_action(const GridWorld& world, const Pose& pose, MoveAction action) {
    Pose next = pose;
    switch (action) {
        case MoveAction::TurnLeft:
            next.heading = static_cast<Heading>((static_cast<int>(pose.heading) + 3) % 4);
            break;
        case MoveAction::TurnRight:
            next.heading = static_cast<Heading>((static_cast<int>(pose.heading) + 1) % 4);
            break;
        case MoveAction::Forward: {
            const auto [dx, dy] = direction_delta(pose.heading, 0);
            const int nx = pose.x + dx, ny = pose.y + dy;
            if (world.in_bounds(nx, ny) && !world.occupied_at(nx, ny)) {
                next.x = nx;
                next.y = ny;
            }
            break;
        }
    }
    return next;
}

std::pair<int, int> direction_delta(Heading heading, int relative_dir) {
    const int abs_dir = (static_cast<int>(heading) + relative_dir) % 4;
    switch (abs_dir) {
        case 0: return {0, -1};  // north
        case 1: return {1, 0};   // east
        case 2: return {0, 1};   // south
        default: return {-1, 0}; // west
    }
}

int true_range(const GridWorld& world, const Pose& pose, int relative_dir) {
    const auto [dx, dy] = direction_delta(pose.heading, relative_dir);
    int r = 0;
    int x = pose.x + dx, y = pose.y + dy;
    while (world.in_bounds(x, y) && !world.occupied_at(x, y)) {
        ++r;
        x += dx;
        y += dy;
    }
    return r;
}

RangeObservation observe_true(const GridWorld& world, const Pose& pose) {
    RangeObservation obs;
    for (int d = 0; d < 4; ++d) obs.ranges[static_cast<std::size_t>(d)] = true_range(world, pose, d);
    return obs;
}

double log_range_likelihood(int reading, int truth, double eps_sense, int max_range) {
    if (reading < 0 || reading > max_range) return -std::numeric_limits<double>::infinity();
    const double uniform = eps_sense / (max_range + 1);
    const double p = (reading == truth) ? (1.0 - eps_sense) + uniform : uniform;
    return std::log(p);
}

RangeObservation sample_observation(const GridWorld& world, const Pose& pose, double eps_sense,
                                    RngStream& rng) {
    const int max_range = std::max(world.width, world.height);
    RangeObservation obs = observe_true(world, pose);
    for (int d = 0; d < 4; ++d) {
        if (rng.uniform01() < eps_sense)
            obs.ranges[static_cast<std::size_t>(d)] = static_cast<int>(rng.uniform_int(max_range + 1));
    }
    return obs;
}

Pose sample_motion(const GridWorld& world, const Pose& pose, MoveAction action, double eps_move,
                   RngStream& rng) {
    if (rng.uniform01() < eps_move) return pose;  // slip: action has no effect
    return apply_action(world, pose, action);
}

}  // namespace mpgm::slam
