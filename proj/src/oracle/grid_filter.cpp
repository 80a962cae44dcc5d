#include "mpgm/oracle/grid_filter.hpp"

#include <cmath>
#include <stdexcept>

namespace mpgm::oracle {

using slam::GridWorld;
using slam::Heading;
using slam::MoveAction;
using slam::Pose;
using slam::RangeObservation;

namespace {

// own little kinematics, written from the model description
int dx_of(int abs_dir) { return abs_dir == 1 ? 1 : abs_dir == 3 ? -1 : 0; }
int dy_of(int abs_dir) { return abs_dir == 2 ? 1 : abs_dir == 0 ? -1 : 0; }

Pose moved(const GridWorld& world, const Pose& p, MoveAction a) {
    Pose next = p;
    const int h = static_cast<int>(p.heading);
    if (a == MoveAction::TurnLeft) {
        next.heading = static_cast<Heading>((h + 3) % 4);
    } else if (a == MoveAction::TurnRight) {
        next.heading = static_cast<Heading>((h + 1) % 4);
    } else {
        const int nx = p.x + dx_of(h), ny = p.y + dy_of(h);
        if (nx >= 0 && nx < world.width && ny >= 0 && ny < world.height &&
            !world.occupied_at(nx, ny)) {
            next.x = nx;
            next.y = ny;
        }
    }
    return next;
}

int ray_length(const GridWorld& world, const Pose& p, int rel_dir) {
    const int abs_dir = (static_cast<int>(p.heading) + rel_dir) % 4;
    int len = 0;
    int x = p.x + dx_of(abs_dir), y = p.y + dy_of(abs_dir);
    while (x >= 0 && x < world.width && y >= 0 && y < world.height && !world.occupied_at(x, y)) {
        ++len;
        x += dx_of(abs_dir);
        y += dy_of(abs_dir);
    }
    return len;
}

}  // namespace

GridFilterResult exact_grid_filter(const GridWorld& world, const std::vector<MoveAction>& actions,
                                   const std::vector<RangeObservation>& observations,
                                   double eps_move, double eps_sense, std::optional<Pose> start) {
    if (actions.size() != observations.size())
        throw std::invalid_argument("exact_grid_filter: one observation per action");
    const int n_poses = world.n_poses();
    if (n_poses > 10000) throw std::invalid_argument("exact_grid_filter: pose space too large");
    const int max_range = std::max(world.width, world.height);

    std::vector<double> belief(static_cast<std::size_t>(n_poses), 0.0);
    if (start) {
        belief[static_cast<std::size_t>(world.pose_index(*start))] = 1.0;
    } else {
        int free_poses = 0;
        for (int i = 0; i < n_poses; ++i) {
            const Pose p = world.pose_from_index(i);
            if (!world.occupied_at(p.x, p.y)) ++free_poses;
        }
        for (int i = 0; i < n_poses; ++i) {
            const Pose p = world.pose_from_index(i);
            if (!world.occupied_at(p.x, p.y)) belief[static_cast<std::size_t>(i)] = 1.0 / free_poses;
        }
    }

    GridFilterResult result;
    for (std::size_t t = 0; t < actions.size(); ++t) {
        // predict: action succeeds with probability 1 - eps_move, else no move
        std::vector<double> predicted(static_cast<std::size_t>(n_poses), 0.0);
        for (int i = 0; i < n_poses; ++i) {
            const double mass = belief[static_cast<std::size_t>(i)];
            if (mass <= 0.0) continue;
            const Pose p = world.pose_from_index(i);
            const Pose q = moved(world, p, actions[t]);
            predicted[static_cast<std::size_t>(world.pose_index(q))] += (1.0 - eps_move) * mass;
            predicted[static_cast<std::size_t>(i)] += eps_move * mass;
        }
        // correct: four independent range readings
        double norm = 0.0;
        for (int i = 0; i < n_poses; ++i) {
            double mass = predicted[static_cast<std::size_t>(i)];
            if (mass <= 0.0) {
                belief[static_cast<std::size_t>(i)] = 0.0;
                continue;
            }
            const Pose p = world.pose_from_index(i);
            for (int d = 0; d < 4; ++d) {
                const int reading = observations[t].ranges[static_cast<std::size_t>(d)];
                const double uniform = eps_sense / (max_range + 1);
                const double like =
                    (reading == ray_length(world, p, d)) ? (1.0 - eps_sense) + uniform : uniform;
                mass *= like;
            }
            belief[static_cast<std::size_t>(i)] = mass;
            norm += mass;
        }
        if (norm <= 0.0) throw std::runtime_error("exact_grid_filter: zero-probability observation");
        for (double& b : belief) b /= norm;
        result.per_step.push_back(belief);
    }
    return result;
}

}  // namespace mpgm::oracle
