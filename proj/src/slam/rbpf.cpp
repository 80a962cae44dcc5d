#include "mpgm/slam/rbpf.hpp"

#include "mpgm/core/logspace.hpp"

#include <cmath>
#include <stdexcept>

namespace mpgm::slam {

RbpfState::RbpfState(const GridWorld& world_geometry, RbpfConfig config,
                     std::optional<GridWorld> known_map)
    : geometry_(world_geometry), config_(config), known_map_(std::move(known_map)) {
    if (config_.n_particles < 1) throw std::invalid_argument("RbpfState: need at least one particle");
    max_range_ = std::max(geometry_.width, geometry_.height);

    std::vector<Pose> starts;
    if (config_.start_pose) {
        starts.push_back(*config_.start_pose);
    } else {
        for (int y = 0; y < geometry_.height; ++y)
            for (int x = 0; x < geometry_.width; ++x) {
                const bool free = known_map_ ? !known_map_->occupied_at(x, y)
                                             : !geometry_.occupied_at(x, y);
                if (!free) continue;
                for (int h = 0; h < 4; ++h) starts.push_back({x, y, static_cast<Heading>(h)});
            }
        if (starts.empty()) throw std::invalid_argument("RbpfState: no free start cells");
    }

    const int p = config_.n_particles;
    poses_.resize(static_cast<std::size_t>(p));
    weights_.assign(static_cast<std::size_t>(p), 1.0 / p);
    const Eigen::ArrayXd occ0 =
        Eigen::ArrayXd::Constant(geometry_.n_cells(), config_.beta_occupied0);
    const Eigen::ArrayXd free0 = Eigen::ArrayXd::Constant(geometry_.n_cells(), config_.beta_free0);
    beta_occ_.assign(static_cast<std::size_t>(p), occ0);
    beta_free_.assign(static_cast<std::size_t>(p), free0);
    for (int i = 0; i < p; ++i)
        poses_[static_cast<std::size_t>(i)] = starts[static_cast<std::size_t>(i) % starts.size()];
}

double RbpfState::cell_occupancy(int particle, int x, int y) const {
    if (x == 0 || y == 0 || x == geometry_.width - 1 || y == geometry_.height - 1) return 1.0;
    if (known_map_) return known_map_->occupied_at(x, y) ? 1.0 : 0.0;
    const int cell = y * geometry_.width + x;
    const double a = beta_occ_[static_cast<std::size_t>(particle)](cell);
    const double b = beta_free_[static_cast<std::size_t>(particle)](cell);
    return a / (a + b);
}

double RbpfState::obs_log_likelihood(int particle, const Pose& pose,
                                     const RangeObservation& obs) const {
    double ll = 0.0;
    for (int d = 0; d < 4; ++d) {
        const int reading = obs.ranges[static_cast<std::size_t>(d)];
        if (reading < 0 || reading > max_range_) return kNegInf;
        const auto [dx, dy] = direction_delta(pose.heading, d);
        // p(reading) = sum_d p(first occupied at distance d) * sensor(reading | d)
        const double uniform = config_.eps_sense / (max_range_ + 1);
        double p_reading = 0.0;
        double p_clear = 1.0;  // probability every cell so far was free
        int x = pose.x + dx, y = pose.y + dy;
        for (int dist = 0;; ++dist) {
            const bool inside = geometry_.in_bounds(x, y);
            const double p_occ = inside ? cell_occupancy(particle, x, y) : 1.0;
            const double p_first_here = p_clear * p_occ;
            const double sensor = (reading == dist) ? (1.0 - config_.eps_sense) + uniform : uniform;
            p_reading += p_first_here * sensor;
            p_clear *= (1.0 - p_occ);
            if (!inside || p_clear <= 0.0) break;
            x += dx;
            y += dy;
        }
        if (p_reading <= 0.0) return kNegInf;
        ll += std::log(p_reading);
    }
    return ll;
}

void RbpfState::map_update(int particle, const Pose& pose, const RangeObservation& obs) {
    if (known_map_) return;
    for (int d = 0; d < 4; ++d) {
        const int reading = obs.ranges[static_cast<std::size_t>(d)];
        const auto [dx, dy] = direction_delta(pose.heading, d);
        int x = pose.x + dx, y = pose.y + dy;
        for (int dist = 0; dist <= reading; ++dist) {
            if (!geometry_.in_bounds(x, y)) break;
            const bool border = x == 0 || y == 0 || x == geometry_.width - 1 ||
                                y == geometry_.height - 1;
            if (!border) {
                const int cell = y * geometry_.width + x;
                if (dist < reading)
                    beta_free_[static_cast<std::size_t>(particle)](cell) += 1.0;
                else
                    beta_occ_[static_cast<std::size_t>(particle)](cell) += 1.0;
            }
            x += dx;
            y += dy;
        }
    }
}

void RbpfState::step(MoveAction action, const RangeObservation& obs, RngStream& rng) {
    const int p = config_.n_particles;
    const GridWorld& motion_world = known_map_ ? *known_map_ : geometry_;
    std::vector<double> log_w(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) {
        Pose& pose = poses_[static_cast<std::size_t>(i)];
        pose = sample_motion(motion_world, pose, action, config_.eps_move, rng);
        double lw = std::log(weights_[static_cast<std::size_t>(i)]);
        if (config_.use_observations) lw += obs_log_likelihood(i, pose, obs);
        log_w[static_cast<std::size_t>(i)] = lw;
    }
    const double norm = log_sum_exp(log_w);
    if (norm == kNegInf)
        throw std::runtime_error("RbpfState: degenerate filter (zero total weight)");
    for (int i = 0; i < p; ++i)
        weights_[static_cast<std::size_t>(i)] = std::exp(log_w[static_cast<std::size_t>(i)] - norm);

    for (int i = 0; i < p; ++i) map_update(i, poses_[static_cast<std::size_t>(i)], obs);

    if (effective_sample_size() < 0.5 * p) resample(rng);
}

void RbpfState::resample(RngStream& rng) {
    const int p = config_.n_particles;
    const double u0 = rng.uniform01() / p;
    std::vector<int> picks(static_cast<std::size_t>(p));
    double cum = weights_[0];
    int j = 0;
    for (int i = 0; i < p; ++i) {
        const double u = u0 + static_cast<double>(i) / p;
        while (u > cum && j + 1 < p) cum += weights_[static_cast<std::size_t>(++j)];
        picks[static_cast<std::size_t>(i)] = j;
    }
    std::vector<Pose> poses(static_cast<std::size_t>(p));
    std::vector<Eigen::ArrayXd> occ(static_cast<std::size_t>(p));
    std::vector<Eigen::ArrayXd> fre(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) {
        poses[static_cast<std::size_t>(i)] = poses_[static_cast<std::size_t>(picks[static_cast<std::size_t>(i)])];
        occ[static_cast<std::size_t>(i)] = beta_occ_[static_cast<std::size_t>(picks[static_cast<std::size_t>(i)])];
        fre[static_cast<std::size_t>(i)] = beta_free_[static_cast<std::size_t>(picks[static_cast<std::size_t>(i)])];
    }
    poses_ = std::move(poses);
    beta_occ_ = std::move(occ);
    beta_free_ = std::move(fre);
    weights_.assign(static_cast<std::size_t>(p), 1.0 / p);
}

Eigen::MatrixXd RbpfState::map_estimate() const {
    Eigen::MatrixXd map(geometry_.height, geometry_.width);
    for (int y = 0; y < geometry_.height; ++y)
        for (int x = 0; x < geometry_.width; ++x) {
            double v = 0.0;
            for (int i = 0; i < config_.n_particles; ++i)
                v += weights_[static_cast<std::size_t>(i)] * cell_occupancy(i, x, y);
            map(y, x) = v;
        }
    return map;
}

CategoricalDist RbpfState::pose_belief() const {
    std::vector<double> hist(static_cast<std::size_t>(geometry_.n_poses()), 0.0);
    for (int i = 0; i < config_.n_particles; ++i)
        hist[static_cast<std::size_t>(geometry_.pose_index(poses_[static_cast<std::size_t>(i)]))] +=
            weights_[static_cast<std::size_t>(i)];
    return CategoricalDist::normalized(std::move(hist));
}

double RbpfState::effective_sample_size() const {
    double s = 0.0;
    for (double w : weights_) s += w * w;
    return 1.0 / s;
}

double RbpfState::expected_cell_error(const Pose& truth) const {
    double err = 0.0;
    for (int i = 0; i < config_.n_particles; ++i) {
        const Pose& p = poses_[static_cast<std::size_t>(i)];
        err += weights_[static_cast<std::size_t>(i)] *
               (std::abs(p.x - truth.x) + std::abs(p.y - truth.y));
    }
    return err;
}

}  // namespace mpgm::slam
