#include "mpgm/mixture/gmm.hpp"

#include "mpgm/core/logspace.hpp"

#include <cmath>
#include <stdexcept>

namespace mpgm::mixture {

void GmmConfig::validate() const {
    if (n_components < 1) throw std::invalid_argument("GmmConfig: need K >= 1");
    if (static_cast<int>(weights_prior.size()) != n_components)
        throw std::invalid_argument("GmmConfig: weights prior size mismatch");
    if (niw_prior.has_value() == !fixed_components.empty())
        throw std::invalid_argument("GmmConfig: configure exactly one of NIW prior and fixed components");
    if (!fixed_components.empty() && static_cast<int>(fixed_components.size()) != n_components)
        throw std::invalid_argument("GmmConfig: one fixed component per mixture component");
}

GmmState::GmmState(GmmConfig config, Eigen::MatrixXd data, RngStream& rng)
    : config_(std::move(config)), data_(std::move(data)) {
    if (data_.rows() < 1) throw std::invalid_argument("GmmState: empty data");
    const int dim = static_cast<int>(data_.cols());
    if (config_.niw_prior && config_.niw_prior->dim() != dim)
        throw std::invalid_argument("GmmState: data dimension does not match NIW prior");
    for (const auto& c : config_.fixed_components)
        if (c.dim() != dim) throw std::invalid_argument("GmmState: data dimension does not match component");

    const int n = n_data();
    const int k = config_.n_components;
    assignments_.resize(static_cast<std::size_t>(n));
    counts_.assign(static_cast<std::size_t>(k), 0);
    if (config_.niw_prior)
        stats_.assign(static_cast<std::size_t>(k), GaussianSuffStats(dim));
    message_log_.resize(static_cast<std::size_t>(n));
    clamped_.assign(static_cast<std::size_t>(n), false);

    for (int i = 0; i < n; ++i) {
        assignments_[static_cast<std::size_t>(i)] = static_cast<int>(rng.uniform_int(k));
        add_datum(i);
    }
}

void GmmState::remove_datum(int i) {
    const int k = assignments_[static_cast<std::size_t>(i)];
    counts_[static_cast<std::size_t>(k)] -= 1;
    if (config_.niw_prior) stats_[static_cast<std::size_t>(k)].remove(data_.row(i).transpose());
}

void GmmState::add_datum(int i) {
    const int k = assignments_[static_cast<std::size_t>(i)];
    counts_[static_cast<std::size_t>(k)] += 1;
    if (config_.niw_prior) stats_[static_cast<std::size_t>(k)].add(data_.row(i).transpose());
}

// Leave-one-out conditional log weights for datum i, computed without
// touching the caches so that belief reads stay const.
std::vector<double> GmmState::conditional_log_weights(int i, bool include_message) const {
    const int k = config_.n_components;
    const int zi = assignments_[static_cast<std::size_t>(i)];
    const auto& alpha = config_.weights_prior.alpha();
    const Eigen::VectorXd x = data_.row(i).transpose();
    std::vector<double> logw(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) {
        const int count = counts_[static_cast<std::size_t>(c)] - (c == zi ? 1 : 0);
        double lw = std::log(count + alpha[static_cast<std::size_t>(c)]);
        if (config_.niw_prior) {
            if (c == zi) {
                GaussianSuffStats held_out = stats_[static_cast<std::size_t>(c)];
                held_out.remove(x);
                lw += config_.niw_prior->posterior(held_out).log_predictive(x);
            } else {
                lw += config_.niw_prior->posterior(stats_[static_cast<std::size_t>(c)]).log_predictive(x);
            }
        } else {
            lw += config_.fixed_components[static_cast<std::size_t>(c)].log_density(x);
        }
        if (include_message && message_log_[static_cast<std::size_t>(i)])
            lw += (*message_log_[static_cast<std::size_t>(i)])[static_cast<std::size_t>(c)];
        logw[static_cast<std::size_t>(c)] = lw;
    }
    return logw;
}

void GmmState::gibbs_sweep(RngStream& rng) {
    for (int i = 0; i < n_data(); ++i) {
        if (clamped_[static_cast<std::size_t>(i)]) continue;
        const auto logw = conditional_log_weights(i, /*include_message=*/true);
        const int next = static_cast<int>(rng.categorical_logits(logw));
        set_assignment(i, next);
    }
}

CategoricalDist GmmState::shared_belief(int i) const {
    if (i < 0 || i >= n_data()) throw std::out_of_range("shared_belief: datum index out of range");
    return CategoricalDist::from_log_weights(conditional_log_weights(i, /*include_message=*/true));
}

CategoricalDist GmmState::local_factor(int i) const {
    if (i < 0 || i >= n_data()) throw std::out_of_range("local_factor: datum index out of range");
    return CategoricalDist::from_log_weights(conditional_log_weights(i, /*include_message=*/false));
}

void GmmState::install_message(int i, const CategoricalDist& message) {
    if (i < 0 || i >= n_data()) throw std::out_of_range("install_message: datum index out of range");
    if (static_cast<int>(message.size()) != config_.n_components)
        throw std::invalid_argument("install_message: support size mismatch");
    std::vector<double> logm(message.size());
    int point = -1;
    for (std::size_t c = 0; c < message.size(); ++c) {
        logm[c] = message.log_density(c);
        if (message[c] == 1.0) point = static_cast<int>(c);
    }
    message_log_[static_cast<std::size_t>(i)] = std::move(logm);
    if (point >= 0) set_assignment(i, point);
}

void GmmState::clear_message(int i) { message_log_[static_cast<std::size_t>(i)].reset(); }

void GmmState::set_assignment(int i, int component) {
    if (component < 0 || component >= config_.n_components)
        throw std::invalid_argument("set_assignment: component out of range");
    if (assignments_[static_cast<std::size_t>(i)] == component) return;
    remove_datum(i);
    assignments_[static_cast<std::size_t>(i)] = component;
    add_datum(i);
}

void GmmState::set_clamped(int i, bool clamped) { clamped_[static_cast<std::size_t>(i)] = clamped; }

double GmmState::log_joint() const {
    // Polya-urn prior over assignments under the Dirichlet weight prior.
    const auto& alpha = config_.weights_prior.alpha();
    double alpha0 = 0.0;
    for (double a : alpha) alpha0 += a;
    double lp = std::lgamma(alpha0) - std::lgamma(alpha0 + n_data());
    for (int c = 0; c < config_.n_components; ++c)
        lp += std::lgamma(alpha[static_cast<std::size_t>(c)] + counts_[static_cast<std::size_t>(c)]) -
              std::lgamma(alpha[static_cast<std::size_t>(c)]);
    if (config_.niw_prior) {
        for (int c = 0; c < config_.n_components; ++c)
            lp += config_.niw_prior->log_marginal_likelihood(stats_[static_cast<std::size_t>(c)]);
    } else {
        for (int i = 0; i < n_data(); ++i) {
            const int c = assignments_[static_cast<std::size_t>(i)];
            lp += config_.fixed_components[static_cast<std::size_t>(c)].log_density(
                data_.row(i).transpose());
        }
    }
    return lp;
}

NiwParams GmmState::component_posterior(int k) const {
    if (!config_.niw_prior) throw std::logic_error("component_posterior: fixed-component mode");
    if (k < 0 || k >= config_.n_components)
        throw std::out_of_range("component_posterior: component out of range");
    return config_.niw_prior->posterior(stats_[static_cast<std::size_t>(k)]);
}

bool GmmState::caches_consistent() const {
    std::vector<int> counts(static_cast<std::size_t>(config_.n_components), 0);
    for (int v : assignments_) counts[static_cast<std::size_t>(v)] += 1;
    if (counts != counts_) return false;
    if (config_.niw_prior) {
        const int dim = static_cast<int>(data_.cols());
        std::vector<GaussianSuffStats> stats(static_cast<std::size_t>(config_.n_components),
                                             GaussianSuffStats(dim));
        for (int i = 0; i < n_data(); ++i)
            stats[static_cast<std::size_t>(assignments_[static_cast<std::size_t>(i)])].add(
                data_.row(i).transpose());
        for (int c = 0; c < config_.n_components; ++c) {
            const auto& a = stats[static_cast<std::size_t>(c)];
            const auto& b = stats_[static_cast<std::size_t>(c)];
            if (a.n != b.n || a.sum != b.sum || a.sum_outer != b.sum_outer) return false;
        }
    }
    return true;
}

}  // namespace mpgm::mixture
