#pragma once

#include "mpgm/core/distributions.hpp"
#include "mpgm/core/logspace.hpp"

#include <functional>

namespace mpgm {

/// Evidence lower bound E_q[ln p(x, z) - ln q(z)] for a discrete latent z
/// with enumerable support. joint_log_prob(z) must return ln p(x_obs, z).
/// Terms with q(z) = 0 contribute zero.
inline double elbo(const std::function<double(std::size_t)>& joint_log_prob,
                   const CategoricalDist& q) {
    double value = 0.0;
    for (std::size_t z = 0; z < q.size(); ++z) {
        const double qz = q[z];
        if (qz <= 0.0) continue;
        value += qz * (joint_log_prob(z) - std::log(qz));
    }
    return value;
}

/// ln p(x_obs) by exact marginalization over the enumerable latent.
inline double exact_log_evidence(const std::function<double(std::size_t)>& joint_log_prob,
                                 std::size_t support_size) {
    std::vector<double> terms(support_size);
    for (std::size_t z = 0; z < support_size; ++z) terms[z] = joint_log_prob(z);
    return log_sum_exp(terms);
}

/// Exact posterior q(z) proportional to p(x_obs, z).
inline CategoricalDist exact_posterior(const std::function<double(std::size_t)>& joint_log_prob,
                                       std::size_t support_size) {
    std::vector<double> terms(support_size);
    for (std::size_t z = 0; z < support_size; ++z) terms[z] = joint_log_prob(z);
    return CategoricalDist::from_log_weights(terms);
}

}  // namespace mpgm
