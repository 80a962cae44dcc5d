#pragma once

#include "mpgm/core/rng.hpp"

#include <functional>
#include <map>
#include <vector>

namespace mpgm::oracle {

/// Empirical posterior from single-site Gibbs on an undecomposed joint.
struct EmpiricalPosterior {
    std::vector<int> arity;
    std::map<std::vector<int>, double> config_freq;     // normalized
    std::vector<std::vector<double>> site_marginals;    // normalized per site
};

/// Naive monolithic Gibbs: for every site, every candidate value is scored
/// with a full log-joint evaluation (no incremental caching on purpose).
EmpiricalPosterior joint_gibbs(const std::function<double(const std::vector<int>&)>& log_joint,
                               const std::vector<int>& arity, int sweeps, RngStream& rng,
                               int burn_in = 0);

}  // namespace mpgm::oracle
