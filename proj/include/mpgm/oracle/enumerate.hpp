#pragma once

#include <functional>
#include <vector>

namespace mpgm::oracle {

/// Exact posterior over an enumerable discrete configuration space.
struct EnumerablePosterior {
    std::vector<int> arity;                  // per-site value counts
    std::vector<std::vector<int>> support;   // every configuration
    std::vector<double> probs;               // normalized weights

    /// Marginal distribution of one site.
    std::vector<double> site_marginal(std::size_t site) const;
    /// Probability of one exact configuration (0 if absent).
    double prob_of(const std::vector<int>& config) const;
};

/// Direct-summation posterior: enumerates every configuration of the given
/// arities and normalizes exp(log_joint). Throws when the configuration
/// count exceeds 1e6.
EnumerablePosterior enumerate_posterior(
    const std::function<double(const std::vector<int>&)>& log_joint,
    const std::vector<int>& arity);

}  // namespace mpgm::oracle
