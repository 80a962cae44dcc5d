#pragma once

#include "mpgm/core/rng.hpp"
#include "mpgm/hmm/hmm_model.hpp"

#include <optional>
#include <vector>

namespace mpgm::hmm {

struct Smoothed {
    Eigen::MatrixXd marginals;  // T x K, each row normalized
    double log_likelihood = 0.0;
};

/// Exact smoothing. extra_log_factors, when present, is a T x K matrix of
/// additional per-step log potentials multiplied into the state chain (used
/// for incoming messages in compositions; a zero row is a no-op).
Smoothed forward_backward(const HmmParams& hmm, const std::vector<int>& obs,
                          const std::optional<Eigen::MatrixXd>& extra_log_factors = std::nullopt);

/// Most probable state path (max-product).
std::vector<int> viterbi(const HmmParams& hmm, const std::vector<int>& obs);

struct BaumWelchResult {
    HmmParams params;
    std::vector<double> log_likelihood_trace;  // one entry per EM iteration
    bool converged = false;
};

BaumWelchResult baum_welch(const HmmParams& init, const std::vector<std::vector<int>>& sequences,
                           int max_iters, double tol);

/// Forward-filter backward-sample: one exact draw from the path posterior.
std::vector<int> ffbs_sample(const HmmParams& hmm, const std::vector<int>& obs, RngStream& rng,
                             const std::optional<Eigen::MatrixXd>& extra_log_factors = std::nullopt);

}  // namespace mpgm::hmm
