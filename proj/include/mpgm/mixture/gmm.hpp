#pragma once

#include "mpgm/core/distributions.hpp"
#include "mpgm/core/rng.hpp"

#include <optional>
#include <vector>

namespace mpgm::mixture {

/// Finite Gaussian mixture with a symmetric-Dirichlet weight prior.
/// Components are either conjugate (one shared NIW prior, collapsed during
/// Gibbs) or fixed known Gaussians.
struct GmmConfig {
    int n_components = 1;
    DirichletParams weights_prior;
    std::optional<NiwParams> niw_prior;             // conjugate mode
    std::vector<GaussianParams> fixed_components;   // fixed-parameter mode

    GmmConfig(int k, DirichletParams weights, NiwParams niw)
        : n_components(k), weights_prior(std::move(weights)), niw_prior(std::move(niw)) {
        validate();
    }
    GmmConfig(int k, DirichletParams weights, std::vector<GaussianParams> components)
        : n_components(k), weights_prior(std::move(weights)),
          fixed_components(std::move(components)) {
        validate();
    }

private:
    void validate() const;
};

/// Mutable sampler state: data, per-datum assignments, per-component count
/// and sufficient-statistic caches kept consistent with the assignments.
class GmmState {
public:
    GmmState(GmmConfig config, Eigen::MatrixXd data, RngStream& rng);

    int n_data() const { return static_cast<int>(data_.rows()); }
    int n_components() const { return config_.n_components; }
    const std::vector<int>& assignments() const { return assignments_; }
    const GmmConfig& config() const { return config_; }
    const Eigen::MatrixXd& data() const { return data_; }

    /// One collapsed Gibbs sweep over all (unclamped) assignments.
    void gibbs_sweep(RngStream& rng);

    /// Normalized full conditional of one datum's assignment given the
    /// current state and any installed incoming message.
    CategoricalDist shared_belief(int datum) const;

    /// Same conditional without the incoming message (the module's own
    /// factor, suitable for consensus products).
    CategoricalDist local_factor(int datum) const;

    /// Incoming factor over one datum's assignment, multiplied into its full
    /// conditional in subsequent updates. A point mass also pins the
    /// assignment to the given component.
    void install_message(int datum, const CategoricalDist& message);
    void clear_message(int datum);

    void set_assignment(int datum, int component);
    void set_clamped(int datum, bool clamped);

    /// Collapsed log joint density ln p(data, assignments) of the current state.
    double log_joint() const;

    /// NIW posterior of one component (conjugate mode only).
    NiwParams component_posterior(int k) const;

    /// Recompute counts and statistics from the assignments and compare with
    /// the incremental caches; returns false on any mismatch.
    bool caches_consistent() const;

private:
    std::vector<double> conditional_log_weights(int datum, bool include_message) const;
    void remove_datum(int datum);
    void add_datum(int datum);

    GmmConfig config_;
    Eigen::MatrixXd data_;
    std::vector<int> assignments_;
    std::vector<int> counts_;
    std::vector<GaussianSuffStats> stats_;  // conjugate mode caches
    std::vector<std::optional<std::vector<double>>> message_log_;  // per datum
    std::vector<bool> clamped_;
};

}  // namespace mpgm::mixture
