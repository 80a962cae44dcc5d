#pragma once

#include "mpgm/core/distributions.hpp"

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <vector>

namespace mpgm::planning {

/// Finite MDP. transition[a] is an S x S matrix with row s giving
/// p(s' | s, a); exactly one of {horizon, gamma} must be configured.
struct TabularMdp {
    int n_states = 0;
    int n_actions = 0;
    std::vector<Eigen::MatrixXd> transition;  // one S x S matrix per action
    Eigen::MatrixXd reward;                   // S x A
    std::optional<int> horizon;
    std::optional<double> gamma;
    double temperature = 1.0;
    std::vector<double> initial;  // distribution over start states

    TabularMdp(int s, int a, std::vector<Eigen::MatrixXd> trans, Eigen::MatrixXd rew,
               std::optional<int> t, std::optional<double> g, double alpha,
               std::vector<double> init = {})
        : n_states(s), n_actions(a), transition(std::move(trans)), reward(std::move(rew)),
          horizon(t), gamma(g), temperature(alpha), initial(std::move(init)) {
        if (s < 1 || a < 1) throw std::invalid_argument("TabularMdp: need S >= 1 and A >= 1");
        if (static_cast<int>(transition.size()) != a)
            throw std::invalid_argument("TabularMdp: one transition matrix per action");
        for (const auto& m : transition) {
            if (m.rows() != s || m.cols() != s)
                throw std::invalid_argument("TabularMdp: transition matrices must be S x S");
            for (int i = 0; i < s; ++i) {
                double sum = 0.0;
                for (int j = 0; j < s; ++j) {
                    if (!(m(i, j) >= 0.0))
                        throw std::invalid_argument("TabularMdp: negative transition probability");
                    sum += m(i, j);
                }
                if (std::abs(sum - 1.0) > 1e-9)
                    throw std::invalid_argument("TabularMdp: transition row does not sum to 1");
            }
        }
        if (reward.rows() != s || reward.cols() != a)
            throw std::invalid_argument("TabularMdp: reward must be S x A");
        if (horizon.has_value() == gamma.has_value())
            throw std::invalid_argument("TabularMdp: configure exactly one of horizon and gamma");
        if (horizon && *horizon < 1) throw std::invalid_argument("TabularMdp: horizon must be >= 1");
        if (gamma && !(*gamma >= 0.0 && *gamma < 1.0))
            throw std::invalid_argument("TabularMdp: gamma must lie in [0, 1)");
        if (!(temperature > 0.0)) throw std::invalid_argument("TabularMdp: temperature must be > 0");
        if (initial.empty()) initial.assign(s, 1.0 / s);
        if (static_cast<int>(initial.size()) != s)
            throw std::invalid_argument("TabularMdp: initial distribution size mismatch");
        double isum = 0.0;
        for (double p : initial) {
            if (!(p >= 0.0)) throw std::invalid_argument("TabularMdp: negative initial probability");
            isum += p;
        }
        if (std::abs(isum - 1.0) > 1e-9)
            throw std::invalid_argument("TabularMdp: initial distribution does not sum to 1");
    }
};

/// Reward recoded as log-probabilities of the binary optimality variable:
/// log p(O = 1 | s, a) = (r(s, a) - max r) / temperature, so all entries <= 0.
struct OptimalityModel {
    Eigen::MatrixXd log_prob_opt;

    explicit OptimalityModel(const TabularMdp& mdp) {
        const double rmax = mdp.reward.maxCoeff();
        log_prob_opt = (mdp.reward.array() - rmax) / mdp.temperature;
    }
};

/// POMDP: MDP core plus an observation channel and a goal prior over
/// observations ("preference").
struct TabularPomdp {
    TabularMdp core;
    int n_observations = 0;
    Eigen::MatrixXd obs_model;  // S x O, row stochastic
    CategoricalDist preference;

    TabularPomdp(TabularMdp mdp, Eigen::MatrixXd obs, CategoricalDist pref)
        : core(std::move(mdp)), n_observations(static_cast<int>(obs.cols())),
          obs_model(std::move(obs)), preference(std::move(pref)) {
        if (obs_model.rows() != core.n_states || obs_model.cols() < 1)
            throw std::invalid_argument("TabularPomdp: obs_model must be S x O");
        for (int i = 0; i < core.n_states; ++i) {
            double sum = 0.0;
            for (int j = 0; j < n_observations; ++j) {
                if (!(obs_model(i, j) >= 0.0))
                    throw std::invalid_argument("TabularPomdp: negative observation probability");
                sum += obs_model(i, j);
            }
            if (std::abs(sum - 1.0) > 1e-9)
                throw std::invalid_argument("TabularPomdp: obs_model row does not sum to 1");
        }
        if (static_cast<int>(preference.size()) != n_observations)
            throw std::invalid_argument("TabularPomdp: preference size mismatch");
    }
};

}  // namespace mpgm::planning
