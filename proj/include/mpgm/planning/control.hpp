#pragma once

#include "mpgm/core/distributions.hpp"
#include "mpgm/planning/tabular_mdp.hpp"

#include <vector>

namespace mpgm::planning {

/// Result of soft (maximum-entropy) value iteration. For finite-horizon MDPs
/// the per-step tables are filled (index 0 = first decision); q/v/policy are
/// the step-0 tables. For discounted MDPs they hold the stationary fixed
/// point and the per-step vectors have a single entry.
struct SoftPlan {
    Eigen::MatrixXd q;  // S x A
    Eigen::VectorXd v;  // S
    std::vector<CategoricalDist> policy;
    std::vector<Eigen::MatrixXd> q_by_step;
    std::vector<std::vector<CategoricalDist>> policy_by_step;
    int iterations = 0;
    double residual = 0.0;
};

/// V(s) = alpha * log sum_a exp(Q(s,a)/alpha), Q = r + gamma E[V'],
/// policy(a|s) = exp((Q - V)/alpha). Discounted case iterates to a residual
/// below 1e-10.
SoftPlan soft_value_iteration(const TabularMdp& mdp);

/// Exact posterior over (state, action) trajectories of a fixed length given
/// all optimality variables equal to one. Throws a size error when
/// (S*A)^T exceeds the enumeration budget of 1e6 trajectories.
struct TrajectoryPosterior {
    int length = 0;
    std::vector<std::vector<std::pair<int, int>>> trajectories;  // (s, a) per step
    std::vector<double> probs;

    /// Marginal over (s, a) at one step, as an S x A matrix.
    Eigen::MatrixXd step_marginal(int t, int n_states, int n_actions) const;
};

TrajectoryPosterior trajectory_posterior(const TabularMdp& mdp, int length);

/// Expected free energy per action, decomposed as G = risk + ambiguity with
/// risk = KL[q(o'|a) || preference] and ambiguity = E_{q(s'|a)} H[p(o'|s')].
/// A preference of zero where q(o'|a) > 0 yields an infinite risk sentinel.
struct EfeValues {
    std::vector<double> g;
    std::vector<double> risk;
    std::vector<double> ambiguity;
};

EfeValues efe_action_values(const TabularPomdp& pomdp, const CategoricalDist& belief);

/// Plan toward states scoring high under goal_log_reward: runs soft value
/// iteration with reward(s, a) = goal_log_reward(s) and rolls the greedy
/// action sequence from start_state until a maximal-goal state is reached.
struct GoalPlan {
    std::vector<int> actions;
    std::vector<int> states;  // visited states, starting state first
    SoftPlan plan;
};

GoalPlan plan_to_goal(const TabularMdp& mdp, const std::vector<double>& goal_log_reward,
                      int start_state);

}  // namespace mpgm::planning
