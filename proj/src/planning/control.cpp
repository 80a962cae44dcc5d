#include "mpgm/planning/control.hpp"

#include "mpgm/core/logspace.hpp"

#include <cmath>
#include <stdexcept>

namespace mpgm::planning {

namespace {

Eigen::VectorXd soft_max_over_actions(const Eigen::MatrixXd& q, double alpha) {
    Eigen::VectorXd v(q.rows());
    for (Eigen::Index s = 0; s < q.rows(); ++s) {
        std::vector<double> scaled(static_cast<std::size_t>(q.cols()));
        for (Eigen::Index a = 0; a < q.cols(); ++a)
            scaled[static_cast<std::size_t>(a)] = q(s, a) / alpha;
        v(s) = alpha * log_sum_exp(scaled);
    }
    return v;
}

std::vector<CategoricalDist> policy_from_q(const Eigen::MatrixXd& q, const Eigen::VectorXd& v,
                                           double alpha) {
    std::vector<CategoricalDist> policy;
    policy.reserve(static_cast<std::size_t>(q.rows()));
    for (Eigen::Index s = 0; s < q.rows(); ++s) {
        std::vector<double> logw(static_cast<std::size_t>(q.cols()));
        for (Eigen::Index a = 0; a < q.cols(); ++a)
            logw[static_cast<std::size_t>(a)] = (q(s, a) - v(s)) / alpha;
        policy.push_back(CategoricalDist::from_log_weights(logw));
    }
    return policy;
}

Eigen::MatrixXd backup(const TabularMdp& mdp, const Eigen::VectorXd& v_next, double discount) {
    Eigen::MatrixXd q(mdp.n_states, mdp.n_actions);
    for (int a = 0; a < mdp.n_actions; ++a)
        q.col(a) = mdp.reward.col(a) + discount * (mdp.transition[a] * v_next);
    return q;
}

}  // namespace

SoftPlan soft_value_iteration(const TabularMdp& mdp) {
    const double alpha = mdp.temperature;
    if (!(alpha > 0.0)) throw std::invalid_argument("soft_value_iteration: temperature must be > 0");
    SoftPlan plan;
    if (mdp.horizon) {
        const int T = *mdp.horizon;
        plan.q_by_step.resize(T);
        plan.policy_by_step.resize(T);
        Eigen::VectorXd v_next = Eigen::VectorXd::Zero(mdp.n_states);
        for (int t = T - 1; t >= 0; --t) {
            const Eigen::MatrixXd q = backup(mdp, v_next, 1.0);
            const Eigen::VectorXd v = soft_max_over_actions(q, alpha);
            plan.q_by_step[t] = q;
            plan.policy_by_step[t] = policy_from_q(q, v, alpha);
            v_next = v;
        }
        plan.q = plan.q_by_step.front();
        plan.v = v_next;
        plan.policy = plan.policy_by_step.front();
        plan.iterations = T;
        return plan;
    }
    const double g = *mdp.gamma;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(mdp.n_states);
    Eigen::MatrixXd q;
    constexpr double kResidualTol = 1e-10;
    constexpr int kMaxIters = 1000000;
    int iter = 0;
    double residual = 0.0;
    for (; iter < kMaxIters; ++iter) {
        q = backup(mdp, v, g);
        const Eigen::VectorXd v_new = soft_max_over_actions(q, alpha);
        residual = (v_new - v).cwiseAbs().maxCoeff();
        v = v_new;
        if (residual < kResidualTol) break;
    }
    plan.q = q;
    plan.v = v;
    plan.policy = policy_from_q(q, v, alpha);
    plan.q_by_step = {q};
    plan.policy_by_step = {plan.policy};
    plan.iterations = iter + 1;
    plan.residual = residual;
    return plan;
}

Eigen::MatrixXd TrajectoryPosterior::step_marginal(int t, int n_states, int n_actions) const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_states, n_actions);
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        const auto& [s, a] = trajectories[i][static_cast<std::size_t>(t)];
        m(s, a) += probs[i];
    }
    return m;
}

TrajectoryPosterior trajectory_posterior(const TabularMdp& mdp, int length) {
    if (length < 1) throw std::invalid_argument("trajectory_posterior: length must be >= 1");
    const double pairs = static_cast<double>(mdp.n_states) * mdp.n_actions;
    if (std::pow(pairs, length) > 1e6)
        throw std::invalid_argument("trajectory_posterior: instance too large to enumerate");

    const OptimalityModel opt(mdp);
    TrajectoryPosterior post;
    post.length = length;
    std::vector<std::pair<int, int>> current(static_cast<std::size_t>(length));
    std::vector<double> log_weights;

    // depth-first enumeration over (s, a) sequences
    auto recurse = [&](auto&& self, int t, double logw) -> void {
        if (t == length) {
            post.trajectories.push_back(current);
            log_weights.push_back(logw);
            return;
        }
        for (int s = 0; s < mdp.n_states; ++s) {
            double step_base = logw;
            if (t == 0) {
                const double p0 = mdp.initial[static_cast<std::size_t>(s)];
                if (p0 <= 0.0) continue;
                step_base += std::log(p0);
            } else {
                const auto& [ps, pa] = current[static_cast<std::size_t>(t - 1)];
                const double ptrans = mdp.transition[pa](ps, s);
                if (ptrans <= 0.0) continue;
                step_base += std::log(ptrans);
            }
            for (int a = 0; a < mdp.n_actions; ++a) {
                current[static_cast<std::size_t>(t)] = {s, a};
                self(self, t + 1, step_base + opt.log_prob_opt(s, a));
            }
        }
    };
    recurse(recurse, 0, 0.0);
    if (post.trajectories.empty())
        throw std::runtime_error("trajectory_posterior: no feasible trajectory");
    post.probs = normalized_from_log(log_weights);
    return post;
}

EfeValues efe_action_values(const TabularPomdp& pomdp, const CategoricalDist& belief) {
    const auto& mdp = pomdp.core;
    if (static_cast<int>(belief.size()) != mdp.n_states)
        throw std::invalid_argument("efe_action_values: belief size mismatch");
    EfeValues out;
    out.g.resize(static_cast<std::size_t>(mdp.n_actions));
    out.risk.resize(static_cast<std::size_t>(mdp.n_actions));
    out.ambiguity.resize(static_cast<std::size_t>(mdp.n_actions));

    // per-state observation entropies H[p(o'|s')]
    Eigen::VectorXd obs_entropy(mdp.n_states);
    for (int s = 0; s < mdp.n_states; ++s) {
        double h = 0.0;
        for (int o = 0; o < pomdp.n_observations; ++o) {
            const double p = pomdp.obs_model(s, o);
            if (p > 0.0) h -= p * std::log(p);
        }
        obs_entropy(s) = h;
    }

    for (int a = 0; a < mdp.n_actions; ++a) {
        Eigen::VectorXd q_state = Eigen::VectorXd::Zero(mdp.n_states);
        for (int s = 0; s < mdp.n_states; ++s)
            if (belief[static_cast<std::size_t>(s)] > 0.0)
                q_state += belief[static_cast<std::size_t>(s)] * mdp.transition[a].row(s).transpose();
        const Eigen::VectorXd q_obs = pomdp.obs_model.transpose() * q_state;

        double risk = 0.0;
        for (int o = 0; o < pomdp.n_observations; ++o) {
            const double q = q_obs(o);
            if (q <= 0.0) continue;
            const double pref = pomdp.preference[static_cast<std::size_t>(o)];
            if (pref <= 0.0) {
                risk = std::numeric_limits<double>::infinity();
                break;
            }
            risk += q * (std::log(q) - std::log(pref));
        }
        const double ambiguity = q_state.dot(obs_entropy);
        out.risk[static_cast<std::size_t>(a)] = risk;
        out.ambiguity[static_cast<std::size_t>(a)] = ambiguity;
        out.g[static_cast<std::size_t>(a)] = risk + ambiguity;
    }
    return out;
}

GoalPlan plan_to_goal(const TabularMdp& mdp, const std::vector<double>& goal_log_reward,
                      int start_state) {
    if (static_cast<int>(goal_log_reward.size()) != mdp.n_states)
        throw std::invalid_argument("plan_to_goal: goal vector size mismatch");
    if (start_state < 0 || start_state >= mdp.n_states)
        throw std::invalid_argument("plan_to_goal: start state out of range");
    double best = kNegInf;
    for (double g : goal_log_reward) best = std::max(best, g);
    if (best == kNegInf) throw std::invalid_argument("plan_to_goal: goal has no finite entry");

    TabularMdp goal_mdp = mdp;
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a)
            goal_mdp.reward(s, a) = goal_log_reward[static_cast<std::size_t>(s)];

    GoalPlan out;
    out.plan = soft_value_iteration(goal_mdp);

    const int cap = mdp.horizon ? *mdp.horizon : 4 * mdp.n_states;
    int s = start_state;
    out.states.push_back(s);
    for (int t = 0; t < cap; ++t) {
        if (goal_log_reward[static_cast<std::size_t>(s)] >= best) break;  // reached a top goal
        const auto& policy =
            mdp.horizon ? out.plan.policy_by_step[std::min<std::size_t>(
                              static_cast<std::size_t>(t), out.plan.policy_by_step.size() - 1)]
                        : out.plan.policy;
        const auto& dist = policy[static_cast<std::size_t>(s)];
        int best_a = 0;
        for (std::size_t a = 1; a < dist.size(); ++a)
            if (dist[a] > dist[static_cast<std::size_t>(best_a)]) best_a = static_cast<int>(a);
        int next = 0;
        mdp.transition[best_a].row(s).maxCoeff(&next);
        out.actions.push_back(best_a);
        out.states.push_back(next);
        s = next;
    }
    return out;
}

}  // namespace mpgm::planning
