#include "mpgm/compositions/proto_agent.hpp"

#include "mpgm/core/logspace.hpp"
#include "mpgm/hmm/inference.hpp"
#include "mpgm/planning/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mpgm::compositions {

namespace {

struct CellGraph {
    std::vector<int> cell_of_state;
    std::vector<int> state_of_cell;
    int width = 0;

    int n() const { return static_cast<int>(cell_of_state.size()); }
};

CellGraph free_cells(const slam::GridWorld& world) {
    CellGraph g;
    g.width = world.width;
    g.state_of_cell.assign(static_cast<std::size_t>(world.n_cells()), -1);
    for (int y = 0; y < world.height; ++y)
        for (int x = 0; x < world.width; ++x)
            if (!world.occupied_at(x, y)) {
                g.state_of_cell[static_cast<std::size_t>(y * world.width + x)] = g.n();
                g.cell_of_state.push_back(y * world.width + x);
            }
    return g;
}

constexpr std::array<std::pair<int, int>, 4> kMoves{{{0, -1}, {1, 0}, {0, 1}, {-1, 0}}};

int move_cell(const slam::GridWorld& world, int cell, int action) {
    const int x = cell % world.width, y = cell / world.width;
    const int nx = x + kMoves[static_cast<std::size_t>(action)].first;
    const int ny = y + kMoves[static_cast<std::size_t>(action)].second;
    if (world.in_bounds(nx, ny) && !world.occupied_at(nx, ny)) return ny * world.width + nx;
    return cell;
}

planning::TabularMdp build_cell_mdp(const ProtoScenario& scenario, const CellGraph& g,
                                    double gamma, double alpha) {
    std::vector<Eigen::MatrixXd> trans(4, Eigen::MatrixXd::Zero(g.n(), g.n()));
    Eigen::MatrixXd reward = Eigen::MatrixXd::Zero(g.n(), 4);
    std::vector<bool> rewarded(static_cast<std::size_t>(scenario.world.n_cells()), false);
    for (const auto& [x, y] : scenario.reward_cells)
        rewarded[static_cast<std::size_t>(y * scenario.world.width + x)] = true;
    for (int s = 0; s < g.n(); ++s) {
        const int cell = g.cell_of_state[static_cast<std::size_t>(s)];
        for (int a = 0; a < 4; ++a) {
            const int next = move_cell(scenario.world, cell, a);
            trans[static_cast<std::size_t>(a)](s, g.state_of_cell[static_cast<std::size_t>(next)]) = 1.0;
            if (rewarded[static_cast<std::size_t>(next)]) reward(s, a) = 1.0;
        }
    }
    return planning::TabularMdp(g.n(), 4, std::move(trans), std::move(reward), std::nullopt, gamma,
                                alpha);
}

std::vector<int> cell_tokens(const ProtoScenario& scenario, int cell, bool vision) {
    const int profile = scenario.profile_of_cell[static_cast<std::size_t>(cell)];
    return vision ? scenario.profile_vision[static_cast<std::size_t>(profile)]
                  : scenario.profile_audio[static_cast<std::size_t>(profile)];
}

}  // namespace

ProtoAgent::ProtoAgent(mixture::MldaState p, hmm::HmmParams t, planning::TabularMdp m)
    : perception(std::move(p)), temporal(std::move(t)), planner(std::move(m)) {
    if (static_cast<Eigen::Index>(perception.config().n_topics) != temporal.n_symbols())
        throw std::invalid_argument("ProtoAgent: MLDA topic count must equal HMM symbol count");
    if (temporal.n_states() != planner.n_states)
        throw std::invalid_argument("ProtoAgent: HMM state count must equal planner state count");
}

ProtoReport run_proto_agent(const ProtoScenario& scenario, const ProtoParams& params) {
    const auto g = free_cells(scenario.world);
    const int n_profiles = static_cast<int>(scenario.profile_vision.size());
    const int n_topics = params.n_topics > 0 ? params.n_topics : n_profiles;
    const int n_states = params.hmm_states > 0 ? params.hmm_states : n_topics;
    const int n_actions = 4;
    RngStream root(scenario.seed);

    // perception training: familiarization sweep over the free cells
    mixture::MldaCorpus corpus;
    for (int visit = 0; visit < params.familiarization_visits; ++visit)
        for (int s = 0; s < g.n(); ++s) {
            const int cell = g.cell_of_state[static_cast<std::size_t>(s)];
            corpus.push_back({"cell" + std::to_string(cell) + "v" + std::to_string(visit),
                              {cell_tokens(scenario, cell, true), cell_tokens(scenario, cell, false)}});
        }
    mixture::MldaConfig mlda_cfg(2, n_topics, {scenario.vision_vocab, scenario.audio_vocab}, 1.0,
                                 {0.1, 0.1});
    RngStream mlda_rng = root.substream("perception");
    mixture::MldaState perception(mlda_cfg, corpus, mlda_rng);
    for (int s = 0; s < params.mlda_sweeps; ++s) perception.gibbs_sweep(mlda_rng);

    // topic likelihoods per profile: p(topic | cell features)
    auto topic_belief = [&](int cell) {
        std::vector<double> logw(static_cast<std::size_t>(n_topics), 0.0);
        for (int t = 0; t < n_topics; ++t) {
            double lw = 0.0;
            const auto phv = perception.phi(0, t);
            for (int w : cell_tokens(scenario, cell, true)) lw += std::log(phv[static_cast<std::size_t>(w)]);
            const auto pha = perception.phi(1, t);
            for (int w : cell_tokens(scenario, cell, false)) lw += std::log(pha[static_cast<std::size_t>(w)]);
            logw[static_cast<std::size_t>(t)] = lw;
        }
        return normalized_from_log(logw);
    };

    // temporal model: start near-uniform, refit on decoded topic streams
    auto uniform_hmm = [&]() {
        std::vector<double> pi(static_cast<std::size_t>(n_states), 1.0 / n_states);
        Eigen::MatrixXd trans = Eigen::MatrixXd::Constant(n_states, n_states, 1.0 / n_states);
        // mildly informative emissions so states are identifiable from symbols
        Eigen::MatrixXd emit = Eigen::MatrixXd::Constant(n_states, n_topics, 0.1 / std::max(1, n_topics - 1));
        for (int k = 0; k < n_states; ++k) emit(k, k % n_topics) = 0.9;
        for (int k = 0; k < n_states; ++k) emit.row(k) /= emit.row(k).sum();
        return hmm::HmmParams(std::move(pi), std::move(trans), std::move(emit));
    };
    hmm::HmmParams temporal = uniform_hmm();

    // planner estimates over abstract states
    Eigen::MatrixXd reward_sum = Eigen::MatrixXd::Zero(n_states, n_actions);
    Eigen::MatrixXd reward_count = Eigen::MatrixXd::Zero(n_states, n_actions);
    std::vector<Eigen::MatrixXd> trans_counts(
        static_cast<std::size_t>(n_actions), Eigen::MatrixXd::Constant(n_states, n_states, 0.5));

    auto estimated_mdp = [&]() {
        std::vector<Eigen::MatrixXd> trans;
        for (int a = 0; a < n_actions; ++a) {
            Eigen::MatrixXd m = trans_counts[static_cast<std::size_t>(a)];
            for (int s = 0; s < n_states; ++s) m.row(s) /= m.row(s).sum();
            trans.push_back(std::move(m));
        }
        Eigen::MatrixXd reward = Eigen::MatrixXd::Zero(n_states, n_actions);
        for (int s = 0; s < n_states; ++s)
            for (int a = 0; a < n_actions; ++a)
                if (reward_count(s, a) > 0.0) reward(s, a) = reward_sum(s, a) / reward_count(s, a);
        return planning::TabularMdp(n_states, n_actions, std::move(trans), std::move(reward),
                                    std::nullopt, params.planner_gamma,
                                    params.planner_temperature);
    };

    std::vector<bool> rewarded(static_cast<std::size_t>(scenario.world.n_cells()), false);
    for (const auto& [x, y] : scenario.reward_cells)
        rewarded[static_cast<std::size_t>(y * scenario.world.width + x)] = true;

    ProtoReport report;
    RngStream act_rng = root.substream("actions");
    const int start_cell = scenario.world.start.y * scenario.world.width + scenario.world.start.x;

    ProtoAgent agent(std::move(perception), temporal, estimated_mdp());
    std::vector<std::vector<int>> topic_streams;

    for (int ep = 0; ep < scenario.episodes; ++ep) {
        agent.planner = estimated_mdp();
        const auto plan = planning::soft_value_iteration(agent.planner);

        int cell = start_cell;
        std::vector<double> state_belief(static_cast<std::size_t>(n_states), 1.0 / n_states);
        std::vector<int> topics;
        double ep_reward = 0.0;
        double max_dev = 0.0;
        int prev_state = -1, prev_action = -1;

        for (int t = 0; t < scenario.episode_length; ++t) {
            // perceive: MLDA topic belief for the current cell's features
            const auto tb = topic_belief(cell);
            const int topic = static_cast<int>(
                std::max_element(tb.begin(), tb.end()) - tb.begin());
            topics.push_back(topic);

            // HMM filter step with the topic as the observed symbol
            std::vector<double> next_belief(static_cast<std::size_t>(n_states), 0.0);
            for (int k = 0; k < n_states; ++k) {
                double pred = 0.0;
                if (t == 0) {
                    pred = agent.temporal.initial[static_cast<std::size_t>(k)];
                } else {
                    for (int j = 0; j < n_states; ++j)
                        pred += state_belief[static_cast<std::size_t>(j)] * agent.temporal.transition(j, k);
                }
                next_belief[static_cast<std::size_t>(k)] = pred * agent.temporal.emission(k, topic);
            }
            double z = 0.0;
            for (double v : next_belief) z += v;
            if (z <= 0.0) {
                next_belief.assign(static_cast<std::size_t>(n_states), 1.0 / n_states);
            } else {
                for (double& v : next_belief) v /= z;
            }
            state_belief = next_belief;

            // CaI action from the belief-weighted soft Q values
            std::vector<double> logits(static_cast<std::size_t>(n_actions), 0.0);
            for (int a = 0; a < n_actions; ++a) {
                double qa = 0.0;
                for (int s = 0; s < n_states; ++s)
                    qa += state_belief[static_cast<std::size_t>(s)] * plan.q(s, a);
                logits[static_cast<std::size_t>(a)] = qa / params.planner_temperature;
            }
            const auto policy = normalized_from_log(logits);
            for (double p : policy) max_dev = std::max(max_dev, std::abs(p - 1.0 / n_actions));
            const int action = static_cast<int>(act_rng.categorical(policy));

            const int abstract_state = static_cast<int>(
                std::max_element(state_belief.begin(), state_belief.end()) - state_belief.begin());
            if (prev_state >= 0)
                trans_counts[static_cast<std::size_t>(prev_action)](prev_state, abstract_state) += 1.0;

            cell = move_cell(scenario.world, cell, action);
            const double r = rewarded[static_cast<std::size_t>(cell)] ? 1.0 : 0.0;
            ep_reward += r;
            reward_sum(abstract_state, action) += r;
            reward_count(abstract_state, action) += 1.0;
            prev_state = abstract_state;
            prev_action = action;
        }

        report.reward_trace.push_back(ep_reward);
        report.max_policy_deviation_from_uniform =
            std::max(report.max_policy_deviation_from_uniform, max_dev);
        topic_streams.push_back(topics);
        report.episode_abstractions.push_back(hmm::viterbi(agent.temporal, topics));

        if ((ep + 1) % params.hmm_refit_every == 0) {
            const auto fit = hmm::baum_welch(uniform_hmm(), topic_streams, 30, 1e-6);
            agent.temporal = fit.params;
        }
    }

    const int last = std::min<int>(10, static_cast<int>(report.reward_trace.size()));
    double sum = 0.0;
    for (int i = 0; i < last; ++i)
        sum += report.reward_trace[report.reward_trace.size() - 1 - static_cast<std::size_t>(i)];
    report.mean_reward_last10 = last > 0 ? sum / last : 0.0;
    return report;
}

planning::TabularMdp proto_true_cell_mdp(const ProtoScenario& scenario, double gamma,
                                         double temperature) {
    return build_cell_mdp(scenario, free_cells(scenario.world), gamma, temperature);
}

double proto_rollout_reward(const ProtoScenario& scenario,
                            const std::vector<int>& action_of_state) {
    const auto g = free_cells(scenario.world);
    std::vector<bool> rewarded(static_cast<std::size_t>(scenario.world.n_cells()), false);
    for (const auto& [x, y] : scenario.reward_cells)
        rewarded[static_cast<std::size_t>(y * scenario.world.width + x)] = true;
    int cell = scenario.world.start.y * scenario.world.width + scenario.world.start.x;
    double total = 0.0;
    for (int t = 0; t < scenario.episode_length; ++t) {
        const int s = g.state_of_cell[static_cast<std::size_t>(cell)];
        cell = move_cell(scenario.world, cell, action_of_state[static_cast<std::size_t>(s)]);
        if (rewarded[static_cast<std::size_t>(cell)]) total += 1.0;
    }
    return total;
}

}  // namespace mpgm::compositions
