#pragma once

#include "mpgm/hmm/hmm_model.hpp"
#include "mpgm/mixture/mlda.hpp"
#include "mpgm/planning/tabular_mdp.hpp"
#include "mpgm/slam/grid_world.hpp"

#include <cstdint>
#include <vector>

namespace mpgm::compositions {

/// Episodic world for the integrated agent: the agent walks the free cells,
/// each cell emits multimodal feature tokens from its profile, and some
/// cells yield reward.
struct ProtoScenario {
    slam::GridWorld world;
    std::vector<int> profile_of_cell;                 // per cell, -1 on walls
    std::vector<std::vector<int>> profile_vision;     // tokens per profile
    std::vector<std::vector<int>> profile_audio;
    int vision_vocab = 0;
    int audio_vocab = 0;
    std::vector<std::pair<int, int>> reward_cells;    // (x, y), +1 per step inside
    std::vector<int> room_of_cell;                    // reporting only
    int episodes = 100;
    int episode_length = 25;
    std::uint64_t seed = 0;
};

struct ProtoParams {
    int n_topics = 0;        // 0 = number of profiles
    int hmm_states = 0;      // 0 = number of topics
    double planner_gamma = 0.95;
    double planner_temperature = 0.05;
    int mlda_sweeps = 100;
    int hmm_refit_every = 10;
    int familiarization_visits = 3;  // per cell, for perception training
};

/// The wired agent: MLDA perception over cell features, HMM temporal
/// abstraction over topic symbols, control-as-inference planner over the
/// abstract states. Symbol spaces must line up: MLDA topics feed the HMM as
/// observation symbols and HMM states are the planner's states.
struct ProtoAgent {
    mixture::MldaState perception;
    hmm::HmmParams temporal;
    planning::TabularMdp planner;

    ProtoAgent(mixture::MldaState p, hmm::HmmParams t, planning::TabularMdp m);
};

struct ProtoReport {
    std::vector<double> reward_trace;                  // per episode
    std::vector<std::vector<int>> episode_abstractions;  // Viterbi-decoded states
    double mean_reward_last10 = 0.0;
    double max_policy_deviation_from_uniform = 0.0;    // over all episodes
};

ProtoReport run_proto_agent(const ProtoScenario& scenario, const ProtoParams& params);

/// Ground-truth cell-level MDP of the scenario (states = free cells in
/// row-major order, actions = the four grid moves). Reference policies for
/// scoring the agent are computed against this model.
planning::TabularMdp proto_true_cell_mdp(const ProtoScenario& scenario, double gamma,
                                         double temperature);

/// Total reward of rolling a per-free-cell policy from the start cell for
/// one episode.
double proto_rollout_reward(const ProtoScenario& scenario, const std::vector<int>& action_of_state);

}  // namespace mpgm::compositions
