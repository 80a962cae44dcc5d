#pragma once

#include "mpgm/mixture/gmm.hpp"
#include "mpgm/planning/control.hpp"
#include "mpgm/serket/bus.hpp"
#include "mpgm/slam/rbpf.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace mpgm::compositions {

/// Recorded exploration run: actions and range readings of a robot in a grid
/// world, word utterances at some steps, plus ground truth for scoring.
struct SpcoScenario {
    slam::GridWorld world;
    double eps_move = 0.0;
    double eps_sense = 0.0;
    std::vector<slam::MoveAction> actions;
    std::vector<slam::RangeObservation> observations;
    std::vector<slam::Pose> true_poses;           // pose after each step
    std::map<int, std::vector<int>> utterances;   // step -> word tokens
    int vocab_size = 0;
    std::vector<int> room_of_cell;                // truth per cell, -1 = none
    std::vector<int> room_word;                   // canonical word per room
    std::uint64_t seed = 0;
};

struct SpcoParams {
    int n_particles = 200;
    int n_places = 3;        // K place Gaussians
    int n_categories = 3;    // C word categories
    double place_alpha = 1.0;
    double category_alpha = 1.0;
    double word_beta = 0.1;
    int rounds = 100;
    double planner_temperature = 1.0;
};

struct SpcoMetrics {
    double pose_rmse = 0.0;
    double purity = 0.0;
    double word_accuracy = 0.0;
};

/// Fitted model: SLAM map, place Gaussians over utterance-step positions,
/// the step -> place -> category -> words assignment chain, and category
/// word distributions.
struct SpcoLiteModel {
    Eigen::MatrixXd map;                               // occupancy estimate
    std::vector<slam::Pose> estimated_poses;           // per step (MAP)
    std::vector<int> utterance_steps;                  // the clustered steps
    std::vector<int> place_of_step;                    // per utterance step
    std::vector<int> category_of_place;
    std::vector<Eigen::VectorXd> place_mean;
    std::vector<Eigen::MatrixXd> place_cov;
    std::vector<double> place_weight;
    std::vector<std::vector<double>> word_dist;        // per category, over vocab
    int vocab_size = 0;
    slam::GridWorld world;                             // geometry for planning
    double planner_temperature = 1.0;
    SpcoMetrics metrics;

    /// Posterior over places given one word, by Bayes over the category word
    /// distributions. Throws if the word was never observed in training.
    std::vector<double> place_posterior(int word) const;
};

SpcoLiteModel fit_spco_lite(const SpcoScenario& scenario, const SpcoParams& params);

struct SpcoNaviResult {
    std::vector<int> path_cells;          // visited cells (flattened indices)
    std::vector<double> goal_log_reward;  // per cell
    planning::GoalPlan plan;
};

/// Plan toward the place named by goal_word: p(place | word) is projected to
/// a per-cell goal score and handed to the control-as-inference planner.
SpcoNaviResult spconavi_lite(const SpcoLiteModel& model, int goal_word, int start_cell);

}  // namespace mpgm::compositions
