#include "mpgm/compositions/spco_lite.hpp"

#include "mpgm/core/logspace.hpp"
#include "mpgm/serket/endpoints.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace mpgm::compositions {

namespace {

using mixture::GmmConfig;
using mixture::GmmState;
using serket::Belief;
using serket::ModuleEndpoint;

/// Word-category module of the place chain: each place j carries a category
/// c_j (collapsed Dirichlet over categories), each category a collapsed
/// Dirichlet word distribution; the factor over a step's place index is the
/// Polya predictive of that step's words under each candidate place.
class PlaceWordEndpoint : public ModuleEndpoint {
public:
    PlaceWordEndpoint(std::string id, int n_places, int n_categories, int vocab,
                      double category_alpha, double word_beta,
                      std::vector<std::pair<std::string, std::vector<int>>> step_words,
                      RngStream& rng)
        : id_(std::move(id)), n_places_(n_places), n_categories_(n_categories), vocab_(vocab),
          cat_alpha_(category_alpha), beta_(word_beta), steps_(std::move(step_words)) {
        place_of_step_.assign(steps_.size(), 0);
        category_of_place_.resize(static_cast<std::size_t>(n_places_));
        for (int j = 0; j < n_places_; ++j)
            category_of_place_[static_cast<std::size_t>(j)] =
                static_cast<int>(rng.uniform_int(static_cast<std::size_t>(n_categories_)));
        word_counts_ = Eigen::MatrixXd::Zero(n_categories_, vocab_);
        for (std::size_t u = 0; u < steps_.size(); ++u) add_step_counts(static_cast<int>(u), +1.0);
    }

    std::string id() const override { return id_; }

    std::vector<std::pair<std::string, Support>> shared_vars() const override {
        std::vector<std::pair<std::string, Support>> out;
        for (const auto& [var, words] : steps_)
            out.emplace_back(var, Support::categorical(n_places_));
        return out;
    }

    void local_update(RngStream& rng) override {
        // Gibbs over place categories given current step -> place assignments
        for (int j = 0; j < n_places_; ++j) {
            // word counts contributed by steps currently assigned to place j
            Eigen::VectorXd mine = Eigen::VectorXd::Zero(vocab_);
            for (std::size_t u = 0; u < steps_.size(); ++u)
                if (place_of_step_[u] == j)
                    for (int w : steps_[u].second) mine(w) += 1.0;
            const int old_cat = category_of_place_[static_cast<std::size_t>(j)];
            word_counts_.row(old_cat) -= mine.transpose();

            std::vector<int> cat_sizes(static_cast<std::size_t>(n_categories_), 0);
            for (int jj = 0; jj < n_places_; ++jj)
                if (jj != j) cat_sizes[static_cast<std::size_t>(category_of_place_[static_cast<std::size_t>(jj)])] += 1;

            std::vector<double> logw(static_cast<std::size_t>(n_categories_));
            for (int c = 0; c < n_categories_; ++c) {
                double lw = std::log(cat_sizes[static_cast<std::size_t>(c)] + cat_alpha_);
                lw += polya_predictive(word_counts_.row(c), mine);
                logw[static_cast<std::size_t>(c)] = lw;
            }
            const int cat = static_cast<int>(rng.categorical_logits(logw));
            category_of_place_[static_cast<std::size_t>(j)] = cat;
            word_counts_.row(cat) += mine.transpose();
        }
    }

    Belief emit_factor(const std::string& var) override {
        const int u = step_of(var);
        // leave this step's words out of its place's category counts
        Eigen::VectorXd mine = Eigen::VectorXd::Zero(vocab_);
        for (int w : steps_[static_cast<std::size_t>(u)].second) mine(w) += 1.0;
        const int old_place = place_of_step_[static_cast<std::size_t>(u)];
        const int old_cat = category_of_place_[static_cast<std::size_t>(old_place)];
        word_counts_.row(old_cat) -= mine.transpose();
        std::vector<double> logw(static_cast<std::size_t>(n_places_));
        for (int j = 0; j < n_places_; ++j) {
            const int c = category_of_place_[static_cast<std::size_t>(j)];
            logw[static_cast<std::size_t>(j)] = polya_predictive(word_counts_.row(c), mine);
        }
        word_counts_.row(old_cat) += mine.transpose();
        return Belief{var, CategoricalDist::from_log_weights(logw)};
    }

    void install_message(const std::string& var, const Belief& message) override {
        const int u = step_of(var);
        const auto& dist = message.categorical();
        int point = -1;
        for (std::size_t j = 0; j < dist.size(); ++j)
            if (dist[j] == 1.0) point = static_cast<int>(j);
        if (point < 0) return;  // only sampled (point) messages move state here
        if (point == place_of_step_[static_cast<std::size_t>(u)]) return;
        add_step_counts(u, -1.0);
        place_of_step_[static_cast<std::size_t>(u)] = point;
        add_step_counts(u, +1.0);
    }

    const std::vector<int>& place_of_step() const { return place_of_step_; }
    const std::vector<int>& category_of_place() const { return category_of_place_; }

    std::vector<double> word_distribution(int category) const {
        std::vector<double> dist(static_cast<std::size_t>(vocab_));
        const double total = word_counts_.row(category).sum() + beta_ * vocab_;
        for (int w = 0; w < vocab_; ++w)
            dist[static_cast<std::size_t>(w)] = (word_counts_(category, w) + beta_) / total;
        return dist;
    }

private:
    int step_of(const std::string& var) const {
        for (std::size_t u = 0; u < steps_.size(); ++u)
            if (steps_[u].first == var) return static_cast<int>(u);
        throw std::invalid_argument("PlaceWordEndpoint: unknown variable '" + var + "'");
    }

    void add_step_counts(int u, double sign) {
        const int c = category_of_place_[static_cast<std::size_t>(place_of_step_[static_cast<std::size_t>(u)])];
        for (int w : steps_[static_cast<std::size_t>(u)].second) word_counts_(c, w) += sign;
    }

    /// log p(extra words | existing counts) under the collapsed Dirichlet.
    double polya_predictive(const Eigen::RowVectorXd& counts, const Eigen::VectorXd& extra) const {
        double lp = 0.0;
        double n = 0.0, m = 0.0;
        for (int w = 0; w < vocab_; ++w) {
            n += counts(w);
            m += extra(w);
            if (extra(w) > 0.0)
                lp += std::lgamma(counts(w) + extra(w) + beta_) - std::lgamma(counts(w) + beta_);
        }
        lp -= std::lgamma(n + m + beta_ * vocab_) - std::lgamma(n + beta_ * vocab_);
        return lp;
    }

    std::string id_;
    int n_places_, n_categories_, vocab_;
    double cat_alpha_, beta_;
    std::vector<std::pair<std::string, std::vector<int>>> steps_;
    std::vector<int> place_of_step_;
    std::vector<int> category_of_place_;
    Eigen::MatrixXd word_counts_;  // C x V
};

Eigen::Vector2d cell_center(const slam::Pose& pose) {
    return {pose.x + 0.5, pose.y + 0.5};
}

}  // namespace

std::vector<double> SpcoLiteModel::place_posterior(int word) const {
    if (word < 0 || word >= vocab_size)
        throw std::invalid_argument("place_posterior: unknown word token");
    bool seen = false;
    for (const auto& dist : word_dist) seen |= dist[static_cast<std::size_t>(word)] > 1e-6;
    if (!seen) throw std::invalid_argument("place_posterior: word never observed in training");
    std::vector<double> post(place_weight.size());
    for (std::size_t j = 0; j < place_weight.size(); ++j)
        post[j] = place_weight[j] *
                  word_dist[static_cast<std::size_t>(category_of_place[j])][static_cast<std::size_t>(word)];
    double z = 0.0;
    for (double p : post) z += p;
    for (double& p : post) p /= z;
    return post;
}

SpcoLiteModel fit_spco_lite(const SpcoScenario& scenario, const SpcoParams& params) {
    if (scenario.utterances.empty())
        throw std::invalid_argument("fit_spco_lite: scenario has no word observations");
    if (scenario.actions.size() != scenario.observations.size())
        throw std::invalid_argument("fit_spco_lite: one observation per action");

    RngStream root(scenario.seed);

    // stage 1: SLAM over the recorded run (start pose known, map unknown)
    slam::RbpfConfig slam_cfg;
    slam_cfg.n_particles = params.n_particles;
    slam_cfg.eps_move = scenario.eps_move;
    slam_cfg.eps_sense = scenario.eps_sense;
    slam_cfg.start_pose = scenario.world.start;
    slam::GridWorld geometry(scenario.world.width, scenario.world.height, {}, scenario.world.start);
    slam::RbpfState filter(geometry, slam_cfg);
    RngStream slam_rng = root.substream("slam");
    std::vector<slam::Pose> map_poses;
    for (std::size_t t = 0; t < scenario.actions.size(); ++t) {
        filter.step(scenario.actions[t], scenario.observations[t], slam_rng);
        const auto belief = filter.pose_belief();
        std::size_t best = 0;
        for (std::size_t i = 1; i < belief.size(); ++i)
            if (belief[i] > belief[best]) best = i;
        map_poses.push_back(geometry.pose_from_index(static_cast<int>(best)));
    }

    // stage 2: place clustering + word categories over the bus
    std::vector<int> utterance_steps;
    for (const auto& [step, words] : scenario.utterances) {
        if (step < 0 || step >= static_cast<int>(scenario.actions.size()))
            throw std::invalid_argument("fit_spco_lite: utterance step out of range");
        utterance_steps.push_back(step);
    }
    std::sort(utterance_steps.begin(), utterance_steps.end());
    const int n_utter = static_cast<int>(utterance_steps.size());

    Eigen::MatrixXd positions(n_utter, 2);
    for (int u = 0; u < n_utter; ++u)
        positions.row(u) =
            cell_center(map_poses[static_cast<std::size_t>(utterance_steps[static_cast<std::size_t>(u)])])
                .transpose();

    const Eigen::VectorXd mean0 = Eigen::VectorXd::Constant(2, scenario.world.width / 2.0);
    NiwParams niw(mean0, 0.05, 5.0, Eigen::MatrixXd::Identity(2, 2) * 4.0);
    GmmConfig gmm_cfg(params.n_places, DirichletParams::symmetric(
                                           static_cast<std::size_t>(params.n_places), params.place_alpha),
                      niw);
    RngStream init_rng = root.substream("init");
    GmmState gmm(gmm_cfg, positions, init_rng);

    std::vector<std::pair<std::string, std::vector<int>>> step_words;
    for (int u = 0; u < n_utter; ++u)
        step_words.emplace_back("i" + std::to_string(u),
                                scenario.utterances.at(utterance_steps[static_cast<std::size_t>(u)]));

    serket::Bus bus(scenario.seed);
    bus.register_endpoint(std::make_shared<serket::GmmEndpoint>("places", std::move(gmm), "i",
                                                                /*rb_samples=*/0));
    bus.register_endpoint(std::make_shared<PlaceWordEndpoint>(
        "words", params.n_places, params.n_categories, scenario.vocab_size, params.category_alpha,
        params.word_beta, step_words, init_rng));
    for (int u = 0; u < n_utter; ++u)
        bus.connect({serket::ConnectionKind::HeadToTail, "i" + std::to_string(u),
                     {"places", "words"}});

    RngStream bus_rng = root.substream("bus");
    bus.run_until(serket::ExchangeMode::SampleExchange, params.rounds, -1.0, bus_rng);

    const auto& gmm_ep = dynamic_cast<const serket::GmmEndpoint&>(*bus.endpoints()[0]);
    const auto& word_ep = dynamic_cast<const PlaceWordEndpoint&>(*bus.endpoints()[1]);

    SpcoLiteModel model{Eigen::MatrixXd(),
                        map_poses,
                        utterance_steps,
                        word_ep.place_of_step(),
                        word_ep.category_of_place(),
                        {},
                        {},
                        {},
                        {},
                        scenario.vocab_size,
                        scenario.world,
                        params.planner_temperature,
                        {}};
    model.map = filter.map_estimate();
    const auto& final_state = gmm_ep.state();
    std::vector<int> place_counts(static_cast<std::size_t>(params.n_places), 0);
    for (int v : final_state.assignments()) place_counts[static_cast<std::size_t>(v)] += 1;
    for (int j = 0; j < params.n_places; ++j) {
        const NiwParams post = final_state.component_posterior(j);
        model.place_mean.push_back(post.mean0());
        const double denom = post.dof() - 2.0 - 1.0;  // E[cov] of a 2-D inverse-Wishart
        model.place_cov.push_back(post.scale_matrix() / std::max(denom, 0.5));
        model.place_weight.push_back(
            (place_counts[static_cast<std::size_t>(j)] + params.place_alpha) /
            (n_utter + params.n_places * params.place_alpha));
    }
    for (int c = 0; c < params.n_categories; ++c)
        model.word_dist.push_back(word_ep.word_distribution(c));

    // metrics against ground truth
    double se = 0.0;
    for (std::size_t t = 0; t < map_poses.size(); ++t) {
        const double dx = map_poses[t].x - scenario.true_poses[t].x;
        const double dy = map_poses[t].y - scenario.true_poses[t].y;
        se += dx * dx + dy * dy;
    }
    model.metrics.pose_rmse = std::sqrt(se / static_cast<double>(map_poses.size()));

    if (!scenario.room_of_cell.empty()) {
        auto room_of_step = [&](int step) {
            const auto& p = scenario.true_poses[static_cast<std::size_t>(step)];
            return scenario.room_of_cell[static_cast<std::size_t>(p.y * scenario.world.width + p.x)];
        };
        // purity of place clusters against rooms
        std::map<int, std::map<int, int>> cluster_rooms;
        for (int u = 0; u < n_utter; ++u)
            cluster_rooms[model.place_of_step[static_cast<std::size_t>(u)]]
                         [room_of_step(utterance_steps[static_cast<std::size_t>(u)])] += 1;
        int agree = 0;
        for (const auto& [j, hist] : cluster_rooms) {
            int best = 0;
            for (const auto& [r, c] : hist) best = std::max(best, c);
            agree += best;
        }
        model.metrics.purity = n_utter > 0 ? static_cast<double>(agree) / n_utter : 0.0;

        // word recovery per room: mixture of its clusters' category word dists
        const int n_rooms = static_cast<int>(scenario.room_word.size());
        int correct = 0, scored = 0;
        for (int r = 0; r < n_rooms; ++r) {
            std::vector<double> mix(static_cast<std::size_t>(scenario.vocab_size), 0.0);
            bool any = false;
            for (const auto& [j, hist] : cluster_rooms) {
                int best_room = -1, best = -1;
                for (const auto& [room, c] : hist)
                    if (c > best) {
                        best = c;
                        best_room = room;
                    }
                if (best_room != r) continue;
                any = true;
                const auto& dist = model.word_dist[static_cast<std::size_t>(
                    model.category_of_place[static_cast<std::size_t>(j)])];
                for (int w = 0; w < scenario.vocab_size; ++w)
                    mix[static_cast<std::size_t>(w)] +=
                        model.place_weight[static_cast<std::size_t>(j)] * dist[static_cast<std::size_t>(w)];
            }
            if (!any) continue;
            ++scored;
            const int argw = static_cast<int>(std::max_element(mix.begin(), mix.end()) - mix.begin());
            if (argw == scenario.room_word[static_cast<std::size_t>(r)]) ++correct;
        }
        model.metrics.word_accuracy = scored > 0 ? static_cast<double>(correct) / scored : 0.0;
    }
    return model;
}

SpcoNaviResult spconavi_lite(const SpcoLiteModel& model, int goal_word, int start_cell) {
    const auto place_post = model.place_posterior(goal_word);
    const auto& world = model.world;
    const int n_cells = world.width * world.height;
    if (start_cell < 0 || start_cell >= n_cells)
        throw std::invalid_argument("spconavi_lite: start cell out of range");

    // free cells under the estimated map
    std::vector<int> cell_of_state;
    std::vector<int> state_of_cell(static_cast<std::size_t>(n_cells), -1);
    for (int y = 0; y < world.height; ++y)
        for (int x = 0; x < world.width; ++x) {
            const int cell = y * world.width + x;
            if (model.map(y, x) < 0.5) {
                state_of_cell[static_cast<std::size_t>(cell)] =
                    static_cast<int>(cell_of_state.size());
                cell_of_state.push_back(cell);
            }
        }
    const int s_count = static_cast<int>(cell_of_state.size());
    if (state_of_cell[static_cast<std::size_t>(start_cell)] < 0)
        throw std::invalid_argument("spconavi_lite: start cell is occupied in the estimated map");

    SpcoNaviResult result;
    result.goal_log_reward.assign(static_cast<std::size_t>(s_count), 0.0);
    std::vector<GaussianParams> place_gaussians;
    for (std::size_t j = 0; j < model.place_mean.size(); ++j)
        place_gaussians.emplace_back(model.place_mean[j], model.place_cov[j]);
    for (int s = 0; s < s_count; ++s) {
        const int cell = cell_of_state[static_cast<std::size_t>(s)];
        const Eigen::Vector2d center(cell % world.width + 0.5, cell / world.width + 0.5);
        std::vector<double> terms;
        for (std::size_t j = 0; j < place_gaussians.size(); ++j)
            if (place_post[j] > 0.0)
                terms.push_back(std::log(place_post[j]) + place_gaussians[j].log_density(center));
        result.goal_log_reward[static_cast<std::size_t>(s)] = log_sum_exp(terms);
    }

    // deterministic 4-neighbour moves on the free-cell graph
    const std::array<std::pair<int, int>, 4> moves{{{0, -1}, {1, 0}, {0, 1}, {-1, 0}}};
    std::vector<Eigen::MatrixXd> trans(4, Eigen::MatrixXd::Zero(s_count, s_count));
    for (int s = 0; s < s_count; ++s) {
        const int cell = cell_of_state[static_cast<std::size_t>(s)];
        const int x = cell % world.width, y = cell / world.width;
        for (int a = 0; a < 4; ++a) {
            const int nx = x + moves[static_cast<std::size_t>(a)].first;
            const int ny = y + moves[static_cast<std::size_t>(a)].second;
            int target = s;
            if (nx >= 0 && nx < world.width && ny >= 0 && ny < world.height) {
                const int ns = state_of_cell[static_cast<std::size_t>(ny * world.width + nx)];
                if (ns >= 0) target = ns;
            }
            trans[static_cast<std::size_t>(a)](s, target) = 1.0;
        }
    }
    planning::TabularMdp mdp(s_count, 4, std::move(trans), Eigen::MatrixXd::Zero(s_count, 4),
                             std::nullopt, 0.95, model.planner_temperature);
    result.plan = planning::plan_to_goal(
        mdp, result.goal_log_reward, state_of_cell[static_cast<std::size_t>(start_cell)]);
    for (int s : result.plan.states)
        result.path_cells.push_back(cell_of_state[static_cast<std::size_t>(s)]);
    return result;
}

}  // namespace mpgm::compositions
