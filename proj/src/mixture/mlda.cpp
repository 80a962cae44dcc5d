#include "mpgm/mixture/mlda.hpp"

#include "mpgm/core/logspace.hpp"

#include <cmath>
#include <stdexcept>

namespace mpgm::mixture {

MldaConfig::MldaConfig(int m, int k, std::vector<int> vocab, double a, std::vector<double> b)
    : n_modalities(m), n_topics(k), vocab_sizes(std::move(vocab)), alpha(a), beta(std::move(b)) {
    if (m < 1 || k < 1) throw std::invalid_argument("MldaConfig: need M >= 1 and K >= 1");
    if (static_cast<int>(vocab_sizes.size()) != m)
        throw std::invalid_argument("MldaConfig: one vocab size per modality");
    for (int v : vocab_sizes)
        if (v < 1) throw std::invalid_argument("MldaConfig: vocab sizes must be >= 1");
    if (!(alpha > 0.0)) throw std::invalid_argument("MldaConfig: alpha must be > 0");
    if (static_cast<int>(beta.size()) != m)
        throw std::invalid_argument("MldaConfig: one beta per modality");
    for (double x : beta)
        if (!(x > 0.0)) throw std::invalid_argument("MldaConfig: beta must be > 0");
}

MldaState::MldaState(MldaConfig config, MldaCorpus corpus, RngStream& rng)
    : config_(std::move(config)), corpus_(std::move(corpus)) {
    const int d = n_objects();
    const int k = config_.n_topics;
    doc_topic_ = Eigen::MatrixXd::Zero(d, k);
    for (int m = 0; m < config_.n_modalities; ++m) {
        topic_word_.push_back(Eigen::MatrixXd::Zero(k, config_.vocab_sizes[static_cast<std::size_t>(m)]));
        topic_totals_.push_back(Eigen::VectorXd::Zero(k));
    }
    z_.resize(static_cast<std::size_t>(d));
    for (int o = 0; o < d; ++o) {
        const auto& obj = corpus_[static_cast<std::size_t>(o)];
        if (static_cast<int>(obj.tokens.size()) != config_.n_modalities)
            throw std::invalid_argument("MldaState: object modality count mismatch");
        z_[static_cast<std::size_t>(o)].resize(obj.tokens.size());
        for (int m = 0; m < config_.n_modalities; ++m) {
            for (int w : obj.tokens[static_cast<std::size_t>(m)])
                if (w < 0 || w >= config_.vocab_sizes[static_cast<std::size_t>(m)])
                    throw std::domain_error("MldaState: token id exceeds modality vocabulary");
            z_[static_cast<std::size_t>(o)][static_cast<std::size_t>(m)].assign(
                obj.tokens[static_cast<std::size_t>(m)].size(), 0);
            for (std::size_t i = 0; i < obj.tokens[static_cast<std::size_t>(m)].size(); ++i) {
                const int topic = static_cast<int>(rng.uniform_int(k));
                z_[static_cast<std::size_t>(o)][static_cast<std::size_t>(m)][i] = topic;
                add_site({o, m, static_cast<int>(i)});
            }
        }
    }
}

int MldaState::assignment(const MldaSite& s) const {
    return z_[static_cast<std::size_t>(s.object)][static_cast<std::size_t>(s.modality)]
             [static_cast<std::size_t>(s.token)];
}

void MldaState::remove_site(const MldaSite& s) {
    const int t = assignment(s);
    const int w = corpus_[static_cast<std::size_t>(s.object)]
                      .tokens[static_cast<std::size_t>(s.modality)][static_cast<std::size_t>(s.token)];
    doc_topic_(s.object, t) -= 1.0;
    topic_word_[static_cast<std::size_t>(s.modality)](t, w) -= 1.0;
    topic_totals_[static_cast<std::size_t>(s.modality)](t) -= 1.0;
}

void MldaState::add_site(const MldaSite& s) {
    const int t = assignment(s);
    const int w = corpus_[static_cast<std::size_t>(s.object)]
                      .tokens[static_cast<std::size_t>(s.modality)][static_cast<std::size_t>(s.token)];
    doc_topic_(s.object, t) += 1.0;
    topic_word_[static_cast<std::size_t>(s.modality)](t, w) += 1.0;
    topic_totals_[static_cast<std::size_t>(s.modality)](t) += 1.0;
}

std::vector<double> MldaState::conditional_log_weights(const MldaSite& s, bool include_message) const {
    const int k = config_.n_topics;
    const int cur = assignment(s);
    const int w = corpus_[static_cast<std::size_t>(s.object)]
                      .tokens[static_cast<std::size_t>(s.modality)][static_cast<std::size_t>(s.token)];
    const double beta = config_.beta[static_cast<std::size_t>(s.modality)];
    const double vbeta = beta * config_.vocab_sizes[static_cast<std::size_t>(s.modality)];
    std::vector<double> logw(static_cast<std::size_t>(k));
    for (int t = 0; t < k; ++t) {
        const double held = (t == cur) ? 1.0 : 0.0;
        const double nd = doc_topic_(s.object, t) - held;
        const double nw = topic_word_[static_cast<std::size_t>(s.modality)](t, w) - held;
        const double nt = topic_totals_[static_cast<std::size_t>(s.modality)](t) - held;
        logw[static_cast<std::size_t>(t)] =
            std::log(nd + config_.alpha) + std::log(nw + beta) - std::log(nt + vbeta);
    }
    if (include_message) {
        auto it = messages_.find(s);
        if (it != messages_.end())
            for (int t = 0; t < k; ++t)
                logw[static_cast<std::size_t>(t)] += it->second[static_cast<std::size_t>(t)];
    }
    return logw;
}

void MldaState::gibbs_sweep(RngStream& rng) {
    for (int o = 0; o < n_objects(); ++o)
        for (int m = 0; m < config_.n_modalities; ++m)
            for (std::size_t i = 0; i < z_[static_cast<std::size_t>(o)][static_cast<std::size_t>(m)].size(); ++i) {
                const MldaSite s{o, m, static_cast<int>(i)};
                auto cit = clamped_.find(s);
                if (cit != clamped_.end() && cit->second) continue;
                const auto logw = conditional_log_weights(s, /*include_message=*/true);
                set_assignment(s, static_cast<int>(rng.categorical_logits(logw)));
            }
}

void MldaState::set_assignment(const MldaSite& s, int topic) {
    if (topic < 0 || topic >= config_.n_topics)
        throw std::invalid_argument("set_assignment: topic out of range");
    if (assignment(s) == topic) return;
    remove_site(s);
    z_[static_cast<std::size_t>(s.object)][static_cast<std::size_t>(s.modality)]
      [static_cast<std::size_t>(s.token)] = topic;
    add_site(s);
}

void MldaState::set_clamped(const MldaSite& s, bool clamped) { clamped_[s] = clamped; }

CategoricalDist MldaState::shared_belief(const MldaSite& s) const {
    return CategoricalDist::from_log_weights(conditional_log_weights(s, /*include_message=*/true));
}

CategoricalDist MldaState::local_factor(const MldaSite& s) const {
    return CategoricalDist::from_log_weights(conditional_log_weights(s, /*include_message=*/false));
}

void MldaState::install_message(const MldaSite& s, const CategoricalDist& message) {
    if (static_cast<int>(message.size()) != config_.n_topics)
        throw std::invalid_argument("install_message: support size mismatch");
    std::vector<double> logm(message.size());
    int point = -1;
    for (std::size_t t = 0; t < message.size(); ++t) {
        logm[t] = message.log_density(t);
        if (message[t] == 1.0) point = static_cast<int>(t);
    }
    messages_[s] = std::move(logm);
    if (point >= 0) set_assignment(s, point);
}

std::vector<double> MldaState::theta(int object) const {
    const int k = config_.n_topics;
    std::vector<double> th(static_cast<std::size_t>(k));
    double total = 0.0;
    for (int t = 0; t < k; ++t) total += doc_topic_(object, t) + config_.alpha;
    for (int t = 0; t < k; ++t)
        th[static_cast<std::size_t>(t)] = (doc_topic_(object, t) + config_.alpha) / total;
    return th;
}

std::vector<double> MldaState::phi(int modality, int topic) const {
    const int v = config_.vocab_sizes[static_cast<std::size_t>(modality)];
    const double beta = config_.beta[static_cast<std::size_t>(modality)];
    std::vector<double> ph(static_cast<std::size_t>(v));
    const double denom = topic_totals_[static_cast<std::size_t>(modality)](topic) + beta * v;
    for (int w = 0; w < v; ++w)
        ph[static_cast<std::size_t>(w)] =
            (topic_word_[static_cast<std::size_t>(modality)](topic, w) + beta) / denom;
    return ph;
}

double MldaState::log_joint() const {
    const int k = config_.n_topics;
    double lp = 0.0;
    // document-topic Polya terms
    for (int o = 0; o < n_objects(); ++o) {
        double n = 0.0;
        for (int t = 0; t < k; ++t) {
            lp += std::lgamma(doc_topic_(o, t) + config_.alpha) - std::lgamma(config_.alpha);
            n += doc_topic_(o, t);
        }
        lp += std::lgamma(k * config_.alpha) - std::lgamma(k * config_.alpha + n);
    }
    // topic-word Polya terms per modality
    for (int m = 0; m < config_.n_modalities; ++m) {
        const int v = config_.vocab_sizes[static_cast<std::size_t>(m)];
        const double beta = config_.beta[static_cast<std::size_t>(m)];
        for (int t = 0; t < k; ++t) {
            for (int w = 0; w < v; ++w)
                lp += std::lgamma(topic_word_[static_cast<std::size_t>(m)](t, w) + beta) -
                      std::lgamma(beta);
            lp += std::lgamma(v * beta) -
                  std::lgamma(v * beta + topic_totals_[static_cast<std::size_t>(m)](t));
        }
    }
    return lp;
}

bool MldaState::caches_consistent() const {
    Eigen::MatrixXd doc = Eigen::MatrixXd::Zero(n_objects(), config_.n_topics);
    std::vector<Eigen::MatrixXd> tw;
    std::vector<Eigen::VectorXd> tt;
    for (int m = 0; m < config_.n_modalities; ++m) {
        tw.push_back(Eigen::MatrixXd::Zero(config_.n_topics,
                                           config_.vocab_sizes[static_cast<std::size_t>(m)]));
        tt.push_back(Eigen::VectorXd::Zero(config_.n_topics));
    }
    for (int o = 0; o < n_objects(); ++o)
        for (int m = 0; m < config_.n_modalities; ++m)
            for (std::size_t i = 0; i < z_[static_cast<std::size_t>(o)][static_cast<std::size_t>(m)].size(); ++i) {
                const int t = z_[static_cast<std::size_t>(o)][static_cast<std::size_t>(m)][i];
                const int w = corpus_[static_cast<std::size_t>(o)].tokens[static_cast<std::size_t>(m)][i];
                doc(o, t) += 1.0;
                tw[static_cast<std::size_t>(m)](t, w) += 1.0;
                tt[static_cast<std::size_t>(m)](t) += 1.0;
            }
    if (doc != doc_topic_) return false;
    for (int m = 0; m < config_.n_modalities; ++m)
        if (tw[static_cast<std::size_t>(m)] != topic_word_[static_cast<std::size_t>(m)] ||
            tt[static_cast<std::size_t>(m)] != topic_totals_[static_cast<std::size_t>(m)])
            return false;
    return true;
}

std::vector<double> MldaState::predict_modality(const std::vector<std::vector<int>>& observed,
                                                int missing_modality, RngStream& rng) const {
    if (static_cast<int>(observed.size()) != config_.n_modalities)
        throw std::invalid_argument("predict_modality: modality count mismatch");
    if (missing_modality < 0 || missing_modality >= config_.n_modalities)
        throw std::invalid_argument("predict_modality: bad modality index");
    if (!observed[static_cast<std::size_t>(missing_modality)].empty())
        throw std::invalid_argument("predict_modality: missing modality must have no tokens");
    std::vector<std::pair<int, int>> sites;  // (modality, word)
    for (int m = 0; m < config_.n_modalities; ++m) {
        for (int w : observed[static_cast<std::size_t>(m)]) {
            if (w < 0 || w >= config_.vocab_sizes[static_cast<std::size_t>(m)])
                throw std::domain_error("predict_modality: token id exceeds vocabulary");
            sites.emplace_back(m, w);
        }
    }
    if (sites.empty()) throw std::invalid_argument("predict_modality: all modalities missing");

    const int k = config_.n_topics;
    const int n = static_cast<int>(sites.size());
    const int vm = config_.vocab_sizes[static_cast<std::size_t>(missing_modality)];

    // trained word distributions act as point estimates for the new object
    std::vector<std::vector<double>> log_phi(static_cast<std::size_t>(config_.n_modalities));
    for (int m = 0; m < config_.n_modalities; ++m) {
        log_phi[static_cast<std::size_t>(m)].resize(
            static_cast<std::size_t>(k * config_.vocab_sizes[static_cast<std::size_t>(m)]));
        for (int t = 0; t < k; ++t) {
            const auto ph = phi(m, t);
            for (int w = 0; w < config_.vocab_sizes[static_cast<std::size_t>(m)]; ++w)
                log_phi[static_cast<std::size_t>(m)]
                       [static_cast<std::size_t>(t * config_.vocab_sizes[static_cast<std::size_t>(m)] + w)] =
                           std::log(ph[static_cast<std::size_t>(w)]);
        }
    }
    auto lphi = [&](int m, int t, int w) {
        return log_phi[static_cast<std::size_t>(m)]
                      [static_cast<std::size_t>(t * config_.vocab_sizes[static_cast<std::size_t>(m)] + w)];
    };

    std::vector<double> predictive(static_cast<std::size_t>(vm), 0.0);
    const double enum_cost = std::pow(static_cast<double>(k), n);
    if (enum_cost <= 65536.0) {
        // exact: enumerate topic assignments of the new object's tokens,
        // integrate theta analytically (Polya), average the fold-in predictive
        std::vector<int> zc(static_cast<std::size_t>(n), 0);
        std::vector<double> log_post;
        std::vector<std::vector<double>> per_config_pred;
        for (;;) {
            std::vector<int> counts(static_cast<std::size_t>(k), 0);
            double lw = 0.0;
            for (int i = 0; i < n; ++i) {
                counts[static_cast<std::size_t>(zc[static_cast<std::size_t>(i)])] += 1;
                lw += lphi(sites[static_cast<std::size_t>(i)].first, zc[static_cast<std::size_t>(i)],
                           sites[static_cast<std::size_t>(i)].second);
            }
            for (int t = 0; t < k; ++t)
                lw += std::lgamma(config_.alpha + counts[static_cast<std::size_t>(t)]) -
                      std::lgamma(config_.alpha);
            log_post.push_back(lw);
            std::vector<double> pred(static_cast<std::size_t>(vm), 0.0);
            for (int t = 0; t < k; ++t) {
                const double th = (counts[static_cast<std::size_t>(t)] + config_.alpha) /
                                  (n + k * config_.alpha);
                const auto ph = phi(missing_modality, t);
                for (int w = 0; w < vm; ++w)
                    pred[static_cast<std::size_t>(w)] += th * ph[static_cast<std::size_t>(w)];
            }
            per_config_pred.push_back(std::move(pred));
            int pos = n - 1;
            while (pos >= 0 && ++zc[static_cast<std::size_t>(pos)] == k) {
                zc[static_cast<std::size_t>(pos)] = 0;
                --pos;
            }
            if (pos < 0) break;
        }
        const auto post = normalized_from_log(log_post);
        for (std::size_t c = 0; c < post.size(); ++c)
            for (int w = 0; w < vm; ++w)
                predictive[static_cast<std::size_t>(w)] += post[c] * per_config_pred[c][static_cast<std::size_t>(w)];
        return predictive;
    }

    // Gibbs fold-in with Rao-Blackwellized averaging
    constexpr int kBurn = 200, kKeep = 800;
    std::vector<int> zc(static_cast<std::size_t>(n));
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < n; ++i) {
        zc[static_cast<std::size_t>(i)] = static_cast<int>(rng.uniform_int(k));
        counts[static_cast<std::size_t>(zc[static_cast<std::size_t>(i)])] += 1;
    }
    std::vector<double> logw(static_cast<std::size_t>(k));
    int kept = 0;
    for (int sweep = 0; sweep < kBurn + kKeep; ++sweep) {
        for (int i = 0; i < n; ++i) {
            counts[static_cast<std::size_t>(zc[static_cast<std::size_t>(i)])] -= 1;
            for (int t = 0; t < k; ++t)
                logw[static_cast<std::size_t>(t)] =
                    std::log(counts[static_cast<std::size_t>(t)] + config_.alpha) +
                    lphi(sites[static_cast<std::size_t>(i)].first, t, sites[static_cast<std::size_t>(i)].second);
            zc[static_cast<std::size_t>(i)] = static_cast<int>(rng.categorical_logits(logw));
            counts[static_cast<std::size_t>(zc[static_cast<std::size_t>(i)])] += 1;
        }
        if (sweep >= kBurn) {
            ++kept;
            for (int t = 0; t < k; ++t) {
                const double th = (counts[static_cast<std::size_t>(t)] + config_.alpha) /
                                  (n + k * config_.alpha);
                const auto ph = phi(missing_modality, t);
                for (int w = 0; w < vm; ++w)
                    predictive[static_cast<std::size_t>(w)] += th * ph[static_cast<std::size_t>(w)];
            }
        }
    }
    for (double& p : predictive) p /= kept;
    return predictive;
}

}  // namespace mpgm::mixture
