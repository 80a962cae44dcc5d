#include "mpgm/oracle/enumerate.hpp"

#include "mpgm/oracle/fixture_models.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mpgm::oracle {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

std::vector<double> EnumerablePosterior::site_marginal(std::size_t site) const {
    std::vector<double> m(static_cast<std::size_t>(arity.at(site)), 0.0);
    for (std::size_t c = 0; c < support.size(); ++c)
        m[static_cast<std::size_t>(support[c][site])] += probs[c];
    return m;
}

double EnumerablePosterior::prob_of(const std::vector<int>& config) const {
    for (std::size_t c = 0; c < support.size(); ++c)
        if (support[c] == config) return probs[c];
    return 0.0;
}

EnumerablePosterior enumerate_posterior(
    const std::function<double(const std::vector<int>&)>& log_joint,
    const std::vector<int>& arity) {
    double count = 1.0;
    for (int a : arity) {
        if (a < 1) throw std::invalid_argument("enumerate_posterior: arity entries must be >= 1");
        count *= a;
    }
    if (count > 1e6) throw std::invalid_argument("enumerate_posterior: configuration space too large");

    EnumerablePosterior post;
    post.arity = arity;
    std::vector<int> config(arity.size(), 0);
    std::vector<double> logw;
    for (;;) {
        post.support.push_back(config);
        logw.push_back(log_joint(config));
        int pos = static_cast<int>(arity.size()) - 1;
        while (pos >= 0 && ++config[static_cast<std::size_t>(pos)] == arity[static_cast<std::size_t>(pos)]) {
            config[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }

    double mx = kNegInf;
    for (double w : logw) mx = std::max(mx, w);
    if (mx == kNegInf) throw std::runtime_error("enumerate_posterior: all configurations have zero mass");
    double z = 0.0;
    post.probs.resize(logw.size());
    for (std::size_t i = 0; i < logw.size(); ++i) {
        post.probs[i] = std::exp(logw[i] - mx);
        z += post.probs[i];
    }
    for (double& p : post.probs) p /= z;
    return post;
}

// ---------------------------------------------------------------------------
// fixture log-joints (naive on purpose: counts rebuilt per call, plain loops)

double GmmLabelFixture::log_joint(const std::vector<int>& assignment) const {
    const int n = n_data();
    const int k = n_components();
    if (static_cast<int>(assignment.size()) != n)
        throw std::invalid_argument("GmmLabelFixture: assignment length mismatch");
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    double lp = 0.0;
    for (int i = 0; i < n; ++i) {
        const int z = assignment[static_cast<std::size_t>(i)];
        if (z < 0 || z >= k) throw std::invalid_argument("GmmLabelFixture: bad assignment value");
        counts[static_cast<std::size_t>(z)] += 1;
        lp += components[static_cast<std::size_t>(z)].log_density(data.row(i).transpose());
        if (!labels.empty() && labels[static_cast<std::size_t>(i)] >= 0) {
            const double c = confusion(z, labels[static_cast<std::size_t>(i)]);
            if (c <= 0.0) return kNegInf;
            lp += std::log(c);
        }
    }
    lp += std::lgamma(k * weight_alpha) - std::lgamma(k * weight_alpha + n);
    for (int c = 0; c < k; ++c)
        lp += std::lgamma(weight_alpha + counts[static_cast<std::size_t>(c)]) -
              std::lgamma(weight_alpha);
    return lp;
}

std::size_t MldaLabelFixture::n_sites() const {
    std::size_t n = 0;
    for (const auto& obj : tokens)
        for (const auto& mod : obj) n += mod.size();
    return n;
}

double MldaLabelFixture::log_joint(const std::vector<int>& flat) const {
    if (flat.size() != n_sites()) throw std::invalid_argument("MldaLabelFixture: assignment length mismatch");
    const int d = static_cast<int>(tokens.size());
    const int k = n_topics;
    std::vector<std::vector<int>> doc_topic(static_cast<std::size_t>(d),
                                            std::vector<int>(static_cast<std::size_t>(k), 0));
    std::vector<std::vector<std::vector<int>>> topic_word;
    for (int m = 0; m < n_modalities; ++m)
        topic_word.emplace_back(static_cast<std::size_t>(k),
                                std::vector<int>(static_cast<std::size_t>(vocab_sizes[static_cast<std::size_t>(m)]), 0));

    double lp = 0.0;
    std::size_t pos = 0;
    for (int o = 0; o < d; ++o) {
        for (int m = 0; m < n_modalities; ++m) {
            for (std::size_t i = 0; i < tokens[static_cast<std::size_t>(o)][static_cast<std::size_t>(m)].size(); ++i) {
                const int z = flat[pos++];
                if (z < 0 || z >= k) throw std::invalid_argument("MldaLabelFixture: bad topic value");
                const int w = tokens[static_cast<std::size_t>(o)][static_cast<std::size_t>(m)][i];
                doc_topic[static_cast<std::size_t>(o)][static_cast<std::size_t>(z)] += 1;
                topic_word[static_cast<std::size_t>(m)][static_cast<std::size_t>(z)][static_cast<std::size_t>(w)] += 1;
                if (m == label_modality && i == 0 && !labels.empty() &&
                    labels[static_cast<std::size_t>(o)] >= 0) {
                    const double c = confusion(z, labels[static_cast<std::size_t>(o)]);
                    if (c <= 0.0) return kNegInf;
                    lp += std::log(c);
                }
            }
        }
    }
    for (int o = 0; o < d; ++o) {
        int n = 0;
        for (int t = 0; t < k; ++t) {
            lp += std::lgamma(alpha + doc_topic[static_cast<std::size_t>(o)][static_cast<std::size_t>(t)]) -
                  std::lgamma(alpha);
            n += doc_topic[static_cast<std::size_t>(o)][static_cast<std::size_t>(t)];
        }
        lp += std::lgamma(k * alpha) - std::lgamma(k * alpha + n);
    }
    for (int m = 0; m < n_modalities; ++m) {
        const int v = vocab_sizes[static_cast<std::size_t>(m)];
        for (int t = 0; t < k; ++t) {
            int n = 0;
            for (int w = 0; w < v; ++w) {
                lp += std::lgamma(beta[static_cast<std::size_t>(m)] +
                                  topic_word[static_cast<std::size_t>(m)][static_cast<std::size_t>(t)][static_cast<std::size_t>(w)]) -
                      std::lgamma(beta[static_cast<std::size_t>(m)]);
                n += topic_word[static_cast<std::size_t>(m)][static_cast<std::size_t>(t)][static_cast<std::size_t>(w)];
            }
            lp += std::lgamma(v * beta[static_cast<std::size_t>(m)]) -
                  std::lgamma(v * beta[static_cast<std::size_t>(m)] + n);
        }
    }
    return lp;
}

double HmmLabelFixture::log_joint(const std::vector<int>& path) const {
    const int t_len = static_cast<int>(obs.size());
    if (static_cast<int>(path.size()) != t_len)
        throw std::invalid_argument("HmmLabelFixture: path length mismatch");
    double lp = 0.0;
    for (int t = 0; t < t_len; ++t) {
        const int s = path[static_cast<std::size_t>(t)];
        if (s < 0 || s >= params.n_states())
            throw std::invalid_argument("HmmLabelFixture: bad state value");
        double p = (t == 0) ? params.initial[static_cast<std::size_t>(s)]
                            : params.transition(path[static_cast<std::size_t>(t - 1)], s);
        if (p <= 0.0) return kNegInf;
        lp += std::log(p);
        p = params.emission(s, obs[static_cast<std::size_t>(t)]);
        if (p <= 0.0) return kNegInf;
        lp += std::log(p);
        if (!labels.empty() && labels[static_cast<std::size_t>(t)] >= 0) {
            p = confusion(s, labels[static_cast<std::size_t>(t)]);
            if (p <= 0.0) return kNegInf;
            lp += std::log(p);
        }
    }
    return lp;
}

}  // namespace mpgm::oracle
